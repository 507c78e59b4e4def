"""Epsilon-greedy betting agent with quadratic-loss rewards.

The agent picks an arm ``k`` in ``{0, ..., N}``, bets ``B = k/N`` on a binary
event and receives ``-(B - E)**2``. Greedy choices maximise the *average*
reward per arm; arms never pulled count as average 0 (optimistic, since all
rewards are <= 0). Ties are broken uniformly at random.

All randomness for an episode is drawn up front from ``default_rng(seed)`` in a
fixed order, so the compiled kernel and the pure-Python twin agree bit for bit.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True)
class AgentConfig:
    N: int = 50
    epsilon: float = 0.5
    steps: int = 300_000
    seed: int = 0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def with_seed(self, seed):
        return AgentConfig(self.N, self.epsilon, self.steps, int(seed))

    @property
    def grid(self):
        return np.arange(self.N + 1) / self.N


@dataclass
class BanditState:
    totals: np.ndarray
    counts: np.ndarray

    @classmethod
    def fresh(cls, N):
        return cls(np.zeros(N + 1), np.zeros(N + 1, dtype=np.int64))

    @property
    def n_arms(self):
        return len(self.totals)

    def averages(self):
        """Average reward per arm; unpulled arms read 0."""
        out = np.zeros(self.n_arms)
        pulled = self.counts > 0
        out[pulled] = self.totals[pulled] / self.counts[pulled]
        return out


@dataclass
class LearningEpisodeResult:
    best_bet: float
    best_arm: int
    state: BanditState
    trajectory: np.ndarray = field(default=None, repr=False)


def reward(k, occurred, N, scale=1.0):
    """Quadratic-loss reward for betting ``k/N`` on an event."""
    if not 0 <= k <= N:
        raise ValueError(f"arm {k} out of range 0..{N}")
    target = 1.0 if occurred else 0.0
    return -scale * (k / N - target) ** 2


def reward_tables(N, scale=1.0):
    """Per-arm rewards when the event occurs / does not occur."""
    B = np.arange(N + 1) / N
    return -scale * (B - 1.0) ** 2, -scale * B ** 2


def greedy_arm(averages, rng):
    best = np.flatnonzero(averages == averages.max())
    if best.size == 1:
        return int(best[0])
    return int(best[rng.integers(best.size)])


def select_arm(state, epsilon, rng):
    """One epsilon-greedy decision (single-step reference implementation)."""
    if rng.random() < epsilon:
        return int(rng.integers(state.n_arms))
    return greedy_arm(state.averages(), rng)


def draw_streams(config, rng):
    """Pre-draw the exploration flags, exploration arms and tie-break uniforms."""
    S = config.steps
    explore = (rng.random(S) < config.epsilon).view(np.uint8)
    explore_arm = rng.integers(0, config.N + 1, S, dtype=np.int32)
    tie_u = rng.random(S)
    return explore, explore_arm, tie_u


def run_learning_episode(dataset, config, record=False, reward_scale=1.0, backend=None):
    """Train one agent on the first ``config.steps`` outcomes of ``dataset``.

    ``backend`` overrides the selected kernel (used by tests and benchmarks).
    """
    dataset = np.asarray(dataset)
    if dataset.size == 0:
        raise ValueError("empty dataset")
    if dataset.size < config.steps:
        raise ValueError(f"dataset has {dataset.size} outcomes, need {config.steps}")
    data = np.ascontiguousarray(dataset[: config.steps] != 0).view(np.uint8)

    rng = np.random.default_rng(config.seed)
    explore, explore_arm, tie_u = draw_streams(config, rng)
    hit, miss = reward_tables(config.N, reward_scale)
    state = BanditState.fresh(config.N)
    trajectory = np.zeros(config.steps if record else 0, dtype=np.int32)

    run = backend or kernels.run_bandit
    run(data, explore, explore_arm, tie_u, hit, miss, state.totals, state.counts, trajectory)

    arm = greedy_arm(state.averages(), rng)
    return LearningEpisodeResult(arm / config.N, arm, state, trajectory if record else None)


def expected_loss(p, B):
    """Expected quadratic loss ``p (1-B)^2 + (1-p) B^2``; minimal at ``B = p``."""
    p = np.asarray(p, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any((p < 0) | (p > 1)) or np.any((B < 0) | (B > 1)):
        raise ValueError("p and B must lie in [0, 1]")
    out = p * (1.0 - B) ** 2 + (1.0 - p) * B ** 2
    return float(out) if out.ndim == 0 else out
