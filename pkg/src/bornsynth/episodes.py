"""Experimental episodes: simulated data at Born-rule probabilities fed to agents.

An experimental episode fixes a state and a measurement and bundles one
learning episode per tracked outcome:

* experiment 1: the measurement itself on the state (``q``),
* experiment 2: the SIC measurement on the state (``p``),
* experiment 3: the measurement on each SIC state (``r``).

Each learning episode is an independent task whose seeds derive from the
master seed and the task's indices, so campaigns are reproducible and
independent of worker count.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import qubit
from .agent import AgentConfig, run_learning_episode
from .seeding import (TAG_AGENT, TAG_DATA, TAG_LEARN, TAG_SHARED, TAG_STATES,
                      derive_seed, parallel_map)

EXP_FACTUAL = 1
EXP_SIC = 2
EXP_CONDITIONAL = 3


def generate_dataset(p_true, S, rng):
    """``S`` i.i.d. Bernoulli(``p_true``) outcomes as uint8."""
    if not 0.0 <= p_true <= 1.0:
        raise ValueError(f"probability {p_true!r} outside [0, 1]")
    return (rng.random(int(S)) < p_true).view(np.uint8)


@dataclass(frozen=True)
class ExperimentalEpisodeSpec:
    rho: qubit.DensityOperator
    povm: qubit.Povm
    sic: qubit.SicSet
    config: AgentConfig = AgentConfig()


@dataclass(frozen=True)
class PlanEntry:
    experiment: int
    j: Optional[int]  # outcome of the measurement (experiments 1 and 3)
    i: Optional[int]  # SIC index (experiments 2 and 3)
    probability: float


def learning_episode_plan(spec):
    """One entry per learning episode: ``M + 4 + 4M`` in total."""
    plan = [PlanEntry(EXP_FACTUAL, j, None, qubit.born_probability(spec.rho, e))
            for j, e in enumerate(spec.povm)]
    plan += [PlanEntry(EXP_SIC, None, i, qubit.born_probability(spec.rho, e))
             for i, e in enumerate(spec.sic.povm)]
    plan += [PlanEntry(EXP_CONDITIONAL, j, i, qubit.born_probability(pi, e))
             for j, e in enumerate(spec.povm)
             for i, pi in enumerate(spec.sic.projectors)]
    return plan


@dataclass
class EpisodeObservation:
    q: np.ndarray
    p: np.ndarray
    r: np.ndarray
    true_q: np.ndarray
    true_p: np.ndarray
    true_r: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def exact(cls, q, p, r):
        """Observation whose learned values equal the true probabilities."""
        return cls(q.copy(), p.copy(), r.copy(), q.copy(), p.copy(), r.copy())

    def normalized(self):
        """Copy with ``q``, ``p`` and each column ``r(.|i)`` rescaled to sum to 1."""
        def norm(v, axis=None):
            s = v.sum(axis=axis, keepdims=axis is not None)
            return np.divide(v, s, out=v.astype(float).copy(), where=s > 0)
        return EpisodeObservation(norm(self.q), norm(self.p), norm(self.r, axis=0),
                                  self.true_q, self.true_p, self.true_r, dict(self.meta))


def assemble(plan, bets, M, meta=None):
    q, p, r = np.zeros(M), np.zeros(4), np.zeros((M, 4))
    tq, tp, tr = np.zeros(M), np.zeros(4), np.zeros((M, 4))
    for e, b in zip(plan, bets):
        if e.experiment == EXP_FACTUAL:
            q[e.j], tq[e.j] = b, e.probability
        elif e.experiment == EXP_SIC:
            p[e.i], tp[e.i] = b, e.probability
        else:
            r[e.j, e.i], tr[e.j, e.i] = b, e.probability
    return EpisodeObservation(q, p, r, tq, tp, tr, meta or {})


# -- learners: map (true probability, task seed) to a bet ---------------------------

def bandit_learner(config):
    """Generate a fresh dataset and train an epsilon-greedy agent on it."""
    def learn(probability, seed):
        data = generate_dataset(probability, config.steps,
                                np.random.default_rng(derive_seed(seed, TAG_DATA)))
        res = run_learning_episode(data, config.with_seed(derive_seed(seed, TAG_AGENT)))
        return res.best_bet
    return learn


def exact_learner(N=None):
    """Oracle stub: the true probability, rounded to the bet grid if ``N`` is given."""
    def learn(probability, seed):
        return probability if N is None else round(probability * N) / N
    return learn


def run_experimental_episode(spec, seed, learner: Optional[Callable] = None, workers=1,
                             shared_sic_stream=False):
    """Run all learning episodes of one experimental episode.

    ``seed`` may be an int or a ``numpy.random.Generator`` (a 64-bit seed is
    then drawn from it). ``shared_sic_stream`` feeds the four experiment-2
    agents from one categorical outcome stream; it needs the bandit learner.
    """
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(2 ** 63))
    learner = learner or bandit_learner(spec.config)
    plan = learning_episode_plan(spec)
    seeds = [derive_seed(seed, TAG_LEARN, k) for k in range(len(plan))]
    bets = parallel_map(lambda t: learner(t[0].probability, t[1]), zip(plan, seeds), workers)
    if shared_sic_stream:
        sic_bets = iter(sic_stream_bets(spec, derive_seed(seed, TAG_SHARED), spec.config))
        bets = [next(sic_bets) if e.experiment == EXP_SIC else b for e, b in zip(plan, bets)]
    return assemble(plan, bets, len(spec.povm))


def sic_stream_bets(spec, seed, config):
    """Variant for experiment 2: one categorical SIC outcome stream shared by
    the four outcome-episodes (instead of four independent Bernoulli streams).
    """
    probs = qubit.outcome_distribution(spec.rho, spec.sic.povm)
    rng = np.random.default_rng(derive_seed(seed, TAG_DATA))
    outcomes = qubit.sample_outcomes(probs / probs.sum(), config.steps, rng)
    return [run_learning_episode((outcomes == i).astype(np.uint8),
                                 config.with_seed(derive_seed(seed, TAG_AGENT, i))).best_bet
            for i in range(4)]


def campaign_states(n_states, master_seed, repeat=0):
    rng = np.random.default_rng(derive_seed(master_seed, TAG_STATES, repeat))
    return [qubit.random_pure_state(rng) for _ in range(n_states)]


def run_campaign(n_states=30, measurements="XYZ", config=AgentConfig(), master_seed=0,
                 repeat=0, learner=None, reuse_shared=False, sic=None, workers=1):
    """Experimental episodes for every (random pure state, Pauli measurement).

    Learning episodes are flattened into one task list so a pool can balance
    them. With ``reuse_shared`` the experiment-3 bets (which depend only on
    the measurement) are learned once per measurement and the experiment-2
    bets once per state; leave it off for faithful per-episode learning.
    """
    sic = sic or qubit.sic_tetrahedron()
    learner = learner or bandit_learner(config)
    states = campaign_states(n_states, master_seed, repeat)
    povms = [qubit.pauli_measurement(a) for a in measurements]

    episodes, tasks, keys = [], [], []
    for s, rho in enumerate(states):
        for m, povm in enumerate(povms):
            spec = ExperimentalEpisodeSpec(rho, povm, sic, config)
            plan = learning_episode_plan(spec)
            episodes.append((s, m, plan, len(povm)))
            for k, entry in enumerate(plan):
                if reuse_shared and entry.experiment == EXP_CONDITIONAL:
                    key = ("r", m, k)
                    seed = derive_seed(master_seed, TAG_SHARED, repeat, 3, m, k)
                elif reuse_shared and entry.experiment == EXP_SIC:
                    key = ("p", s, k)
                    seed = derive_seed(master_seed, TAG_SHARED, repeat, 2, s, k)
                else:
                    key = ("e", s, m, k)
                    seed = derive_seed(master_seed, TAG_LEARN, repeat, s, m, k)
                keys.append(key)
                tasks.append((key, entry.probability, seed))

    unique = {}
    for key, prob, seed in tasks:
        unique.setdefault(key, (prob, seed))
    order = list(unique)
    values = parallel_map(lambda key: learner(*unique[key]), order, workers)
    learned = dict(zip(order, values))

    out, pos = [], 0
    for s, m, plan, M in episodes:
        bets = [learned[keys[pos + k]] for k in range(len(plan))]
        pos += len(plan)
        out.append(assemble(plan, bets, M, {"repeat": repeat, "state": s,
                                            "measurement": measurements[m]}))
    return out


def gaussian_oracle_observation(obs, sigma, N, rng):
    """Replace each true probability by a clamped, grid-rounded normal draw.

    ``N=None`` skips the rounding. Draw order: q, then p, then r row-major.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")

    def draw(true):
        v = true + sigma * rng.standard_normal(true.shape) if sigma > 0 else true.copy()
        v = np.clip(v, 0.0, 1.0)
        return v if N is None else np.round(v * N) / N

    return EpisodeObservation(draw(obs.true_q), draw(obs.true_p), draw(obs.true_r),
                              obs.true_q, obs.true_p, obs.true_r, dict(obs.meta))
