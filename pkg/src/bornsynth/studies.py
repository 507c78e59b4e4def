"""Study drivers behind the CLI commands.

Each returns plain data (rows / dicts); the CLI handles config and files.
All randomness flows from ``seed`` through :func:`derive_seed`.
"""

import time
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import qubit
from .agent import AgentConfig, expected_loss, run_learning_episode
from .episodes import (EpisodeObservation, bandit_learner, campaign_states,
                       exact_learner, gaussian_oracle_observation,
                       generate_dataset, run_campaign)
from .nonclassicality import embedding
from .reconstruction import (baseline_distances, fit_phi, hsd, phi_identity,
                             phi_sic, phi_uniform)
from .seeding import (TAG_AGENT, TAG_DATA, TAG_GAUSS, TAG_LEARN, TAG_PROBS,
                      TAG_SWEEP, derive_seed, parallel_map, rng_for)


def learn_once(p_true, config, data_seed, agent_seed):
    data = generate_dataset(p_true, config.steps, np.random.default_rng(data_seed))
    return run_learning_episode(data, config.with_seed(agent_seed))


# -- parameter sweep --------------------------------------------------------------------

def sweep_params(S_grid, N_grid, eps_grid, p_true=0.22, datasets=50, agents=50,
                 seed=0, workers=1):
    """Mean converged bet per (S, N, epsilon): average over agents, then datasets.

    The same dataset (per S and dataset index) is shared by every (N, epsilon).
    """
    tuples = [(S, N, ei, eps) for S in S_grid for N in N_grid for ei, eps in enumerate(eps_grid)]
    tasks = [(t, d) for t in range(len(tuples)) for d in range(datasets)]

    def run(task):
        t, d = task
        S, N, ei, eps = tuples[t]
        data = generate_dataset(p_true, S, rng_for(seed, TAG_SWEEP, 0, S, d))
        cfg = AgentConfig(N, eps, S)
        bets = [run_learning_episode(data, cfg.with_seed(
            derive_seed(seed, TAG_SWEEP, 1, S, N, ei, d, a))).best_bet for a in range(agents)]
        return float(np.mean(bets))

    means = np.array(parallel_map(run, tasks, workers)).reshape(len(tuples), datasets)
    rows = []
    for (S, N, _, eps), m in zip(tuples, means):
        mean = float(m.mean())
        rows.append({"S": S, "N": N, "epsilon": eps, "mean_best_bet": mean,
                     "mean_error": mean - p_true,
                     "dataset_std": float(m.std(ddof=1)) if datasets > 1 else 0.0})
    return rows


# -- single-probability learning ----------------------------------------------------------

def learn_probability(p_true=0.22, repeats=200, config=AgentConfig(), seed=0, workers=1):
    def run(r):
        return learn_once(p_true, config, derive_seed(seed, TAG_DATA, r),
                          derive_seed(seed, TAG_AGENT, r))

    results = parallel_map(run, range(repeats), workers)
    bets = np.array([res.best_bet for res in results])
    grid = config.grid
    counts = np.array([(np.rint(bets * config.N) == k).sum() for k in range(config.N + 1)])
    loss = expected_loss(p_true, grid)
    first = results[0].state
    summary = {
        "p_true": p_true,
        "repeats": repeats,
        "mean": float(bets.mean()),
        "std": float(bets.std(ddof=1)) if repeats > 1 else 0.0,
        "mode": float(grid[np.argmax(counts)]),
        "expected_loss_argmin": float(grid[np.argmin(loss)]),
    }
    return {
        "bets": bets,
        "histogram": [(float(b), int(c), float(c / repeats)) for b, c in zip(grid, counts)],
        "expected_loss": [(float(b), float(v), float(-v)) for b, v in zip(grid, loss)],
        "agent_rewards": [(float(b), float(a), int(c))
                          for b, a, c in zip(grid, first.averages(), first.counts)],
        "summary": summary,
    }


# -- convergence --------------------------------------------------------------------------

def convergence(S_grid, p_true=0.23, repeats=100, n_random=200, N=50, epsilon=0.5,
                seed=0, workers=1):
    """Spread of converged bets and summed squared error against random targets."""
    targets = rng_for(seed, TAG_PROBS).random(n_random)
    rows, timing = [], []
    for S in S_grid:
        cfg = AgentConfig(N, epsilon, S)

        def fixed(r, S=S, cfg=cfg):
            base = derive_seed(seed, TAG_LEARN, S, 0, r)
            return learn_once(p_true, cfg, derive_seed(base, TAG_DATA),
                              derive_seed(base, TAG_AGENT)).best_bet

        def spread(i, S=S, cfg=cfg):
            base = derive_seed(seed, TAG_LEARN, S, 1, i)
            return learn_once(float(targets[i]), cfg, derive_seed(base, TAG_DATA),
                              derive_seed(base, TAG_AGENT)).best_bet

        t0 = time.perf_counter()
        bets = np.array(parallel_map(fixed, range(repeats), workers))
        elapsed = time.perf_counter() - t0
        learned = np.array(parallel_map(spread, range(n_random), workers))
        sigma = float(bets.std(ddof=1))
        rows.append({"S": S, "sigma_E": sigma,
                     "sigma_E_stderr": sigma / np.sqrt(2.0 * (repeats - 1)),
                     "mean_best_bet": float(bets.mean()),
                     "sigma_R2": float(np.sum((learned - targets) ** 2))})
        timing.append({"S": S, "seconds_per_episode": elapsed / repeats})
    return rows, timing


# -- learned Phi --------------------------------------------------------------------------

@dataclass
class BornRun:
    repeat: int
    phi: np.ndarray
    hsd_sic: float
    residual: float
    condition_number: float
    observations: list


def run_born(repeats=1, n_states=30, measurements="XYZ", config=AgentConfig(), seed=0,
             exact_probabilities=False, reuse_shared=False, workers=1):
    learner = exact_learner() if exact_probabilities else bandit_learner(config)
    runs = []
    for r in range(repeats):
        obs = run_campaign(n_states, measurements, config, seed, repeat=r, learner=learner,
                           reuse_shared=reuse_shared, workers=workers)
        fit = fit_phi(obs)
        runs.append(BornRun(r, fit.phi, hsd(fit.phi, phi_sic()), fit.residual_norm,
                            fit.condition_number, obs))
    return runs


def born_summary(runs):
    h = np.array([r.hsd_sic for r in runs])
    base = baseline_distances()
    return {
        "repeats": len(runs),
        "mean_hsd": float(h.mean()),
        "std_hsd": float(h.std(ddof=1)) if len(h) > 1 else 0.0,
        "baselines": {"sic_to_identity": base["identity"], "sic_to_uniform": base["uniform"]},
        "runs": [{"repeat": r.repeat, "phi": r.phi.ravel(), "hsd_sic": r.hsd_sic,
                  "hsd_identity": hsd(r.phi, phi_identity()),
                  "hsd_uniform": hsd(r.phi, phi_uniform()),
                  "residual_norm": r.residual, "condition_number": r.condition_number}
                 for r in runs],
    }


def observation_rows(runs):
    """Long format: one row per learning episode."""
    rows = []
    for run in runs:
        for o in run.observations:
            key = (run.repeat, o.meta["state"], o.meta["measurement"])
            for j in range(len(o.q)):
                rows.append((*key, 1, j, "", o.true_q[j], o.q[j]))
            for i in range(len(o.p)):
                rows.append((*key, 2, "", i, o.true_p[i], o.p[i]))
            for j in range(o.r.shape[0]):
                for i in range(o.r.shape[1]):
                    rows.append((*key, 3, j, i, o.true_r[j, i], o.r[j, i]))
    return rows


OBSERVATION_HEADER = ("repeat", "state", "measurement", "experiment", "j", "i",
                      "true_probability", "learned_bet")


# -- Gaussian oracle ----------------------------------------------------------------------

def gaussian_study(sigma_grid, N_grid, repeats=50, n_states=30, measurements="XYZ",
                   seed=0, workers=1):
    """HSD of Phi fitted to grid-rounded Gaussian draws around exact probabilities.

    Repeat ``r`` uses the same states for every (N, sigma), so the trend in
    sigma is not masked by state-to-state variation.
    """
    exact = [run_campaign(n_states, measurements, master_seed=seed, repeat=r,
                          learner=exact_learner()) for r in range(repeats)]

    def run(task):
        N, si, r = task
        rng = rng_for(seed, TAG_GAUSS, N, si, r)
        obs = [gaussian_oracle_observation(o, sigma_grid[si], N, rng) for o in exact[r]]
        return hsd(fit_phi(obs).phi, phi_sic())

    tasks = [(N, si, r) for N in N_grid for si in range(len(sigma_grid)) for r in range(repeats)]
    vals = np.array(parallel_map(run, tasks, workers)).reshape(len(N_grid), len(sigma_grid), repeats)
    rows = []
    for a, N in enumerate(N_grid):
        for b, sigma in enumerate(sigma_grid):
            v = vals[a, b]
            rows.append({"N": N, "sigma_E": sigma, "mean_hsd": float(v.mean()),
                         "std_hsd": float(v.std(ddof=1)) if repeats > 1 else 0.0,
                         "repeats": repeats})
    return rows


# -- nonclassicality ----------------------------------------------------------------------

NOISE_KINDS = ("depolarizing", "depolarizing_subnormalized", "dephasing")


def canonical_robustness(sic="sagnac"):
    sic_set = qubit.sagnac_sic() if sic == "sagnac" else qubit.sic_tetrahedron()
    frag = embedding.canonical_fragment(sic_set)
    out = {}
    for kind in NOISE_KINDS:
        res = embedding.min_noise_lp(frag, kind)
        chk = embedding.validate_certificate(res, frag, kind)
        out[kind] = {"p_min": res.p_min, "residual": res.residual,
                     "certificate_min": res.certificate_min, "pivots": res.iterations,
                     "effect_facets": len(res.effect_facets),
                     "state_facets": len(res.state_facets), "certificate_ok": chk["ok"]}
    return out


def fragment_sweep(n_states_grid, ranks=(1, 2), ensembles=100,
                   noises=("depolarizing", "dephasing"), seed=0, sic="sagnac", workers=1):
    """Rows ``(n_states, rank, noise_kind, ensemble_index, p_min)``.

    Each ensemble draws one state sequence; the fragment for ``n`` states is
    its first ``n`` entries.
    """
    sic_set = qubit.sagnac_sic() if sic == "sagnac" else qubit.sic_tetrahedron()
    effects = embedding.fixed_effects(sic_set)
    n_max = max(n_states_grid)

    def run(task):
        rank, e = task
        states = [s.matrix for s in embedding.ensemble_states(n_max, rank, seed, e)]
        out = []
        for n in n_states_grid:
            frag = embedding.GptFragment.from_operators(states[:n], effects)
            for kind in noises:
                out.append((n, rank, kind, e, embedding.min_noise_lp(frag, kind).p_min))
        return out

    tasks = [(rank, e) for rank in ranks for e in range(ensembles)]
    rows = [row for chunk in parallel_map(run, tasks, workers) for row in chunk]
    order = {k: i for i, k in enumerate(noises)}
    rows.sort(key=lambda r: (r[0], r[1], order[r[2]], r[3]))
    return rows


# -- Sagnac ---------------------------------------------------------------------------------

def sagnac_report(params=None):
    params = params or qubit.SagnacParams.sic()
    direct = [e.matrix for e in qubit.sagnac_povm(params)]
    chain = qubit.sagnac_povm_from_unitaries(params)
    doubled = [2 * m for m in direct]
    overlaps = {f"{a + 1}{b + 1}": float(np.trace(doubled[a] @ doubled[b]).real)
                for a, b in combinations(range(4), 2)}
    return {
        "theta0": params.theta0,
        "theta1": params.theta1,
        "x": params.x,
        "y": params.y,
        "overlaps": overlaps,
        "max_overlap_error": max(abs(v - 1.0 / 3.0) for v in overlaps.values()),
        "completeness_residual": float(np.abs(sum(direct) - qubit.I2).max()),
        "cross_check_max_diff": float(max(np.abs(a - b).max() for a, b in zip(direct, chain))),
        "traces": [float(np.trace(m).real) for m in direct],
    }
