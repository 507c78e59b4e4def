"""Command-line entry point: ``bornsynth <command> [options]``.

Every command writes its artifacts plus ``manifest.json`` into ``--out``.
Options come from defaults, then an optional JSON ``--config`` file, then
explicit flags. Exit codes: 0 success, 2 configuration error, 3 numerical
failure.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import studies
from .agent import AgentConfig
from .nonclassicality.embedding import NoiseLPError
from .reconstruction import IdentifiabilityError
from .records import Manifest, write_csv, write_json

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

DEFAULTS = {
    "sweep-params": {"S": [100, 1000, 10000, 30000, 100000, 300000],
                     "N": [5, 10, 20, 50, 100], "epsilon": [0.1, 0.3, 0.5, 0.7, 0.9],
                     "p": 0.22, "datasets": 50, "agents": 50},
    "learn-prob": {"p": 0.22, "repeats": 200, "N": 50, "epsilon": 0.5, "S": 300000},
    "convergence": {"S": [3000, 30000, 300000], "p": 0.23, "repeats": 100,
                    "n_random": 200, "N": 50, "epsilon": 0.5},
    "run-born": {"repeats": 1, "n_states": 30, "measurements": "XYZ", "N": 50,
                 "epsilon": 0.5, "S": 300000, "exact_probabilities": False,
                 "reuse_shared": False},
    "gaussian-study": {"sigma": [0.05, 0.02, 0.01, 0.005], "N": [10, 50, 100],
                       "repeats": 50, "n_states": 30, "measurements": "XYZ"},
    "nonclassicality": {"n_states": [4, 6, 8, 10, 12, 14, 16, 18, 20], "ranks": [1, 2],
                        "ensembles": 100, "noise": ["depolarizing", "dephasing"],
                        "sic": "sagnac", "sweep": True},
    "sagnac-verify": {"theta0": None},
}


class ConfigError(ValueError):
    pass


def _list(kind):
    return lambda s: [kind(float(v)) if kind is int else kind(v) for v in s.split(",")]


def build_parser():
    parser = argparse.ArgumentParser(prog="bornsynth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--workers", type=int, default=1, help="thread-pool size")
        p.add_argument("--out", type=Path, default=Path("out") / name, help="output directory")
        p.add_argument("--config", type=Path, help="JSON file overriding defaults")
        return p

    p = add("sweep-params", "mean best-bet error over an (S, N, epsilon) grid")
    p.add_argument("--S", type=_list(int), default=None)
    p.add_argument("--N", type=_list(int), default=None)
    p.add_argument("--epsilon", type=_list(float), default=None)
    p.add_argument("--datasets", type=int, default=None)
    p.add_argument("--agents", type=int, default=None)

    p = add("learn-prob", "converged-bet histogram at one probability")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--S", type=int, default=None)

    p = add("convergence", "bet spread and sigma_R^2 versus episode length")
    p.add_argument("--S", type=_list(int), default=None)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--n-random", dest="n_random", type=int, default=None)

    p = add("run-born", "learn a campaign and fit the Phi matrix")
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--n-states", dest="n_states", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--S", type=int, default=None)
    p.add_argument("--exact-probabilities", dest="exact_probabilities",
                   action="store_true", default=None)
    p.add_argument("--reuse-shared", dest="reuse_shared", action="store_true", default=None)

    p = add("gaussian-study", "Phi distance for Gaussian-perturbed probabilities")
    p.add_argument("--sigma", type=_list(float), default=None)
    p.add_argument("--N", type=_list(int), default=None)
    p.add_argument("--repeats", type=int, default=None)

    p = add("nonclassicality", "minimal noise for a simplex embedding")
    p.add_argument("--n-states", dest="n_states", type=_list(int), default=None)
    p.add_argument("--ensembles", type=int, default=None)
    p.add_argument("--no-sweep", dest="sweep", action="store_false", default=None)

    p = add("sagnac-verify", "check the interferometer POVM is a SIC")
    p.add_argument("--theta0", type=float, default=None)
    return parser


def resolve_config(command, args):
    cfg = dict(DEFAULTS[command])
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _agent(cfg):
    return AgentConfig(int(cfg["N"]), float(cfg["epsilon"]), int(cfg["S"]))


# -- commands ---------------------------------------------------------------------------
# Each returns a dict of extra manifest fields.

def cmd_sweep_params(cfg, args):
    rows = studies.sweep_params(cfg["S"], cfg["N"], cfg["epsilon"], cfg["p"], cfg["datasets"],
                                cfg["agents"], args.seed, args.workers)
    write_csv(args.out / "sweep.csv", ("S", "N", "epsilon", "mean_best_bet", "mean_error",
                                       "dataset_std"), [tuple(r.values()) for r in rows])
    return {"rows": len(rows)}


def cmd_learn_prob(cfg, args):
    res = studies.learn_probability(cfg["p"], cfg["repeats"], _agent(cfg), args.seed, args.workers)
    write_csv(args.out / "runs.csv", ("run", "best_bet"), enumerate(res["bets"]))
    write_csv(args.out / "histogram.csv", ("bet", "count", "fraction"), res["histogram"])
    write_csv(args.out / "expected_loss.csv", ("bet", "expected_loss", "expected_reward"),
              res["expected_loss"])
    write_csv(args.out / "agent_rewards.csv", ("bet", "average_reward", "pulls"),
              res["agent_rewards"])
    write_json(args.out / "summary.json", res["summary"])
    print(f"mean best bet {res['summary']['mean']:.4f}, std {res['summary']['std']:.4f}")
    return {"summary": res["summary"]}


def cmd_convergence(cfg, args):
    rows, timing = studies.convergence(cfg["S"], cfg["p"], cfg["repeats"], cfg["n_random"],
                                       cfg["N"], cfg["epsilon"], args.seed, args.workers)
    write_csv(args.out / "convergence.csv", ("S", "sigma_E", "sigma_E_stderr", "mean_best_bet",
                                             "sigma_R2"), [tuple(r.values()) for r in rows])
    write_csv(args.out / "timing.csv", ("S", "seconds_per_episode"),
              [tuple(t.values()) for t in timing])
    for r in rows:
        print(f"S={r['S']}: sigma_E={r['sigma_E']:.4f}  sigma_R2={r['sigma_R2']:.4f}")
    return {"timing": timing}


def cmd_run_born(cfg, args):
    runs = studies.run_born(cfg["repeats"], cfg["n_states"], cfg["measurements"], _agent(cfg),
                            args.seed, bool(cfg["exact_probabilities"]),
                            bool(cfg["reuse_shared"]), args.workers)
    summary = studies.born_summary(runs)
    write_json(args.out / "born_summary.json", summary)
    write_csv(args.out / "observations.csv", studies.OBSERVATION_HEADER,
              studies.observation_rows(runs))
    write_csv(args.out / "born_phi.csv",
              ("repeat", *[f"phi_{a}{b}" for a in range(4) for b in range(4)], "hsd_sic"),
              [(r.repeat, *r.phi.ravel(), r.hsd_sic) for r in runs])
    base = summary["baselines"]
    print(f"mean HSD to Phi_SIC over {len(runs)} run(s): {summary['mean_hsd']:.6g}")
    print(f"baselines: identity {base['sic_to_identity']:.6f}, "
          f"uniform {base['sic_to_uniform']:.6f}")
    return {"mean_hsd": summary["mean_hsd"]}


def cmd_gaussian_study(cfg, args):
    rows = studies.gaussian_study(cfg["sigma"], cfg["N"], cfg["repeats"], cfg["n_states"],
                                  cfg["measurements"], args.seed, args.workers)
    write_csv(args.out / "gaussian.csv", ("N", "sigma_E", "mean_hsd", "std_hsd", "repeats"),
              [tuple(r.values()) for r in rows])
    for r in rows:
        print(f"N={r['N']:>4} sigma={r['sigma_E']:<6} HSD {r['mean_hsd']:.4f} ± {r['std_hsd']:.4f}")
    return {}


def cmd_nonclassicality(cfg, args):
    canon = {"fragment_sic": cfg["sic"],
             "results": studies.canonical_robustness(cfg["sic"])}
    if cfg["sic"] == "sagnac":
        canon["tetrahedron_reference"] = studies.canonical_robustness("tetrahedron")
    write_json(args.out / "canonical.json", canon)
    for kind, res in canon["results"].items():
        print(f"{kind:>28}: p_min = {res['p_min']:.6f}  certificate ok: {res['certificate_ok']}")
    if not all(r["certificate_ok"] for r in canon["results"].values()):
        raise NoiseLPError("certificate validation failed")
    if cfg["sweep"]:
        rows = studies.fragment_sweep(cfg["n_states"], cfg["ranks"], cfg["ensembles"],
                                      cfg["noise"], args.seed, cfg["sic"], args.workers)
        write_csv(args.out / "sweep.csv", ("n_states", "rank", "noise_kind", "ensemble_index",
                                           "p_min"), rows)
    return {}


def cmd_sagnac_verify(cfg, args):
    from .qubit import SagnacParams
    params = None if cfg["theta0"] is None else SagnacParams.from_theta0(cfg["theta0"])
    report = studies.sagnac_report(params)
    write_json(args.out / "sagnac.json", report)
    for k, v in report["overlaps"].items():
        print(f"tr(E{k[0]} E{k[1]}) = {v:.12f}")
    print(f"completeness residual {report['completeness_residual']:.2e}, "
          f"unitary-chain difference {report['cross_check_max_diff']:.2e}")
    return {"max_overlap_error": report["max_overlap_error"]}


COMMANDS = {
    "sweep-params": cmd_sweep_params,
    "learn-prob": cmd_learn_prob,
    "convergence": cmd_convergence,
    "run-born": cmd_run_born,
    "gaussian-study": cmd_gaussian_study,
    "nonclassicality": cmd_nonclassicality,
    "sagnac-verify": cmd_sagnac_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        args.out.mkdir(parents=True, exist_ok=True)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    manifest = Manifest(args.out, args.command, cfg, args.seed, args.workers)
    t0 = time.perf_counter()
    try:
        extra = COMMANDS[args.command](cfg, args)
    except (IdentifiabilityError, NoiseLPError, ArithmeticError, np.linalg.LinAlgError) as exc:
        manifest.finalize("numerical_failure", error=str(exc))
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError) as exc:
        manifest.finalize("config_error", error=str(exc))
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    manifest.finalize("ok", compute_seconds=time.perf_counter() - t0, **extra)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
