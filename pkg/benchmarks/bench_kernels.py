"""Time the compiled betting kernel against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--steps 300000] [--repeats 3]

Both kernels consume identical pre-drawn random streams, so the script also
checks that they return the same arm counts.
"""

import argparse
import time

import numpy as np

from bornsynth import kernels
from bornsynth._bandit_py import run_bandit as run_python
from bornsynth.agent import AgentConfig, run_learning_episode
from bornsynth.episodes import generate_dataset


def best_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=300_000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--N", type=int, default=50)
    ap.add_argument("--epsilon", type=float, default=0.5)
    args = ap.parse_args(argv)

    cfg = AgentConfig(args.N, args.epsilon, args.steps, seed=1)
    data = generate_dataset(0.22, args.steps, np.random.default_rng(0))

    t_py, res_py = best_time(lambda: run_learning_episode(data, cfg, backend=run_python),
                             args.repeats)
    print(f"pure python : {t_py * 1e3:9.1f} ms/episode ({args.steps / t_py / 1e6:.2f} Msteps/s)")
    if kernels.BACKEND != "cython":
        print("compiled    : not available (extension not built)")
        return 0
    t_c, res_c = best_time(lambda: run_learning_episode(data, cfg), args.repeats)
    print(f"cython      : {t_c * 1e3:9.1f} ms/episode ({args.steps / t_c / 1e6:.2f} Msteps/s)")
    print(f"speed-up    : {t_py / t_c:9.1f}x")
    same = np.array_equal(res_py.state.counts, res_c.state.counts)
    print(f"identical   : {same}")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
