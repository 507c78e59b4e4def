"""Index-derived seeds and a worker pool whose output ignores worker count.

Every stochastic task gets its own seed computed from the master seed and a
stable tuple of integer indices, so results never depend on scheduling.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

MASK64 = (1 << 64) - 1

# stream tags keep unrelated seed trees apart
TAG_STATES = 1
TAG_LEARN = 2
TAG_DATA = 3
TAG_AGENT = 4
TAG_SHARED = 5
TAG_PROBS = 6
TAG_SWEEP = 7
TAG_GAUSS = 8
TAG_FRAGMENT = 9


def mix64(z):
    """SplitMix64 finalizer: a bijective 64-bit avalanche hash."""
    z = (int(z) + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master, *indices):
    """Fold ``indices`` into ``master`` one at a time through :func:`mix64`.

    >>> derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
    True
    >>> derive_seed(0, 1, 2) != derive_seed(0, 2, 1)
    True
    """
    h = mix64(int(master) & MASK64)
    for i in indices:
        h = mix64(h ^ mix64(int(i) & MASK64))
    return h


def rng_for(master, *indices):
    return np.random.default_rng(derive_seed(master, *indices))


def parallel_map(fn, tasks, workers=1):
    """Ordered map over ``tasks``.

    Threads are enough: the compiled betting kernel releases the GIL, and
    results come back in task order whatever the completion order.
    """
    tasks = list(tasks)
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
