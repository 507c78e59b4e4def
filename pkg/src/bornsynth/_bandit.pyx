# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled epsilon-greedy betting loop.

Must stay numerically identical to ``_bandit_py.run_bandit``: same operation
order, no fast-math.
"""

cimport cython


def run_bandit(const unsigned char[::1] data,
               const unsigned char[::1] explore,
               const int[::1] explore_arm,
               const double[::1] tie_u,
               const double[::1] reward_hit,
               const double[::1] reward_miss,
               double[::1] totals,
               long long[::1] counts,
               int[::1] trajectory):
    """Run ``len(data)`` betting steps, updating ``totals``/``counts`` in place.

    ``trajectory`` may be empty; otherwise it receives the arm chosen per step.
    """
    cdef Py_ssize_t n_steps = data.shape[0]
    cdef Py_ssize_t n_arms = totals.shape[0]
    cdef bint record = trajectory.shape[0] > 0
    cdef Py_ssize_t s, k, arm, n_tied, pick
    cdef double best, r
    cdef double[256] avg_stack
    cdef double* avg

    if n_arms > 256:
        raise ValueError("at most 256 arms supported by the compiled kernel")
    avg = avg_stack
    for k in range(n_arms):
        avg[k] = totals[k] / counts[k] if counts[k] > 0 else 0.0

    with nogil:
        for s in range(n_steps):
            if explore[s]:
                arm = explore_arm[s]
            else:
                best = avg[0]
                arm = 0
                n_tied = 1
                for k in range(1, n_arms):
                    if avg[k] > best:
                        best = avg[k]
                        arm = k
                        n_tied = 1
                    elif avg[k] == best:
                        n_tied = n_tied + 1
                if n_tied > 1:
                    pick = <Py_ssize_t>(tie_u[s] * n_tied)
                    if pick >= n_tied:
                        pick = n_tied - 1
                    for k in range(n_arms):
                        if avg[k] == best:
                            if pick == 0:
                                arm = k
                                break
                            pick = pick - 1
            if data[s]:
                r = reward_hit[arm]
            else:
                r = reward_miss[arm]
            totals[arm] = totals[arm] + r
            counts[arm] = counts[arm] + 1
            avg[arm] = totals[arm] / counts[arm]
            if record:
                trajectory[s] = <int>arm
