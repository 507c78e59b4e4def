"""Dense two-phase tableau simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Entering variable by most negative reduced cost; leaving variable by the
lexicographic ratio test on rows of ``[b | B^-1]``, which rules out cycling
on degenerate problems. Sized for a few hundred to a few thousand columns.
"""

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"


@dataclass
class LPResult:
    status: str
    x: np.ndarray
    fun: float
    nit: int

    @property
    def success(self):
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, A, b, tol):
        m, n = A.shape
        sign = np.where(b < 0, -1.0, 1.0)
        self.T = np.hstack([A * sign[:, None], np.eye(m), (b * sign)[:, None]])
        self.n = n
        self.art = np.arange(n, n + m)
        self.basis = list(self.art)
        self.tol = tol
        self.nit = 0

    def reduced_costs(self, cost):
        cb = cost[self.basis]
        return cost - cb @ self.T[:, :-1], float(cb @ self.T[:, -1])

    def leaving_row(self, e):
        T, tol = self.T, self.tol
        col = T[:, e]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return None
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        cand = rows[ratios <= best + tol * (1.0 + abs(best))]
        # lexicographic tie-break on B^-1 columns (the original artificial block)
        for a in self.art:
            if cand.size == 1:
                break
            v = T[cand, a] / col[cand]
            cand = cand[v <= v.min() + tol * (1.0 + abs(v.min()))]
        return int(cand[0])

    def pivot(self, row, e):
        T = self.T
        T[row] /= T[row, e]
        f = T[:, e].copy()
        f[row] = 0.0
        T -= np.outer(f, T[row])
        self.basis[row] = e
        self.nit += 1

    def run(self, cost, allowed, max_iter):
        while self.nit < max_iter:
            rc, _ = self.reduced_costs(cost)
            rc = np.where(allowed, rc, np.inf)
            e = int(np.argmin(rc))
            if rc[e] >= -self.tol:
                return OPTIMAL
            row = self.leaving_row(e)
            if row is None:
                return UNBOUNDED
            self.pivot(row, e)
        return ITERATION_LIMIT

    def drive_out_artificials(self):
        keep = []
        for i in range(len(self.basis)):
            if self.basis[i] < self.n:
                keep.append(i)
                continue
            cols = np.flatnonzero(np.abs(self.T[i, : self.n]) > self.tol)
            if cols.size:
                self.pivot(i, int(cols[np.argmax(np.abs(self.T[i, cols]))]))
                keep.append(i)
            # otherwise the row is redundant and is dropped
        self.T = self.T[keep]
        self.basis = [self.basis[i] for i in keep]

    def solution(self):
        x = np.zeros(self.n)
        for i, j in enumerate(self.basis):
            if j < self.n:
                x[j] = self.T[i, -1]
        return x


def solve_lp(c, A_eq, b_eq, tol=1e-9, max_iter=20000):
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A_eq, dtype=float))
    b = np.asarray(b_eq, dtype=float)
    m, n = A.shape
    tab = _Tableau(A, b, tol)
    n_all = n + m

    phase1 = np.zeros(n_all)
    phase1[n:] = 1.0
    status = tab.run(phase1, np.ones(n_all, dtype=bool), max_iter)
    if status == ITERATION_LIMIT:
        return LPResult(status, tab.solution(), np.nan, tab.nit)
    _, infeas = tab.reduced_costs(phase1)
    if infeas > tol * max(1.0, np.abs(b).max(initial=0.0)) * 10:
        return LPResult(INFEASIBLE, tab.solution(), np.nan, tab.nit)
    tab.drive_out_artificials()

    cost = np.zeros(n_all)
    cost[:n] = c
    allowed = np.zeros(n_all, dtype=bool)
    allowed[:n] = True
    status = tab.run(cost, allowed, max_iter)
    x = tab.solution()
    return LPResult(status, x, float(c @ x) if status == OPTIMAL else np.nan, tab.nit)
