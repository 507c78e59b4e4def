"""Facet enumeration for small polyhedral cones (double-description method).

The facets of ``cone(G)`` are the extreme rays of the dual cone
``{h : G h >= 0}``. Those rays are built incrementally: start from a
simplicial cone cut out by ``k`` independent generators, then intersect with
one half-space per remaining generator, combining adjacent positive/negative
ray pairs. Adjacency uses the algebraic rank test.
"""

from dataclasses import dataclass

import numpy as np

RAY_TOL = 1e-9


@dataclass
class PolyhedralCone:
    generators: np.ndarray
    facets: np.ndarray

    @classmethod
    def from_generators(cls, generators):
        g = np.atleast_2d(np.asarray(generators, dtype=float))
        return cls(g, facet_enumerate(g))

    def check(self, tol=RAY_TOL):
        return bool(np.all(self.generators @ self.facets.T >= -tol))


def _normalize_rows(m):
    norms = np.linalg.norm(m, axis=1)
    return m / norms[:, None]


def _dedupe(rays, tol=RAY_TOL):
    out = []
    for r in rays:
        if not any(np.max(np.abs(r - o)) <= tol * 10 for o in out):
            out.append(r)
    return np.array(out)


def _independent_rows(g, tol=1e-10):
    chosen = []
    for i in range(len(g)):
        trial = g[chosen + [i]]
        if np.linalg.matrix_rank(trial, tol=tol) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == g.shape[1]:
            break
    return chosen


def facet_enumerate(generators, tol=RAY_TOL):
    """Unit inward facet normals of the cone generated by ``generators``.

    The generators must span their ambient space (work in span coordinates
    for lower-dimensional cones) and the cone must be pointed.
    """
    g = np.atleast_2d(np.asarray(generators, dtype=float))
    if g.size == 0 or len(g) == 0:
        raise ValueError("cannot enumerate facets of an empty generator set")
    norms = np.linalg.norm(g, axis=1)
    g = g[norms > tol]
    if len(g) == 0:
        raise ValueError("all generators are zero")
    g = _dedupe(_normalize_rows(g), tol)
    m, k = g.shape

    basis = _independent_rows(g)
    if len(basis) < k:
        raise ValueError(f"generators span dimension {len(basis)} < ambient {k}")
    rays = np.linalg.inv(g[basis])  # columns satisfy g[basis] @ r = e_j
    rays = _normalize_rows(rays.T)
    processed = list(basis)

    for i in range(m):
        if i in processed:
            continue
        vals = rays @ g[i]
        pos = vals > tol
        neg = vals < -tol
        zero = ~(pos | neg)
        if not neg.any():
            processed.append(i)
            continue
        # tight sets against already processed constraints
        done = g[processed]
        tight = np.abs(rays @ done.T) <= tol
        new = [rays[j] for j in np.flatnonzero(pos | zero)]
        for a in np.flatnonzero(pos):
            for b in np.flatnonzero(neg):
                common = tight[a] & tight[b]
                if k < 2 or common.sum() < k - 2:
                    continue
                rk = np.linalg.matrix_rank(done[common], tol=1e-8) if common.any() else 0
                if rk != k - 2:
                    continue
                r = vals[a] * rays[b] - vals[b] * rays[a]
                new.append(r / np.linalg.norm(r))
        rays = _dedupe(np.array(new), tol)
        processed.append(i)

    return rays
