"""Least-squares fit of the generalized Born-rule kernel ``q(j) = r(j)^T Phi p``.

Flattening convention: row-major over ``Phi`` with the row index paired to
``r`` and the column index to ``p``. The design row for one ``(episode, j)``
is therefore ``outer(r(j), p).ravel()`` and its dot product with
``Phi.ravel()`` is ``r(j)^T Phi p``.
"""

from dataclasses import dataclass

import numpy as np

RANK_RTOL = 1e-8


class IdentifiabilityError(ArithmeticError):
    """The design system does not determine every entry of ``Phi``."""

    def __init__(self, message, null_directions):
        super().__init__(message)
        self.null_directions = null_directions


def phi_sic(d=2):
    """Kernel of the SIC representation: ``d+1-1/d`` on the diagonal, ``-1/d`` off it."""
    n = d * d
    return (d + 1) * np.eye(n) - np.full((n, n), 1.0 / d)


def phi_identity(n=4):
    return np.eye(n)


def phi_uniform(n=4):
    """Column-stochastic baseline with every entry ``1/n``."""
    return np.full((n, n), 1.0 / n)


def hsd(a, b):
    """Hilbert-Schmidt (Frobenius) distance."""
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


@dataclass
class DesignSystem:
    A: np.ndarray
    b: np.ndarray
    n: int
    singular_values: np.ndarray

    @property
    def rank(self):
        s = self.singular_values
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.sum(s > RANK_RTOL * s[0]))

    @property
    def condition_number(self):
        s = self.singular_values
        return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


@dataclass
class PhiFit:
    phi: np.ndarray
    residual_norm: float
    condition_number: float
    rank: int


def design_rows(q, p, r):
    r = np.atleast_2d(r)
    rows = np.einsum("ja,b->jab", r, p).reshape(len(r), -1)
    return rows, np.asarray(q, dtype=float)


def build_design_system(observations):
    if not observations:
        raise ValueError("need at least one observation")
    blocks = [design_rows(o.q, o.p, o.r) for o in observations]
    A = np.vstack([a for a, _ in blocks])
    b = np.concatenate([q for _, q in blocks])
    n = len(observations[0].p)
    if A.shape[1] != n * n:
        raise ValueError("inconsistent observation dimensions")
    return DesignSystem(A, b, n, np.linalg.svd(A, compute_uv=False))


def solve_phi(system):
    """Unconstrained least-squares ``Phi`` via Householder QR.

    Raises :class:`IdentifiabilityError` when the design matrix is rank
    deficient; the exception carries the unresolved ``Phi`` directions.
    """
    A, b, n = system.A, system.b, system.n
    if system.rank < n * n:
        _, s, vt = np.linalg.svd(A)
        keep = np.sum(s > RANK_RTOL * s[0]) if s.size and s[0] > 0 else 0
        null = vt[keep:].reshape(-1, n, n)
        raise IdentifiabilityError(
            f"design matrix has rank {system.rank} < {n * n}; "
            f"{len(null)} direction(s) of Phi are unconstrained", null)
    Q, R = np.linalg.qr(A)
    if system.condition_number < 1e12:
        x = np.linalg.solve(R, Q.T @ b)
    else:  # near-singular: fall back to the SVD solution
        x = np.linalg.lstsq(A, b, rcond=None)[0]
    residual = float(np.linalg.norm(A @ x - b))
    return PhiFit(x.reshape(n, n), residual, system.condition_number, system.rank)


def fit_phi(observations):
    return solve_phi(build_design_system(observations))


def baseline_distances(d=2):
    """HSD of the SIC kernel to the identity and to the uniform baseline."""
    ref = phi_sic(d)
    return {"identity": hsd(ref, phi_identity(d * d)), "uniform": hsd(ref, phi_uniform(d * d))}
