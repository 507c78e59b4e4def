"""Noise robustness of simplex embeddability for qubit state/effect fragments.

Operators are vectorized in the orthonormal Hermitian basis
``{I, X, Y, Z} / sqrt(2)``, so ``tr(e rho)`` is the plain dot product of the
vectors. A fragment is simplex embeddable after noise ``M(p)`` iff

    H_E^T  sigma  H_S  =  Q_E^T M(p) Q_S ,     sigma >= 0 ,

where ``H_S`` / ``H_E`` hold the facet normals of the state / effect cones in
span coordinates and ``Q_S`` / ``Q_E`` are orthonormal bases of the spans.
Each positive ``sigma[a, b]`` is an ontic state whose response functions are
the effect-cone facet ``a`` and whose preparation weights are the state-cone
facet ``b``. Both noise maps are affine in ``p``, so ``p`` is an LP variable.

Unit-effect normalization. The ontic response to the unit effect ``u`` must be
1. Writing ``c = H_E u`` (``c_a > 0`` when ``u`` is interior to the effect
cone), ontic state ``(a, b)`` is normalized by dividing its response by
``c_a`` and multiplying its weight by ``c_a``, which leaves ``sigma``
unchanged. Summing ``u`` against the constraint gives
``c^T sigma H_S s = u^T M(p) s``, i.e. the preparations are automatically
normalized; the constraint is implied by the equalities above and is only
checked on the certificate. Worked 2-dimensional example, the classical bit
with states and effects ``|0><0|, |1><1|`` in coordinates ``(I, Z)/sqrt(2)``:
both cones are generated by ``(1, 1)/sqrt(2)`` and ``(1, -1)/sqrt(2)``, so
``H = [[1, 1], [1, -1]] / sqrt(2)`` for both, and ``H^T sigma H = I`` is
solved by ``sigma = I``; with ``u = (sqrt(2), 0)``, ``c = (1, 1)`` and each
ontic state has unit response to ``u``.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import qubit
from ..seeding import TAG_FRAGMENT, rng_for
from .cones import facet_enumerate
from .simplex import solve_lp

BASIS = [qubit.I2, qubit.X, qubit.Y, qubit.Z]
SPAN_TOL = 1e-10


class NoiseLPError(ArithmeticError):
    pass


def bloch_vectorize(op):
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2) or not qubit.is_hermitian(op):
        raise ValueError("bloch_vectorize needs a Hermitian 2x2 operator")
    return np.array([np.trace(P @ op).real for P in BASIS]) / np.sqrt(2.0)


def bloch_devectorize(v):
    v = np.asarray(v, dtype=float)
    return sum(c * P for c, P in zip(v, BASIS)) / np.sqrt(2.0)


def _matrix(x):
    return x.matrix if hasattr(x, "matrix") else np.asarray(x, dtype=complex)


def span_basis(vectors, tol=SPAN_TOL):
    """Orthonormal basis (columns) of the row span of ``vectors``."""
    _, s, vt = np.linalg.svd(np.atleast_2d(vectors))
    k = int(np.sum(s > tol * max(1.0, s[0])))
    return vt[:k].T


@dataclass
class GptFragment:
    states: np.ndarray
    effects: np.ndarray
    unit: np.ndarray = field(default_factory=lambda: bloch_vectorize(qubit.I2))

    @classmethod
    def from_operators(cls, states, effects, adjoin_unit=True):
        S = np.array([bloch_vectorize(_matrix(s)) for s in states])
        E = [bloch_vectorize(_matrix(e)) for e in effects]
        unit = bloch_vectorize(qubit.I2)
        if adjoin_unit and not any(np.allclose(e, unit, atol=1e-12) for e in E):
            E.append(unit)
        return cls(S, np.array(E), unit)

    def probabilities(self):
        return self.effects @ self.states.T

    def conjugated(self, U):
        def conj(vs):
            return np.array([bloch_vectorize(U @ bloch_devectorize(v) @ U.conj().T) for v in vs])
        return GptFragment(conj(self.states), conj(self.effects), self.unit.copy())

    @property
    def state_basis(self):
        return span_basis(self.states)

    @property
    def effect_basis(self):
        return span_basis(self.effects)


@dataclass(frozen=True)
class NoiseModel:
    """Noise channel as an affine family ``M(p) = I + p * slope`` on vectors.

    * ``depolarizing``: ``rho -> p I/2 + (1-p) rho`` (trace preserving);
    * ``depolarizing_subnormalized``: ``rho -> p I/4 + (1-p) rho``, mixing
      toward the identity normalized in the 4-dim operator space; its
      minimal ``p`` relates to the trace-preserving one by
      ``p_tp = p / (2 - p)``;
    * ``dephasing``: ``rho -> (1 - p/2) rho + (p/2) Z rho Z``.
    """

    kind: str

    SLOPES = {
        "depolarizing": (0.0, -1.0, -1.0, -1.0),
        "depolarizing_subnormalized": (-0.5, -1.0, -1.0, -1.0),
        "dephasing": (0.0, -1.0, -1.0, 0.0),
    }

    def __post_init__(self):
        if self.kind not in self.SLOPES:
            raise ValueError(f"unknown noise kind {self.kind!r}; choose from {sorted(self.SLOPES)}")

    @property
    def slope(self):
        return np.diag(self.SLOPES[self.kind])

    def matrix(self, p):
        return np.eye(4) + p * self.slope

    def apply(self, rho, p):
        """The channel in operator form (independent of the vector slopes)."""
        rho = np.asarray(rho, dtype=complex)
        if self.kind == "depolarizing":
            return p * qubit.I2 / 2 + (1 - p) * rho
        if self.kind == "depolarizing_subnormalized":
            return p * qubit.I2 / 4 + (1 - p) * rho
        return (1 - p / 2) * rho + (p / 2) * qubit.Z @ rho @ qubit.Z


@dataclass
class RobustnessResult:
    p_min: float
    sigma: np.ndarray
    effect_facets: np.ndarray
    state_facets: np.ndarray
    residual: float
    noise: str
    iterations: int = 0

    @property
    def certificate_min(self):
        return float(self.sigma.min()) if self.sigma.size else 0.0


@dataclass
class _Problem:
    HE: np.ndarray
    HS: np.ndarray
    R0: np.ndarray
    R1: np.ndarray
    unit: np.ndarray


def _problem(fragment, noise):
    QS, QE = fragment.state_basis, fragment.effect_basis
    HS = facet_enumerate(fragment.states @ QS)
    HE = facet_enumerate(fragment.effects @ QE)
    R0 = QE.T @ QS
    R1 = QE.T @ noise.slope @ QS
    return _Problem(HE, HS, R0, R1, QE.T @ fragment.unit)


def _equality_block(prob):
    fE, kE = prob.HE.shape
    fS, kS = prob.HS.shape
    # row (i, j), column (a, b): HE[a, i] * HS[b, j]
    return np.einsum("ai,bj->ijab", prob.HE, prob.HS).reshape(kE * kS, fE * fS)


def _residual(prob, sigma, p):
    return float(np.abs(prob.HE.T @ sigma @ prob.HS - (prob.R0 + p * prob.R1)).max())


def min_noise_lp(fragment, noise, tol=1e-9):
    """Smallest ``p`` for which the noisy fragment is simplex embeddable."""
    if isinstance(noise, str):
        noise = NoiseModel(noise)
    prob = _problem(fragment, noise)
    G = _equality_block(prob)
    nsig = G.shape[1]
    # variables: sigma (nsig), p, slack for p <= 1
    A = np.zeros((G.shape[0] + 1, nsig + 2))
    A[:-1, :nsig] = G
    A[:-1, nsig] = -prob.R1.ravel()
    A[-1, nsig] = A[-1, nsig + 1] = 1.0
    b = np.append(prob.R0.ravel(), 1.0)
    c = np.zeros(nsig + 2)
    c[nsig] = 1.0

    res = solve_lp(c, A, b, tol=tol)
    if res.status == "infeasible":
        raise NoiseLPError(f"fragment not embeddable even at p = 1 under {noise.kind} noise")
    if not res.success:
        raise NoiseLPError(f"LP failed with status {res.status} after {res.nit} pivots")
    sigma = res.x[:nsig].reshape(prob.HE.shape[0], prob.HS.shape[0])
    p = float(res.x[nsig])
    return RobustnessResult(p, sigma, prob.HE, prob.HS, _residual(prob, sigma, p),
                            noise.kind, res.nit)


def embeddable_at(fragment, noise, p, tol=1e-9):
    """Feasibility of the embedding at fixed noise ``p``; returns sigma or None."""
    if isinstance(noise, str):
        noise = NoiseModel(noise)
    prob = _problem(fragment, noise)
    G = _equality_block(prob)
    res = solve_lp(np.zeros(G.shape[1]), G, (prob.R0 + p * prob.R1).ravel(), tol=tol)
    if not res.success:
        return None
    return res.x.reshape(prob.HE.shape[0], prob.HS.shape[0])


def min_noise_bisect(fragment, noise, tol=1e-6):
    """Bisection over feasibility LPs; slower debugging twin of :func:`min_noise_lp`."""
    if embeddable_at(fragment, noise, 0.0) is not None:
        return 0.0
    lo, hi = 0.0, 1.0
    if embeddable_at(fragment, noise, hi) is None:
        raise NoiseLPError("fragment not embeddable even at p = 1")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if embeddable_at(fragment, noise, mid) is None:
            lo = mid
        else:
            hi = mid
    return hi


def validate_certificate(result, fragment, noise, atol=1e-7):
    """Re-derive the cone data and check the returned ``sigma``.

    Returns a dict of the checks; ``ok`` is their conjunction.
    """
    if isinstance(noise, str):
        noise = NoiseModel(noise)
    QS, QE = fragment.state_basis, fragment.effect_basis
    recon = QE @ result.effect_facets.T @ result.sigma @ result.state_facets @ QS.T
    target_pairs = fragment.effects @ noise.matrix(result.p_min) @ fragment.states.T
    pairs = fragment.effects @ recon @ fragment.states.T
    unit_row = fragment.unit @ recon @ fragment.states.T
    unit_target = fragment.unit @ noise.matrix(result.p_min) @ fragment.states.T
    checks = {
        "sigma_nonnegative": result.certificate_min >= -1e-9,
        "residual": result.residual,
        "pairing_error": float(np.abs(pairs - target_pairs).max()),
        "unit_error": float(np.abs(unit_row - unit_target).max()),
    }
    checks["ok"] = (checks["sigma_nonnegative"] and result.residual <= atol
                    and checks["pairing_error"] <= atol and checks["unit_error"] <= atol)
    return checks


# -- fragments used in the studies -----------------------------------------------------

def fixed_effects(sic=None):
    """Six Pauli projectors followed by the four SIC-POVM elements."""
    sic = sic or qubit.sagnac_sic()
    effects = [e.matrix for axis in "XYZ" for e in qubit.pauli_measurement(axis)]
    return effects + [e.matrix for e in sic.povm]


def canonical_fragment(sic=None):
    """Pauli eigenstates and SIC states against Pauli projectors and SIC effects.

    Defaults to the SIC realised by the Sagnac interferometer.
    """
    sic = sic or qubit.sagnac_sic()
    states = [s.matrix for s in qubit.pauli_eigenstates()] + [p.matrix for p in sic.projectors]
    return GptFragment.from_operators(states, fixed_effects(sic))


def sample_states(n_states, rank, rng):
    if rank == 1:
        return [qubit.random_pure_state(rng) for _ in range(n_states)]
    if rank == 2:
        return [qubit.random_mixed_state(rng) for _ in range(n_states)]
    raise ValueError("rank must be 1 or 2")


def ensemble_states(n_states, rank, seed, ensemble):
    """States of one ensemble; larger ``n_states`` extends the same sequence."""
    return sample_states(n_states, rank, rng_for(seed, TAG_FRAGMENT, rank, ensemble))


@dataclass
class SweepStats:
    n_states: int
    rank: int
    noise: str
    values: np.ndarray

    @property
    def mean(self):
        return float(self.values.mean())

    @property
    def std(self):
        return float(self.values.std(ddof=1)) if self.values.size > 1 else 0.0


def random_fragment_sweep(n_states, rank, n_ensembles=100, noise="depolarizing", seed=0,
                          sic=None):
    if n_states < 1:
        raise ValueError("need at least one state")
    effects = fixed_effects(sic)
    vals = []
    for e in range(n_ensembles):
        states = ensemble_states(n_states, rank, seed, e)
        frag = GptFragment.from_operators([s.matrix for s in states], effects)
        vals.append(min_noise_lp(frag, noise).p_min)
    return SweepStats(n_states, rank, noise if isinstance(noise, str) else noise.kind,
                      np.array(vals))
