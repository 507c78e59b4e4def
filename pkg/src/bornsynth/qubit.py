"""Exact single-qubit quantum mechanics.

States, effects and POVMs are thin validated wrappers around 2x2 complex
numpy arrays. Everything is fixed to Hilbert-space dimension ``D = 2``.
"""

from dataclasses import dataclass, field

import numpy as np

D = 2
#: global tolerance for Hermiticity, trace and positivity checks
ATOL = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"X": X, "Y": Y, "Z": Z}

SQRT2 = np.sqrt(2.0)
TETRAHEDRON_BLOCH = np.array([
    [0.0, 0.0, 1.0],
    [2.0 * SQRT2 / 3.0, 0.0, -1.0 / 3.0],
    [-SQRT2 / 3.0, np.sqrt(2.0 / 3.0), -1.0 / 3.0],
    [-SQRT2 / 3.0, -np.sqrt(2.0 / 3.0), -1.0 / 3.0],
])


def _as_matrix(m):
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def is_hermitian(m, atol=ATOL):
    return np.allclose(m, m.conj().T, rtol=0.0, atol=atol)


def _check_hermitian(m, what):
    if not is_hermitian(m):
        raise ValueError(f"{what} is not Hermitian")


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        _check_hermitian(m, "density operator")
        if abs(np.trace(m).real - 1.0) > ATOL:
            raise ValueError(f"density operator has trace {np.trace(m).real!r}, expected 1")
        if np.linalg.eigvalsh(m).min() < -ATOL:
            raise ValueError("density operator is not positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_ket(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def from_bloch(cls, n):
        n = np.asarray(n, dtype=float)
        return cls(0.5 * (I2 + n[0] * X + n[1] * Y + n[2] * Z))

    def bloch(self):
        return np.array([np.trace(self.matrix @ P).real for P in (X, Y, Z)])

    def purity(self):
        return np.trace(self.matrix @ self.matrix).real


@dataclass(frozen=True)
class Effect:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        _check_hermitian(m, "effect")
        w = np.linalg.eigvalsh(m)
        if w.min() < -ATOL or w.max() > 1.0 + ATOL:
            raise ValueError(f"effect eigenvalues {w} outside [0, 1]")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class Povm:
    effects: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in self.effects)
        if not effects:
            raise ValueError("a POVM needs at least one effect")
        total = sum(e.matrix for e in effects)
        if not np.allclose(total, I2, rtol=0.0, atol=ATOL):
            raise ValueError("POVM effects do not sum to the identity")
        labels = tuple(self.labels) or tuple(range(1, len(effects) + 1))
        if len(labels) != len(effects):
            raise ValueError("one label per effect required")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.effects)

    def __iter__(self):
        return iter(self.effects)

    def __getitem__(self, j):
        return self.effects[j]


@dataclass(frozen=True)
class SicSet:
    """Four equiangular rank-1 projectors and their POVM ``E_i = Pi_i / 2``."""

    projectors: tuple
    povm: Povm
    d: int = D

    def __post_init__(self):
        if len(self.projectors) != self.d ** 2:
            raise ValueError("a qubit SIC has exactly four projectors")
        for i, a in enumerate(self.projectors):
            if abs(np.trace(a.matrix @ a.matrix).real - 1.0) > ATOL:
                raise ValueError("SIC element is not a rank-1 projector")
            for b in self.projectors[i + 1:]:
                overlap = np.trace(a.matrix @ b.matrix).real
                if abs(overlap - 1.0 / (self.d + 1)) > ATOL:
                    raise ValueError(f"SIC overlap {overlap!r} != 1/(d+1)")

    @classmethod
    def from_projectors(cls, projectors):
        projectors = tuple(p if isinstance(p, DensityOperator) else DensityOperator(p)
                           for p in projectors)
        povm = Povm(tuple(Effect(p.matrix / D) for p in projectors))
        return cls(projectors, povm)

    def overlaps(self):
        P = [p.matrix for p in self.projectors]
        return np.array([[np.trace(a @ b).real for b in P] for a in P])


def born_probability(rho, e):
    """``Re tr(rho e)``, snapped onto [0, 1] when within ``ATOL`` of an end."""
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    if not isinstance(e, Effect):
        e = Effect(e)
    p = np.trace(rho.matrix @ e.matrix).real
    if -ATOL <= p < 0.0:
        p = 0.0
    elif 1.0 < p <= 1.0 + ATOL:
        p = 1.0
    return float(p)


def outcome_distribution(rho, povm):
    return np.array([born_probability(rho, e) for e in povm])


def sic_tetrahedron():
    """Canonical qubit SIC with one Bloch vector on +z."""
    return SicSet.from_projectors(DensityOperator.from_bloch(n) for n in TETRAHEDRON_BLOCH)


def pauli_measurement(axis):
    """Projective measurement onto the +1 then -1 eigenstates of a Pauli."""
    axis = str(axis).upper()
    if axis not in PAULI:
        raise ValueError(f"unknown Pauli axis {axis!r}")
    P = PAULI[axis]
    return Povm((Effect(0.5 * (I2 + P)), Effect(0.5 * (I2 - P))), labels=("+", "-"))


def pauli_eigenstates():
    """The six stabilizer states, ordered +x, -x, +y, -y, +z, -z."""
    out = []
    for axis in "XYZ":
        for e in pauli_measurement(axis):
            out.append(DensityOperator(e.matrix))
    return out


def random_pure_state(rng):
    """Haar-random pure qubit state (normalized complex Gaussian vector)."""
    psi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return DensityOperator.from_ket(psi)


def random_unitary(rng):
    """Haar-random 2x2 unitary via QR with phase correction."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / SQRT2
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_mixed_state(rng):
    """Rank-2 state: partial trace of a Haar-random two-qubit pure state."""
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi = (psi / np.linalg.norm(psi)).reshape(2, 2)
    rho = psi @ psi.conj().T
    return DensityOperator(0.5 * (rho + rho.conj().T))


def _check_distribution(dist, atol=1e-9):
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 1 or dist.size == 0:
        raise ValueError("distribution must be a non-empty vector")
    if np.any(dist < -atol) or abs(dist.sum() - 1.0) > atol:
        raise ValueError(f"not a normalized probability vector: {dist}")
    return dist


def sample_outcome(dist, rng):
    """Draw one index by inverse CDF over ``dist`` in the given order."""
    return int(sample_outcomes(dist, 1, rng)[0])


def sample_outcomes(dist, size, rng):
    dist = _check_distribution(dist)
    cdf = np.cumsum(dist)
    u = rng.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, dist.size - 1)


def urgleichung_predict(p, r, d=D):
    """Predict factual probabilities from SIC reference probabilities.

    ``q(j) = sum_i ((d+1) p(i) - 1/d) r(j|i)`` with ``r[j, i] = r(j|i)``.
    No clamping: non-quantum inputs may give values outside [0, 1].
    """
    p = np.asarray(p, dtype=float)
    r = np.atleast_2d(np.asarray(r, dtype=float))
    if p.shape != (d * d,):
        raise ValueError(f"p must have {d * d} entries, got shape {p.shape}")
    if r.shape[1] != d * d:
        raise ValueError(f"r must have {d * d} columns, got shape {r.shape}")
    return r @ ((d + 1) * p - 1.0 / d)


def reference_probabilities(rho, povm, sic):
    """Return ``(q, p, r)``: factual, SIC and conditional probabilities."""
    q = outcome_distribution(rho, povm)
    p = outcome_distribution(rho, sic.povm)
    r = np.array([[born_probability(pi, e) for pi in sic.projectors] for e in povm])
    return q, p, r


# -- displaced Sagnac interferometer ------------------------------------------------

@dataclass(frozen=True)
class SagnacParams:
    """Half-waveplate angles inside the interferometer.

    The amplitudes are ``x = cos(theta0/2) = sin(theta1/2)`` and
    ``y = sin(theta0/2) = -cos(theta1/2)``, so consistent pairs satisfy
    ``theta1 = theta0 + pi``.
    """

    theta0: float
    theta1: float

    def __post_init__(self):
        mismatch = max(abs(np.cos(self.theta0 / 2) - np.sin(self.theta1 / 2)),
                       abs(np.sin(self.theta0 / 2) + np.cos(self.theta1 / 2)))
        if mismatch > 1e-9:
            raise ValueError(f"inconsistent waveplate angles (mismatch {mismatch:.3g})")

    @classmethod
    def from_theta0(cls, theta0):
        return cls(theta0, theta0 + np.pi)

    @classmethod
    def sic(cls):
        """Angles at which the doubled effects are a SIC."""
        x = np.sqrt(0.5 + 0.5 / np.sqrt(3.0))
        return cls.from_theta0(2.0 * np.arccos(x))

    @property
    def x(self):
        return float(np.cos(self.theta0 / 2))

    @property
    def y(self):
        return float(np.sin(self.theta0 / 2))


def sagnac_effect_matrices(x, y):
    if abs(x * x + y * y - 1.0) > 1e-12:
        raise ValueError("Sagnac amplitudes need x^2 + y^2 = 1")
    xy = x * y
    return [
        0.5 * np.array([[x * x, -xy], [-xy, y * y]], dtype=complex),
        0.5 * np.array([[x * x, xy], [xy, y * y]], dtype=complex),
        0.5 * np.array([[y * y, -1j * xy], [1j * xy, x * x]], dtype=complex),
        0.5 * np.array([[y * y, 1j * xy], [-1j * xy, x * x]], dtype=complex),
    ]


def sagnac_povm(params):
    """Four-outcome POVM realised by the displaced Sagnac interferometer."""
    return Povm(tuple(Effect(m) for m in sagnac_effect_matrices(params.x, params.y)))


def sagnac_sic():
    """SIC whose POVM is the Sagnac POVM at the SIC waveplate setting."""
    return SicSet.from_projectors(2.0 * e.matrix for e in sagnac_povm(SagnacParams.sic()))


def qwp(phi):
    c, s = np.cos(2 * phi), np.sin(2 * phi)
    return np.array([[1j - c, s], [s, 1j + c]], dtype=complex) / SQRT2


def hwp(phi):
    c, s = np.cos(2 * phi), np.sin(2 * phi)
    return np.array([[c, -s], [-s, -c]], dtype=complex)


def _idx(pol, path):
    # basis |pol, path>, pol H=0 V=1
    return 2 * pol + path


def sagnac_unitary(x, y):
    """Interferometer unitary on polarization (x) path.

    Only path-0 inputs are specified physically; the path-1 columns are an
    arbitrary unitary completion.
    """
    U = np.zeros((4, 4), dtype=complex)
    H, V = 0, 1
    U[_idx(H, 0), _idx(H, 0)] = x
    U[_idx(V, 1), _idx(H, 0)] = -y
    U[_idx(V, 0), _idx(V, 0)] = y
    U[_idx(H, 1), _idx(V, 0)] = x
    U[_idx(V, 1), _idx(V, 1)] = x
    U[_idx(H, 0), _idx(V, 1)] = y
    U[_idx(V, 0), _idx(H, 1)] = x
    U[_idx(H, 1), _idx(H, 1)] = -y
    return U


def waveplate_unitary():
    """HWP(pi/8) on path 0; QWP(pi/4) then HWP(pi/4) on path 1."""
    blocks = [hwp(np.pi / 8), hwp(np.pi / 4) @ qwp(np.pi / 4)]
    U = np.zeros((4, 4), dtype=complex)
    for path, B in enumerate(blocks):
        for a in range(2):
            for b in range(2):
                U[_idx(a, path), _idx(b, path)] = B[a, b]
    return U


#: detector order (path, polarization) matching the four closed-form effects
SAGNAC_DETECTORS = ((0, 0), (0, 1), (1, 1), (1, 0))


def sagnac_povm_from_unitaries(params):
    """Effects obtained by propagating through the full optical chain.

    The polarizing beam splitters only route ``(path, polarization)`` modes to
    separate detectors, so they act as the identity on this basis. Each effect
    is ``A^dagger A`` with ``A`` the path-0 input to detector amplitude map.
    """
    U = waveplate_unitary() @ sagnac_unitary(params.x, params.y)
    effects = []
    for path, pol in SAGNAC_DETECTORS:
        row = np.array([U[_idx(pol, path), _idx(b, 0)] for b in range(2)])
        effects.append(np.outer(row.conj(), row))
    return effects
