import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bornsynth import qubit
from bornsynth.qubit import (I2, DensityOperator, Effect, Povm, SagnacParams, SicSet,
                             born_probability, outcome_distribution, pauli_measurement,
                             random_pure_state, reference_probabilities, sample_outcome,
                             sample_outcomes, sic_tetrahedron, urgleichung_predict)

KET0 = DensityOperator.from_ket([1, 0])
KET1 = DensityOperator.from_ket([0, 1])
MIXED = DensityOperator(I2 / 2)


# -- type invariants --------------------------------------------------------------------

def test_density_operator_rejects_bad_inputs():
    with pytest.raises(ValueError):
        DensityOperator(np.array([[1, 1], [0, 0]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityOperator(np.eye(2))  # trace 2
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.5, -0.5]))  # negative eigenvalue
    with pytest.raises(ValueError):
        DensityOperator(np.eye(3) / 3)


def test_effect_and_povm_invariants():
    with pytest.raises(ValueError):
        Effect(np.diag([1.2, 0.0]))
    with pytest.raises(ValueError):
        Povm((np.diag([1.0, 0.0]), np.diag([0.0, 0.5])))
    povm = Povm((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    assert povm.labels == (1, 2)


def test_sic_set_rejects_non_equiangular():
    with pytest.raises(ValueError):
        SicSet.from_projectors([s.matrix for s in qubit.pauli_eigenstates()[:4]])


def test_bloch_round_trip():
    n = np.array([0.3, -0.4, 0.5])
    rho = DensityOperator.from_bloch(n)
    np.testing.assert_allclose(rho.bloch(), n, atol=1e-14)


# -- Born probabilities ------------------------------------------------------------------

def test_born_probability_examples():
    assert born_probability(KET0, Effect(KET0.matrix)) == 1.0
    sic = sic_tetrahedron()
    for e in sic.povm:
        assert born_probability(MIXED, e) == pytest.approx(0.25, abs=1e-15)
    probs = [born_probability(KET0, Effect(p.matrix)) for p in sic.projectors]
    assert probs[0] == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(probs[1:], 1 / 3, atol=1e-12)


def test_born_probability_clamps_near_boundary():
    e = Effect(np.diag([1.0, 0.0]))
    rho = DensityOperator(np.diag([1.0 + 5e-13, -5e-13]))
    assert born_probability(rho, e) == 1.0


def test_born_probability_validates():
    with pytest.raises(ValueError):
        born_probability(np.eye(2), np.diag([1.0, 0.0]))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from("XYZ"))
def test_outcome_distribution_is_normalized(seed, axis):
    rho = random_pure_state(np.random.default_rng(seed))
    for povm in (pauli_measurement(axis), sic_tetrahedron().povm):
        dist = outcome_distribution(rho, povm)
        assert dist.min() >= -1e-12
        assert dist.sum() == pytest.approx(1.0, abs=1e-12)


# -- SIC ---------------------------------------------------------------------------------

def test_tetrahedron_sic_invariants():
    sic = sic_tetrahedron()
    ov = sic.overlaps()
    np.testing.assert_allclose(np.diag(ov), 1.0, atol=1e-12)
    off = ov[~np.eye(4, dtype=bool)]
    np.testing.assert_allclose(off, 1 / 3, atol=1e-12)
    np.testing.assert_allclose(sum(e.matrix for e in sic.povm), I2, atol=1e-12)
    np.testing.assert_allclose(sic.projectors[0].bloch(), [0, 0, 1], atol=1e-15)


def test_tetrahedron_bloch_vectors():
    expected = [(0, 0, 1), (2 * np.sqrt(2) / 3, 0, -1 / 3),
                (-np.sqrt(2) / 3, np.sqrt(2 / 3), -1 / 3),
                (-np.sqrt(2) / 3, -np.sqrt(2 / 3), -1 / 3)]
    got = [p.bloch() for p in sic_tetrahedron().projectors]
    np.testing.assert_allclose(got, expected, atol=1e-14)


# -- Pauli measurements ---------------------------------------------------------------

def test_pauli_measurements():
    z = pauli_measurement("Z")
    np.testing.assert_allclose(z[0].matrix, np.diag([1, 0]))
    np.testing.assert_allclose(z[1].matrix, np.diag([0, 1]))
    np.testing.assert_allclose(outcome_distribution(MIXED, pauli_measurement("X")), [0.5, 0.5])
    np.testing.assert_allclose(outcome_distribution(KET0, pauli_measurement("Y")), [0.5, 0.5],
                               atol=1e-15)
    with pytest.raises(ValueError):
        pauli_measurement("W")


def test_pauli_eigenstates_order():
    states = qubit.pauli_eigenstates()
    bloch = np.array([s.bloch() for s in states])
    expected = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]])
    np.testing.assert_allclose(bloch, expected, atol=1e-15)


# -- random states & sampling -----------------------------------------------------------

def test_random_pure_state_purity_and_determinism():
    a = random_pure_state(np.random.default_rng(7))
    b = random_pure_state(np.random.default_rng(7))
    assert a.purity() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(a.matrix, b.matrix)


def test_random_pure_state_haar_mean():
    rng = np.random.default_rng(11)
    psi = rng.standard_normal((100_000, 2)) + 1j * rng.standard_normal((100_000, 2))
    # Same construction as random_pure_state, vectorized for speed.
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    mean = np.einsum("ni,nj->ij", psi, psi.conj()) / len(psi)
    np.testing.assert_allclose(mean, I2 / 2, atol=0.01)
    # and a direct (slower) check on the library function itself
    rng = np.random.default_rng(12)
    direct = sum(random_pure_state(rng).matrix for _ in range(5000)) / 5000
    np.testing.assert_allclose(direct, I2 / 2, atol=0.03)


def test_random_pure_state_bloch_uniform():
    # Haar measure <=> uniform Bloch sphere: z-component uniform on [-1, 1].
    rng = np.random.default_rng(3)
    z = np.array([random_pure_state(rng).bloch()[2] for _ in range(4000)])
    hist, _ = np.histogram(z, bins=8, range=(-1, 1))
    expected = len(z) / 8
    chi2 = ((hist - expected) ** 2 / expected).sum()
    assert chi2 < 24.3  # chi-square 7 dof, p = 0.001


def test_random_mixed_state_is_rank_two():
    rng = np.random.default_rng(5)
    for _ in range(50):
        rho = qubit.random_mixed_state(rng)
        assert np.linalg.eigvalsh(rho.matrix).min() > 0
        assert rho.purity() < 1.0


def test_random_unitary_is_unitary():
    U = qubit.random_unitary(np.random.default_rng(2))
    np.testing.assert_allclose(U @ U.conj().T, I2, atol=1e-14)


def test_sample_outcome_examples():
    rng = np.random.default_rng(0)
    assert all(sample_outcome([1.0, 0.0], rng) == 0 for _ in range(100))
    draws = sample_outcomes([0.22, 0.78], 300_000, np.random.default_rng(1))
    assert abs(np.mean(draws == 0) - 0.22) < 0.005
    a = sample_outcomes([0.2, 0.3, 0.5], 50, np.random.default_rng(9))
    b = sample_outcomes([0.2, 0.3, 0.5], 50, np.random.default_rng(9))
    np.testing.assert_array_equal(a, b)


def test_sample_outcome_rejects_unnormalized():
    with pytest.raises(ValueError):
        sample_outcome([0.5, 0.4], np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_outcome([1.2, -0.2], np.random.default_rng(0))


# -- Urgleichung ---------------------------------------------------------------------------

def test_urgleichung_examples():
    sic = sic_tetrahedron()
    for axis in "XYZ":
        povm = pauli_measurement(axis)
        q, p, r = reference_probabilities(MIXED, povm, sic)
        np.testing.assert_allclose(p, 0.25, atol=1e-15)
        np.testing.assert_allclose(urgleichung_predict(p, r), r.sum(axis=1) / 4, atol=1e-15)
        np.testing.assert_allclose(urgleichung_predict(p, r), q, atol=1e-12)
    r = np.zeros((2, 4))
    r[0] = 1.0
    assert urgleichung_predict([1, 0, 0, 0], r)[0] == pytest.approx(1.0)


def test_urgleichung_shape_errors():
    with pytest.raises(ValueError):
        urgleichung_predict(np.ones(3) / 3, np.ones((2, 4)))
    with pytest.raises(ValueError):
        urgleichung_predict(np.ones(4) / 4, np.ones((2, 3)))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from("XYZ"))
def test_urgleichung_matches_born_rule(seed, axis):
    rho = random_pure_state(np.random.default_rng(seed))
    q, p, r = reference_probabilities(rho, pauli_measurement(axis), sic_tetrahedron())
    np.testing.assert_allclose(urgleichung_predict(p, r), q, atol=1e-12)


def test_urgleichung_independent_of_sic_orientation():
    rng = np.random.default_rng(4)
    for _ in range(50):
        rho = qubit.random_mixed_state(rng)
        q, p, r = reference_probabilities(rho, pauli_measurement("Y"), qubit.sagnac_sic())
        np.testing.assert_allclose(urgleichung_predict(p, r), q, atol=1e-12)


# -- Sagnac ----------------------------------------------------------------------------------

def test_sagnac_params_consistency():
    params = SagnacParams.sic()
    assert params.x ** 2 + params.y ** 2 == pytest.approx(1.0)
    assert params.x ** 2 == pytest.approx(0.5 + 0.5 / np.sqrt(3))
    assert np.cos(params.theta0 / 2) == pytest.approx(np.sin(params.theta1 / 2), abs=1e-12)
    with pytest.raises(ValueError):
        SagnacParams(0.3, 0.3)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 2 * np.pi))
def test_sagnac_completeness_any_angle(theta0):
    params = SagnacParams.from_theta0(theta0)
    effects = [e.matrix for e in qubit.sagnac_povm(params)]
    np.testing.assert_allclose(sum(effects), I2, atol=1e-14)
    for e in effects:
        assert np.trace(e).real == pytest.approx(0.5)


def test_sagnac_sic_overlaps():
    doubled = [2 * e.matrix for e in qubit.sagnac_povm(SagnacParams.sic())]
    for a in range(4):
        for b in range(a + 1, 4):
            assert np.trace(doubled[a] @ doubled[b]).real == pytest.approx(1 / 3, abs=1e-12)
    sic = qubit.sagnac_sic()
    assert isinstance(sic, SicSet)


def test_sagnac_degenerate_setting():
    effects = [e.matrix for e in qubit.sagnac_povm(SagnacParams.from_theta0(0.0))]
    np.testing.assert_allclose(effects[0], np.diag([0.5, 0]), atol=1e-15)
    np.testing.assert_allclose(effects[1], np.diag([0.5, 0]), atol=1e-15)
    np.testing.assert_allclose(effects[2], np.diag([0, 0.5]), atol=1e-15)
    np.testing.assert_allclose(effects[3], np.diag([0, 0.5]), atol=1e-15)


@pytest.mark.parametrize("theta0", [0.0, 0.4, 1.1, SagnacParams.sic().theta0, 2.9])
def test_sagnac_unitary_chain_matches_closed_form(theta0):
    params = SagnacParams.from_theta0(theta0)
    direct = [e.matrix for e in qubit.sagnac_povm(params)]
    chain = qubit.sagnac_povm_from_unitaries(params)
    for a, b in zip(direct, chain):
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_waveplates_are_unitary():
    for phi in (0.0, 0.3, np.pi / 8):
        for U in (qubit.qwp(phi), qubit.hwp(phi)):
            np.testing.assert_allclose(U @ U.conj().T, I2, atol=1e-14)
