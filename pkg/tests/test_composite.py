import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import loop_partial_trace, random_density, random_invertible, random_state, random_unitary
from qstrata import DimensionError, SingularMatrixError, ValidationError
from qstrata import composite as c
from qstrata.kraus import gl_apply

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_factorization_validation():
    assert c.TensorFactorization((2, 3)).total == 6
    with pytest.raises(ValidationError):
        c.TensorFactorization((4,))
    with pytest.raises(ValidationError):
        c.TensorFactorization((1, 3))


def test_segre_is_kron(rng):
    a, b = random_density(rng, 2), random_density(rng, 3)
    np.testing.assert_array_equal(c.segre(a, b), np.kron(a, b))
    with pytest.raises(ValueError):
        c.segre(a)


def test_partial_trace_examples():
    bell = np.outer(BELL, BELL)
    np.testing.assert_allclose(c.partial_trace(bell, (2, 2), [1]), np.eye(2) / 2, atol=1e-15)
    ghz = np.zeros(8)
    ghz[[0, 7]] = 1 / np.sqrt(2)
    np.testing.assert_allclose(c.partial_trace(np.outer(ghz, ghz), (2, 2, 2), [1, 2]), np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(c.partial_trace(bell, (2, 2), []), bell)
    np.testing.assert_allclose(c.partial_trace(bell, (2, 2), [0, 1]), [[1.0]])


def test_partial_trace_rejects_bad_subsets(rng):
    rho = random_density(rng, 4)
    with pytest.raises(ValueError):
        c.partial_trace(rho, (2, 2), [0, 0])
    with pytest.raises(ValueError):
        c.partial_trace(rho, (2, 2), [2])
    with pytest.raises(DimensionError):
        c.partial_trace(rho, (2, 3), [0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.integers(2, 3), min_size=2, max_size=3), st.data())
def test_partial_trace_matches_loop_oracle(seed, dims, data):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, int(np.prod(dims)))
    traced = data.draw(st.sets(st.integers(0, len(dims) - 1)))
    np.testing.assert_allclose(c.partial_trace(rho, dims, sorted(traced)), loop_partial_trace(rho, dims, sorted(traced)), atol=1e-13)


def test_partial_trace_of_product(rng):
    a, b, d = random_density(rng, 2), random_density(rng, 3), random_density(rng, 2)
    rho = c.segre(a, b, d)
    np.testing.assert_allclose(c.partial_trace(rho, (2, 3, 2), [0, 2]), b, atol=1e-14)
    np.testing.assert_allclose(c.reduced_state(rho, (2, 3, 2), [0, 2]), np.kron(a, d), atol=1e-14)


def test_schmidt_of_bell_and_product(rng):
    dec = c.schmidt(BELL, (2, 2))
    np.testing.assert_allclose(dec.coefficients, [1 / np.sqrt(2)] * 2)
    np.testing.assert_allclose(dec.reassemble(), BELL, atol=1e-15)
    prod = np.kron(random_state(rng, 2), random_state(rng, 3))
    assert c.schmidt_number(prod, (2, 3)) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 4))
def test_schmidt_reassembles_and_is_orthonormal(seed, n1, n2):
    rng = np.random.default_rng(seed)
    psi = random_state(rng, n1 * n2)
    dec = c.schmidt(psi, (n1, n2))
    np.testing.assert_allclose(dec.reassemble(), psi, atol=1e-12)
    np.testing.assert_allclose(dec.left.conj().T @ dec.left, np.eye(dec.number), atol=1e-12)
    np.testing.assert_allclose(dec.right.conj().T @ dec.right, np.eye(dec.number), atol=1e-12)
    assert np.sum(dec.coefficients**2) == pytest.approx(1)
    # squared coefficients are the spectrum of the reduced state
    red = c.partial_trace(np.outer(psi, psi.conj()), (n1, n2), [1])
    w = np.sort(np.linalg.eigvalsh(red))[::-1][: dec.number]
    np.testing.assert_allclose(dec.coefficients**2, w, atol=1e-12)


def test_schmidt_needs_two_factors(rng):
    with pytest.raises(ValueError):
        c.schmidt(random_state(rng, 8), (2, 2, 2))


def test_product_action(rng):
    a, b = random_invertible(rng, 2), random_invertible(rng, 3)
    rho = random_density(rng, 6)
    np.testing.assert_allclose(c.product_action([a, b], rho, (2, 3)), gl_apply(np.kron(a, b), rho), atol=1e-14)
    with pytest.raises(SingularMatrixError):
        c.product_action([np.diag([1.0, 0.0]), b], rho)
    with pytest.raises(DimensionError):
        c.product_action([b, a], rho, (2, 3))


def test_random_isometry(rng):
    v = c.random_isometry(5, 3, rng)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-13)


def test_decompositions_reproduce_state(rng):
    rho = random_density(rng, 4, 2)
    w, vecs = np.linalg.eigh(rho)
    phi = vecs[:, w > 1e-9] * np.sqrt(w[w > 1e-9])
    psis = c.decomposition_from_isometry(phi, c.random_isometry(4, 2, rng))
    np.testing.assert_allclose(psis.T @ psis.conj(), rho, atol=1e-13)


def _linear_entropy(psi):
    red = c.partial_trace(np.outer(psi, psi.conj()), (2, 2), [1])
    return 1 - np.trace(red @ red).real


def test_roof_estimates_are_monotone_and_valid(rng):
    rho = random_density(rng, 4, 3)
    values = []
    for strategy in ("eigen", "random", "refine"):
        est = c.convex_roof_estimate(_linear_entropy, rho, strategy, seed=5)
        recon = np.einsum("i,ij,ik->jk", est.weights, est.states, est.states.conj())
        np.testing.assert_allclose(recon, rho, atol=1e-12)
        assert est.weights.sum() == pytest.approx(1)
        assert est.isometry.shape[0] <= 9
        values.append(est.value)
    assert values[0] >= values[1] >= values[2]


def test_roof_of_pure_state_is_function_value(rng):
    psi = random_state(rng, 4)
    est = c.convex_roof_estimate(_linear_entropy, np.outer(psi, psi.conj()), "refine")
    assert est.value == pytest.approx(_linear_entropy(psi))


def test_roof_of_product_mixture_is_zero():
    # |00><00|/2 + |11><11|/2 has a separable decomposition: the eigen one
    rho = np.diag([0.5, 0, 0, 0.5])
    assert c.convex_roof_estimate(_linear_entropy, rho).value == pytest.approx(0, abs=1e-15)


def test_roof_options(rng):
    rho = random_density(rng, 4)
    with pytest.raises(ValueError):
        c.convex_roof_estimate(_linear_entropy, rho, "annealing")
    with pytest.raises(ValueError):
        c.convex_roof_estimate(_linear_entropy, rho, "random", max_terms=2)
    a = c.convex_roof_estimate(_linear_entropy, rho, "refine", seed=3)
    b = c.convex_roof_estimate(_linear_entropy, rho, "refine", seed=3)
    assert a.value == b.value


def test_local_unitaries_preserve_reduced_spectra(rng):
    psi = random_state(rng, 6)
    moved = np.kron(random_unitary(rng, 2), random_unitary(rng, 3)) @ psi
    w1 = np.linalg.eigvalsh(c.partial_trace(np.outer(psi, psi.conj()), (2, 3), [1]))
    w2 = np.linalg.eigvalsh(c.partial_trace(np.outer(moved, moved.conj()), (2, 3), [1]))
    np.testing.assert_allclose(w1, w2, atol=1e-12)
