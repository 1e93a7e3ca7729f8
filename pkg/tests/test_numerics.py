import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ctbands.errors import DimensionMismatch, NoConvergence, NotHermitian
from ctbands.numerics import hermitian_eigen, svd
from ctbands.models import RiceMeleSpec, rice_mele_lattice

from oracles import charpoly_roots, det_scan_residual


def random_hermitian(rng, n):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (x + x.conj().T)


def test_diagonal_input():
    w, v = hermitian_eigen(np.diag([2.0, 3.0]))
    np.testing.assert_array_equal(w, [2.0, 3.0])
    np.testing.assert_array_equal(v, np.eye(2))


def test_pauli_x():
    w, _ = hermitian_eigen([[0, 1], [1, 0]])
    np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-15)


def test_matches_characteristic_polynomial_roots():
    rng = np.random.default_rng(6)
    m = random_hermitian(rng, 6)
    roots = charpoly_roots(m)
    assert roots.size == 6
    w, _ = hermitian_eigen(m)
    np.testing.assert_allclose(w, roots, atol=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 17, 40])
def test_residual_and_unitarity(n):
    rng = np.random.default_rng(n)
    m = random_hermitian(rng, n)
    w, v = hermitian_eigen(m)
    tol = 1e-12
    scale = np.linalg.norm(m, 2)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(m @ v - v * w, axis=0).max() <= tol * scale
    assert np.abs(v.conj().T @ v - np.eye(n)).max() <= tol


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigen([[0, 1], [0, 0]])


def test_rejects_rectangular():
    with pytest.raises(DimensionMismatch):
        hermitian_eigen(np.zeros((2, 3)))


def test_iteration_cap():
    rng = np.random.default_rng(0)
    with pytest.raises(NoConvergence):
        hermitian_eigen(random_hermitian(rng, 6), max_sweeps=1)


def hermitian_matrices(max_n=8):
    def build(n):
        parts = arrays(np.float64, (2, n, n), elements=st.floats(-10, 10, allow_nan=False))
        return parts.map(lambda p: (p[0] + 1j * p[1]) + (p[0] + 1j * p[1]).conj().T)

    return st.integers(1, max_n).flatmap(build)


@settings(max_examples=60, deadline=None)
@given(hermitian_matrices())
def test_trace_invariant(m):
    w, _ = hermitian_eigen(m)
    scale = max(np.linalg.norm(m, 2), 1.0)
    assert abs(w.sum() - np.trace(m).real) <= 1e-10 * scale


def test_svd_single_dimer():
    r = svd([[1.0]])
    np.testing.assert_allclose(r.singular_values, [1.0])
    assert abs(abs(r.left_vectors[0, 0]) - 1) < 1e-15
    assert abs(abs(r.right_vectors[0, 0]) - 1) < 1e-15


def test_svd_completes_null_space():
    r = svd(np.diag([3.0, 0.0]))
    np.testing.assert_array_equal(r.singular_values, [3.0, 0.0])
    assert r.n_zero == 1
    u = r.left_vectors
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(np.abs(u[:, 1]), [0.0, 1.0], atol=1e-14)


def test_svd_rice_mele_ring():
    delta = 0.3
    q = rice_mele_lattice(RiceMeleSpec(8, delta)).coupling
    k = 2 * np.pi * np.arange(1, 9) / 8
    analytic = np.sort(2 * np.sqrt(delta**2 + (1 - delta**2) * np.cos(k / 2) ** 2))[::-1]
    # the analytic values really are roots of det(Q^H Q - s^2 I)
    for s in analytic:
        assert det_scan_residual(q, s) < 1e-12
    r = svd(q)
    np.testing.assert_allclose(r.singular_values, analytic, atol=1e-10)


@pytest.mark.parametrize("n", [2, 7, 16, 33])
def test_svd_contract(n):
    rng = np.random.default_rng(100 + n)
    q = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    r = svd(q)
    tol = 1e-10
    assert np.all(np.diff(r.singular_values) <= 0)
    np.testing.assert_allclose(
        q @ r.right_vectors, r.left_vectors * r.singular_values, atol=tol * np.linalg.norm(q, 2)
    )
    for vecs in (r.left_vectors, r.right_vectors):
        assert np.abs(vecs.conj().T @ vecs - np.eye(n)).max() <= tol
    assert np.linalg.norm(q - r.reconstruct()) <= tol * np.linalg.norm(q)


def test_svd_rank_deficient():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 3))
    q = a @ rng.normal(size=(3, 6))
    r = svd(q)
    assert r.n_zero == 3
    u = r.left_vectors
    np.testing.assert_allclose(u.conj().T @ u, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(r.reconstruct(), q, atol=1e-10 * np.linalg.norm(q))


square = st.integers(1, 7).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-5, 5, allow_nan=False))
)


@settings(max_examples=60, deadline=None)
@given(square)
def test_svd_frobenius_and_gram_agreement(q):
    r = svd(q)
    fro2 = np.linalg.norm(q) ** 2
    assert abs(np.sum(r.singular_values**2) - fro2) <= 1e-10 * max(fro2, 1.0)
    w, _ = hermitian_eigen(q.T @ q)
    np.testing.assert_allclose(np.sort(r.singular_values**2), w, atol=1e-9 * max(fro2, 1.0))
