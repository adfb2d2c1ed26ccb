import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegrain.errors import DimensionError, DomainError
from coarsegrain.linalg import (
    PAULI_X,
    apply_superop,
    check_density_matrix,
    devectorize,
    expm,
    min_eigenvalue_hermitian,
    partial_trace_bath,
    sandwich,
    superop_from_map,
    vectorize,
)

from conftest import random_density


def taylor(a, terms=30):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def test_expm_of_zero_is_identity():
    assert np.array_equal(expm(np.zeros((2, 2))), np.eye(2))


def test_expm_diagonal():
    a, b = 1 + 2j, -3.0
    np.testing.assert_allclose(expm(np.diag([a, b])), np.diag([np.exp(a), np.exp(b)]), rtol=1e-13)


def test_expm_matches_taylor(rng):
    for _ in range(20):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        a /= np.linalg.norm(a, 2)
        ref = taylor(a)
        assert np.linalg.norm(expm(a) - ref, 2) <= 1e-12 * np.linalg.norm(ref, 2)


def test_expm_large_norm_against_eigendecomposition(rng):
    h = rng.normal(size=(5, 5))
    h = 50 * (h + h.T) / np.linalg.norm(h + h.T, 2)
    w, v = np.linalg.eigh(h)
    ref = v @ np.diag(np.exp(w)) @ v.T
    assert np.linalg.norm(expm(h) - ref, 2) <= 1e-12 * np.linalg.norm(ref, 2)


def test_expm_rejects_bad_input():
    with pytest.raises(DimensionError):
        expm(np.zeros((2, 3)))
    with pytest.raises(DomainError):
        expm(np.array([[np.nan, 0], [0, 1]]))


def test_partial_trace_of_product_state(rng):
    rs, rb = random_density(rng, 2), random_density(rng, 3)
    np.testing.assert_allclose(partial_trace_bath(np.kron(rs, rb), 2, 3), rs, atol=1e-15)


def test_partial_trace_of_bell_state():
    psi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    np.testing.assert_allclose(partial_trace_bath(np.outer(psi, psi), 2, 2), np.eye(2) / 2, atol=1e-16)


def test_partial_trace_matches_index_loops(rng):
    rho = random_density(rng, 4)
    ref = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            for k in range(2):
                ref[a, b] += rho[a * 2 + k, b * 2 + k]
    assert np.abs(partial_trace_bath(rho, 2, 2) - ref).max() <= 1e-14


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionError):
        partial_trace_bath(np.eye(4), 2, 3)


@pytest.mark.parametrize(
    "matrix, expected",
    [(np.eye(3), 1.0), (np.diag([0.2, 0.8]), 0.2), (PAULI_X, -1.0)],
)
def test_min_eigenvalue_examples(matrix, expected):
    assert min_eigenvalue_hermitian(matrix) == pytest.approx(expected, abs=1e-12)


def test_min_eigenvalue_against_lapack(rng):
    for d in (2, 5, 9, 16):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = g + g.conj().T
        ref = np.linalg.eigvalsh(h)[0]
        assert abs(min_eigenvalue_hermitian(h) - ref) <= 1e-10 * np.linalg.norm(h, 2)


def test_min_eigenvalue_rejects_non_hermitian():
    with pytest.raises(DomainError):
        min_eigenvalue_hermitian(np.array([[0, 1], [0, 0]]))


def test_vectorize_is_row_major():
    rho = np.array([[1, 2], [3, 4]])
    assert list(vectorize(rho)) == [1, 2, 3, 4]


def test_devectorize_rejects_non_square_length():
    with pytest.raises(DimensionError):
        devectorize(np.ones(5))


def test_identity_superoperator(rng):
    rho = random_density(rng, 3)
    ident = superop_from_map(lambda m: m, 3)
    assert np.array_equal(ident, np.eye(9))
    assert np.array_equal(apply_superop(ident, rho), rho)


def test_sandwich_convention(rng):
    x, y, rho = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    np.testing.assert_allclose(apply_superop(sandwich(x, y), rho), x @ rho @ y, atol=1e-13)


def test_check_density_matrix():
    check_density_matrix(np.diag([0.3, 0.7]))
    with pytest.raises(DomainError):
        check_density_matrix(np.diag([0.3, 0.8]))
    with pytest.raises(DomainError):
        check_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))


complex_entries = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


@given(st.integers(1, 8).flatmap(lambda d: st.lists(complex_entries, min_size=d * d, max_size=d * d)))
def test_vectorize_round_trip(entries):
    d = math.isqrt(len(entries))
    m = np.array(entries, dtype=complex).reshape(d, d)
    assert np.array_equal(devectorize(vectorize(m)), m)


diag_entries = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@given(st.lists(diag_entries, min_size=3, max_size=3), st.lists(diag_entries, min_size=3, max_size=3))
def test_expm_of_commuting_sum(a, b):
    rng = np.random.default_rng(len(a))
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    ma, mb = q @ np.diag(a) @ q.T, q @ np.diag(b) @ q.T
    lhs, rhs = expm(ma + mb), expm(ma) @ expm(mb)
    assert np.abs(lhs - rhs).max() <= 1e-10 * max(1.0, np.abs(lhs).max())


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 4))
def test_partial_trace_preserves_trace(seed, ds, db):
    rho = random_density(np.random.default_rng(seed), ds * db)
    assert abs(np.trace(partial_trace_bath(rho, ds, db)) - np.trace(rho)) <= 1e-14


@given(st.integers(0, 2**32 - 1), st.floats(-10, 10))
def test_unitary_evolution_operator(seed, t):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = (g + g.conj().T) / 2
    u = expm(-1j * h * t)
    assert np.abs(u @ u.conj().T - np.eye(4)).max() <= 1e-10
