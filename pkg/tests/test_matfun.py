import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from adrexp.matfun import (MatrixFunctionError, cached_phi_family, clear_phi_cache,
                           expm_dense, phi_funcs, phi_series_oracle)

E = math.e


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def random_matrix(rng, n, norm1):
    A = rng.standard_normal((n, n))
    return A * (norm1 / np.linalg.norm(A, 1))


matrix_strategy = st.tuples(st.integers(2, 32), st.floats(0.01, 8.0),
                            st.integers(0, 2 ** 31))


# --- expm_dense -------------------------------------------------------------

def test_expm_zero_is_identity():
    np.testing.assert_array_equal(expm_dense(np.zeros((4, 4))), np.eye(4))


def test_expm_diagonal():
    np.testing.assert_allclose(expm_dense(np.diag([1.0, 2.0])), np.diag([E, E ** 2]),
                               rtol=1e-14)


def test_expm_nilpotent():
    np.testing.assert_allclose(expm_dense(np.array([[0.0, 1.0], [0.0, 0.0]])),
                               [[1.0, 1.0], [0.0, 1.0]], rtol=1e-15, atol=1e-16)


@pytest.mark.parametrize("bad", [np.ones((2, 3)), np.array([[np.nan, 0.0], [0.0, 1.0]]),
                                 np.array([[np.inf]])])
def test_expm_rejects_bad_input(bad):
    with pytest.raises(MatrixFunctionError):
        expm_dense(bad)


@settings(max_examples=60, deadline=None)
@given(matrix_strategy)
def test_expm_matches_series_oracle(case):
    n, norm1, seed = case
    A = random_matrix(np.random.default_rng(seed), n, norm1)
    assert rel(expm_dense(A), phi_series_oracle(A, 0)) <= 1e-12


def test_expm_large_norm_against_scipy():
    A = random_matrix(np.random.default_rng(1), 20, 300.0)
    assert rel(expm_dense(A), expm(A)) <= 1e-11


def test_expm_stiff_diffusion_matrix():
    n = 50
    A = (np.diag(-2.0 * np.ones(n)) + np.diag(np.ones(n - 1), 1)
         + np.diag(np.ones(n - 1), -1)) * 1e4
    assert rel(expm_dense(A), expm(A)) <= 1e-10


# --- phi_funcs --------------------------------------------------------------

def test_phi_of_zero():
    fam = phi_funcs(np.zeros((3, 3)), 4)
    for ell in range(1, 5):
        np.testing.assert_allclose(fam.phi(ell), np.eye(3) / math.factorial(ell), rtol=1e-15)


def test_phi_scalar_closed_forms():
    fam = phi_funcs(np.array([[1.0]]), 2)
    assert fam.phi(1)[0, 0] == pytest.approx(E - 1, rel=1e-14)
    assert fam.phi(2)[0, 0] == pytest.approx(E - 2, rel=1e-14)
    assert fam.phi(1)[0, 0] == pytest.approx(1.718281828, abs=1e-9)


def test_phi_family_layout():
    A = random_matrix(np.random.default_rng(2), 5, 1.0)
    fam = phi_funcs(A, 3)
    assert fam.order == 3 and len(fam.matrices) == 3
    np.testing.assert_array_equal(fam.base, A)
    np.testing.assert_array_equal(fam.phi(0), fam.exp)
    assert all(M.shape == (5, 5) for M in fam.matrices)


def test_phi_random_8x8_norm4_against_oracle():
    A = random_matrix(np.random.default_rng(3), 8, 4.0)
    fam = phi_funcs(A, 2)
    for ell in (1, 2):
        assert rel(fam.phi(ell), phi_series_oracle(A, ell)) <= 1e-11


@pytest.mark.parametrize("ell_max", [0, -1, 5])
def test_phi_order_limits(ell_max):
    with pytest.raises(MatrixFunctionError):
        phi_funcs(np.eye(2), ell_max)


def test_phi_size_limit():
    with pytest.raises(MatrixFunctionError):
        phi_funcs(np.zeros((8, 8)), 2, max_size=4)


@settings(max_examples=100, deadline=None)
@given(matrix_strategy)
def test_phi_recurrence(case):
    n, norm1, seed = case
    A = random_matrix(np.random.default_rng(seed), n, norm1)
    fam = phi_funcs(A, 4)
    for ell in range(0, 4):
        lhs = A @ fam.phi(ell + 1)
        rhs = fam.phi(ell) - np.eye(n) / math.factorial(ell)
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(fam.phi(ell))


@settings(max_examples=60, deadline=None)
@given(matrix_strategy)
def test_phi_exp_agrees_with_expm(case):
    n, norm1, seed = case
    A = random_matrix(np.random.default_rng(seed), n, norm1)
    assert rel(phi_funcs(A, 1).exp, expm_dense(A)) <= 1e-11


@settings(max_examples=40, deadline=None)
@given(matrix_strategy)
def test_phi_symmetric_input_gives_symmetric_output(case):
    n, norm1, seed = case
    B = random_matrix(np.random.default_rng(seed), n, norm1)
    A = 0.5 * (B + B.T)
    fam = phi_funcs(A, 4)
    for M in fam.matrices:
        assert np.linalg.norm(M - M.T) <= 1e-12 * np.linalg.norm(M)


def test_phi1_times_a_is_exp_minus_identity():
    A = random_matrix(np.random.default_rng(4), 12, 6.0)
    fam = phi_funcs(A, 1)
    assert rel(fam.phi(1) @ A, fam.exp - np.eye(12)) <= 1e-10


def test_phi_negative_definite_stiff():
    # diffusion-like spectrum far left of the origin
    n = 40
    L = (np.diag(-2.0 * np.ones(n)) + np.diag(np.ones(n - 1), 1)
         + np.diag(np.ones(n - 1), -1)) * 400.0
    fam = phi_funcs(L, 2)
    lam, Q = np.linalg.eigh(L)
    phi1 = Q @ np.diag(np.expm1(lam) / lam) @ Q.T
    phi2 = Q @ np.diag((np.expm1(lam) - lam) / lam ** 2) @ Q.T
    assert rel(fam.phi(1), phi1) <= 1e-11
    assert rel(fam.phi(2), phi2) <= 1e-11


# --- series oracle ----------------------------------------------------------

def test_oracle_zero_matrix():
    np.testing.assert_allclose(phi_series_oracle(np.zeros((3, 3)), 3), np.eye(3) / 6,
                               rtol=1e-15)


def test_oracle_scalar_minus_one():
    val = phi_series_oracle(np.array([[-1.0]]), 1)[0, 0]
    assert val == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert val == pytest.approx(0.632120558, abs=1e-9)


@pytest.mark.parametrize("z", [-8.0, -2.5, 0.3, 3.0, 8.0])
@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_oracle_scalar_closed_forms(z, ell):
    # phi_l(z) = (e^z - sum_{k<l} z^k/k!) / z^l
    exact = (math.exp(z) - sum(z ** k / math.factorial(k) for k in range(ell))) / z ** ell
    assert phi_series_oracle(np.array([[z]]), ell)[0, 0] == pytest.approx(exact, rel=1e-12)


def test_oracle_rejects_negative_order():
    with pytest.raises(MatrixFunctionError):
        phi_series_oracle(np.eye(2), -1)


# --- cache ------------------------------------------------------------------

def test_cache_returns_same_family_for_same_key():
    clear_phi_cache()
    A = random_matrix(np.random.default_rng(5), 6, 2.0)
    f1 = cached_phi_family(A, 0.1)
    f2 = cached_phi_family(A.copy(), 0.1)
    assert f1 is f2
    assert cached_phi_family(A, 0.2) is not f1
    np.testing.assert_allclose(f1.phi(1), phi_funcs(0.1 * A, 2).phi(1), rtol=1e-15)


def test_cache_concurrent_access():
    clear_phi_cache()
    A = random_matrix(np.random.default_rng(6), 10, 3.0)
    out = []

    def work():
        out.append(cached_phi_family(A, 0.05).phi(2))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(out) == 8
    for M in out[1:]:
        np.testing.assert_array_equal(M, out[0])
