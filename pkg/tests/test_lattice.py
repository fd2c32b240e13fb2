"""Second-difference matrix, analytic eigenpairs, sine basis, and transform."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscillab.lattice import (
    analytic_eigenvalues,
    dst,
    inverse_dst,
    sine_basis,
    toeplitz_second_diff,
)


def test_toeplitz_single_point():
    assert toeplitz_second_diff(1).dense() == pytest.approx(np.array([[-2.0]]))


def test_toeplitz_k4_explicit():
    expected = np.array(
        [
            [-2.0, 1.0, 0.0, 0.0],
            [1.0, -2.0, 1.0, 0.0],
            [0.0, 1.0, -2.0, 1.0],
            [0.0, 0.0, 1.0, -2.0],
        ]
    )
    assert np.array_equal(toeplitz_second_diff(4).dense(), expected)


def test_toeplitz_rejects_empty_grid():
    with pytest.raises(ValueError):
        toeplitz_second_diff(0)
    with pytest.raises(ValueError):
        analytic_eigenvalues(0)


def test_toeplitz_symmetry_and_row_sums():
    for k in (3, 8, 41):
        m = toeplitz_second_diff(k).dense()
        assert np.array_equal(m, m.T)
        sums = m.sum(axis=1)
        assert sums[0] == -1.0 and sums[-1] == -1.0
        assert np.all(sums[1:-1] == 0.0)


def test_eigenvalues_match_dense_solver():
    vals = np.sort(np.linalg.eigvalsh(toeplitz_second_diff(3).dense()))[::-1]
    assert np.max(np.abs(vals - analytic_eigenvalues(3).lambdas)) < 1e-12


def test_eigenvalue_closed_form_points():
    assert analytic_eigenvalues(1).lambdas[0] == pytest.approx(-2.0, abs=1e-14)
    spec3 = analytic_eigenvalues(3)
    assert spec3.lambdas[1] == pytest.approx(-2.0, abs=1e-14)
    assert spec3.lambdas[0] == pytest.approx(-0.5857864376, abs=1e-9)


def test_eigenvalues_decreasing_and_bounded():
    for k in (1, 2, 17, 200):
        lam = analytic_eigenvalues(k).lambdas
        assert np.all(lam > -4.0) and np.all(lam < 0.0)
        assert np.all(np.diff(lam) < 0.0) or k == 1


def test_eigenvalue_pair_sums():
    for k in range(1, 201):
        lam = analytic_eigenvalues(k).lambdas
        assert np.max(np.abs(lam + lam[::-1] + 4.0)) <= 1e-12


def test_sine_basis_small_cases():
    assert sine_basis(1).matrix == pytest.approx(np.array([[1.0]]))
    col2 = sine_basis(3).column(2)
    assert col2 == pytest.approx(np.array([1.0, 0.0, -1.0]), abs=1e-15)


def test_sine_basis_columns_are_eigenvectors():
    t0 = toeplitz_second_diff(5)
    spec = analytic_eigenvalues(5)
    basis = sine_basis(5)
    for j in range(1, 6):
        x = basis.column(j)
        assert np.max(np.abs(t0.matvec(x) - spec.lambdas[j - 1] * x)) < 1e-12


def test_eigen_residual_through_k200():
    for k in range(1, 201):
        t0 = toeplitz_second_diff(k).dense()
        s = sine_basis(k).matrix
        lam = analytic_eigenvalues(k).lambdas
        assert np.max(np.abs(t0 @ s - s * lam)) <= 1e-10


def test_scaled_involution_through_k200():
    for k in range(1, 201):
        s = sine_basis(k).matrix
        defect = (2.0 / (k + 1)) * (s @ s) - np.eye(k)
        assert np.max(np.abs(defect)) <= 1e-10


def test_mirror_alternation_identity():
    for k in (1, 2, 3, 50, 200):
        s = sine_basis(k).matrix
        n = np.arange(1, k + 1)
        signs = np.where(n % 2 == 1, 1.0, -1.0)[:, None]
        assert np.max(np.abs(s - signs * s[:, ::-1])) <= 1e-12


def test_dst_zero_vector():
    assert np.array_equal(dst(np.zeros(9)), np.zeros(9))


def test_dst_of_first_basis_column():
    k = 7
    a = dst(sine_basis(k).column(1))
    expected = np.zeros(k)
    expected[0] = (k + 1) / 2.0
    assert np.max(np.abs(a - expected)) < 1e-12


def test_dst_round_trip_k50(rng):
    v = rng.normal(size=50)
    assert np.max(np.abs((2.0 / 51.0) * dst(dst(v)) - v)) <= 1e-10


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(min_value=1, max_value=64), st.integers(min_value=0, max_value=2**32 - 1))
def test_dst_inverse_round_trip(k, seed):
    v = np.random.default_rng(seed).normal(size=k)
    assert np.max(np.abs(inverse_dst(dst(v)) - v)) <= 1e-9 * max(1.0, np.max(np.abs(v)))


def test_dst_length_validation():
    with pytest.raises(ValueError):
        dst(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        sine_basis(4).transform(np.zeros(5))


def test_dense_basis_cap():
    with pytest.raises(ValueError):
        sine_basis(5000)
