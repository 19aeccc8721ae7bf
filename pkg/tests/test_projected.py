import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dense_kron_sum, fvec, random_stable
from tbrk.projected import (dense_to_tt_solution, kron_sum_matrix, projected_residual_norm,
                            solve_dense_diag, solve_dense_schur, solve_dense_vectorized,
                            solve_projected_dense, solve_tt_als, sylvester_apply,
                            tt_sylvester_residual)
from tbrk.tensors import TTTensor, tt_full, tt_laplace_apply, tt_norm


def spd(rng, n):
    M = rng.standard_normal((n, n))
    return M @ M.T + n * np.eye(n)


def test_identity_operators_divide_by_d():
    rng = np.random.default_rng(0)
    C = rng.standard_normal((3, 4, 2))
    Y = solve_dense_diag([np.eye(3), np.eye(4), np.eye(2)], C)
    assert np.allclose(Y, C / 3)


def test_diagonal_closed_form():
    rng = np.random.default_rng(1)
    C = rng.standard_normal((2, 2))
    Y = solve_dense_diag([np.diag([1.0, 2.0]), np.diag([10.0, 20.0])], C)
    ref = C / (np.array([1.0, 2.0])[:, None] + np.array([10.0, 20.0])[None, :])
    assert np.allclose(Y, ref)


def test_diag_matches_kronecker_oracle():
    rng = np.random.default_rng(2)
    mats = [spd(rng, 5) for _ in range(3)]
    C = rng.standard_normal((5, 5, 5))
    Y = solve_dense_diag(mats, C)
    ref = np.linalg.solve(dense_kron_sum(mats), fvec(C))
    assert np.allclose(fvec(Y), ref)
    assert np.allclose(kron_sum_matrix(mats), dense_kron_sum(mats))


@given(st.integers(0, 10 ** 6))
def test_schur_agrees_with_diag(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    mats = [spd(rng, int(rng.integers(2, 6))) for _ in range(d)]
    C = rng.standard_normal([M.shape[0] for M in mats])
    Y1, Y2 = solve_dense_diag(mats, C), solve_dense_schur(mats, C)
    assert np.linalg.norm(Y1 - Y2) <= 1e-9 * np.linalg.norm(Y1)


def test_schur_handles_nonnormal_and_trivial_cases():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((6, 6)) + 6 * np.eye(6)
    C = rng.standard_normal(6)
    assert np.allclose(solve_dense_schur([A], C), np.linalg.solve(A, C))
    assert np.allclose(solve_dense_schur([A, A.T], np.zeros((6, 6))), 0)
    # a Jordan-like block defeats diagonalisation but not the Schur path
    J = np.eye(4) * 2 + np.diag(np.ones(3) * 1e4, 1)
    mats = [J, random_stable(rng, 3)]
    C = rng.standard_normal((4, 3))
    Y = solve_projected_dense(mats, C)
    # normwise backward error, the quantity a Schur based solver controls
    scale = sum(np.linalg.norm(M, 2) for M in mats) * np.linalg.norm(Y) + np.linalg.norm(C)
    assert projected_residual_norm(mats, Y, C) <= 1e-13 * scale


def test_vectorized_solver():
    rng = np.random.default_rng(4)
    mats = [random_stable(rng, 4) for _ in range(3)]
    C = rng.standard_normal((4, 4, 4))
    Y = solve_dense_vectorized(mats, C)
    assert np.allclose(sylvester_apply(mats, Y), C)


def test_dense_dispatch_returns_residual():
    rng = np.random.default_rng(5)
    mats = [random_stable(rng, 5) + 1j * np.eye(5) for _ in range(2)]
    C = rng.standard_normal((5, 5))
    Y, res = solve_projected_dense(mats, C, return_residual=True)
    assert res <= 1e-10 * np.linalg.norm(C)


def _random_tt(rng, shape, rank):
    rs = [1] + [rank] * (len(shape) - 1) + [1]
    return TTTensor([rng.standard_normal((rs[j], n, rs[j + 1])) for j, n in enumerate(shape)])


def test_als_recovers_constructed_solution():
    rng = np.random.default_rng(6)
    shape = (6, 7, 5, 6)
    mats = [spd(rng, n) for n in shape]
    Y0 = _random_tt(rng, shape, 2)
    F = tt_laplace_apply(Y0, mats)
    Y, rep = solve_tt_als(mats, F, tol=1e-12)
    assert rep.converged
    err = np.linalg.norm(tt_full(Y) - tt_full(Y0)) / np.linalg.norm(tt_full(Y0))
    assert err <= 1e-8


def test_als_matches_dense_solution():
    rng = np.random.default_rng(7)
    shape = (5, 4, 6)
    mats = [random_stable(rng, n) for n in shape]
    F = _random_tt(rng, shape, 2)
    tol = 1e-9
    Y, rep = solve_tt_als(mats, F, tol=tol)
    ref = solve_dense_vectorized(mats, tt_full(F))
    assert np.linalg.norm(tt_full(Y) - ref) <= 2 * tol * np.linalg.norm(ref) * 10
    assert tt_sylvester_residual(mats, Y, F) <= tol * tt_norm(F) * (1 + 1e-6)
    Yd = dense_to_tt_solution(mats, F, 1e-13)
    assert np.allclose(tt_full(Yd), ref)


def test_als_zero_rhs():
    shape = (3, 4, 3)
    mats = [np.eye(n) * 2 for n in shape]
    F = TTTensor([np.zeros((1, n, 1)) for n in shape])
    Y, rep = solve_tt_als(mats, F)
    assert all(r == 1 for r in Y.ranks) and tt_norm(Y) == 0


def test_singular_projected_operator():
    from tbrk.errors import TbrkError
    with pytest.raises(TbrkError):
        solve_projected_dense([np.diag([1.0, -1.0]), np.diag([1.0, 2.0])], np.ones((2, 2)))
