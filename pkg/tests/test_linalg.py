import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tbrk.errors import DimensionMismatch, SingularMatrix
from tbrk.linalg import (convex_hull, eig_dense, is_hermitian, kron_apply, minkowski_sum,
                         solve_dense, thin_qr)
from tbrk.operators import DenseOperator, TridiagonalOperator, as_operator


def test_thin_qr_cases():
    Q, R = thin_qr(np.eye(3))
    assert np.allclose(Q, np.eye(3)) and np.allclose(R, np.eye(3))
    Q, R = thin_qr(np.array([[3.0], [4.0]]))
    assert np.allclose(Q, [[0.6], [0.8]]) and np.allclose(R, [[5.0]])
    rng = np.random.default_rng(0)
    M = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    Q, R = thin_qr(M)
    assert np.allclose(Q.conj().T @ Q, np.eye(3))
    assert np.allclose(Q @ R, M)
    assert np.all(np.diag(R).real >= 0) and np.allclose(np.diag(R).imag, 0)


def test_eig_dense_cases():
    w, _ = eig_dense(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(np.sort(w.real), [1, 2, 3])
    w, _ = eig_dense(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert np.allclose(sorted(w, key=lambda z: z.imag), [-1j, 1j])
    n = 10
    T = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    w, V = eig_dense(T)
    ref = 2 - 2 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1))
    assert np.allclose(np.sort(w.real), np.sort(ref))
    assert np.allclose(T @ V, V * w)


def test_is_hermitian():
    assert is_hermitian(np.array([[1, 2j], [-2j, 3]]))
    assert not is_hermitian(np.array([[1, 2], [0, 3]]))


def test_solve_dense_cases():
    rng = np.random.default_rng(1)
    B = rng.standard_normal((4, 2))
    assert np.allclose(solve_dense(np.eye(4), B), B)
    assert np.allclose(solve_dense(np.diag([2.0, 4.0]), np.array([[2.0], [4.0]])), [[1], [1]])
    A = rng.standard_normal((10, 10)) + 10 * np.eye(10)
    X = solve_dense(A, B[:, :1].repeat(5, 0)[:10])
    rhs = B[:, :1].repeat(5, 0)[:10]
    assert np.linalg.norm(A @ X - rhs) <= 1e-12 * np.linalg.norm(rhs)
    with pytest.raises(SingularMatrix):
        solve_dense(np.zeros((2, 2)), np.ones((2, 1)))


def test_kron_apply_matches_explicit_kron():
    rng = np.random.default_rng(2)
    v = rng.standard_normal(6)
    assert np.allclose(kron_apply([np.eye(2), np.eye(3)], v), v)
    F = [rng.standard_normal((2, 2)) for _ in range(2)]
    v = rng.standard_normal(4)
    assert np.allclose(kron_apply(F, v), np.kron(F[1], F[0]) @ v)
    F = [rng.standard_normal((s, s)) for s in (2, 3, 4)]
    v = rng.standard_normal(24)
    assert np.allclose(kron_apply(F, v), np.kron(F[2], np.kron(F[1], F[0])) @ v)
    with pytest.raises(DimensionMismatch):
        kron_apply(F, np.ones(5))


def test_convex_hull_cases():
    H = convex_hull([0, 1, 1j, 1 + 1j, 0.5 + 0.5j])
    assert {complex(v) for v in H.vertices} == {0, 1, 1 + 1j, 1j}
    assert len(convex_hull([2 + 3j])) == 1
    rng = np.random.default_rng(3)
    pts = rng.standard_normal(100) + 1j * rng.standard_normal(100)
    assert convex_hull(pts).contains(pts).all()
    with pytest.raises(ValueError):
        convex_hull([])


@given(st.integers(0, 10 ** 6))
def test_hull_contains_every_input(seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal(30) + 1j * rng.standard_normal(30) * rng.random()
    assert convex_hull(pts).contains(pts).all()


def test_minkowski_sum_cases():
    S = minkowski_sum([convex_hull([1 + 1j]), convex_hull([2 - 1j])])
    assert np.allclose(S.vertices, [3 + 0j])
    S = minkowski_sum([convex_hull([0, 1]), convex_hull([0, 1j])])
    assert {complex(v) for v in np.round(S.vertices, 12)} == {0, 1, 1 + 1j, 1j}
    rng = np.random.default_rng(4)
    P = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    Q = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    ref = convex_hull([p + q for p, q in itertools.product(P, Q)])
    S = minkowski_sum([convex_hull(P), convex_hull(Q)])
    assert np.allclose(np.sort_complex(S.vertices), np.sort_complex(ref.vertices))


def test_sample_boundary_lies_on_polygon():
    H = convex_hull([0, 2, 2 + 1j, 1j])
    z = H.sample_boundary(40)
    assert H.contains(z).all()
    on_edge = ((np.abs(z.real) < 1e-12) | (np.abs(z.real - 2) < 1e-12)
               | (np.abs(z.imag) < 1e-12) | (np.abs(z.imag - 1) < 1e-12))
    assert on_edge.all()


def test_operators_agree_with_dense():
    rng = np.random.default_rng(5)
    n = 7
    lo, di, up = rng.standard_normal(n - 1), rng.standard_normal(n) + 5, rng.standard_normal(n - 1)
    T = TridiagonalOperator(lo, di, up)
    M = T.to_dense()
    assert np.allclose(M, np.diag(di) + np.diag(lo, -1) + np.diag(up, 1))
    X = rng.standard_normal((n, 3))
    assert np.allclose(T.apply(X), M @ X)
    sigma = 0.3 + 0.2j
    assert np.allclose(T.solve_shifted(sigma, X), np.linalg.solve(M - sigma * np.eye(n), X))
    D = DenseOperator(M)
    assert np.allclose(D.solve_shifted(sigma, X), T.solve_shifted(sigma, X))
    s = rng.standard_normal(n)
    assert np.allclose(T.row_scaled(s).to_dense(), np.diag(s) @ M)
    assert np.allclose((T + T.scaled(2.0)).to_dense(), 3 * M)
    assert as_operator(T) is T
    assert isinstance(as_operator(M), DenseOperator)


def test_singular_shift_raises():
    T = TridiagonalOperator(np.zeros(2), np.array([1.0, 2.0, 3.0]), np.zeros(2))
    with pytest.raises(SingularMatrix):
        T.solve_shifted(2.0, np.ones((3, 1)))
    with pytest.raises(SingularMatrix):
        DenseOperator(np.diag([1.0, 2.0])).solve_shifted(1.0, np.ones((2, 1)))
