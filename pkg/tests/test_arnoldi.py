import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import subspace_angles

from tbrk.arnoldi import (INF, arnoldi_expand, arnoldi_init, ensure_trailing_infinity,
                          projected_matrix, residual_coefficients, schedule_pole)
from tbrk.errors import DeflationError, PreconditionViolation, SingularMatrix


def pencil_error(A, basis):
    V, H, K = basis.V, basis.H, basis.K
    return np.linalg.norm(A @ V @ K - V @ H) / (np.linalg.norm(A) * np.linalg.norm(K))


def test_init_cases():
    Q = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 2)))[0]
    Q = Q * np.sign(np.diag(np.linalg.qr(Q)[1]))  # positive-diagonal R
    B = arnoldi_init(np.eye(6), Q)
    assert np.allclose(B.V, Q)
    e1 = np.eye(5)[:, :1]
    assert np.allclose(arnoldi_init(np.eye(5), e1).V, e1)
    rng = np.random.default_rng(1)
    C = rng.standard_normal((9, 3))
    V = arnoldi_init(rng.standard_normal((9, 9)), C).V
    assert np.linalg.norm(C - V @ (V.T @ C)) <= 1e-12 * np.linalg.norm(C)
    with pytest.raises(DeflationError):
        arnoldi_init(np.eye(3), np.zeros((3, 1)))


def test_polynomial_pencil_structure():
    n = 50
    A = np.diag(2 * np.ones(n)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)
    B = arnoldi_init(A, np.ones((n, 1)))
    for _ in range(5):
        arnoldi_expand(B, A, INF)
    assert np.allclose(B.K, np.vstack([np.eye(5), np.zeros((1, 5))]))
    assert np.allclose(np.tril(B.H, -2), 0)  # Hessenberg
    assert pencil_error(A, B) <= 1e-12


def test_shift_invert_direction():
    A = np.diag(np.arange(1.0, 11.0))
    v0 = np.ones((10, 1)) / np.sqrt(10)
    B = arnoldi_init(A, v0)
    arnoldi_expand(B, A, 2.5)
    w = np.linalg.solve(np.eye(10) - A / 2.5, A @ v0)
    w -= v0 @ (v0.T @ w)
    w /= np.linalg.norm(w)
    assert abs(abs(np.vdot(w, B.V[:, 1])) - 1) <= 1e-12


def test_pole_on_spectrum_raises():
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    B = arnoldi_init(A, np.ones((4, 1)))
    with pytest.raises(SingularMatrix):
        arnoldi_expand(B, A, 3.0)


def test_deflation_in_invariant_space():
    A = np.diag([1.0, 2.0, 3.0])
    B = arnoldi_init(A, np.eye(3)[:, :1])
    with pytest.raises(DeflationError):
        arnoldi_expand(B, A, INF)


@given(st.integers(0, 10 ** 6),
       st.lists(st.sampled_from(["inf", "zero", "real", "complex"]), min_size=1, max_size=8))
def test_pencil_and_orthonormality_hold(seed, kinds):
    rng = np.random.default_rng(seed)
    n, b = 40, 2
    A = rng.standard_normal((n, n)) / np.sqrt(n) + 3 * np.eye(n)
    B = arnoldi_init(A, rng.standard_normal((n, b)))
    for kind in kinds:
        xi = {"inf": INF, "zero": 0, "real": -rng.uniform(0.5, 5),
              "complex": complex(-rng.uniform(0.5, 5), rng.uniform(-3, 3))}[kind]
        arnoldi_expand(B, A, xi)
        assert pencil_error(A, B) <= 1e-10
        assert np.linalg.norm(B.V.conj().T @ B.V - np.eye(B.V.shape[1])) <= 1e-10


def test_ensure_trailing_infinity():
    rng = np.random.default_rng(2)
    n = 30
    A = rng.standard_normal((n, n)) / np.sqrt(n) + 3 * np.eye(n)
    B = arnoldi_init(A, rng.standard_normal((n, 1)))
    arnoldi_expand(B, A, INF)
    before = B.V.shape
    assert ensure_trailing_infinity(B, A).V.shape == before
    B2 = arnoldi_init(A, rng.standard_normal((n, 1)))
    arnoldi_expand(B2, A, 3.0 + 0j)
    with pytest.raises(PreconditionViolation):
        residual_coefficients(B2)
    ensure_trailing_infinity(B2, A)
    assert B2.poles[-1] == INF and pencil_error(A, B2) <= 1e-10
    residual_coefficients(B2)


def test_space_does_not_depend_on_pole_order():
    rng = np.random.default_rng(3)
    n = 30
    A = rng.standard_normal((n, n)) / np.sqrt(n) + 3 * np.eye(n)
    c = rng.standard_normal((n, 1))
    poles = [-1.0, -2.0, INF, -4.0]
    B1, B2 = arnoldi_init(A, c), arnoldi_init(A, c)
    for xi in poles:
        arnoldi_expand(B1, A, xi)
    for xi in poles[::-1]:
        arnoldi_expand(B2, A, xi)
    # independent construction: q(A)^{-1} times polynomials of degree <= 4
    q = np.eye(n)
    for xi in poles:
        if xi != INF:
            q = q @ (np.eye(n) - A / xi)
    basis = [c]
    for _ in range(len(poles)):
        basis.append(A @ basis[-1])
    W = np.linalg.solve(q, np.hstack(basis))
    assert np.max(subspace_angles(B1.V, W)) <= 1e-8
    assert np.max(subspace_angles(B1.V, B2.V)) <= 1e-8


def test_projected_matrix():
    rng = np.random.default_rng(4)
    n = 20
    A = rng.standard_normal((n, n)) + 4 * np.eye(n)
    B = arnoldi_init(A, rng.standard_normal((n, 2)))
    for xi in (INF, -1.0, INF, -3.0):
        arnoldi_expand(B, A, xi)
    Vk = B.V[:, :2 * 4]
    assert np.allclose(projected_matrix(B, A), Vk.T @ A @ Vk)
    S = A + A.T
    Bs = arnoldi_init(S, rng.standard_normal((n, 1)))
    arnoldi_expand(Bs, S, INF)
    arnoldi_expand(Bs, S, INF)
    M = projected_matrix(Bs, S)
    assert np.linalg.norm(M - M.conj().T) <= 1e-13 * np.linalg.norm(M)
    I = arnoldi_init(np.eye(n), rng.standard_normal((n, 1)))
    I.V = np.linalg.qr(rng.standard_normal((n, 3)))[0]
    I.H = np.zeros((3, 2))
    assert np.allclose(projected_matrix(I, np.eye(n)), np.eye(2))


def test_residual_coefficients_give_residual():
    # A V_k Y - V_k (V_k^H A V_k) Y equals V_{k+1} e_{k+1} E Y
    rng = np.random.default_rng(5)
    n = 25
    A = rng.standard_normal((n, n)) / 5 + 2 * np.eye(n)
    B = arnoldi_init(A, rng.standard_normal((n, 1)))
    for xi in (-1.0, INF, -2.0 + 1j, INF):
        arnoldi_expand(B, A, xi)
    k = B.k
    Vk = B.V[:, :k]
    Y = rng.standard_normal((k, 3))
    lhs = A @ Vk @ Y - Vk @ (Vk.conj().T @ A @ Vk) @ Y
    E = residual_coefficients(B)
    assert np.allclose(lhs, B.V[:, k:] @ E @ Y)


def test_schedule_pole():
    assert schedule_pole(2 + 1j) == (2 + 1j, 2 - 1j)
    assert schedule_pole(5.0, pending=2 - 1j) == (2 - 1j, None)
    assert schedule_pole(3.0) == (3.0, None)
    assert schedule_pole(INF) == (INF, None)
