"""Solvers for the small projected equation  sum_i Y x_i M_i = C.

Dense path: per-mode eigendecomposition (with a Schur-recursive fallback
for badly conditioned eigenvectors) and an explicit Kronecker solve used
as an oracle.  TT path: a one-site alternating solver with residual-based
rank enrichment that keeps every iterate in TT format.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod, sqrt

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import IllConditioned, SingularOperator, SizeOverflow
from .linalg import eig_dense, is_hermitian, solve_dense
from .tensors import (TTTensor, mode_product, multi_mode_product, tt_add, tt_full,
                      tt_laplace_apply, tt_norm, tt_orthogonalize_right, tt_reverse,
                      tt_svd, tt_zeros, unvec, vec)

EIGVEC_COND_MAX = 1e8
VECTORIZED_BUDGET = 20_000


def sylvester_apply(mats, Y: np.ndarray) -> np.ndarray:
    """sum_i Y x_i mats[i]."""
    return sum(mode_product(Y, M, i) for i, M in enumerate(mats))


def projected_residual_norm(mats, Y, C) -> float:
    return float(np.linalg.norm(C - sylvester_apply(mats, Y)))


@dataclass
class _Eig:
    lam: np.ndarray
    W: np.ndarray
    Winv: np.ndarray
    scale: float


def _eig(M) -> _Eig:
    M = np.asarray(M, dtype=complex)
    herm = is_hermitian(M)
    lam, W = eig_dense(M, hermitian=herm)
    scale = float(np.abs(M).max(initial=0.0))
    if herm:
        return _Eig(lam, W, W.conj().T, scale)
    if M.shape[0] and np.linalg.cond(W) > EIGVEC_COND_MAX:
        raise IllConditioned("eigenvector matrix is too ill conditioned")
    return _Eig(lam, W, np.linalg.inv(W), scale)


def _diag_solve(eigs, C: np.ndarray) -> np.ndarray:
    Ct = multi_mode_product(C, [e.Winv for e in eigs])
    S = np.zeros(C.shape, dtype=complex)
    for i, e in enumerate(eigs):
        shape = [1] * C.ndim
        shape[i] = -1
        S = S + e.lam.reshape(shape)
    smin = np.abs(S).min(initial=np.inf)
    scale = max((e.scale for e in eigs), default=0.0)
    if S.size and smin < 1e-13 * max(scale, 1e-300):
        raise SingularOperator(f"eigenvalue sum {smin:.3e} is (numerically) zero")
    return multi_mode_product(Ct / S, [e.W for e in eigs])


def _residual_check(mats, Y, C, eigs) -> tuple[bool, float]:
    """Achieved residual norm and whether it is as small as conditioning allows."""
    res = projected_residual_norm(mats, Y, C)
    cnorm = np.linalg.norm(C)
    if cnorm == 0:
        return True, res
    S_max = sum(np.abs(e.lam).max(initial=0.0) for e in eigs)
    lam_sum = np.zeros(C.shape, dtype=complex)
    for i, e in enumerate(eigs):
        shape = [1] * C.ndim
        shape[i] = -1
        lam_sum = lam_sum + e.lam.reshape(shape)
    cond = S_max / max(np.abs(lam_sum).min(), 1e-300)
    tol = max(1e-10, 100 * np.finfo(float).eps * cond)
    return res <= tol * cnorm, res


def _residual_ok(mats, Y, C, eigs) -> bool:
    return _residual_check(mats, Y, C, eigs)[0]


def solve_dense_diag(mats, C) -> np.ndarray:
    """Solve by diagonalising every coefficient matrix.

    Raises IllConditioned when an eigenvector basis is badly conditioned or
    the achieved residual is worse than the conditioning allows.
    """
    return _solve_diag_with_residual(mats, C)[0]


def _solve_diag_with_residual(mats, C):
    C = np.asarray(C, dtype=complex)
    eigs = [_eig(M) for M in mats]
    Y = _diag_solve(eigs, C)
    ok, res = _residual_check(mats, Y, C, eigs)
    if not ok:
        raise IllConditioned("diagonalisation solve missed its residual check")
    return Y, res


def solve_dense_schur(mats, C) -> np.ndarray:
    """Schur-based recursive solve (no diagonalisability assumption)."""
    C = np.asarray(C, dtype=complex)
    Ts, Qs = [], []
    for M in mats:
        T, Q = sla.schur(np.asarray(M, dtype=complex), output="complex")
        Ts.append(T)
        Qs.append(Q)
    Ct = multi_mode_product(C, [Q.conj().T for Q in Qs])
    scale = max(np.abs(T).max(initial=0.0) for T in Ts)
    Yt = _triangular_solve(Ts, Ct, 0.0, scale)
    return multi_mode_product(Yt, Qs)


def _triangular_solve(Ts, C, shift, scale):
    d = len(Ts)
    if d == 1:
        T = Ts[0] + shift * np.eye(Ts[0].shape[0])
        if np.abs(np.diag(T)).min(initial=np.inf) < 1e-13 * max(scale, 1e-300):
            raise SingularOperator("projected operator is singular")
        return sla.solve_triangular(T, C)
    if d == 2:
        A = Ts[0] + shift * np.eye(Ts[0].shape[0])
        x, s, info = lapack.ztrsyl(A, np.conj(Ts[1]), C, tranb="C")
        if info < 0:
            raise SingularOperator("triangular Sylvester solve failed")
        if info == 1:
            raise SingularOperator("projected operator is (nearly) singular")
        return x / s
    T = Ts[-1]
    m = T.shape[0]
    Y = np.zeros(C.shape, dtype=complex)
    for s in range(m - 1, -1, -1):
        rhs = C[..., s]
        if s < m - 1:
            rhs = rhs - np.tensordot(Y[..., s + 1:], T[s, s + 1:], axes=(-1, 0))
        Y[..., s] = _triangular_solve(Ts[:-1], rhs, shift + T[s, s], scale)
    return Y


def solve_projected_dense(mats, C, return_residual: bool = False):
    """Diagonalisation solve with Schur fallback.

    With `return_residual` the achieved residual norm is returned as well.
    """
    try:
        Y, res = _solve_diag_with_residual(mats, C)
    except IllConditioned:
        Y = solve_dense_schur(mats, C)
        res = projected_residual_norm(mats, Y, C) if return_residual else None
    return (Y, res) if return_residual else Y


def kron_sum_matrix(mats) -> np.ndarray:
    """sum_i I x ... x M_i x ... x I for first-index-fastest vectorisation."""
    sizes = [np.asarray(M).shape[0] for M in mats]
    N = prod(sizes)
    A = np.zeros((N, N), dtype=complex)
    for i, M in enumerate(mats):
        term = np.ones((1, 1))
        for j in range(len(mats) - 1, -1, -1):
            term = np.kron(term, M if j == i else np.eye(sizes[j]))
        A += term
    return A


def solve_dense_vectorized(mats, C, budget: int = VECTORIZED_BUDGET) -> np.ndarray:
    C = np.asarray(C, dtype=complex)
    if C.size > budget:
        raise SizeOverflow(f"{C.size} unknowns exceed the vectorized budget {budget}")
    A = kron_sum_matrix(mats)
    return unvec(solve_dense(A, vec(C)), C.shape)


# ---------------------------------------------------------------------------
# TT alternating solver

@dataclass
class AlsReport:
    residual: float
    sweeps: int
    converged: bool
    stagnated: bool = False


def _left_pair(P, Q, AQ, I, S):
    Pc = P.conj()
    I_new = np.einsum("pia,pq,qib->ab", Pc, I, Q, optimize=True)
    S_new = (np.einsum("pia,pq,qib->ab", Pc, S, Q, optimize=True)
             + np.einsum("pia,pq,qib->ab", Pc, I, AQ, optimize=True))
    return I_new, S_new


def _right_pair(P, Q, AQ, J, T):
    Pc = P.conj()
    J_new = np.einsum("pia,ab,qib->pq", Pc, J, Q, optimize=True)
    T_new = (np.einsum("pia,ab,qib->pq", Pc, T, Q, optimize=True)
             + np.einsum("pia,ab,qib->pq", Pc, J, AQ, optimize=True))
    return J_new, T_new


def _left_id(P, Q, I):
    return np.einsum("pia,pq,qib->ab", P.conj(), I, Q, optimize=True)


def _right_id(P, Q, J):
    return np.einsum("pia,ab,qib->pq", P.conj(), J, Q, optimize=True)


def _proj(Il, G, Jr):
    return np.einsum("pq,qib,cb->pic", Il, G, Jr, optimize=True)


def _op_proj(Il, Sl, G, AG, Jr, Tr):
    return _proj(Sl, G, Jr) + _proj(Il, AG, Jr) + _proj(Il, G, Tr)


def _apply_A(M, G):
    return np.einsum("ij,qjb->qib", M, G, optimize=True)


def _local_op(S, A, T, X):
    return (np.einsum("pq,qib->pib", S, X, optimize=True) + _apply_A(A, X)
            + np.einsum("cb,pib->pic", T, X, optimize=True))


def _local_solve(S, eigA, A, T, F):
    try:
        eigs = [_eig(S), eigA, _eig(T)]
        X = _diag_solve(eigs, F)
        if _residual_ok([S, A, T], X, F, eigs):
            return X
    except IllConditioned:
        pass
    return solve_dense_schur([S, A, T], F)


def _truncate_by_residual(X, S, A, T, F, tol):
    """Smallest-rank SVD truncation of X keeping the local residual below tol*||F||."""
    r0, m, r1 = X.shape
    U, s, Vh = np.linalg.svd(X.reshape(r0 * m, r1), full_matrices=False)
    fnorm = np.linalg.norm(F)
    base = np.linalg.norm(_local_op(S, A, T, X) - F)
    target = max(tol * fnorm, 2 * base)

    def trial(r):
        Xr = ((U[:, :r] * s[:r]) @ Vh[:r]).reshape(r0, m, r1)
        return np.linalg.norm(_local_op(S, A, T, Xr) - F) <= target

    lo, hi = 1, len(s)
    while lo < hi:
        mid = (lo + hi) // 2
        if trial(mid):
            hi = mid
        else:
            lo = mid + 1
    return U[:, :lo], s[:lo], Vh[:lo]


def tt_sylvester_residual(mats, Y: TTTensor, F: TTTensor) -> float:
    """||F - sum_i Y x_i mats[i]||_F evaluated in TT arithmetic."""
    return tt_norm(tt_add(F, tt_laplace_apply(Y, mats), coeffs=[1.0, -1.0]))


def _feasible_ranks(shape, rank):
    d = len(shape)
    out = [1]
    for k in range(1, d):
        out.append(min(rank, prod(shape[:k]), prod(shape[k:])))
    out.append(1)
    return out


def _random_tt(shape, rank, rng):
    rs = _feasible_ranks(shape, rank)
    cores = [rng.standard_normal((rs[k], n, rs[k + 1])) + 0j for k, n in enumerate(shape)]
    return TTTensor(cores)


def _sweep(Y, Z, F, mats, eigs, tol_local):
    """One left-to-right AMEn-style sweep.  Y and Z must be right-orthonormal."""
    d = Y.ndim
    Yc, Zc, Fc = list(Y.cores), list(Z.cores), F.cores
    one = np.ones((1, 1), dtype=complex)
    zero = np.zeros((1, 1), dtype=complex)

    # right interfaces, index k = between cores k-1 and k
    YY_T = [None] * (d + 1)
    YF_J = [None] * (d + 1)
    ZY_J = [None] * (d + 1)
    ZY_T = [None] * (d + 1)
    ZF_J = [None] * (d + 1)
    YY_T[d], YF_J[d], ZY_J[d], ZY_T[d], ZF_J[d] = zero, one, one, zero, one
    for k in range(d - 1, 0, -1):
        AY = _apply_A(mats[k], Yc[k])
        _, YY_T[k] = _right_pair(Yc[k], Yc[k], AY, np.eye(Yc[k].shape[2]), YY_T[k + 1])
        YF_J[k] = _right_id(Yc[k], Fc[k], YF_J[k + 1])
        ZY_J[k], ZY_T[k] = _right_pair(Zc[k], Yc[k], AY, ZY_J[k + 1], ZY_T[k + 1])
        ZF_J[k] = _right_id(Zc[k], Fc[k], ZF_J[k + 1])

    YY_S, YF_I = zero, one
    ZY_I, ZY_S, ZF_I = one, zero, one
    for k in range(d):
        Floc = _proj(YF_I, Fc[k], YF_J[k + 1])
        X = _local_solve(YY_S, eigs[k], mats[k], YY_T[k + 1], Floc)
        if k == d - 1:
            Yc[k] = X
            break
        r0, m, r1 = X.shape
        AX = _apply_A(mats[k], X)
        # residual surrogate core, projected on Z from both sides
        Zk = (_proj(ZF_I, Fc[k], ZF_J[k + 1])
              - _op_proj(ZY_I, ZY_S, X, AX, ZY_J[k + 1], ZY_T[k + 1]))
        z0, _, z1 = Zk.shape
        Qz, _ = np.linalg.qr(Zk.reshape(z0 * m, z1))
        Zc[k] = Qz.reshape(z0, m, Qz.shape[1])
        # enrichment: residual with Y's left interface and Z's right interface
        E = (_proj(YF_I, Fc[k], ZF_J[k + 1])
             - _op_proj(np.eye(r0), YY_S, X, AX, ZY_J[k + 1], ZY_T[k + 1]))
        U, s, Vh = _truncate_by_residual(X, YY_S, mats[k], YY_T[k + 1], Floc, tol_local)
        Q, R = np.linalg.qr(np.hstack([U, E.reshape(r0 * m, -1)]))
        transfer = R[:, :len(s)] @ (s[:, None] * Vh)
        Yc[k] = Q.reshape(r0, m, Q.shape[1])
        Yc[k + 1] = np.einsum("ab,bic->aic", transfer, Yc[k + 1], optimize=True)
        # left interfaces for position k+1
        AQ = _apply_A(mats[k], Yc[k])
        _, YY_S = _left_pair(Yc[k], Yc[k], AQ, np.eye(r0), YY_S)
        YF_I = _left_id(Yc[k], Fc[k], YF_I)
        ZY_I, ZY_S = _left_pair(Zc[k], Yc[k], AQ, ZY_I, ZY_S)
        ZF_I = _left_id(Zc[k], Fc[k], ZF_I)
    return TTTensor(Yc), TTTensor(Zc)


def solve_tt_als(mats, F: TTTensor, tol: float = 1e-8, max_sweeps: int = 50,
                 enrich_rank: int = 3, x0: TTTensor | None = None, seed: int = 0
                 ) -> tuple[TTTensor, AlsReport]:
    """Alternating solver for sum_i Y x_i mats[i] = F with Y in TT format.

    Returns the best iterate and a report with the achieved relative
    residual; `converged` is False when `max_sweeps` ran out.
    """
    mats = [np.asarray(M, dtype=complex) for M in mats]
    shape = tuple(M.shape[0] for M in mats)
    fnorm = tt_norm(F)
    if fnorm == 0:
        return tt_zeros(shape), AlsReport(0.0, 0, True)
    d = len(mats)
    if d == 1:
        Y = TTTensor([solve_dense(mats[0], F.cores[0][0]).reshape(1, -1, 1)])
        res = tt_sylvester_residual(mats, Y, F) / fnorm
        return Y, AlsReport(res, 0, True)

    rng = np.random.default_rng(seed)
    Y = x0.copy() if x0 is not None else _random_tt(shape, max(F.ranks), rng)
    Z = _random_tt(shape, enrich_rank, rng)
    eigs_f = [_eig(M) for M in mats]
    eigs_r = eigs_f[::-1]
    tol_local = tol / sqrt(d)

    best, best_res = Y, np.inf
    reversed_ = False
    history = []
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        Y = tt_orthogonalize_right(Y)
        Z = tt_orthogonalize_right(Z)
        if reversed_:
            Y, Z = _sweep(Y, Z, tt_reverse(F), mats[::-1], eigs_r, tol_local)
            Y, Z = tt_reverse(Y), tt_reverse(Z)
        else:
            Y, Z = _sweep(Y, Z, F, mats, eigs_f, tol_local)
        reversed_ = not reversed_
        # next sweep runs the other way, so flip the orientation of the iterates
        if reversed_:
            Y, Z = tt_reverse(Y), tt_reverse(Z)
            Yn = tt_reverse(Y)
        else:
            Yn = Y
        res = tt_sylvester_residual(mats, Yn, F) / fnorm
        history.append(res)
        if res < best_res:
            best, best_res = Yn.copy(), res
        if res <= tol:
            return best, AlsReport(best_res, sweeps, True)
        if len(history) >= 6 and min(history[-3:]) > 0.9 * min(history[:-3]):
            return best, AlsReport(best_res, sweeps, False, stagnated=True)
    return best, AlsReport(best_res, sweeps, False, stagnated=True)


def dense_to_tt_solution(mats, C: TTTensor, tol: float) -> TTTensor:
    """Dense solve of a small TT problem, converted back to TT."""
    Y = solve_projected_dense(mats, tt_full(C))
    return tt_svd(Y, tol)
