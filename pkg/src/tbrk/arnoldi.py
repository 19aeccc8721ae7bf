"""Block rational Arnoldi iteration.

A basis object carries V (n x b(k+1), orthonormal) and the pencil
(H, K), both b(k+1) x bk and block upper Hessenberg, such that

    A V K = V H.

Poles are Python complex numbers or ``math.inf``.  The starting block
always uses the pole at infinity, i.e. span(V_1) = span(C).

Expansion from the last block v_j with pole xi:

* xi = inf:   w = A v_j                  -> A V e_j = V c
* xi = 0:     w = A^{-1} v_j             -> A V c = V e_j
* otherwise:  w = (I - A/xi)^{-1} A v_j  -> A V (e_j + c/xi) = V c

where w = V c after orthogonalisation, so the pencil columns follow
directly from the construction of w.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DeflationError, PreconditionViolation
from .linalg import RANK_TOL, solve_dense, thin_qr
from .operators import as_operator

INF = math.inf
REORTH_TOL = 1e-3


def is_infinite(xi) -> bool:
    return xi is None or bool(np.isinf(abs(complex(xi))))


def is_real_pole(xi, rtol: float = 1e-12) -> bool:
    if is_infinite(xi):
        return True
    xi = complex(xi)
    return abs(xi.imag) <= rtol * max(abs(xi), 1e-300)


@dataclass
class BlockKrylovBasis:
    V: np.ndarray
    H: np.ndarray
    K: np.ndarray
    b: int
    poles: list = field(default_factory=lambda: [INF])
    R0: np.ndarray | None = None  # C = V[:, :b] @ R0

    @property
    def k(self) -> int:
        return self.H.shape[1] // self.b

    @property
    def n(self) -> int:
        return self.V.shape[0]

    def block(self, j: int) -> np.ndarray:
        return self.V[:, j * self.b:(j + 1) * self.b]

    @property
    def finite_poles(self) -> list:
        return [xi for xi in self.poles if not is_infinite(xi)]

    def copy(self) -> "BlockKrylovBasis":
        return BlockKrylovBasis(self.V.copy(), self.H.copy(), self.K.copy(), self.b,
                                list(self.poles), None if self.R0 is None else self.R0.copy())

    def drop_last(self) -> "BlockKrylovBasis":
        """Remove the most recent block (undo one expansion) in place."""
        if self.k == 0:
            raise ValueError("cannot drop the starting block")
        b = self.b
        self.V = self.V[:, :-b]
        self.H = self.H[:-b, :-b]
        self.K = self.K[:-b, :-b]
        self.poles.pop()
        return self

    def pencil_residual(self, A) -> float:
        """||A V K - V H||_F / (||A||_F ||K||_F)."""
        A = as_operator(A)
        lhs = A.apply(self.V @ self.K) if self.k else np.zeros((self.n, 0))
        res = np.linalg.norm(lhs - self.V @ self.H)
        scale = np.linalg.norm(A.to_dense()) * max(np.linalg.norm(self.K), 1e-300)
        return float(res / scale)

    def orthonormality_error(self) -> float:
        G = self.V.conj().T @ self.V
        return float(np.linalg.norm(G - np.eye(G.shape[0])))


def arnoldi_init(A, C) -> BlockKrylovBasis:
    """Start a basis whose first block spans the columns of C (pole at infinity)."""
    C = np.asarray(C, dtype=complex)
    if C.ndim == 1:
        C = C[:, None]
    Q, R = thin_qr(C)
    colnorm = np.linalg.norm(C, axis=0).max(initial=0.0)
    if colnorm == 0 or np.diag(R).min() <= RANK_TOL * colnorm:
        raise DeflationError("starting block is rank deficient")
    b = C.shape[1]
    empty = np.zeros((b, 0), dtype=complex)
    return BlockKrylovBasis(Q, empty, empty.copy(), b, [INF], R)


def arnoldi_expand(basis: BlockKrylovBasis, A, xi, Av_last: np.ndarray | None = None,
                   allow_rank_deficient: bool = False) -> BlockKrylovBasis:
    """Append one block for pole `xi` (in place; also returned).

    `Av_last` may carry A @ (last block) when the caller already has it.
    With `allow_rank_deficient` a partially deflated block is still appended
    (its near-null directions are re-orthogonalised against the basis); a
    block that vanishes entirely always raises DeflationError.
    """
    A = as_operator(A)
    b, k = basis.b, basis.k
    v = basis.block(k)
    if is_infinite(xi):
        w = Av_last if Av_last is not None else A.apply(v)
    elif xi == 0:
        w = A.solve_shifted(0.0, v)
    else:
        xi = complex(xi)
        Av = Av_last if Av_last is not None else A.apply(v)
        w = -xi * A.solve_shifted(xi, Av)
    w = np.array(w, dtype=complex)
    wnorm = np.linalg.norm(w, axis=0).max(initial=0.0)

    V = basis.V
    h = V.conj().T @ w
    w -= V @ h
    h2 = V.conj().T @ w
    w -= V @ h2
    h += h2
    Q, R = thin_qr(w)
    rdiag = np.diag(R).real
    if wnorm == 0 or rdiag.max() <= RANK_TOL * wnorm:
        raise DeflationError(f"block {k + 1} vanishes in the current span")
    if rdiag.min() <= RANK_TOL * wnorm and not allow_rank_deficient:
        raise DeflationError(f"block {k + 1} is numerically in the current span")
    if rdiag.min() <= REORTH_TOL * wnorm:
        # columns of Q behind small diagonal entries of R lose orthogonality
        # to V in proportion to wnorm / R_jj; orthogonalise them again
        for _ in range(2):
            s = V.conj().T @ Q
            Q, R2 = thin_qr(Q - V @ s)
            h += s @ R
            R = R2 @ R

    c = np.vstack([h, R])
    m = b * (k + 2)
    ej = np.zeros((m, b), dtype=complex)
    ej[k * b:(k + 1) * b] = np.eye(b)
    if is_infinite(xi):
        hcol, kcol = c, ej
    elif xi == 0:
        hcol, kcol = ej, c
    else:
        hcol, kcol = c, ej + c / xi

    def grow(M, col):
        out = np.zeros((m, b * (k + 1)), dtype=complex)
        out[:M.shape[0], :M.shape[1]] = M
        out[:, b * k:] = col
        return out

    basis.H = grow(basis.H, hcol)
    basis.K = grow(basis.K, kcol)
    basis.V = np.hstack([V, Q])
    basis.poles.append(INF if is_infinite(xi) else (0 if xi == 0 else complex(xi)))
    return basis


def ensure_trailing_infinity(basis: BlockKrylovBasis, A) -> BlockKrylovBasis:
    """Make the last pole infinite by appending one infinity block if needed."""
    if basis.k >= 1 and is_infinite(basis.poles[-1]):
        return basis
    return arnoldi_expand(basis, A, INF)


def projected_matrix(basis: BlockKrylovBasis, A) -> np.ndarray:
    """V_k^H A V_k, with V_k the basis without its trailing block."""
    A = as_operator(A)
    if basis.k < 1:
        raise ValueError("projected_matrix needs at least one expansion")
    Vk = basis.V[:, :basis.b * basis.k]
    M = Vk.conj().T @ A.apply(Vk)
    if A.hermitian:
        M = 0.5 * (M + M.conj().T)
    return M


def residual_coefficients(basis: BlockKrylovBasis) -> np.ndarray:
    """Last block row of H K_k^{-1} (b x bk); needs a trailing infinite pole."""
    if basis.k < 1 or not is_infinite(basis.poles[-1]):
        raise PreconditionViolation("cheap residual needs a trailing infinite pole")
    b, k = basis.b, basis.k
    Kk = basis.K[:b * k, :]
    Hlast = basis.H[b * k:, :]
    return solve_dense(Kk.T, Hlast.T).T


def schedule_pole(requested, pending=None) -> tuple:
    """Conjugate-pair scheduling for real problems.

    Returns ``(pole, pending)``.  A pending conjugate always wins over the
    request; a non-real request is passed through and its conjugate queued.
    """
    if pending is not None:
        return pending, None
    if is_infinite(requested) or requested == 0:
        return requested, None
    xi = complex(requested)
    if is_real_pole(xi):
        return xi.real, None
    return xi, xi.conjugate()
