"""Dense, Tucker and Tensor-Train containers and their basic algebra.

Conventions
-----------
Dense tensors are plain complex ``numpy`` arrays of shape (n_1, ..., n_d).
Vectorisation runs the first index fastest (Fortran order), so the
Kronecker form of a Sylvester operator is sum_i I x ... x A_i x ... x I
with A_1 the rightmost factor.  The mode-i unfolding has n_i rows and its
columns run over the remaining indices, again first index fastest.

TT cores are stored as 3-way arrays of shape (r_{j-1}, n_j, r_j) with
boundary ranks r_0 = r_d = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod, sqrt

import numpy as np

from .errors import DimensionMismatch, SizeOverflow
from .linalg import thin_qr

# element budget for densifying TT tensors
TT_FULL_BUDGET = 10**7


def as_tensor(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if not np.all(np.isfinite(X)):
        raise ValueError("tensor has non-finite entries")
    return X


def vec(X: np.ndarray) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(v: np.ndarray, shape) -> np.ndarray:
    return np.asarray(v).reshape(tuple(shape), order="F")


def mode_product(X: np.ndarray, M: np.ndarray, i: int) -> np.ndarray:
    """X x_i M for an m x n_i matrix M (0-based mode index)."""
    X = np.asarray(X)
    M = np.asarray(M)
    if not 0 <= i < X.ndim:
        raise DimensionMismatch(f"mode {i} out of range for a {X.ndim}-way tensor")
    if M.ndim != 2 or M.shape[1] != X.shape[i]:
        raise DimensionMismatch(
            f"matrix {M.shape} does not act on mode {i} of size {X.shape[i]}")
    return np.moveaxis(np.tensordot(M, X, axes=(1, i)), 0, i)


def multi_mode_product(X: np.ndarray, mats, skip: int | None = None) -> np.ndarray:
    """Apply mats[i] along every mode i (entries that are None, or `skip`, are left out)."""
    for i, M in enumerate(mats):
        if M is not None and i != skip:
            X = mode_product(X, M, i)
    return X


def unfold(X: np.ndarray, i: int) -> np.ndarray:
    X = np.asarray(X)
    if not 0 <= i < X.ndim:
        raise DimensionMismatch(f"mode {i} out of range for a {X.ndim}-way tensor")
    return np.moveaxis(X, i, 0).reshape(X.shape[i], -1, order="F")


def fold(M: np.ndarray, shape, i: int) -> np.ndarray:
    shape = tuple(shape)
    rest = shape[:i] + shape[i + 1:]
    M = np.asarray(M)
    if M.shape != (shape[i], prod(rest)):
        raise DimensionMismatch(f"cannot fold {M.shape} into mode {i} of {shape}")
    return np.moveaxis(M.reshape((shape[i],) + rest, order="F"), 0, i)


# ---------------------------------------------------------------------------
# Tucker

@dataclass
class TuckerTensor:
    """[[core; B_1, ..., B_d]] with orthonormal factors B_i (n_i x k_i)."""

    core: np.ndarray
    factors: list = field(default_factory=list)

    def __post_init__(self):
        self.core = as_tensor(self.core)
        self.factors = [np.asarray(B, dtype=complex) for B in self.factors]
        if self.core.ndim != len(self.factors):
            raise DimensionMismatch(
                f"core is {self.core.ndim}-way but {len(self.factors)} factors given")
        for i, B in enumerate(self.factors):
            if B.ndim != 2 or B.shape[1] != self.core.shape[i]:
                raise DimensionMismatch(
                    f"factor {i} has shape {B.shape}, core mode size {self.core.shape[i]}")
            gram = B.conj().T @ B
            if np.linalg.norm(gram - np.eye(B.shape[1])) > 1e-10:
                Q, R = thin_qr(B)
                self.factors[i] = Q
                self.core = mode_product(self.core, R, i)

    @property
    def ndim(self) -> int:
        return self.core.ndim

    @property
    def shape(self) -> tuple:
        return tuple(B.shape[0] for B in self.factors)

    @property
    def ranks(self) -> tuple:
        return self.core.shape

    def full(self) -> np.ndarray:
        return tucker_full(self)


def tucker_full(T: TuckerTensor) -> np.ndarray:
    return multi_mode_product(T.core, T.factors)


def _truncation_rank(s: np.ndarray, budget: float) -> int:
    """Smallest r such that sum(s[r:]**2) <= budget**2."""
    tail = np.sqrt(np.cumsum((s ** 2)[::-1]))[::-1]
    keep = np.nonzero(tail > budget)[0]
    return max(int(keep[-1]) + 1 if keep.size else 0, 1)


def hosvd(X, tol: float | None = None, ranks=None) -> TuckerTensor:
    """Truncated higher-order SVD.

    With `tol` each mode may discard a tail of size tol/sqrt(d) * ||X||_F,
    so the overall relative error is at most `tol`.  With `ranks` the
    leading singular vectors of each unfolding are kept.
    """
    X = as_tensor(X)
    d = X.ndim
    if (tol is None) == (ranks is None):
        raise ValueError("pass exactly one of tol or ranks")
    nrm = np.linalg.norm(X)
    factors = []
    for i in range(d):
        U, s, _ = np.linalg.svd(unfold(X, i), full_matrices=False)
        if ranks is not None:
            r = min(int(ranks[i]), U.shape[1])
        else:
            r = _truncation_rank(s, tol / sqrt(d) * nrm)
        factors.append(U[:, :r])
    core = multi_mode_product(X, [U.conj().T for U in factors])
    return TuckerTensor(core, factors)


# ---------------------------------------------------------------------------
# Tensor Train

@dataclass
class TTTensor:
    """Tensor Train with 3-way carriages (r_{j-1}, n_j, r_j), r_0 = r_d = 1.

    The first carriage may be passed as an n_1 x r_1 matrix and the last as
    an r_{d-1} x n_d matrix; they are reshaped to the 3-way layout.
    """

    cores: list

    def __post_init__(self):
        cores = [np.asarray(G, dtype=complex) for G in self.cores]
        if not cores:
            raise DimensionMismatch("a TT needs at least one carriage")
        if len(cores) > 1 and cores[0].ndim == 2:
            cores[0] = cores[0][None, :, :]
        if len(cores) > 1 and cores[-1].ndim == 2:
            cores[-1] = cores[-1][:, :, None]
        if len(cores) == 1 and cores[0].ndim == 1:
            cores[0] = cores[0][None, :, None]
        for j, G in enumerate(cores):
            if G.ndim != 3:
                raise DimensionMismatch(f"carriage {j} must be 3-way, got {G.shape}")
        if cores[0].shape[0] != 1 or cores[-1].shape[2] != 1:
            raise DimensionMismatch("boundary TT ranks must be 1")
        for j in range(len(cores) - 1):
            if cores[j].shape[2] != cores[j + 1].shape[0]:
                raise DimensionMismatch(
                    f"rank mismatch between carriages {j} and {j + 1}: "
                    f"{cores[j].shape} vs {cores[j + 1].shape}")
        self.cores = cores

    @property
    def ndim(self) -> int:
        return len(self.cores)

    @property
    def shape(self) -> tuple:
        return tuple(G.shape[1] for G in self.cores)

    @property
    def ranks(self) -> tuple:
        return tuple(G.shape[2] for G in self.cores[:-1])

    def carriages(self) -> list:
        """Carriages in the 2-way/3-way/2-way layout (G_1: n_1 x r_1, G_d: r_{d-1} x n_d)."""
        if self.ndim == 1:
            return [self.cores[0][0, :, 0]]
        return [self.cores[0][0]] + self.cores[1:-1] + [self.cores[-1][:, :, 0]]

    def full(self) -> np.ndarray:
        return tt_full(self)

    def copy(self) -> "TTTensor":
        return TTTensor([G.copy() for G in self.cores])


def tt_full(T: TTTensor, budget: int = TT_FULL_BUDGET) -> np.ndarray:
    if prod(T.shape) > budget:
        raise SizeOverflow(f"tt_full of shape {T.shape} exceeds {budget} entries")
    X = T.cores[0]  # (1, n1, r1)
    for G in T.cores[1:]:
        X = np.tensordot(X, G, axes=(-1, 0))
    return X[0, ..., 0]


def tt_entry(T: TTTensor, index) -> complex:
    v = np.ones((1, 1), dtype=complex)
    for G, i in zip(T.cores, index):
        v = v @ G[:, i, :]
    return complex(v[0, 0])


def tt_svd(X, tol: float) -> TTTensor:
    """TT-SVD with per-step truncation budget tol/sqrt(d-1) * ||X||_F."""
    X = as_tensor(X)
    d = X.ndim
    shape = X.shape
    if d == 1:
        return TTTensor([X[None, :, None]])
    delta = tol / sqrt(d - 1) * np.linalg.norm(X)
    cores = []
    r = 1
    # C-order reshapes: row index (r_{j-1}, n_j) with the rank index slowest
    C = X.reshape(1, -1)
    for j in range(d - 1):
        C = C.reshape(r * shape[j], -1)
        U, s, Vh = np.linalg.svd(C, full_matrices=False)
        rn = _truncation_rank(s, delta)
        cores.append(U[:, :rn].reshape(r, shape[j], rn))
        C = s[:rn, None] * Vh[:rn]
        r = rn
    cores.append(C.reshape(r, shape[-1], 1))
    return TTTensor(cores)


def _left_unf(G):
    return G.reshape(G.shape[0] * G.shape[1], G.shape[2])


def _right_unf(G):
    return G.reshape(G.shape[0], G.shape[1] * G.shape[2])


def tt_orthogonalize_left(T: TTTensor) -> TTTensor:
    """Return an equal TT whose carriages 1..d-1 are left-orthonormal."""
    cores = [G.copy() for G in T.cores]
    for j in range(len(cores) - 1):
        G = cores[j]
        Q, R = np.linalg.qr(_left_unf(G))
        cores[j] = Q.reshape(G.shape[0], G.shape[1], Q.shape[1])
        cores[j + 1] = np.tensordot(R, cores[j + 1], axes=(1, 0))
    return TTTensor(cores)


def tt_orthogonalize_right(T: TTTensor) -> TTTensor:
    """Return an equal TT whose carriages 2..d are right-orthonormal."""
    cores = [G.copy() for G in T.cores]
    for j in range(len(cores) - 1, 0, -1):
        G = cores[j]
        Q, R = np.linalg.qr(_right_unf(G).T)
        cores[j] = Q.T.reshape(Q.shape[1], G.shape[1], G.shape[2])
        cores[j - 1] = np.tensordot(cores[j - 1], R.T, axes=(2, 0))
    return TTTensor(cores)


def tt_norm(T: TTTensor) -> float:
    return float(np.linalg.norm(tt_orthogonalize_left(T).cores[-1]))


def tt_round(T: TTTensor, tol: float) -> TTTensor:
    """Recompress a TT so that the relative error is at most `tol`."""
    d = T.ndim
    L = tt_orthogonalize_left(T)
    if d == 1:
        return L
    nrm = np.linalg.norm(L.cores[-1])
    delta = tol / sqrt(d - 1) * nrm
    cores = list(L.cores)
    for j in range(d - 1, 0, -1):
        G = cores[j]
        U, s, Vh = np.linalg.svd(_right_unf(G), full_matrices=False)
        rn = _truncation_rank(s, delta)
        cores[j] = Vh[:rn].reshape(rn, G.shape[1], G.shape[2])
        cores[j - 1] = np.tensordot(cores[j - 1], U[:, :rn] * s[:rn], axes=(2, 0))
    return TTTensor(cores)


def tt_add(*terms: TTTensor, coeffs=None) -> TTTensor:
    """Sum of TT tensors (ranks add)."""
    if coeffs is None:
        coeffs = [1.0] * len(terms)
    d = terms[0].ndim
    if any(T.shape != terms[0].shape for T in terms):
        raise DimensionMismatch("tt_add needs equal shapes")
    if d == 1:
        return TTTensor([sum(c * T.cores[0] for c, T in zip(coeffs, terms))])
    cores = []
    for j in range(d):
        blocks = [T.cores[j] for T in terms]
        n = blocks[0].shape[1]
        if j == 0:
            G = np.concatenate([c * B for c, B in zip(coeffs, blocks)], axis=2)
        elif j == d - 1:
            G = np.concatenate(blocks, axis=0)
        else:
            r0 = sum(B.shape[0] for B in blocks)
            r1 = sum(B.shape[2] for B in blocks)
            G = np.zeros((r0, n, r1), dtype=complex)
            a = b = 0
            for B in blocks:
                G[a:a + B.shape[0], :, b:b + B.shape[2]] = B
                a += B.shape[0]
                b += B.shape[2]
        cores.append(G)
    return TTTensor(cores)


def tt_scale(T: TTTensor, alpha) -> TTTensor:
    cores = [G.copy() for G in T.cores]
    cores[0] = alpha * cores[0]
    return TTTensor(cores)


def tt_mode_product(T: TTTensor, M: np.ndarray, i: int) -> TTTensor:
    """T x_i M, acting on the physical index of carriage i."""
    cores = list(T.cores)
    G = cores[i]
    if M.shape[1] != G.shape[1]:
        raise DimensionMismatch(f"matrix {M.shape} does not act on size {G.shape[1]}")
    cores[i] = np.einsum("ab,rbs->ras", M, G)
    return TTTensor(cores)


def tt_laplace_apply(T: TTTensor, mats) -> TTTensor:
    """sum_i T x_i mats[i] as a TT of doubled rank."""
    d = T.ndim
    if d == 1:
        return tt_mode_product(T, mats[0], 0)
    cores = []
    for j, (G, M) in enumerate(zip(T.cores, mats)):
        AG = np.einsum("ab,rbs->ras", M, G)
        r0, n, r1 = G.shape
        if j == 0:
            C = np.concatenate([G, AG], axis=2)
        elif j == d - 1:
            C = np.concatenate([AG, G], axis=0)
        else:
            C = np.zeros((2 * r0, n, 2 * r1), dtype=complex)
            C[:r0, :, :r1] = G
            C[:r0, :, r1:] = AG
            C[r0:, :, r1:] = G
        cores.append(C)
    return TTTensor(cores)


def tt_reverse(T: TTTensor) -> TTTensor:
    """The TT of the tensor with the mode order reversed."""
    return TTTensor([G.transpose(2, 1, 0) for G in T.cores[::-1]])


def tt_zeros(shape) -> TTTensor:
    return TTTensor([np.zeros((1, n, 1), dtype=complex) for n in shape])


def block_vector_for_mode(C, i: int) -> np.ndarray:
    """Starting block of the mode-i Krylov space for a Tucker or TT tensor.

    Tucker: the mode-i factor.  TT: the first carriage for i = 0, otherwise
    the mode-2 unfolding of carriage i (n_i x r_{i-1} r_i).
    """
    if isinstance(C, TuckerTensor):
        return C.factors[i]
    if isinstance(C, TTTensor):
        G = C.cores[i]
        if i == 0:
            return G[0]
        return unfold(G, 1)
    raise TypeError(f"unsupported tensor type {type(C).__name__}")


def frob_norm(T) -> float:
    if isinstance(T, TuckerTensor):
        return float(np.linalg.norm(T.core))
    if isinstance(T, TTTensor):
        return tt_norm(T)
    return float(np.linalg.norm(np.asarray(T)))


def to_full(T) -> np.ndarray:
    if isinstance(T, TuckerTensor):
        return tucker_full(T)
    if isinstance(T, TTTensor):
        return tt_full(T)
    return np.asarray(T)
