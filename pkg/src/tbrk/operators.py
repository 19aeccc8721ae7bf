"""Linear operators exposing `apply` and shifted solves.

Krylov expansion only ever needs A @ X and (A - sigma I)^{-1} X, so
operators are kept abstract behind these two calls.  Tridiagonal operators
(every benchmark in this package) apply and solve in O(n) per column.
"""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import DimensionMismatch, SingularMatrix
from .linalg import PIVOT_TOL, as_matrix, is_hermitian


class Operator:
    """Base class; subclasses implement `apply`, `solve_shifted`, `to_dense`."""

    n: int
    hermitian: bool = False
    is_real: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def apply(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def solve_shifted(self, sigma: complex, X: np.ndarray) -> np.ndarray:
        """Return (A - sigma I)^{-1} X."""
        raise NotImplementedError

    def to_dense(self) -> np.ndarray:
        return self.apply(np.eye(self.n, dtype=complex))

    def norm_estimate(self) -> float:
        return float(np.abs(self.to_dense()).sum(axis=0).max())

    def __matmul__(self, X):
        return self.apply(X)


class DenseOperator(Operator):
    def __init__(self, A):
        A = as_matrix(A, "operator")
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"operator must be square, got {A.shape}")
        self.A = A
        self.n = A.shape[0]
        self.hermitian = is_hermitian(A)
        self.is_real = bool(np.all(A.imag == 0))
        self._scale = float(np.abs(A).max(initial=0.0))
        self._lu_cache: dict[complex, tuple] = {}

    def apply(self, X):
        return self.A @ X

    def solve_shifted(self, sigma, X):
        sigma = complex(sigma)
        fac = self._lu_cache.get(sigma)
        if fac is None:
            M = self.A - sigma * np.eye(self.n)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu, piv = sla.lu_factor(M, check_finite=False)
            piv_min = np.abs(np.diag(lu)).min()
            if piv_min <= PIVOT_TOL * max(np.abs(M).max(), self._scale):
                raise SingularMatrix(f"shift {sigma} is (numerically) an eigenvalue")
            fac = (lu, piv)
            if len(self._lu_cache) > 8:
                self._lu_cache.clear()
            self._lu_cache[sigma] = fac
        return sla.lu_solve(fac, np.asarray(X, dtype=complex), check_finite=False)

    def to_dense(self):
        return self.A.copy()

    def norm_estimate(self):
        return float(np.abs(self.A).sum(axis=0).max())


class TridiagonalOperator(Operator):
    """Tridiagonal matrix given by its sub-, main and super-diagonal."""

    def __init__(self, lower, diag, upper):
        self.diag = np.asarray(diag, dtype=complex)
        self.lower = np.asarray(lower, dtype=complex)
        self.upper = np.asarray(upper, dtype=complex)
        self.n = self.diag.size
        if self.lower.size != self.n - 1 or self.upper.size != self.n - 1:
            raise DimensionMismatch("off-diagonals must have length n-1")
        self.is_real = bool(np.all(self.diag.imag == 0) and np.all(self.lower.imag == 0)
                            and np.all(self.upper.imag == 0))
        self.hermitian = bool(np.all(self.diag.imag == 0)
                              and np.array_equal(self.lower, np.conj(self.upper)))
        self._scale = float(max(np.abs(self.diag).max(initial=0.0),
                                np.abs(self.lower).max(initial=0.0),
                                np.abs(self.upper).max(initial=0.0)))

    def apply(self, X):
        X = np.asarray(X)
        vec = X.ndim == 1
        if vec:
            X = X[:, None]
        if X.shape[0] != self.n:
            raise DimensionMismatch(f"operand has {X.shape[0]} rows, operator is {self.n}")
        Y = self.diag[:, None] * X
        Y[1:] += self.lower[:, None] * X[:-1]
        Y[:-1] += self.upper[:, None] * X[1:]
        return Y[:, 0] if vec else Y

    def solve_shifted(self, sigma, X):
        X = np.asarray(X, dtype=complex)
        vec = X.ndim == 1
        if vec:
            X = X[:, None]
        d = self.diag - complex(sigma)
        dl, dd, du, du2, ipiv, info = lapack.zgttrf(self.lower, d, self.upper)
        if info != 0 or np.abs(dd).min() <= PIVOT_TOL * max(self._scale, abs(sigma)):
            raise SingularMatrix(f"shift {sigma} is (numerically) an eigenvalue")
        Y, info = lapack.zgttrs(dl, dd, du, du2, ipiv, X)
        if info != 0:
            raise SingularMatrix(f"tridiagonal solve failed (info={info})")
        return Y[:, 0] if vec else Y

    def to_dense(self):
        return (np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1))

    def norm_estimate(self):
        col = np.abs(self.diag).copy()
        col[:-1] += np.abs(self.lower)
        col[1:] += np.abs(self.upper)
        return float(col.max())

    def __add__(self, other: "TridiagonalOperator") -> "TridiagonalOperator":
        return TridiagonalOperator(self.lower + other.lower, self.diag + other.diag,
                                   self.upper + other.upper)

    def scaled(self, alpha) -> "TridiagonalOperator":
        return TridiagonalOperator(alpha * self.lower, alpha * self.diag, alpha * self.upper)

    def row_scaled(self, s) -> "TridiagonalOperator":
        """diag(s) @ self."""
        s = np.asarray(s, dtype=complex)
        return TridiagonalOperator(s[1:] * self.lower, s * self.diag, s[:-1] * self.upper)


def as_operator(A) -> Operator:
    if isinstance(A, Operator):
        return A
    return DenseOperator(A)
