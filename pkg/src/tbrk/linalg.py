"""Dense linear-algebra kernels: QR, eigenvalues, pivoted solves, planar hulls.

Every routine works in complex double precision; real input is promoted.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NonConvergence, SingularMatrix

# relative threshold on R's diagonal used to flag rank deficiency
RANK_TOL = 1e-12
# relative pivot threshold for solve_dense / shifted solves
PIVOT_TOL = 1e-14


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return `M` as a 2-D complex array, rejecting NaN/Inf entries."""
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def thin_qr(M) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with the diagonal of R real and nonnegative."""
    M = np.asarray(M, dtype=complex)
    if M.shape[0] < M.shape[1]:
        raise DimensionMismatch(f"thin_qr needs rows >= cols, got {M.shape}")
    Q, R = np.linalg.qr(M, mode="reduced")
    diag = np.diag(R)
    mag = np.abs(diag)
    phase = np.where(mag > 0, diag / np.where(mag > 0, mag, 1), 1.0)
    Q = Q * phase[None, :]
    R = np.conj(phase)[:, None] * R
    # clean the diagonal of rounding noise in the imaginary part
    R[np.diag_indices_from(R)] = np.abs(np.diag(R))
    return Q, R


def is_hermitian(M: np.ndarray, rtol: float = 1e-13) -> bool:
    M = np.asarray(M)
    if M.shape[0] != M.shape[1]:
        return False
    scale = max(np.abs(M).max(initial=0.0), np.finfo(float).tiny)
    return bool(np.abs(M - M.conj().T).max(initial=0.0) <= rtol * scale)


def eig_dense(M, hermitian: bool | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a square matrix.

    Hermitian input (detected when `hermitian` is None) goes through the
    symmetric driver so the returned eigenvalues are exactly real.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"eig_dense needs a square matrix, got {M.shape}")
    if hermitian is None:
        hermitian = is_hermitian(M)
    try:
        if hermitian:
            w, W = np.linalg.eigh(0.5 * (M + M.conj().T))
            return w.astype(complex), W
        w, W = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    return w, W


def _check_pivots(U: np.ndarray, scale: float) -> None:
    piv = np.abs(np.diag(U))
    if piv.size and piv.min() <= PIVOT_TOL * max(scale, np.finfo(float).tiny):
        raise SingularMatrix(
            f"pivot {piv.min():.3e} below {PIVOT_TOL:g} x {scale:.3e}")


def solve_dense(A, B) -> np.ndarray:
    """Solve AX = B with partial pivoting; raise SingularMatrix on tiny pivots."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    if B.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"rhs has {B.shape[0]} rows, A has {A.shape[0]}")
    with warnings.catch_warnings():
        # singular factors are reported through SingularMatrix below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    _check_pivots(lu, np.abs(A).max(initial=0.0))
    return sla.lu_solve((lu, piv), B, check_finite=False)


def kron_apply(factors, v) -> np.ndarray:
    """Compute (F_d kron ... kron F_1) v without forming the Kronecker product.

    `v` is ordered with the first mode varying fastest.
    """
    factors = [np.asarray(F) for F in factors]
    v = np.asarray(v)
    cols = [F.shape[1] for F in factors]
    if v.size != int(np.prod(cols)):
        raise DimensionMismatch(f"vector length {v.size} != prod{tuple(cols)}")
    X = v.reshape(cols, order="F")
    for i, F in enumerate(factors):
        X = np.moveaxis(np.tensordot(F, X, axes=(1, i)), 0, i)
    return X.reshape(-1, order="F")


# ---------------------------------------------------------------------------
# planar convex geometry on complex numbers

@dataclass(frozen=True)
class ComplexPolygon:
    """Convex polygon with counterclockwise vertices.

    One vertex encodes a point and two vertices a segment.
    """

    vertices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices",
                           np.atleast_1d(np.asarray(self.vertices, dtype=complex)))

    def __len__(self):
        return len(self.vertices)

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.abs(v[:, None] - v[None, :]).max()) if len(v) > 1 else 0.0

    @property
    def perimeter(self) -> float:
        v = self.vertices
        if len(v) == 1:
            return 0.0
        if len(v) == 2:
            return float(abs(v[1] - v[0]))
        return float(np.abs(np.roll(v, -1) - v).sum())

    def contains(self, points, rtol: float = 1e-12) -> np.ndarray:
        """Boolean mask of points inside or on the polygon (up to `rtol`)."""
        z = np.atleast_1d(np.asarray(points, dtype=complex))
        v = self.vertices
        scale = max(self.diameter, np.abs(v).max(), 1e-300)
        tol = rtol * scale
        if len(v) == 1:
            return np.abs(z - v[0]) <= tol
        if len(v) == 2:
            a, b = v
            t = np.real((z - a) * np.conj(b - a)) / abs(b - a) ** 2
            t = np.clip(t, 0.0, 1.0)
            return np.abs(z - (a + t * (b - a))) <= tol
        e = np.roll(v, -1) - v
        rel = z[:, None] - v[None, :]
        cross = e.real[None, :] * rel.imag - e.imag[None, :] * rel.real
        # signed-area test normalised by edge length
        return np.all(cross >= -tol * np.abs(e)[None, :], axis=1)

    def sample_boundary(self, n: int) -> np.ndarray:
        """`n` points on the boundary, uniformly spaced in arc length."""
        v = self.vertices
        if len(v) == 1:
            return np.full(n, v[0])
        if len(v) == 2:
            return v[0] + np.linspace(0.0, 1.0, n) * (v[1] - v[0])
        ring = np.append(v, v[0])
        seg = np.abs(np.diff(ring))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s = np.arange(n) * (cum[-1] / n)
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
        t = (s - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1.0)
        return ring[idx] + t * (ring[idx + 1] - ring[idx])

    def centroid(self) -> complex:
        return complex(self.vertices.mean())


def convex_hull(points, rtol: float = 1e-12) -> ComplexPolygon:
    """Minimal convex polygon containing `points` (monotone chain).

    Collinear and duplicate vertices are removed relative to `rtol` times
    the squared diameter, so nearly real point clouds collapse to segments.
    """
    z = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    if z.size == 0:
        raise ValueError("convex_hull of an empty point set")
    if not np.all(np.isfinite(z)):
        raise ValueError("convex_hull needs finite points")
    order = np.lexsort((z.imag, z.real))
    z = z[order]
    span = max(np.ptp(z.real), np.ptp(z.imag))
    scale = max(span, np.abs(z).max() * 1e-3, 1e-300)
    tol = rtol * scale * scale

    keep = [z[0]]
    for p in z[1:]:
        if abs(p - keep[-1]) > rtol * scale:
            keep.append(p)
    z = np.array(keep)
    if len(z) == 1:
        return ComplexPolygon(z)

    def cross(o, a, b):
        return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)

    lower: list[complex] = []
    for p in z:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    upper: list[complex] = []
    for p in z[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) <= 2:
        # collinear: keep the two extreme points
        return ComplexPolygon(np.array([z[0], z[-1]]) if len(hull) < 2 else np.array(hull))
    return ComplexPolygon(np.array(hull))


def minkowski_sum(hulls) -> ComplexPolygon:
    """Convex hull of all vertex sums of the given polygons."""
    hulls = list(hulls)
    if not hulls:
        raise ValueError("minkowski_sum of an empty list")

    def add(P: ComplexPolygon, Q: ComplexPolygon) -> ComplexPolygon:
        return convex_hull((P.vertices[:, None] + Q.vertices[None, :]).ravel())

    return reduce(add, hulls[1:], convex_hull(hulls[0].vertices))
