"""Pole selection: static (poly, ext) and adaptive (det, det2) strategies.

The adaptive strategies maximise a rational objective over the boundary of
a surrogate for the field of values of -B_i, the Sylvester partner of mode
i.  The surrogate is the Minkowski sum, over the other modes j, of the
convex hull of all eigenvalues of -A_j^(s) seen so far.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arnoldi import INF, is_infinite
from .errors import EmptySurrogate
from .linalg import ComplexPolygon, convex_hull, eig_dense, minkowski_sum

KINDS = ("poly", "ext", "det", "det2")


@dataclass
class PoleStrategy:
    kind: str = "det"
    samples: int = 256

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown pole strategy {self.kind!r}; choose from {KINDS}")
        if self.samples < 32:
            raise ValueError("boundary sample count must be at least 32")

    @property
    def adaptive(self) -> bool:
        return self.kind in ("det", "det2")


@dataclass
class FovSurrogate:
    """Per-mode eigenvalue clouds and their convex hulls."""

    d: int
    clouds: list = field(default_factory=list)
    hulls: list = field(default_factory=list)

    def __post_init__(self):
        if not self.clouds:
            self.clouds = [np.empty(0, dtype=complex) for _ in range(self.d)]
            self.hulls = [None] * self.d


def update_surrogate(s: FovSurrogate, j: int, Aj_proj=None, hermitian: bool | None = None,
                     eigenvalues=None) -> FovSurrogate:
    """Append the eigenvalues of -Aj_proj to cloud j and refresh its hull.

    Precomputed eigenvalues of -Aj_proj may be passed as `eigenvalues`.
    """
    if eigenvalues is None:
        eigenvalues, _ = eig_dense(-np.asarray(Aj_proj, dtype=complex), hermitian=hermitian)
    lam = np.asarray(eigenvalues, dtype=complex).ravel()
    s.clouds[j] = np.concatenate([s.clouds[j], lam])
    old = s.hulls[j].vertices if s.hulls[j] is not None else np.empty(0, dtype=complex)
    s.hulls[j] = convex_hull(np.concatenate([old, lam]))
    return s


def partner_region(s: FovSurrogate, i: int) -> ComplexPolygon:
    if s.d == 1:
        # the partner operator is an empty sum, whose field of values is {0}
        return convex_hull([0.0])
    others = [s.hulls[j] for j in range(s.d) if j != i]
    if any(h is None for h in others):
        raise EmptySurrogate(f"surrogate for mode {i} needs every other mode's spectrum")
    return minkowski_sum(others)


def boundary_samples(s: FovSurrogate, i: int, N: int = 256) -> np.ndarray:
    """N points on the boundary of the surrogate of W(-B_i).

    Half are uniform in arc length. The other half are graded geometrically
    toward the vertices, because spectra of discretized operators span many
    decades and the small-magnitude end would otherwise get almost no
    samples.
    """
    return graded_boundary(partner_region(s, i), N)


def graded_boundary(poly, N: int) -> np.ndarray:
    v = poly.vertices
    if len(v) == 1 or N < 4:
        return poly.sample_boundary(N)
    uniform = poly.sample_boundary(N - N // 2)
    edges = [(v[0], v[1])] if len(v) == 2 else list(zip(v, np.roll(v, -1)))
    per_end = max(1, (N // 2) // (2 * len(edges)))
    graded = []
    for a, z in edges:
        L = abs(z - a)
        if L == 0:
            continue
        for p, q in ((a, z), (z, a)):
            lo = max(1e-8 * L, 1e-3 * abs(p))
            if lo >= 0.5 * L:
                continue
            t = np.geomspace(lo, 0.5 * L, per_end) / L
            graded.append(p + t * (q - p))
    pts = np.concatenate([uniform, *graded])
    return pts[:N] if pts.size >= N else np.concatenate(
        [pts, poly.sample_boundary(N - pts.size)])


def _log_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(a[:, None] - b[None, :]))


def det_log_objective(samples, poles, ritz, b: int) -> np.ndarray:
    """log of prod_xi |lam - conj(xi)|^b / prod_mu |lam - conj(mu)| at every sample."""
    lam = np.asarray(samples, dtype=complex)
    xi = np.array([complex(p) for p in poles if not is_infinite(p)], dtype=complex)
    mu = np.asarray(ritz, dtype=complex)
    num = b * _log_dist(lam, np.conj(xi)).sum(axis=1) if xi.size else np.zeros(lam.size)
    den = _log_dist(lam, np.conj(mu)).sum(axis=1) if mu.size else np.zeros(lam.size)
    return _combine(num, den)


def det2_log_objective(samples, poles, ritz, b: int, k: int) -> np.ndarray:
    """log of prod_xi |lam - conj(xi)| / prod_{j<k} |lam - conj(mu_{(j-1)b+1})|.

    The ritz values are ordered by distance to conj(lam) separately for
    each sample and every b-th one is taken, k-1 in total.
    """
    lam = np.asarray(samples, dtype=complex)
    xi = np.array([complex(p) for p in poles if not is_infinite(p)], dtype=complex)
    mu = np.asarray(ritz, dtype=complex)
    num = _log_dist(lam, np.conj(xi)).sum(axis=1) if xi.size else np.zeros(lam.size)
    nden = max(k - 1, 0)
    if nden and mu.size:
        dist = np.sort(_log_dist(lam, np.conj(mu)), axis=1)
        den = dist[:, ::b][:, :nden].sum(axis=1)
    else:
        den = np.zeros(lam.size)
    return _combine(num, den)


def _combine(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    obj = num - den
    # a sample sitting on a ritz value is discarded rather than chosen
    obj[np.isneginf(den) | np.isnan(obj)] = -np.inf
    return obj


def _pick(samples: np.ndarray, obj: np.ndarray, ritz, region: ComplexPolygon | None):
    idx = int(np.argmax(obj))  # first index on ties
    lam = complex(samples[idx])
    pole = lam.conjugate()
    mu = np.asarray(ritz, dtype=complex)
    scale = max(np.abs(mu).max(initial=0.0), np.abs(samples).max(initial=0.0), 1e-300)
    if mu.size and np.abs(pole - mu).min() < 1e-12 * scale:
        centre = region.centroid() if region is not None else 0.0
        direction = lam - centre
        direction = direction / abs(direction) if abs(direction) > 0 else 1.0
        pole = (lam + 1e-8 * scale * direction).conjugate()
    return pole


def next_pole_det(s: FovSurrogate, i: int, current_poles, ritz, b: int,
                  N: int = 256) -> complex:
    region = partner_region(s, i)
    samples = graded_boundary(region, N)
    return _pick(samples, det_log_objective(samples, current_poles, ritz, b), ritz, region)


def next_pole_det2(s: FovSurrogate, i: int, current_poles, ritz, b: int, k: int,
                   N: int = 256) -> complex:
    region = partner_region(s, i)
    samples = graded_boundary(region, N)
    return _pick(samples, det2_log_objective(samples, current_poles, ritz, b, k), ritz,
                 region)


def next_pole_static(strategy: PoleStrategy | str, j: int):
    """poly: always infinity.  ext: infinity for even j, zero for odd j."""
    kind = strategy.kind if isinstance(strategy, PoleStrategy) else strategy
    if kind == "poly":
        return INF
    if kind == "ext":
        return INF if j % 2 == 0 else 0
    raise ValueError(f"{kind!r} is not a static strategy")
