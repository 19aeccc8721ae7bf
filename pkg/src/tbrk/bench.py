"""Finite-difference benchmark problems on [0, 1]^d.

Grid convention: n unknowns per direction, spacing h = 1/(n-1), unknown j
(j = 1..n) sits at x_j = j*h.  Homogeneous Dirichlet conditions are built
into the stencils.

Right-hand sides are built directly in low-rank form:

* separable products  f = prod_i g_i(x_i)  (exact rank 1);
* inverse-linear  f = 1/(alpha + sum_i x_i)  and products of such factors
  over consecutive mode groups, through the exponential-sum quadrature
  1/s = int exp(-s e^u) e^u du  discretised by the trapezoidal rule, so
  every term is separable;
* seeded random Tucker / TT tensors.
"""
from __future__ import annotations

import ast
import math
import operator as _op
from dataclasses import dataclass, field
from math import prod

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionMismatch, SizeOverflow, UnsupportedExpression
from .operators import Operator, TridiagonalOperator, as_operator
from .tensors import (TTTensor, TuckerTensor, hosvd, tt_round, unvec, vec)

ORACLE_BUDGET = 20_000


@dataclass(frozen=True)
class GridSpec:
    n: int
    d: int = 1

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("grid needs n >= 3")
        if self.d < 1:
            raise ValueError("dimension must be positive")

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return self.h * np.arange(1, self.n + 1)


@dataclass
class ProblemSpec:
    """Benchmark description.

    kind : "poisson", "convdiff" or "files".
    epsilon : viscosity for convdiff.
    phi : per-mode convection profiles (callables or expression strings in x).
    rhs : right-hand side id (see `build_rhs`).
    """

    kind: str = "poisson"
    epsilon: float = 1.0
    phi: list = field(default_factory=list)
    rhs: str = "inv-linear"

    def __post_init__(self):
        if self.kind not in ("poisson", "convdiff", "files"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind == "convdiff" and not self.epsilon > 0:
            raise ValueError("convdiff needs epsilon > 0")


# ---------------------------------------------------------------------------
# 1-D operators

def laplacian_1d(g: GridSpec) -> TridiagonalOperator:
    """(1/h^2) tridiag(-1, 2, -1)."""
    n, s = g.n, 1.0 / g.h ** 2
    off = -s * np.ones(n - 1)
    return TridiagonalOperator(off, 2 * s * np.ones(n), off)


def convection_1d(g: GridSpec) -> TridiagonalOperator:
    """(1/2h) tridiag(-1, 0, 1), centred first derivative."""
    n, s = g.n, 0.5 / g.h
    return TridiagonalOperator(-s * np.ones(n - 1), np.zeros(n), s * np.ones(n - 1))


def phi_values(phi, g: GridSpec) -> np.ndarray:
    f = compile_expression(phi) if isinstance(phi, str) else phi
    vals = np.broadcast_to(np.asarray(f(g.points), dtype=float), (g.n,))
    return np.array(vals)


def phi_diag(phi, g: GridSpec) -> np.ndarray:
    """Dense diag(Phi(h), Phi(2h), ...)."""
    return np.diag(phi_values(phi, g))


def convdiff_operator(g: GridSpec, epsilon: float, phi) -> TridiagonalOperator:
    """epsilon * A + diag(Phi) B."""
    return laplacian_1d(g).scaled(epsilon) + convection_1d(g).row_scaled(phi_values(phi, g))


def poisson_operators(g: GridSpec) -> list:
    A = laplacian_1d(g)
    return [A] * g.d


def convdiff_operators(g: GridSpec, epsilon: float, phis) -> list:
    """Mode operators; modes with the same profile share one operator object."""
    if len(phis) != g.d:
        raise DimensionMismatch(f"{len(phis)} convection profiles for d={g.d}")
    cache: dict = {}
    ops = []
    for phi in phis:
        key = phi if isinstance(phi, str) else id(phi)
        if key not in cache:
            cache[key] = convdiff_operator(g, epsilon, phi)
        ops.append(cache[key])
    return ops


def problem_operators(spec: ProblemSpec, g: GridSpec) -> list:
    if spec.kind == "poisson":
        return poisson_operators(g)
    if spec.kind == "convdiff":
        phis = list(spec.phi) or ["1 + (x + 1)**2 / 4"] + ["0"] * (g.d - 1)
        return convdiff_operators(g, spec.epsilon, [_normalise_expr(p) for p in phis])
    raise ValueError("file problems are assembled by the io module")


def _normalise_expr(p):
    return p.replace(" ", "") if isinstance(p, str) else p


# ---------------------------------------------------------------------------
# safe univariate expressions

_BINOPS = {ast.Add: _op.add, ast.Sub: _op.sub, ast.Mult: _op.mul, ast.Div: _op.truediv,
           ast.Pow: _op.pow}
_UNARY = {ast.USub: _op.neg, ast.UAdd: _op.pos}
_FUNCS = {name: getattr(np, name) for name in
          ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "sinh", "cosh", "tanh", "arctan")}
_CONSTS = {"pi": math.pi, "e": math.e}


def compile_expression(text: str):
    """Compile an arithmetic expression in `x` into a vectorised callable."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise UnsupportedExpression(f"cannot parse {text!r}") from exc

    def ev(node, x):
        if isinstance(node, ast.Expression):
            return ev(node.body, x)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id == "x":
                return x
            if node.id in _CONSTS:
                return _CONSTS[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, x), ev(node.right, x))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand, x))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](ev(node.args[0], x))
        raise UnsupportedExpression(f"unsupported construct in {text!r}")

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(ev(tree, x), dtype=float), x.shape).copy()

    ev(tree, np.zeros(1))  # validate eagerly
    return f


# ---------------------------------------------------------------------------
# exponential sums

def exp_sum_inverse(a: float, b: float, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Weights w and exponents t with |1/s - sum_k w_k exp(-t_k s)| <= tol/s on [a, b].

    Trapezoidal rule applied to 1/s = int exp(-s e^u + u) du.
    """
    if not 0 < a <= b:
        raise ValueError("exp_sum_inverse needs 0 < a <= b")
    eps = tol / 4
    u_min = math.log(eps / b)
    u_max = math.log(math.log(b / (a * eps)) / a)
    step = math.pi ** 2 / (math.log(8 / eps) + 1)
    u = np.arange(u_min, u_max + step, step)
    return step * np.exp(u), np.exp(u)


def _inverse_group_factors(x: np.ndarray, m: int, alpha: float, tol: float):
    """Per-mode factor matrices and weights for 1/(alpha + x_1 + ... + x_m)."""
    lo = alpha + m * x.min()
    hi = alpha + m * x.max()
    if lo <= 0:
        raise UnsupportedExpression("1/(alpha + sum x) needs a positive denominator")
    w, t = exp_sum_inverse(lo, hi, tol)
    F = np.exp(-np.outer(x, t))
    return w * np.exp(-t * alpha), F


def _khatri_rao_core(w, Ps) -> np.ndarray:
    """sum_k w_k P_1[:,k] o ... o P_m[:,k]."""
    T = w[None, :] * Ps[0]
    shape = [Ps[0].shape[0]]
    for P in Ps[1:]:
        T = (T.reshape(-1, 1, T.shape[-1]) * P[None, :, :]).reshape(-1, T.shape[-1])
        shape.append(P.shape[0])
    return T.sum(axis=1).reshape(shape)


def _truncated_range(F: np.ndarray, tol: float) -> np.ndarray:
    U, s, _ = np.linalg.svd(F, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return U[:, :1]
    r = max(1, int(np.sum(s > tol * s[0])))
    return U[:, :r]


def _inverse_group_tucker(x, m, alpha, tol):
    w, F = _inverse_group_factors(x, m, alpha, tol * 1e-2)
    U = _truncated_range(F, tol * 1e-3)
    P = U.T @ F
    core = _khatri_rao_core(w, [P] * m)
    # the group is symmetric in its modes, so one factor serves all of them
    S = _truncated_range(core.reshape(core.shape[0], -1), tol * 1e-1)
    for i in range(m):
        core = np.moveaxis(np.tensordot(S.T, np.moveaxis(core, i, 0), axes=1), 0, i)
    return core, [U @ S] * m


def _inverse_group_tt(x, m, alpha, tol) -> list:
    if m == 1:
        return [(1.0 / (alpha + x)).reshape(1, -1, 1)]
    w, F = _inverse_group_factors(x, m, alpha, tol * 1e-2)
    K = w.size
    cores = [(F * w).reshape(1, -1, K)]
    for _ in range(m - 2):
        G = np.zeros((K, x.size, K))
        G[np.arange(K), :, np.arange(K)] = F.T
        cores.append(G)
    cores.append(F.T.reshape(K, -1, 1))
    return cores


def _outer_tucker(parts) -> TuckerTensor:
    core = parts[0][0]
    factors = list(parts[0][1])
    for c, fs in parts[1:]:
        core = np.multiply.outer(core, c)
        factors += fs
    return TuckerTensor(core, factors)


# ---------------------------------------------------------------------------
# right-hand sides

def separable_rhs(funcs, g: GridSpec, fmt: str = "tucker"):
    """prod_i funcs[i](x_i) (one callable per mode, or a single shared one)."""
    if callable(funcs) or isinstance(funcs, str):
        funcs = [funcs] * g.d
    vals = [np.asarray((compile_expression(f) if isinstance(f, str) else f)(g.points),
                       dtype=float) for f in funcs]
    if fmt == "tucker":
        norms = [np.linalg.norm(v) for v in vals]
        core = np.full((1,) * g.d, prod(norms))
        return TuckerTensor(core, [(v / max(nv, 1e-300)).reshape(-1, 1)
                                   for v, nv in zip(vals, norms)])
    if fmt == "tt":
        return TTTensor([v.reshape(1, -1, 1) for v in vals])
    raise ValueError(f"unknown format {fmt!r}")


def inverse_linear_rhs(g: GridSpec, fmt: str = "tucker", tol: float = 1e-10,
                       alpha: float = 1.0, groups=None):
    """prod over mode groups G of 1/(alpha + sum_{i in G} x_i).

    `groups` is a list of consecutive group sizes summing to d (default one
    group with every mode).
    """
    groups = list(groups) if groups else [g.d]
    if sum(groups) != g.d or any(m < 1 for m in groups):
        raise UnsupportedExpression("groups must be positive sizes summing to d")
    x = g.points
    gtol = tol / max(len(groups), 1)
    if fmt == "tucker":
        parts = [_inverse_group_tucker(x, m, alpha, gtol) for m in groups]
        if len(parts) == 1:
            return TuckerTensor(*parts[0])
        return _tucker_recompress(_outer_tucker(parts), tol)
    if fmt == "tt":
        cores = []
        for m in groups:
            cores += _inverse_group_tt(x, m, alpha, gtol)
        return tt_round(TTTensor(cores), tol * 1e-1)
    raise ValueError(f"unknown format {fmt!r}")


def _tucker_recompress(T: TuckerTensor, tol: float) -> TuckerTensor:
    small = hosvd(T.core, tol=tol * 1e-1)
    return TuckerTensor(small.core, [B @ S for B, S in zip(T.factors, small.factors)])


def random_tt_rhs(g: GridSpec, rank: int, seed: int = 0) -> TTTensor:
    rng = np.random.default_rng(seed)
    rs = [1] + [rank] * (g.d - 1) + [1]
    return TTTensor([rng.standard_normal((rs[k], g.n, rs[k + 1])) for k in range(g.d)])


def random_tucker_rhs(g: GridSpec, rank: int, seed: int = 0) -> TuckerTensor:
    rng = np.random.default_rng(seed)
    core = rng.standard_normal((rank,) * g.d)
    return TuckerTensor(core, [rng.standard_normal((g.n, rank)) for _ in range(g.d)])


def build_rhs(spec: str, g: GridSpec, fmt: str = "tucker", tol: float = 1e-10,
              seed: int = 0):
    """Right-hand side from an id string.

    Supported ids: ``ones``, ``sin`` (prod sin(pi x_i)), ``sep:<expr in x>``,
    ``inv-linear`` / ``inv-linear:<alpha>`` (1/(alpha + sum x_i)),
    ``inv-pairs`` (1/((1+x1+x2)(1+x3+x4)...), consecutive pairs),
    ``random-tt:<r>``, ``random-tucker:<r>``, ``file:<path>``.
    """
    name, _, arg = spec.partition(":")
    if name == "ones":
        return separable_rhs("1 + 0*x", g, fmt)
    if name == "sin":
        return separable_rhs("sin(pi*x)", g, fmt)
    if name == "sep":
        return separable_rhs(arg, g, fmt)
    if name == "inv-linear":
        return inverse_linear_rhs(g, fmt, tol, alpha=float(arg) if arg else 1.0)
    if name == "inv-pairs":
        if g.d % 2:
            raise UnsupportedExpression("inv-pairs needs an even dimension")
        return inverse_linear_rhs(g, fmt, tol, groups=[2] * (g.d // 2))
    if name in ("random-tt", "random-tucker"):
        r = int(arg or 2)
        if name == "random-tt":
            if fmt != "tt":
                raise UnsupportedExpression("random-tt needs the tt format")
            return random_tt_rhs(g, r, seed)
        if fmt != "tucker":
            raise UnsupportedExpression("random-tucker needs the tucker format")
        return random_tucker_rhs(g, r, seed)
    if name == "file":
        from .io import read_tensor
        return read_tensor(arg)
    raise UnsupportedExpression(f"unknown right-hand side {spec!r}")


def sample_dense(f, g: GridSpec) -> np.ndarray:
    """Dense sampling of f(x_1, ..., x_d) on the grid (small sizes only)."""
    if g.n ** g.d > 10 ** 6:
        raise SizeOverflow("dense sampling exceeds 1e6 entries")
    axes = np.meshgrid(*([g.points] * g.d), indexing="ij")
    return np.asarray(f(*axes), dtype=float)


# ---------------------------------------------------------------------------
# oracle

def kron_sum_sparse(ops) -> sp.csr_matrix:
    """sum_i I x ... x A_i x ... x I (first index fastest) as a sparse matrix."""
    dense = [as_operator(A).to_dense() for A in ops]
    if not any(np.any(np.imag(M)) for M in dense):
        dense = [np.real(M) for M in dense]
    mats = [sp.csr_matrix(M) for M in dense]
    sizes = [M.shape[0] for M in mats]
    total = None
    for i, M in enumerate(mats):
        term = sp.identity(1, format="csr")
        for j in range(len(mats) - 1, -1, -1):
            term = sp.kron(term, M if j == i else sp.identity(sizes[j]), format="csr")
        total = term if total is None else total + term
    return total.tocsc()


def oracle_solve_dense(ops, C, budget: int = ORACLE_BUDGET) -> np.ndarray:
    """Direct solve of the assembled Kronecker-sum system (tests only)."""
    C = np.asarray(C)
    if C.size > budget:
        raise SizeOverflow(f"{C.size} unknowns exceed the oracle budget {budget}")
    A = kron_sum_sparse(ops)
    c = np.ascontiguousarray(vec(C))
    if np.iscomplexobj(c) and not np.any(c.imag):
        c = np.ascontiguousarray(c.real)
    if np.iscomplexobj(c) and not np.iscomplexobj(A.data):
        A = A.astype(complex)
    x = spla.spsolve(A, c)
    return unvec(np.asarray(x), C.shape)
