"""Tensorized block rational Krylov (TBRK) solvers for

    X x_1 A_1 + ... + X x_d A_d = C

with C in Tucker (`tuck_tbrk`) or TT (`tt_tbrk`) format.

Every mode i carries a block rational Krylov basis started from the mode-i
block vector of C.  Each outer iteration grows every mode by one pole, solves
the projected equation and evaluates the residual norm from the small
pencils only.  Modes with the same operator object and the same starting
range share one basis.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from math import prod, sqrt

import numpy as np

from .arnoldi import (INF, BlockKrylovBasis, arnoldi_expand, arnoldi_init, is_infinite,
                      residual_coefficients, schedule_pole)
from .errors import (DeflationError, DeflationExhausted, DimensionMismatch,
                     PreconditionViolation, SingularMatrix, SingularOperator,
                     SizeOverflow)
from .linalg import RANK_TOL, eig_dense
from .operators import Operator, as_operator
from .poles import (FovSurrogate, PoleStrategy, next_pole_det, next_pole_det2,
                    next_pole_static, update_surrogate)
from .projected import (projected_residual_norm, solve_projected_dense, solve_tt_als,
                        tt_sylvester_residual)
from .tensors import (TTTensor, TuckerTensor, block_vector_for_mode, frob_norm,
                      mode_product, multi_mode_product, to_full, tt_full, tt_mode_product,
                      tt_norm, tt_svd, tt_zeros, unfold)

DENSE_RESIDUAL_BUDGET = 2_000_000


@dataclass
class TbrkConfig:
    """Solver settings.

    Parameters
    ----------
    tolerance : relative residual target.
    max_iterations : cap on the number of blocks per mode.
    strategy : pole strategy (poly, ext, det, det2).
    real_mode : pair every non-real pole with its conjugate; None means
        "if all operators and the right-hand side are real".
    inner_tol : relative residual floor for the TT inner solver
        (default 0.1 * tolerance).
    inner_sweeps : sweep cap of the TT inner solver.
    enrich_rank : enrichment rank of the TT inner solver.
    dense_inner_budget : TT projected problems with at most this many
        entries are solved densely.
    share_bases : reuse one basis for modes with identical data.
    real_snap : in real mode, a pole with |Im xi| <= real_snap * |xi| is
        replaced by Re xi, which avoids spending a conjugate step on a
        nearly real pole. Zero disables it.
    sink : optional text stream receiving one trace row per evaluation.
    """

    tolerance: float = 1e-6
    max_iterations: int = 100
    strategy: PoleStrategy = field(default_factory=PoleStrategy)
    real_mode: bool | None = None
    inner_tol: float | None = None
    inner_sweeps: int = 50
    enrich_rank: int = 3
    dense_inner_budget: int = 100_000
    share_bases: bool = True
    real_snap: float = 0.0
    sink: object = None

    def __post_init__(self):
        if isinstance(self.strategy, str):
            self.strategy = PoleStrategy(self.strategy)
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class ConvergenceTrace:
    """Per-evaluation record of block counts, residuals and poles."""

    counts: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    inner_residuals: list = field(default_factory=list)
    per_mode: list = field(default_factory=list)
    poles: list = field(default_factory=list)
    sink: object = field(default=None, repr=False)

    def record(self, counts, residual, inner=0.0, per_mode=()):
        self.counts.append(tuple(int(c) for c in counts))
        self.residuals.append(float(residual))
        self.inner_residuals.append(float(inner))
        self.per_mode.append(tuple(float(p) for p in per_mode))
        if self.sink is not None:
            row = [str(len(self.residuals)), f"{np.mean(counts):g}", f"{residual:.6e}"]
            row += [f"{p:.6e}" for p in per_mode]
            self.sink.write(" ".join(row) + "\n")

    @property
    def mean_iterations(self) -> list:
        return [float(np.mean(c)) for c in self.counts]

    def first_below(self, tol: float):
        """Per-mode counts at the first evaluation with residual <= tol (or None)."""
        for c, r in zip(self.counts, self.residuals):
            if r <= tol:
                return c
        return None

    def write_dat(self, path) -> None:
        with open(path, "w") as fh:
            for it, r in zip(self.mean_iterations, self.residuals):
                fh.write(f"{it:g} {r:.6e}\n")


@dataclass
class SolveResult:
    solution: TuckerTensor | TTTensor
    trace: ConvergenceTrace
    status: str
    residual: float
    iterations: tuple
    seconds: float
    bases: list = field(default_factory=list, repr=False)
    core: object = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "status": self.status,
            "relative_residual": self.residual,
            "iterations": list(self.iterations),
            "mean_iterations": float(np.mean(self.iterations)),
            "seconds": self.seconds,
            "evaluations": len(self.trace.residuals),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


# ---------------------------------------------------------------------------
# per-basis state

class _ModeBasis:
    """A Krylov basis with a trailing infinite pole, shared by `modes`."""

    def __init__(self, op: Operator, U: np.ndarray, modes: list):
        self.op = op
        self.modes = modes
        self.basis = arnoldi_init(op, U)
        self.b = self.basis.b
        self.AV = op.apply(self.basis.V)
        self.saturated = False
        self.invariant = False
        self.pending = None
        self._append_infinity()

    @property
    def k(self) -> int:
        """Number of blocks spanning the projection space."""
        return self.basis.k + (1 if self.invariant else 0)

    def _room(self, blocks: int) -> bool:
        return self.basis.V.shape[1] + blocks * self.b <= self.basis.n

    def _expand(self, xi, Av_last):
        # partial rank loss is tolerated: the near-null directions are
        # re-orthogonalised and the space keeps growing
        arnoldi_expand(self.basis, self.op, xi, Av_last=Av_last, allow_rank_deficient=True)
        self.AV = np.hstack([self.AV, self.op.apply(self.basis.block(self.basis.k))])

    def _full(self) -> bool:
        return self.basis.V.shape[1] == self.basis.n

    def _append_infinity(self):
        if self._full():
            # the basis spans the whole space, which A maps into itself
            self.invariant = self.saturated = True
            return
        if not self._room(1):
            self._complete()
            return
        try:
            self._expand(INF, self.AV[:, -self.b:])
        except DeflationError:
            # A maps the current span into itself: residual terms vanish
            self.invariant = self.saturated = True

    def _complete(self):
        # too little room for another block: project onto the whole space
        V = self.basis.V
        Q, _ = np.linalg.qr(V, mode="complete")
        extra = Q[:, V.shape[1]:]
        extra = extra - V @ (V.conj().T @ extra)
        extra, _ = np.linalg.qr(extra)
        self.basis.V = np.hstack([V, extra])
        self.AV = np.hstack([self.AV, self.op.apply(extra)])
        self.invariant = self.saturated = True

    def grow(self, xi) -> bool:
        """Add pole xi in front of the trailing infinity.  False if the mode is done."""
        if self.saturated:
            return False
        if is_infinite(xi):
            self._append_infinity()
            return not self.invariant
        if self._full():
            self.invariant = self.saturated = True
            return False
        if not self._room(1):
            self._complete()
            return False
        b = self.b
        saved = (self.basis.copy(), self.AV)
        self.basis.drop_last()
        self.AV = self.AV[:, :-b]
        for attempt in range(4):
            try:
                self._expand(xi, self.AV[:, -b:])
                break
            except SingularMatrix:
                # pole on the spectrum: nudge it and retry
                xi = complex(xi) * 1.1
                if attempt == 3:
                    raise
            except DeflationError:
                self.basis, self.AV = saved
                self.saturated = True
                return False
        self._append_infinity()
        return True

    @property
    def ncols(self) -> int:
        return self.basis.V.shape[1] if self.invariant else self.b * self.basis.k

    @property
    def Vk(self) -> np.ndarray:
        return self.basis.V[:, :self.ncols]

    def projected(self) -> np.ndarray:
        m = self.ncols
        M = self.Vk.conj().T @ self.AV[:, :m]
        if self.op.hermitian:
            M = 0.5 * (M + M.conj().T)
        return M

    def coefficients(self) -> np.ndarray:
        if self.invariant:
            return np.zeros((self.b, self.ncols), dtype=complex)
        return residual_coefficients(self.basis)

    @property
    def core_poles(self) -> list:
        poles = self.basis.poles
        return poles if self.invariant else poles[:-1]


def _range_basis(U: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    Q, s, _ = np.linalg.svd(U, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        raise DeflationError("mode block vector is zero")
    r = int(np.sum(s > RANK_TOL * s[0]))
    return Q[:, :r]


def _build_bases(ops, blocks, share: bool) -> list:
    ranges = [_range_basis(U) for U in blocks]
    groups: list[_ModeBasis] = []
    owner = []
    for i, (op, Q) in enumerate(zip(ops, ranges)):
        found = None
        if share:
            for g in groups:
                j = g.modes[0]
                Qj = ranges[j]
                if ops[j] is op and Qj.shape == Q.shape:
                    gap = np.linalg.norm(Q - Qj @ (Qj.conj().T @ Q))
                    if gap <= 1e-12 * sqrt(Q.shape[1]):
                        found = g
                        break
        if found is None:
            found = _ModeBasis(op, Q, [i])
            groups.append(found)
        else:
            found.modes.append(i)
        owner.append(found)
    return groups, owner


# ---------------------------------------------------------------------------
# residual evaluation

def cheap_residual_norm(bases, Y, inner_residual: float = 0.0) -> tuple[float, list]:
    """Residual norm from the pencils only.

    Parameters
    ----------
    bases : per-mode BlockKrylovBasis objects (or internal mode states), each
        with a trailing infinite pole.
    Y : projected solution, dense array or TTTensor.
    inner_residual : norm of the projected-equation residual, nonzero when
        the small equation was solved inexactly.

    Returns
    -------
    total, per_mode
    """
    per_mode = []
    for i, B in enumerate(bases):
        E = B.coefficients() if isinstance(B, _ModeBasis) else residual_coefficients(B)
        if isinstance(Y, TTTensor):
            per_mode.append(tt_norm(tt_mode_product(Y, E, i)))
        else:
            per_mode.append(float(np.linalg.norm(mode_product(Y, E, i))))
    total = sqrt(inner_residual ** 2 + sum(t * t for t in per_mode))
    return total, per_mode


def _dense_ops(ops):
    return [as_operator(A).to_dense() for A in ops]


def explicit_residual_norm(ops, X, C) -> float:
    """||C - sum_i X x_i A_i||_F, densely when small, otherwise format-aware."""
    ops = [as_operator(A) for A in ops]
    shape = tuple(A.n for A in ops)
    if prod(shape) <= DENSE_RESIDUAL_BUDGET:
        Xf = to_full(X)
        Cf = to_full(C)
        R = Cf - sum(np.moveaxis(_apply_mode(A, Xf, i), 0, i) for i, A in enumerate(ops))
        return float(np.linalg.norm(R))
    if isinstance(X, TTTensor):
        if not isinstance(C, TTTensor):
            raise TypeError("TT solution needs a TT right-hand side")
        return tt_sylvester_residual(_dense_ops(ops), X, C)
    if isinstance(X, TuckerTensor):
        return _tucker_residual(ops, X, C)
    raise SizeOverflow("dense residual exceeds the size budget")


def _apply_mode(A: Operator, X: np.ndarray, i: int) -> np.ndarray:
    Xi = np.moveaxis(X, i, 0)
    return A.apply(Xi.reshape(Xi.shape[0], -1)).reshape(Xi.shape)


def _tucker_residual(ops, X: TuckerTensor, C: TuckerTensor) -> float:
    d = len(ops)
    F, sizes = [], []
    for i, A in enumerate(ops):
        V = X.factors[i]
        F.append(np.hstack([C.factors[i], V, A.apply(V)]))
        sizes.append((C.factors[i].shape[1], V.shape[1]))
    dims = [r + 2 * m for r, m in sizes]
    if prod(dims) > 5e7:
        raise SizeOverflow("stacked residual core too large")
    core = np.zeros(dims, dtype=complex)
    core[tuple(slice(0, r) for r, _ in sizes)] = C.core
    for i in range(d):
        idx = []
        for j, (r, m) in enumerate(sizes):
            idx.append(slice(r + m, r + 2 * m) if j == i else slice(r, r + m))
        core[tuple(idx)] -= X.core
    Rs = [np.linalg.qr(Fi)[1] for Fi in F]
    return float(np.linalg.norm(multi_mode_product(core, Rs)))


@dataclass
class DecompositionReport:
    residual_norm: float
    partial_norms: list
    partial_norms_unfolding: list
    orthogonality: float
    pythagorean_error: float
    c_hat_norm: float
    inner_residual: float

    def passed(self, tol: float = 1e-10, rhs_norm: float | None = None) -> bool:
        ref = rhs_norm if rhs_norm is not None else 1.0
        match = max((abs(a - b) / max(self.residual_norm, 1e-300)
                     for a, b in zip(self.partial_norms, self.partial_norms_unfolding)),
                    default=0.0)
        return (self.orthogonality <= tol and self.pythagorean_error <= tol
                and self.c_hat_norm <= 1e-12 * ref and match <= tol)


def residual_decomposition_check(bases, ops, Y, C) -> DecompositionReport:
    """Explicit check of the orthogonal splitting of the residual.

    With V_i the mode bases, r = c - A vec(X) splits into the partial
    residuals P_i r (P_i projects every mode j != i onto V_j), the
    projected-equation residual and c_hat = prod_i (I - P_i) c, all mutually
    orthogonal.  Each ||P_i r|| is recomputed from the mode-i unfolding
    C_i - A_i Ybar_i - Ybar_i B_i.
    """
    ops = [as_operator(A) for A in ops]
    Ad = [A.to_dense() for A in ops]
    shape = tuple(A.shape[0] for A in Ad)
    if prod(shape) > DENSE_RESIDUAL_BUDGET:
        raise SizeOverflow("decomposition check is for small sizes only")
    Vs = [B.Vk if isinstance(B, _ModeBasis) else B.V[:, :B.b * B.k] for B in bases]
    Ys = np.asarray(Y.full() if isinstance(Y, TTTensor) else Y)
    Cf = to_full(C)
    d = len(Ad)
    X = multi_mode_product(Ys, Vs)
    r = Cf - sum(mode_product(X, A, i) for i, A in enumerate(Ad))
    rnorm = float(np.linalg.norm(r))
    proj = [V @ V.conj().T for V in Vs]

    parts = []
    for i in range(d):
        parts.append(multi_mode_product(r, proj, skip=i))
    inner = multi_mode_product(r, proj)
    c_hat = Cf.copy()
    for i in range(d):
        c_hat = c_hat - multi_mode_product(c_hat, proj, skip=i)

    # partial residuals from the unfolding formula
    mats_k = [V.conj().T @ A @ V for V, A in zip(Vs, Ad)]
    unf_norms = []
    for i in range(d):
        Cbar = multi_mode_product(Cf, [V.conj().T for V in Vs], skip=i)
        Ybar = mode_product(Ys, Vs[i], i)
        Bi = _partner_matrix(mats_k, i)
        Ri = unfold(Cbar, i) - Ad[i] @ unfold(Ybar, i) - unfold(Ybar, i) @ Bi
        unf_norms.append(float(np.linalg.norm(Ri)))

    pieces = parts + [inner, c_hat]
    scale = max(rnorm ** 2, 1e-300)
    ortho = 0.0
    for a in range(len(pieces)):
        for b in range(a + 1, len(pieces)):
            ortho = max(ortho, abs(np.vdot(pieces[a], pieces[b])) / scale)
    pn = [float(np.linalg.norm(p)) for p in parts]
    inner_norm = float(np.linalg.norm(inner))
    chn = float(np.linalg.norm(c_hat))
    pyth = abs(rnorm ** 2 - sum(x * x for x in pn) - inner_norm ** 2 - chn ** 2) / scale
    return DecompositionReport(rnorm, pn, unf_norms, float(ortho), float(pyth), chn,
                               inner_norm)


def _partner_matrix(mats_k, i) -> np.ndarray:
    """Right coefficient of the mode-i unfolded equation (sum over j != i)."""
    others = [j for j in range(len(mats_k)) if j != i]
    sizes = [mats_k[j].shape[0] for j in others]
    N = prod(sizes)
    B = np.zeros((N, N), dtype=complex)
    for j in others:
        term = np.ones((1, 1))
        for l in reversed(others):
            term = np.kron(term, mats_k[l] if l == j else np.eye(mats_k[l].shape[0]))
        B += term
    # Y x_j M acts on the unfolding from the right through the transpose
    return B.T


# ---------------------------------------------------------------------------
# main loop

def _check_inputs(ops, C):
    d = len(ops)
    if C.ndim != d:
        raise DimensionMismatch(f"{d} operators for a {C.ndim}-way right-hand side")
    for i, A in enumerate(ops):
        if A.n != C.shape[i]:
            raise DimensionMismatch(f"operator {i} has size {A.n}, rhs mode size {C.shape[i]}")


def _is_real_problem(ops, C) -> bool:
    if not all(A.is_real for A in ops):
        return False
    if isinstance(C, TuckerTensor):
        arrays = [C.core, *C.factors]
    else:
        arrays = list(C.cores)
    return all(np.all(np.asarray(a).imag == 0) for a in arrays)


def _next_pole(g: _ModeBasis, strategy: PoleStrategy, surrogate, ritz):
    if not strategy.adaptive:
        return next_pole_static(strategy, g.k)
    i = g.modes[0]
    finite = [p for p in g.core_poles if not is_infinite(p)]
    if strategy.kind == "det":
        return next_pole_det(surrogate, i, finite, ritz, g.b, N=strategy.samples)
    return next_pole_det2(surrogate, i, finite, ritz, g.b, g.k, N=strategy.samples)


class _TuckerProblem:
    def __init__(self, C: TuckerTensor):
        self.C = C

    def blocks(self):
        return [block_vector_for_mode(self.C, i) for i in range(self.C.ndim)]

    def solve(self, Vks, mats, state):
        W = [V.conj().T @ B for V, B in zip(Vks, self.C.factors)]
        Ck = multi_mode_product(self.C.core, W)
        Y, res = solve_projected_dense(mats, Ck, return_residual=True)
        return Y, res

    def assemble(self, Y, Vks):
        return TuckerTensor(Y, [V.copy() for V in Vks])


class _TTProblem:
    def __init__(self, C: TTTensor, config: TbrkConfig):
        self.C = C
        self.config = config
        self.prev = None
        self.last_report = None

    def blocks(self):
        return [block_vector_for_mode(self.C, i) for i in range(self.C.ndim)]

    def _projected_rhs(self, Vks):
        return TTTensor([np.einsum("ij,ajb->aib", V.conj().T, G, optimize=True)
                         for V, G in zip(Vks, self.C.cores)])

    def solve(self, Vks, mats, state):
        Ck = self._projected_rhs(Vks)
        sizes = [M.shape[0] for M in mats]
        if prod(sizes) <= self.config.dense_inner_budget:
            Cf = tt_full(Ck)
            Y, res = solve_projected_dense(mats, Cf, return_residual=True)
            self.prev = None
            return Y, res
        cnorm = tt_norm(Ck)
        floor = self.config.inner_tol or 0.1 * self.config.tolerance
        target = max(floor, 0.1 * state.get("last_residual", 1.0))
        x0 = self._warm_start(sizes)
        Y, rep = solve_tt_als(mats, Ck, tol=target, max_sweeps=self.config.inner_sweeps,
                              enrich_rank=self.config.enrich_rank, x0=x0)
        self.prev = Y
        self.last_report = rep
        return Y, rep.residual * cnorm

    def _warm_start(self, sizes):
        if self.prev is None:
            return None
        cores = []
        for G, m in zip(self.prev.cores, sizes):
            P = np.zeros((G.shape[0], m, G.shape[2]), dtype=complex)
            P[:, :G.shape[1]] = G
            cores.append(P)
        return TTTensor(cores)

    def assemble(self, Y, Vks):
        if not isinstance(Y, TTTensor):
            Y = tt_svd(Y, 1e-13)
        cores = [np.einsum("ij,ajb->aib", V, G, optimize=True) for V, G in zip(Vks, Y.cores)]
        return TTTensor(cores)


def _run(ops, C, config: TbrkConfig, problem) -> SolveResult:
    t0 = time.perf_counter()
    ops = [as_operator(A) for A in ops]
    _check_inputs(ops, C)
    d = len(ops)
    cnorm = frob_norm(C)
    trace = ConvergenceTrace(poles=[[] for _ in range(d)], sink=config.sink)
    if cnorm == 0:
        zero = (TuckerTensor(np.zeros((1,) * d), [np.eye(A.n, 1) for A in ops])
                if isinstance(C, TuckerTensor) else tt_zeros(C.shape))
        trace.record([0] * d, 0.0)
        return SolveResult(zero, trace, "converged", 0.0, (0,) * d,
                           time.perf_counter() - t0)

    real_mode = _is_real_problem(ops, C) if config.real_mode is None else config.real_mode
    groups, owner = _build_bases(ops, problem.blocks(), config.share_bases)
    strategy = config.strategy
    surrogate = FovSurrogate(d)
    seen_k = {id(g): 0 for g in groups}
    state: dict = {}
    status = "max-iterations"
    retried = False

    while True:
        mats_g = {id(g): g.projected() for g in groups}
        Vks = [owner[i].Vk for i in range(d)]
        mats = [mats_g[id(owner[i])] for i in range(d)]
        try:
            Y, inner = problem.solve(Vks, mats, state)
            singular = False
        except SingularOperator:
            # the projected equation may be unsolvable for an unlucky pole
            # set; take one more step with fresh poles before giving up
            if retried:
                raise
            singular = retried = True
        if not singular:
            retried = False
            total, per_mode = cheap_residual_norm(owner, Y, inner)
            rel = total / cnorm
            state["last_residual"] = rel
            counts = [owner[i].k for i in range(d)]
            trace.record(counts, rel, inner / cnorm, [p / cnorm for p in per_mode])
            if rel <= config.tolerance:
                status = "converged"
                break
        active = [g for g in groups if not g.saturated and g.k < config.max_iterations]
        if not active:
            if singular:
                raise SingularOperator("projected equation singular at the last step")
            if all(g.saturated for g in groups):
                status = "deflated"
            break

        # refresh the spectral surrogate with every new projected matrix
        ritz = {}
        if strategy.adaptive:
            for g in groups:
                M = mats_g[id(g)]
                lam, _ = eig_dense(M, hermitian=g.op.hermitian)
                ritz[id(g)] = lam
                if seen_k[id(g)] != g.k:
                    for i in g.modes:
                        update_surrogate(surrogate, i, eigenvalues=-lam)
                    seen_k[id(g)] = g.k

        pending = [g for g in active if g.pending is not None]
        movers = pending if pending else active
        for g in movers:
            if g.pending is not None:
                xi, g.pending = g.pending, None
            else:
                xi = _next_pole(g, strategy, surrogate, ritz.get(id(g)))
                if real_mode:
                    if (not is_infinite(xi) and xi != 0
                            and abs(complex(xi).imag) <= config.real_snap * abs(xi)):
                        xi = complex(xi).real
                    xi, g.pending = schedule_pole(xi)
            if g.grow(xi):
                for i in g.modes:
                    trace.poles[i].append(xi)
            else:
                g.pending = None

    Vks = [owner[i].Vk for i in range(d)]
    X = problem.assemble(Y, Vks)
    result = SolveResult(X, trace, status, trace.residuals[-1],
                         trace.counts[-1], time.perf_counter() - t0,
                         bases=owner, core=Y)
    if status == "deflated":
        err = DeflationExhausted("every mode deflated before reaching the tolerance")
        err.result = result
        raise err
    return result


def tuck_tbrk(ops, C: TuckerTensor, config: TbrkConfig | None = None) -> SolveResult:
    """Solve sum_i X x_i A_i = C for a Tucker right-hand side.

    Returns the solution as [[Y; V_1, ..., V_d]] without forming it densely.
    """
    config = config or TbrkConfig()
    if not isinstance(C, TuckerTensor):
        raise TypeError("tuck_tbrk needs a TuckerTensor right-hand side")
    return _run(ops, C, config, _TuckerProblem(C))


def tt_tbrk(ops, C: TTTensor, config: TbrkConfig | None = None) -> SolveResult:
    """Solve sum_i X x_i A_i = C for a TT right-hand side; the solution is a TT."""
    config = config or TbrkConfig()
    if not isinstance(C, TTTensor):
        raise TypeError("tt_tbrk needs a TTTensor right-hand side")
    return _run(ops, C, config, _TTProblem(C, config))
