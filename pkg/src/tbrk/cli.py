"""Command line front end.

``tbrk solve poisson --d 3 --n 128 --poles det --tol 1e-6 --out run.dat``
writes ``run.dat`` (mean iteration, relative residual), ``run.json`` (run
summary) and, with ``--save-solution``, ``run.tensor``.

``tbrk verify`` runs small oracle comparisons and exits nonzero on failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import (GridSpec, ProblemSpec, build_rhs, oracle_solve_dense,
                    problem_operators)
from .driver import TbrkConfig, explicit_residual_norm, tt_tbrk, tuck_tbrk
from .errors import TbrkError, UnsupportedExpression
from .io import read_matrix, write_tensor
from .operators import as_operator
from .poles import KINDS, PoleStrategy
from .tensors import TTTensor, TuckerTensor, to_full


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tbrk", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a benchmark or file-defined equation")
    s.add_argument("problem", choices=["poisson", "convdiff", "files"])
    s.add_argument("--d", type=int, default=3, help="number of modes")
    s.add_argument("--n", type=int, default=64, help="grid points per mode")
    s.add_argument("--format", choices=["tucker", "tt"], default="tucker")
    s.add_argument("--poles", choices=KINDS, default="det")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--maxit", type=int, default=100)
    s.add_argument("--eps", type=float, default=0.1, help="convdiff viscosity")
    s.add_argument("--phi", default=None,
                   help="convection profiles in x separated by ';' (one per mode)")
    s.add_argument("--rhs", default=None,
                   help="right-hand side id, e.g. inv-linear, sep:sin(pi*x), "
                        "random-tt:2, file:C.txt")
    s.add_argument("--rhs-tol", type=float, default=1e-10,
                   help="accuracy of the low-rank right-hand side")
    s.add_argument("--ops", default=None,
                   help="comma-separated matrix files (files problem)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--fov-samples", type=int, default=256)
    s.add_argument("--inner-tol", type=float, default=None)
    s.add_argument("--inner-sweeps", type=int, default=50)
    s.add_argument("--real-snap", type=float, default=0.0,
                   help="treat poles with |Im| <= snap*|pole| as real in real mode")
    s.add_argument("--out", default=None, help="convergence .dat file")
    s.add_argument("--save-solution", action="store_true")
    s.add_argument("--quiet", action="store_true")

    v = sub.add_parser("verify", help="run the oracle comparison suite")
    v.add_argument("--n", type=int, default=12)
    return p


def _problem(args):
    if args.problem == "files":
        if not args.ops:
            raise UnsupportedExpression("the files problem needs --ops")
        mats = [read_matrix(f) for f in args.ops.split(",")]
        cache: dict = {}
        ops = [cache.setdefault(f, as_operator(M)) for f, M in zip(args.ops.split(","), mats)]
        if not args.rhs or not args.rhs.startswith("file:"):
            raise UnsupportedExpression("the files problem needs --rhs file:<path>")
        C = build_rhs(args.rhs, GridSpec(max(3, mats[0].shape[0]), len(ops)))
        want = TTTensor if args.format == "tt" else TuckerTensor
        if not isinstance(C, want):
            raise UnsupportedExpression(f"rhs file is not in {args.format} format")
        return ops, C
    phis = args.phi.split(";") if args.phi else []
    spec = ProblemSpec(args.problem, epsilon=args.eps if args.problem == "convdiff" else 1.0,
                       phi=phis, rhs=args.rhs or "inv-linear")
    g = GridSpec(args.n, args.d)
    return problem_operators(spec, g), build_rhs(spec.rhs, g, args.format, args.rhs_tol,
                                                 args.seed)


def _solve(args) -> int:
    ops, C = _problem(args)
    config = TbrkConfig(
        tolerance=args.tol, max_iterations=args.maxit,
        strategy=PoleStrategy(args.poles, samples=args.fov_samples),
        inner_tol=args.inner_tol, inner_sweeps=args.inner_sweeps,
        real_snap=args.real_snap, sink=None if args.quiet else sys.stderr)
    run = tt_tbrk if isinstance(C, TTTensor) else tuck_tbrk
    result = run(ops, C, config)
    summary = result.summary()
    summary.update(problem=args.problem, d=len(ops), format=args.format, poles=args.poles,
                   tolerance=args.tol, rhs_ranks=list(C.ranks))
    if args.out:
        out = Path(args.out)
        result.trace.write_dat(out)
        out.with_suffix(".json").write_text(json.dumps(summary, indent=2) + "\n")
        if args.save_solution:
            write_tensor(out.with_suffix(".tensor"), result.solution)
    print(json.dumps(summary, indent=2))
    return 0 if result.status == "converged" else 2


def _verify(args) -> int:
    n, ok = args.n, True
    cases = [("poisson", "tucker", "sin"), ("poisson", "tt", "inv-linear"),
             ("convdiff", "tucker", "inv-linear"), ("convdiff", "tt", "sep:exp(x)")]
    for kind, fmt, rhs in cases:
        for poles in KINDS:
            g = GridSpec(n, 3)
            spec = ProblemSpec(kind, epsilon=0.1 if kind == "convdiff" else 1.0)
            ops, C = problem_operators(spec, g), build_rhs(rhs, g, fmt)
            run = tt_tbrk if fmt == "tt" else tuck_tbrk
            res = run(ops, C, TbrkConfig(tolerance=1e-10, strategy=poles, max_iterations=n))
            X, Xo = to_full(res.solution), oracle_solve_dense(ops, to_full(C))
            err = np.linalg.norm(X - Xo) / np.linalg.norm(Xo)
            cheap = res.residual
            expl = explicit_residual_norm(ops, res.solution, C) / np.linalg.norm(to_full(C))
            # below ~1e-11 both residuals are dominated by rounding
            good = err <= 1e-8 and abs(cheap - expl) <= 1e-8 * expl + 1e-11
            ok &= good
            print(f"{'PASS' if good else 'FAIL'} {kind:8s} {fmt:6s} {poles:4s} "
                  f"error={err:.2e} cheap={cheap:.3e} explicit={expl:.3e}")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _solve(args)
        return _verify(args)
    except (TbrkError, ValueError, OSError) as exc:
        print(f"tbrk: error: {exc}", file=sys.stderr)
        return 1

