"""Shared helpers for the experiment scripts."""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from tbrk import TbrkConfig, TTTensor, tt_tbrk, tuck_tbrk
from tbrk.errors import DeflationExhausted

STRATEGIES = ("det", "det2", "ext", "poly")


def parser(doc: str, n: int, maxit: int = 100, tol: float = 1e-8) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--n", type=int, default=n, help="grid points per mode")
    p.add_argument("--tol", type=float, default=tol)
    p.add_argument("--maxit", type=int, default=maxit)
    p.add_argument("--out-dir", default="results")
    return p


def run(ops, C, strategy: str, tol: float, maxit: int, path: Path):
    """Solve, write the convergence trace to `path` and return the result."""
    cfg = TbrkConfig(tolerance=tol, max_iterations=maxit, strategy=strategy)
    solver = tt_tbrk if isinstance(C, TTTensor) else tuck_tbrk
    try:
        res = solver(ops, C, cfg)
    except DeflationExhausted as exc:
        res = exc.result
    path.parent.mkdir(parents=True, exist_ok=True)
    res.trace.write_dat(path)
    s = res.summary()
    print(f"{path.name:28s} {s['status']:15s} it={s['iterations']} "
          f"res={s['relative_residual']:.2e} t={s['seconds']:.1f}s")
    return res


def write_json(path: Path, rows) -> None:
    path.write_text(json.dumps(rows, indent=2) + "\n")
