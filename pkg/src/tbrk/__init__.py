"""Tensorized block rational Krylov solvers for tensor Sylvester equations.

Solves X x_1 A_1 + ... + X x_d A_d = C for a low-rank C given in Tucker or
tensor-train format, returning the solution in the same format.
"""
from .arnoldi import BlockKrylovBasis, arnoldi_expand, arnoldi_init
from .bench import (GridSpec, ProblemSpec, build_rhs, oracle_solve_dense,
                    problem_operators)
from .driver import (ConvergenceTrace, SolveResult, TbrkConfig, cheap_residual_norm,
                     explicit_residual_norm, residual_decomposition_check, tt_tbrk,
                     tuck_tbrk)
from .poles import PoleStrategy, next_pole_det, next_pole_det2
from .tensors import TTTensor, TuckerTensor, hosvd, tt_round, tt_svd

__version__ = "0.1.0"

__all__ = [
    "BlockKrylovBasis", "ConvergenceTrace", "GridSpec", "PoleStrategy", "ProblemSpec",
    "SolveResult", "TTTensor", "TbrkConfig", "TuckerTensor", "arnoldi_expand",
    "arnoldi_init", "build_rhs", "cheap_residual_norm", "explicit_residual_norm",
    "hosvd", "next_pole_det", "next_pole_det2", "oracle_solve_dense", "problem_operators",
    "residual_decomposition_check", "tt_round", "tt_svd", "tt_tbrk", "tuck_tbrk",
]
