"""Poisson d=6, random TT rank-(2,...,2) rhs, TT format, every pole strategy."""
from pathlib import Path

from _common import STRATEGIES, parser, run

from tbrk.bench import GridSpec, poisson_operators, random_tt_rhs


def main():
    p = parser(__doc__, n=256)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    g = GridSpec(args.n, 6)
    ops, C = poisson_operators(g), random_tt_rhs(g, 2, args.seed)
    for s in STRATEGIES:
        run(ops, C, s, args.tol, args.maxit, Path(args.out_dir) / f"TT_symm_d6_{s}.dat")


if __name__ == "__main__":
    main()
