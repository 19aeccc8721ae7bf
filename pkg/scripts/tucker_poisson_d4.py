"""Poisson d=4, rhs 1/((1+x1+x2)(1+x3+x4)), Tucker format, every pole strategy."""
from pathlib import Path

from _common import STRATEGIES, parser, run

from tbrk.bench import GridSpec, build_rhs, poisson_operators


def main():
    args = parser(__doc__, n=256).parse_args()
    g = GridSpec(args.n, 4)
    ops, C = poisson_operators(g), build_rhs("inv-pairs", g, "tucker", 1e-10)
    for s in STRATEGIES:
        run(ops, C, s, args.tol, args.maxit, Path(args.out_dir) / f"Tuck_symm_d4_{s}.dat")


if __name__ == "__main__":
    main()
