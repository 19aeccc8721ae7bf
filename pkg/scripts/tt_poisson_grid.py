"""Poisson d=5, random TT rank-2 rhs, det poles, several grid sizes."""
from pathlib import Path

from _common import parser, run

from tbrk.bench import GridSpec, poisson_operators, random_tt_rhs


def main():
    p = parser(__doc__, n=0)
    p.add_argument("--sizes", default="128,256,512,1024")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    for n in map(int, args.sizes.split(",")):
        g = GridSpec(n, 5)
        ops, C = poisson_operators(g), random_tt_rhs(g, 2, args.seed)
        run(ops, C, "det", args.tol, args.maxit, Path(args.out_dir) / f"TT_symm_d5_n={n}.dat")


if __name__ == "__main__":
    main()
