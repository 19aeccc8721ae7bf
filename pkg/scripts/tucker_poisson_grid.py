"""Poisson d=3, rhs 1/(1+x1+x2+x3), det poles, several grid sizes."""
from pathlib import Path

from _common import parser, run

from tbrk.bench import GridSpec, build_rhs, poisson_operators


def main():
    p = parser(__doc__, n=0)
    p.add_argument("--sizes", default="128,256,512,1024")
    args = p.parse_args()
    for n in map(int, args.sizes.split(",")):
        g = GridSpec(n, 3)
        ops, C = poisson_operators(g), build_rhs("inv-linear", g, "tucker", 1e-10)
        run(ops, C, "det", args.tol, args.maxit, Path(args.out_dir) / f"Tuck_symm_d3_n={n}.dat")


if __name__ == "__main__":
    main()
