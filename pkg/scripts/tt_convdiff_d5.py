"""Convection-diffusion d=5, eps=0.1, w=(1+(x1+1)^2/4, (1+x2)/2, 0, 0, 0), TT format."""
from pathlib import Path

from _common import STRATEGIES, parser, run

from tbrk.bench import GridSpec, ProblemSpec, problem_operators, random_tt_rhs


def main():
    p = parser(__doc__, n=256)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    g = GridSpec(args.n, 5)
    spec = ProblemSpec("convdiff", 0.1, ["1 + (x + 1)**2 / 4", "(1 + x) / 2", "0", "0", "0"])
    ops, C = problem_operators(spec, g), random_tt_rhs(g, 2, args.seed)
    for s in STRATEGIES:
        run(ops, C, s, args.tol, args.maxit, Path(args.out_dir) / f"TT_nonsymm_d5_{s}.dat")


if __name__ == "__main__":
    main()
