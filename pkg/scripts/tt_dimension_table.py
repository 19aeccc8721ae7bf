"""Poisson for growing d, random TT rank-2 rhs, det poles, tol 1e-6.

Writes TT_large_d_table.dat with rows `d residual iterations seconds`.
"""
from pathlib import Path

from _common import parser, run

from tbrk.bench import GridSpec, poisson_operators, random_tt_rhs


def main():
    p = parser(__doc__, n=128, tol=1e-6)
    p.add_argument("--dims", default="5,10,15")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    out = Path(args.out_dir)
    lines = ["# d  residual  mean_iterations  seconds"]
    for d in map(int, args.dims.split(",")):
        g = GridSpec(args.n, d)
        ops, C = poisson_operators(g), random_tt_rhs(g, 2, args.seed)
        res = run(ops, C, "det", args.tol, args.maxit, out / f"TT_symm_d{d}_det_tol.dat")
        s = res.summary()
        lines.append(f"{d} {s['relative_residual']:.3e} {s['mean_iterations']:g} "
                     f"{s['seconds']:.2f}")
    (out / "TT_large_d_table.dat").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
