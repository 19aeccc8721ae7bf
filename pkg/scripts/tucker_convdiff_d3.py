"""Convection-diffusion d=3, eps=0.1, w=(1+(x1+1)^2/4, 0, 0), every pole strategy.

Besides one trace per strategy, writes Tuck_nonsymm_d3_table.dat with the
per-mode iteration counts at the first residual below 1e-4 and 1e-6 and
the run time.
"""
from pathlib import Path

from _common import STRATEGIES, parser, run, write_json

from tbrk.bench import GridSpec, ProblemSpec, build_rhs, problem_operators


def main():
    args = parser(__doc__, n=1024, tol=1e-6).parse_args()
    g = GridSpec(args.n, 3)
    spec = ProblemSpec("convdiff", 0.1, ["1 + (x + 1)**2 / 4", "0", "0"])
    ops, C = problem_operators(spec, g), build_rhs("inv-linear", g, "tucker", 1e-10)
    out = Path(args.out_dir)
    rows, lines = [], ["# strategy  k(1e-4)  k(1e-6)  seconds"]
    for s in STRATEGIES:
        res = run(ops, C, s, args.tol, args.maxit, out / f"Tuck_nonsymm_d3_{s}.dat")
        a, b = res.trace.first_below(1e-4), res.trace.first_below(1e-6)
        rows.append({"strategy": s, "at_1e-4": a, "at_1e-6": b, "seconds": res.seconds})
        fmt = lambda c: "-" if c is None else ",".join(map(str, c))  # noqa: E731
        lines.append(f"{s} {fmt(a)} {fmt(b)} {res.seconds:.2f}")
    (out / "Tuck_nonsymm_d3_table.dat").write_text("\n".join(lines) + "\n")
    write_json(out / "Tuck_nonsymm_d3_table.json", rows)


if __name__ == "__main__":
    main()
