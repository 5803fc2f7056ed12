#!/usr/bin/env python3
"""Print t(n)·rho^n·n^(3/2) against C along the support, as a text table.

    python3 scripts/fit_table.py "w = z + z*MSet(w)" --order 500 --rows 25
"""

import argparse
import math

from polyalaw.report import analyze


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("equation")
    ap.add_argument("--order", type=int, default=600)
    ap.add_argument("--rows", type=int, default=20)
    args = ap.parse_args()

    r = analyze(args.equation, order=args.order)
    if r.law is None:
        print(r.to_text())
        return
    logc = r.prefix.series.log_coeffs()
    support = [n for n in range(1, r.prefix.order + 1) if math.isfinite(logc[n]) and (n - r.law.d) % r.law.q == 0]
    step = max(1, len(support) // args.rows)
    width = 40
    print(f"C = {r.law.C:.12g}, rho = {r.law.rho:.12g}, support {r.law.support}")
    print(f"{'n':>6} {'t(n)·rho^n·n^1.5':>20} {'ratio to C':>12}")
    for n in support[::step] + ([support[-1]] if support[-1] not in support[::step] else []):
        v = math.exp(logc[n] + n * math.log(r.law.rho) + 1.5 * math.log(n))
        ratio = v / r.law.C
        bar = "#" * max(0, min(width, round(width * ratio / 2)))
        print(f"{n:>6} {v:>20.10g} {ratio:>12.6f} {bar}")
    print(r.to_text().splitlines()[-2] if r.fit is None else f"fit deviation {r.fit.relative_deviation:.3e}")


if __name__ == "__main__":
    main()
