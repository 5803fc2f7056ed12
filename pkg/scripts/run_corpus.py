#!/usr/bin/env python3
"""Analyze every corpus equation, validate the JSON schema and compare with the snapshots.

    python3 scripts/run_corpus.py [--jobs 4] [--only planar rooted]

Exits nonzero when a report fails the schema or drifts from its snapshot.
"""

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import jsonschema

from polyalaw.corpus import compare_snapshot, load_corpus, load_snapshots
from polyalaw.report import analyze, report_schema


def run(entry):
    t0 = time.perf_counter()
    report = analyze(entry.equation, order=entry.order)
    return entry.name, report.to_dict(), time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--only", nargs="*")
    args = ap.parse_args()

    entries = [e for e in load_corpus() if not args.only or e.name in args.only]
    snapshots = load_snapshots()
    schema = report_schema()
    with ProcessPoolExecutor(args.jobs) as pool:
        results = list(pool.map(run, entries))

    bad = 0
    print(f"{'equation':18} {'N':>5} {'time':>7} {'verdict':10} {'d':>2} {'q':>2} {'rho':>20} {'C':>20} {'fit':>10}")
    for name, d, secs in results:
        problems = []
        try:
            jsonschema.validate(d, schema)
        except jsonschema.ValidationError as e:
            problems.append(f"schema: {e.message}")
        if name in snapshots:
            problems += compare_snapshot(d, snapshots[name])
        else:
            problems.append("no snapshot")
        fit = "-" if d["fit"] is None else f"{d['fit']['deviation']:.2e}"
        rho = "-" if d["rho"] is None else f"{d['rho']:.15g}"
        C = "-" if d["C"] is None else f"{d['C']:.15g}"
        verdict = d["certificate"]["verdict"]
        print(f"{name:18} {d['order']:>5} {secs:6.2f}s {verdict:10} {d['d']!s:>2} {d['q']!s:>2} {rho:>20} {C:>20} {fit:>10}")
        for p in problems:
            print(f"    {p}")
        bad += bool(problems)
    print(f"{len(results) - bad}/{len(results)} match their snapshots")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
