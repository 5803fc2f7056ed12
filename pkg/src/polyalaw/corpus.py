"""The shipped equation corpus and its expected-report snapshots."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

__all__ = ["CorpusEntry", "load_corpus", "load_snapshots", "compare_snapshot", "entry"]

# exact fields must match verbatim; numeric ones within the relative tolerance
EXACT_FIELDS = ("equation", "d", "q", "coefficients_head", "exit_code")
NUMERIC_FIELDS = ("rho", "tau", "C")
NUMERIC_RTOL = 1e-6


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    equation: str
    order: int
    elementary: bool

    @property
    def filename(self) -> str:
        return f"{self.name}.txt"


def _root():
    return resources.files("polyalaw").joinpath("corpus")


def load_corpus() -> list[CorpusEntry]:
    meta = json.loads(_root().joinpath("corpus.json").read_text())
    out = []
    for name, info in meta.items():
        text = _root().joinpath(f"{name}.txt").read_text().strip()
        out.append(CorpusEntry(name, text, info["order"], info.get("elementary", False)))
    return out


def entry(name: str) -> CorpusEntry:
    for e in load_corpus():
        if e.name == name:
            return e
    raise KeyError(name)


def load_snapshots() -> dict:
    return json.loads(_root().joinpath("expected.json").read_text())


def snapshot_of(report: dict) -> dict:
    """The fields of a report dict that the snapshots pin down."""
    keep = EXACT_FIELDS + NUMERIC_FIELDS
    out = {k: report.get(k) for k in keep}
    out["verdict"] = report["certificate"]["verdict"]
    out["reason"] = report["certificate"]["reason"]
    return out


def compare_snapshot(report: dict, expected: dict, rtol: float = NUMERIC_RTOL) -> list[str]:
    """Mismatches between a report dict and its snapshot, empty when they agree."""
    got = snapshot_of(report)
    problems = []
    for k in EXACT_FIELDS + ("verdict", "reason"):
        if got.get(k) != expected.get(k):
            problems.append(f"{k}: expected {expected.get(k)!r}, got {got.get(k)!r}")
    for k in NUMERIC_FIELDS:
        a, b = got.get(k), expected.get(k)
        if a is None or b is None:
            if a is not b:
                problems.append(f"{k}: expected {b!r}, got {a!r}")
        elif not math.isclose(a, b, rel_tol=rtol):
            problems.append(f"{k}: expected {b!r}, got {a!r}")
    return problems
