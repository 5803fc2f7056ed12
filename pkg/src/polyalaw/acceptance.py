"""Acceptance suite: one named criterion per function, each returning a :class:`Criterion`.

``cli selftest`` and ``tests/test_acceptance.py`` both run these.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .classify import certify
from .corpus import entry
from .fixpoint import apply_operator, solve, std_series
from .periodicity import compute_dq, congruence_holds, elementary_dq
from .report import analyze, catalan_prefix, euler_product_prefix
from .series import Series, add, mul, power, scale, substitute_power
from .singularity import Representative, find_char_point
from .specset import SpecSet
from .term import parse

__all__ = [
    "Criterion",
    "SuiteConfig",
    "CRITERIA",
    "run_suite",
    "cycle_index_mset",
    "partitions",
    "jet_fd_errors",
    "JET_EQUATIONS",
    "ELEMENTARY_EQUATIONS",
]


@dataclass(frozen=True)
class Criterion:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


@dataclass(frozen=True)
class SuiteConfig:
    order: int | None = None  # forces every N when set
    tol: float = 1e-8
    seed: int = 20240501

    def n(self, default: int) -> int:
        return default if self.order is None else self.order


class _Checks:
    """Collects named boolean checks and renders the failures."""

    def __init__(self):
        self.items: list[tuple[str, bool]] = []

    def __call__(self, label: str, ok) -> bool:
        self.items.append((label, bool(ok)))
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.items)

    def detail(self, summary: str) -> str:
        bad = [label for label, ok in self.items if not ok]
        return summary if not bad else summary + "; failed: " + "; ".join(bad)


def _result(name: str, chk: _Checks, summary: str, *reports) -> Criterion:
    notes = [w for r in reports for w in r.warnings]
    if notes:
        summary += "; warnings: " + "; ".join(notes)
    return Criterion(name, chk.passed, chk.detail(summary))


def _guarded(name: str, fn: Callable[[], Criterion]) -> Criterion:
    try:
        return fn()
    except Exception as e:  # a crash is a failed criterion, not a crashed suite
        return Criterion(name, False, f"{type(e).__name__}: {e}")


# ----------------------------------------------------------------------
# 1-6: corpus numerics


def planar_binary(cfg: SuiteConfig) -> Criterion:
    name = "1 planar binary trees"
    n = cfg.n(1201)
    t0 = time.perf_counter()
    r = analyze(entry("labelled_binary").equation, order=n, tol=cfg.tol)
    elapsed = time.perf_counter() - t0
    chk = _Checks()
    chk("certified", r.certificate.certified)
    if r.char is not None and r.law is not None:
        chk(f"rho {r.char.rho!r} vs 0.5", abs(r.char.rho - 0.5) <= 1e-9)
        chk(f"tau {r.char.tau!r} vs 1", abs(r.char.tau - 1) <= 1e-6)
        chk(f"C {r.law.C!r} vs sqrt(2/pi)", abs(r.law.C - math.sqrt(2 / math.pi)) <= 1e-6)
    else:
        chk(f"law computed ({r.failure})", False)
    chk(f"(d, q) = ({r.period.d}, {r.period.q})", (r.period.d, r.period.q) == (1, 2))
    chk("t(2n) = 0", all(r.prefix[k] == 0 for k in range(2, r.prefix.order + 1, 2)))
    chk(f"runtime {elapsed:.2f}s < 5s", elapsed < 5)
    return _result(name, chk, f"N={n}, {elapsed:.2f}s, exit {r.exit_code}", r)


def planar(cfg: SuiteConfig) -> Criterion:
    name = "2 planar trees"
    n = cfg.n(600)
    r = analyze(entry("planar").equation, order=n, tol=cfg.tol)
    chk = _Checks()
    chk("coefficients equal the Catalan oracle", r.prefix.series == catalan_prefix(r.prefix.order))
    chk(f"q = {r.period.q}", r.period.q == 1)
    if r.char is not None and r.law is not None:
        chk(f"rho {r.char.rho!r} vs 0.25", abs(r.char.rho - 0.25) <= 1e-9)
        target = 1 / (4 * math.sqrt(math.pi))
        chk(f"C {r.law.C!r} vs 1/(4 sqrt(pi))", abs(r.law.C - target) <= 1e-4)
    else:
        chk(f"law computed ({r.failure})", False)
    dev = None if r.fit is None else r.fit.relative_deviation
    chk(f"fit deviation {dev} < 0.02", dev is not None and dev < 0.02)
    return _result(name, chk, f"N={n}, fit deviation {dev}", r)


def rooted(cfg: SuiteConfig) -> Criterion:
    name = "3 unlabelled rooted trees"
    n = cfg.n(500)
    r = analyze(entry("rooted").equation, order=n, tol=cfg.tol)
    chk = _Checks()
    chk("coefficients equal the Euler-product oracle", r.prefix.series == euler_product_prefix(n))
    chk("integer coefficients", r.prefix.integral)
    gap = None
    if r.char is not None and r.ratio_estimate is not None:
        gap = abs(r.ratio_estimate * r.char.rho - 1)
        chk(f"ratio gap {gap:.4f} < 1%", gap < 0.01)
    else:
        chk(f"rho and ratio estimate computed ({r.failure})", False)
    dev = None if r.fit is None else r.fit.relative_deviation
    chk(f"fit deviation {dev} < 0.05", dev is not None and dev < 0.05)
    rho = None if r.char is None else r.char.rho
    return _result(name, chk, f"N={n}, rho={rho}, ratio gap {gap}, fit deviation {dev}", r)


def labelled(cfg: SuiteConfig) -> Criterion:
    name = "4 labelled trees"
    n = cfg.n(600)
    r = analyze(entry("labelled").equation, order=n, tol=cfg.tol)
    chk = _Checks()
    if r.char is not None and r.law is not None:
        chk(f"rho {r.char.rho!r} vs 1/e", abs(r.char.rho - math.exp(-1)) <= 1e-8)
        target = 1 / math.sqrt(2 * math.pi)
        chk(f"C {r.law.C!r} vs 1/sqrt(2 pi)", abs(r.law.C - target) <= 1e-4)
    else:
        chk(f"law computed ({r.failure})", False)
    top = min(60, r.prefix.order)
    chk(
        f"n!·t(n) = n^(n-1) for n <= {top}",
        all(r.prefix[k] * math.factorial(k) == k ** (k - 1) for k in range(1, top + 1)),
    )
    return _result(name, chk, f"N={n}, exit {r.exit_code}", r)


def rejections(cfg: SuiteConfig) -> Criterion:
    name = "5 rejections"
    chk = _Checks()
    lin = certify(parse(entry("chains").equation))
    chk(f"chains -> {lin}", str(lin) == "Rejected(linear)")
    n = cfg.n(1500)
    r = analyze(entry("halved_binary").equation, order=n, tol=cfg.tol)
    cert = r.certificate
    chk(f"halved binary -> {cert}", not cert.certified and cert.reason.startswith("membership"))
    chk("reason names both classes", "not in either O_E or O_I" in cert.reason)
    chk("law not asserted", r.law is None and "law not asserted" in r.to_text())
    est = r.ratio_estimate
    chk(f"ratio estimate {est} > 0.9", est is not None and est > 0.9)
    return _result(name, chk, f"N={n}, ratio estimate {est}", r)


def mixed_operators(cfg: SuiteConfig) -> Criterion:
    name = "6 mixed-operator equation"
    n = cfg.n(300)
    r = analyze(entry("mixed_operators").equation, order=n, tol=cfg.tol)
    chk = _Checks()
    chk(f"certificate {r.certificate}", r.certificate.certified and r.certificate.path == "O_I")
    vals = None
    if r.char is not None and r.law is not None:
        vals = (r.char.rho, r.char.tau, r.law.C)
        chk("finite (rho, tau, C)", all(math.isfinite(v) and v > 0 for v in vals))
    else:
        chk(f"law computed ({r.failure})", False)
    chk("support inside d mod q", congruence_holds(r.prefix, r.period))
    return _result(name, chk, f"N={n}, (rho, tau, C) = {vals}", r)


# ----------------------------------------------------------------------
# 7: properties


def _random_series(rng: random.Random, order: int, dom: bool = True, rational: bool = True) -> Series:
    def coeff():
        if rng.random() < 0.3:
            return Fraction(0)
        num = rng.randint(0, 9)
        return Fraction(num, rng.randint(1, 6)) if rational else Fraction(num)

    start = 1 if dom else 0
    return Series([coeff() for _ in range(order + 1 - start)], order, start=start)


def _series_laws(rng: random.Random, trials: int = 40) -> list[str]:
    bad = []
    for i in range(trials):
        n = rng.randint(1, 14)
        a, b, c = (_random_series(rng, n, dom=False) for _ in range(3))
        if mul(a, b) != mul(b, a):
            bad.append(f"commutativity #{i}")
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            bad.append(f"associativity #{i}")
        if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)):
            bad.append(f"distributivity #{i}")
        k = rng.randint(2, 4)
        if substitute_power(mul(a, b), k) != mul(substitute_power(a, k), substitute_power(b, k)):
            bad.append(f"plethysm multiplicative #{i}")
        if power(a, 3) != mul(a, mul(a, a)):
            bad.append(f"power #{i}")
    return bad


def _bump(rng: random.Random, a: Series) -> Series:
    """A series dominating ``a`` with the same constant term."""
    return add(a, _random_series(rng, a.order))


DOMINANCE_TERMS = (
    "z + z*w^2",
    "z + z*Seq(w)",
    "z + z*MSet(w)",
    "z + z*Cycle(w)",
    "z + z*expm1(w)",
    "z + z*MSet[{2,3}](w) + powsum(2, even, w)",
    "z + z*DCycle[primes](w)",
)


def _dominance(rng: random.Random, trials: int = 12) -> list[str]:
    bad = []
    for i in range(trials):
        n = rng.randint(2, 12)
        a = _random_series(rng, n, dom=False)
        c = _random_series(rng, n, dom=False)
        b, d = _bump(rng, a), _bump(rng, c)
        if not add(a, c).dominated_by(add(b, d)):
            bad.append(f"sum #{i}")
        if not mul(a, c).dominated_by(mul(b, d)):
            bad.append(f"product #{i}")
    for eq in DOMINANCE_TERMS:
        t = parse(eq)
        for i in range(4):
            a = _random_series(rng, 10)
            b = _bump(rng, a)
            if not apply_operator(t, a).dominated_by(apply_operator(t, b)):
                bad.append(f"operator {eq} #{i}")
    lo = solve(parse("z + z*MSet[{2}](w)"), 200).series
    hi = solve(parse("z + z*Seq[{2}](w)"), 200).series
    if not lo.dominated_by(hi):
        bad.append("MSet_2 solution above Seq_2 solution")
    return bad


def partitions(m: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = m if largest is None else largest
    if m == 0:
        yield ()
        return
    for k in range(min(m, largest), 0, -1):
        for rest in partitions(m - k, k):
            yield (k,) + rest


def cycle_index_mset(u: Series, m: int, order: int) -> Series:
    """``Z(S_m; p_1, ..., p_m)`` with ``p_k = u(z^k)``, by expanding over partitions of m."""
    total = Series.zero(order)
    for lam in partitions(m):
        counts: dict[int, int] = {}
        for k in lam:
            counts[k] = counts.get(k, 0) + 1
        term = Series.one(order)
        weight = Fraction(1)
        for k, c in counts.items():
            term = mul(term, power(substitute_power(u, k, order), c, order), order)
            weight /= k**c * math.factorial(c)
        total = add(total, scale(weight, term))
    return total


def _mset_oracle(rng: random.Random, trials: int = 6) -> list[str]:
    bad = []
    for i in range(trials):
        n = rng.randint(4, 12)
        u = _random_series(rng, n, rational=i % 2 == 1)
        for m in range(1, 7):
            got = std_series("MSet", SpecSet.explicit([m]), u, n)
            if got != cycle_index_mset(u, m, n):
                bad.append(f"m={m} #{i}")
    return bad


FIXPOINT_EQUATIONS = (
    "z + z*w^2",
    "z + z*Seq(w)",
    "z + z*MSet(w)",
    "z + z*expm1(w)",
    "z + z*Cycle(w)",
    "z + z*(w + MSet[{2}](w))",
    "z + z*MSet[{2,3}](w)",
)


def _fixpoint(order: int = 40) -> list[str]:
    bad = []
    for eq in FIXPOINT_EQUATIONS:
        t = parse(eq)
        T = solve(t, order).series
        if apply_operator(t, T) != T:
            bad.append(f"fixpoint {eq}")
        cur = Series.zero(order)
        for _ in range(order + 1):
            nxt = apply_operator(t, cur)
            if not cur.dominated_by(nxt):
                bad.append(f"iterates not monotone for {eq}")
                break
            if nxt == cur:
                break
            cur = nxt
        if cur != T:
            bad.append(f"iteration limit differs for {eq}")
    return bad


ELEMENTARY_EQUATIONS = (
    "z + z*w^2",
    "z + z*expm1(w)",
    "z + z*w^3",
    "z^2 + z^2*w^2",
    "z + z*powsum(1, even, w)",
    "z^3 + z^3*w^3 + z^9*w^2",
    "z + z*(w@(z*w^2))",
    "2*z + z*powsum(1, ap(2, 2), w)",
)


def _dq_agreement(order: int = 200) -> list[str]:
    bad = []
    for eq in ELEMENTARY_EQUATIONS:
        t = parse(eq)
        p = compute_dq(solve(t, order))
        e = elementary_dq(t)
        if (p.d, p.q) != (e.d, e.q):
            bad.append(f"{eq}: prefix ({p.d},{p.q}) vs operator ({e.d},{e.q})")
    return bad


JET_EQUATIONS = (
    ("labelled_binary", 200),
    ("planar", 200),
    ("rooted", 200),
    ("labelled", 200),
    ("necklaces", 200),
    ("mixed_operators", 120),
)

FD_STEP = 1e-5
FD_RTOL = 1e-5


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= FD_RTOL * max(abs(a), abs(b), 1e-3)


def jet_fd_errors(name: str, order: int, points: int, rng: random.Random) -> list[str]:
    """Compare jet partials with centered differences at random interior points."""
    t = parse(entry(name).equation)
    T = solve(t, order)
    rep = Representative(t, T.series)
    sol = find_char_point(t, T, rep=rep)
    h = FD_STEP
    bad = []
    for _ in range(points):
        x = sol.rho * rng.uniform(0.2, 0.9)
        y = sol.tau * rng.uniform(0.1, 0.9)
        j = rep.jet(x, y)
        zp, zm = rep.jet(x + h, y), rep.jet(x - h, y)
        wp, wm = rep.jet(x, y + h), rep.jet(x, y - h)
        fd = {
            "dz": (zp.v - zm.v) / (2 * h),
            "dw": (wp.v - wm.v) / (2 * h),
            "dww": (wp.dw - wm.dw) / (2 * h),
            "dzw": (zp.dw - zm.dw) / (2 * h),
        }
        for k, v in fd.items():
            if not _close(getattr(j, k), v):
                bad.append(f"{name} {k} at ({x:.4g}, {y:.4g}): jet {getattr(j, k)!r}, fd {v!r}")
    return bad


def properties(cfg: SuiteConfig) -> Criterion:
    name = "7 property suites"
    rng = random.Random(cfg.seed)
    groups = {
        "series laws": _series_laws(rng),
        "dominance": _dominance(rng),
        "jet vs finite differences": [
            msg for eq, n in JET_EQUATIONS for msg in jet_fd_errors(eq, n, 20, rng)
        ],
        "MSet vs cycle index": _mset_oracle(rng),
        "fixpoint and monotone iterates": _fixpoint(),
        "compute_dq vs elementary_dq": _dq_agreement(),
    }
    chk = _Checks()
    for label, problems in groups.items():
        chk(label + ("" if not problems else f" ({problems[0]})"), not problems)
    return _result(name, chk, f"{len(groups)} groups")


CRITERIA: tuple[tuple[str, Callable[[SuiteConfig], Criterion]], ...] = (
    ("1 planar binary trees", planar_binary),
    ("2 planar trees", planar),
    ("3 unlabelled rooted trees", rooted),
    ("4 labelled trees", labelled),
    ("5 rejections", rejections),
    ("6 mixed-operator equation", mixed_operators),
    ("7 property suites", properties),
)


def run_suite(cfg: SuiteConfig | None = None) -> list[Criterion]:
    cfg = cfg or SuiteConfig()
    return [_guarded(name, lambda fn=fn: fn(cfg)) for name, fn in CRITERIA]

