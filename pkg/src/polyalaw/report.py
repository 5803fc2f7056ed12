"""Independent oracles, the empirical check of the universal law, and full analysis reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from .classify import Certificate, Retro, certify, check_retro, classify
from .fixpoint import SolutionPrefix, solve
from .periodicity import PeriodInfo, compute_dq, congruence_holds, dominant_singularities
from .series import Series
from .singularity import (
    AsymptoticLaw,
    CharSolution,
    OrderTooLow,
    PrecisionLoss,
    SingularityError,
    asymptotic_constant,
    find_char_point,
)
from .term import Term, parse, pretty_print

__all__ = [
    "euler_product_prefix",
    "catalan_prefix",
    "FitReport",
    "InsufficientSupportPoints",
    "empirical_fit",
    "ratio_rho_estimate",
    "AnalysisReport",
    "analyze",
    "report_schema",
    "MAX_ORDER",
]

MAX_ORDER = 2048
FIT_WINDOW = 0.2


class InsufficientSupportPoints(ValueError):
    pass


# ----------------------------------------------------------------------
# oracles


def euler_product_prefix(order: int) -> Series:
    """Rooted unlabelled trees from ``n·t(n+1) = Σ_k (Σ_{d|k} d·t(d))·t(n-k+1)``."""
    if order < 1:
        raise ValueError("order must be positive")
    t = [0, 1] + [0] * (order - 1)
    sigma = [0] * (order + 1)  # sigma[k] = Σ_{d|k} d·t(d), filled as t grows
    for n in range(1, order):
        for d in range(n, order + 1, n):
            sigma[d] += n * t[n]
        s = sum(sigma[k] * t[n - k + 1] for k in range(1, n + 1))
        t[n + 1] = s // n
    return Series(t[1:], order)


def catalan_prefix(order: int) -> Series:
    """``c(1) = 1``, ``c(n+1) = Σ_{k=1}^{n} c(k)·c(n+1-k)``."""
    if order < 1:
        raise ValueError("order must be positive")
    c = [0, 1]
    for n in range(1, order):
        c.append(sum(c[k] * c[n + 1 - k] for k in range(1, n + 1)))
    return Series(c[1:], order)


# ----------------------------------------------------------------------
# empirical validation


@dataclass(frozen=True)
class FitReport:
    samples: list[tuple[int, float]]
    tail_mean: float
    relative_deviation: float
    threshold: float
    passed: bool

    def to_dict(self) -> dict:
        return {"deviation": self.relative_deviation, "pass": self.passed}


def _support_indices(series: Series, d: int, q: int) -> list[int]:
    return [
        n for n, x in enumerate(series.numerators) if n >= 1 and x and (n - d) % q == 0
    ]


def empirical_fit(T, law: AsymptoticLaw, threshold: float = 0.05, min_points: int = 40) -> FitReport:
    """Compare ``t(n)·ρ^n·n^{3/2}`` on the trailing 20% of the support with ``C``."""
    series = getattr(T, "series", T)
    logc = series.log_coeffs()
    idx = _support_indices(series, law.d, law.q)
    if len(idx) < min_points:
        raise InsufficientSupportPoints(f"{len(idx)} support points, need {min_points}")
    lr = math.log(law.rho)
    samples = [(n, math.exp(logc[n] + n * lr + 1.5 * math.log(n))) for n in idx]
    k = max(1, int(len(samples) * FIT_WINDOW))
    tail = [v for _, v in samples[-k:]]
    mean = sum(tail) / len(tail)
    dev = abs(mean - law.C) / law.C
    return FitReport(samples, mean, dev, threshold, dev <= threshold)


def ratio_rho_estimate(T, p: PeriodInfo) -> float:
    """Mean of ``(t(n)/t(n-q))^{1/q}`` over the trailing support; estimates ``1/ρ``."""
    series = getattr(T, "series", T)
    logc = series.log_coeffs()
    idx = _support_indices(series, p.d, p.q)
    pairs = [n for n in idx if n - p.q >= 1 and np.isfinite(logc[n - p.q])]
    if not pairs:
        raise InsufficientSupportPoints("no consecutive support points")
    k = max(1, int(len(pairs) * FIT_WINDOW))
    vals = [math.exp((logc[n] - logc[n - p.q]) / p.q) for n in pairs[-k:]]
    return sum(vals) / len(vals)


# ----------------------------------------------------------------------
# analysis


def report_schema() -> dict:
    text = resources.files("polyalaw").joinpath("report.schema.json").read_text()
    return json.loads(text)


def _coeff_json(c: Fraction):
    return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@dataclass
class AnalysisReport:
    equation: str
    certificate: Certificate
    classification: dict
    order: int
    prefix: SolutionPrefix | None = None
    period: PeriodInfo | None = None
    char: CharSolution | None = None
    law: AsymptoticLaw | None = None
    fit: FitReport | None = None
    ratio_estimate: float | None = None
    warnings: list[str] = field(default_factory=list)
    failure: str | None = None

    @property
    def exit_code(self) -> int:
        if not self.certificate.certified:
            return 2
        if self.failure is not None or self.fit is None or not self.fit.passed:
            return 3
        return 0

    @property
    def confidence(self) -> str:
        """``degraded`` when (d, q) is only a prefix estimate."""
        if self.period is not None and self.period.exactness == "PrefixEstimate":
            return "degraded"
        return "full"

    def to_dict(self) -> dict:
        p, s, law = self.period, self.char, self.law
        head = [] if self.prefix is None else [_coeff_json(c) for c in self.prefix.coeffs()[:20]]
        return {
            "equation": self.equation,
            "classification": self.classification,
            "certificate": self.certificate.to_dict(),
            "order": self.order,
            "d": None if p is None else p.d,
            "q": None if p is None else p.q,
            "period_exactness": None if p is None else p.exactness,
            "confidence": None if p is None else self.confidence,
            "rho": None if s is None else s.rho,
            "rho_error": None if s is None else s.rho_error,
            "tau": None if s is None else s.tau,
            "C": None if law is None else law.C,
            "C_error": None if law is None else law.C_error,
            "dominant_singularities": None
            if s is None or p is None
            else [[z.real, z.imag] for z in dominant_singularities(s.rho, p.q)],
            "ratio_rho_estimate": self.ratio_estimate,
            "fit": None if self.fit is None else self.fit.to_dict(),
            "coefficients_head": head,
            "warnings": list(self.warnings),
            "exit_code": self.exit_code,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"equation      w = {d['equation']}", f"certificate   {self.certificate}"]
        for c in self.certificate.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.hypothesis}" + (f": {c.reason}" if c.reason else ""))
        if self.period is not None:
            lines.append(
                f"period        d = {d['d']}, q = {d['q']} ({d['period_exactness']}, confidence {d['confidence']})"
            )
        if self.char is not None:
            lines.append(f"rho           {d['rho']:.15g} ± {d['rho_error']:.1e}")
            lines.append(f"tau = T(rho)  {d['tau']:.15g}")
        if self.law is not None:
            lines.append(f"C             {d['C']:.15g} ± {d['C_error']:.1e}")
            lines.append(
                f"law           t(n) ~ C·rho^-n·n^(-3/2) for {self.law.support}"
            )
        if self.ratio_estimate is not None:
            lines.append(f"ratio est.    1/rho ≈ {self.ratio_estimate:.6g}")
        if self.fit is not None:
            verdict = "pass" if self.fit.passed else "FAIL"
            lines.append(
                f"fit           deviation {self.fit.relative_deviation:.3e} "
                f"(threshold {self.fit.threshold}) {verdict}"
            )
        if not self.certificate.certified:
            lines.append("law           no certificate; law not asserted")
        head = ", ".join(str(c) for c in d["coefficients_head"])
        lines.append(f"t(1..20)      {head}")
        for w in self.warnings:
            lines.append(f"warning       {w}")
        if self.failure:
            lines.append(f"failure       {self.failure}")
        return "\n".join(lines)


def analyze(
    equation: str | Term,
    order: int = 600,
    tol: float = 1e-8,
    fit_threshold: float = 0.05,
    m_max: int = 400,
) -> AnalysisReport:
    """Parse, certify, solve and, when certified, locate ρ and evaluate the law."""
    t = parse(equation) if isinstance(equation, str) else equation
    cert = certify(t)
    cls_target = cert.theta1 if cert.theta1 is not None else t
    rep = AnalysisReport(
        equation=pretty_print(t),
        certificate=cert,
        classification=classify(cls_target).to_dict(),
        order=order,
    )
    if check_retro(t) is not Retro.RETRO:
        rep.warnings.append("equation is not retro; no coefficients computed")
        return rep
    rep.prefix = solve(t, order)
    try:
        rep.period = compute_dq(rep.prefix)
    except ValueError as e:
        rep.warnings.append(str(e))
        if cert.certified:
            rep.failure = str(e)
        return rep
    if rep.period.exactness != "ProvedStable":
        rep.warnings.append(
            f"period (d, q) = ({rep.period.d}, {rep.period.q}) is a prefix estimate"
        )
    if not congruence_holds(rep.prefix, rep.period):
        rep.warnings.append("support is not contained in one congruence class")
    try:
        rep.ratio_estimate = ratio_rho_estimate(rep.prefix, rep.period)
    except InsufficientSupportPoints as e:
        rep.warnings.append(str(e))
    if not cert.certified:
        return rep

    current = order
    for attempt in range(4):
        try:
            rep.char = find_char_point(t, rep.prefix, tol=tol, m_max=m_max)
            break
        except (PrecisionLoss, OrderTooLow) as e:
            if attempt == 3 or current >= MAX_ORDER:
                rep.failure = f"{type(e).__name__}: {e}"
                return rep
            current = min(2 * current, MAX_ORDER)
            rep.warnings.append(f"{type(e).__name__} at order {rep.order}; retrying at {current}")
            rep.prefix = solve(t, current)
            rep.order = current
        except SingularityError as e:
            rep.failure = f"{type(e).__name__}: {e}"
            return rep
    try:
        rep.law = asymptotic_constant(rep.char, rep.period)
    except SingularityError as e:
        rep.failure = f"{type(e).__name__}: {e}"
        return rep
    try:
        rep.fit = empirical_fit(rep.prefix, rep.law, fit_threshold)
    except InsufficientSupportPoints as e:
        rep.warnings.append(f"fit skipped: {e}")
    if rep.ratio_estimate is not None:
        gap = abs(rep.ratio_estimate * rep.char.rho - 1)
        if gap > 0.01:
            rep.warnings.append(f"ratio estimate differs from 1/rho by {100 * gap:.2f}%")
    return rep
