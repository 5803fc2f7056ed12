"""Shift-periodic constants (d, q) and the dominant singularities."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .specset import SpectrumPrefix
from .term import (
    Add,
    ComposeW,
    Const,
    ExpM1,
    Mul,
    PowSum,
    Scale,
    Std,
    Term,
    _W,
    _Z,
    subterms,
)

__all__ = [
    "PeriodInfo",
    "ZeroSolution",
    "NotElementary",
    "compute_dq",
    "dominant_singularities",
    "elementary_dq",
    "bivariate_spectrum",
    "congruence_holds",
]

# z-horizon for the operator-side spectrum computation
DEFAULT_HORIZON = 96


class ZeroSolution(ValueError):
    pass


class NotElementary(ValueError):
    pass


@dataclass(frozen=True)
class PeriodInfo:
    d: int
    q: int
    stabilization_span: int
    exactness: str  # "ProvedStable" or "PrefixEstimate"

    @property
    def support(self) -> str:
        return f"n ≡ {self.d} (mod {self.q})"

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "q": self.q,
            "stabilization_span": self.stabilization_span,
            "exactness": self.exactness,
        }


def _support(prefix) -> list[int]:
    series = getattr(prefix, "series", prefix)
    return [n for n, x in enumerate(series.numerators) if x and n >= 1]


def _stable_gcd(values: list[int], horizon: int) -> tuple[int, int, int]:
    """gcd of ``values`` plus the index where it settled and how many later values confirm it."""
    g, settled = 0, 0
    for v in values:
        g2 = math.gcd(g, v)
        if g2 != g:
            g, settled = g2, v
    span = sum(1 for v in values if v > settled)
    return g, settled, span


def compute_dq(prefix) -> PeriodInfo:
    """``d`` = first nonzero index, ``q`` = gcd of the gaps ``n - d`` over the prefix.

    ``ProvedStable`` means the gcd settled by index N/2 and at least 8 later
    nonzero terms kept it; it is a declared heuristic, not a proof.
    """
    support = _support(prefix)
    if not support:
        raise ZeroSolution("the solution prefix is identically zero")
    order = getattr(prefix, "order", None) or prefix.series.order
    d = support[0]
    gaps = [n - d for n in support[1:]]
    q, settled, span = _stable_gcd(gaps, order)
    if q == 0:
        return PeriodInfo(d, 1, 0, "PrefixEstimate")
    ok = settled + d <= order // 2 and span >= 8
    return PeriodInfo(d, q, span, "ProvedStable" if ok else "PrefixEstimate")


def congruence_holds(prefix, info: PeriodInfo) -> bool:
    return all((n - info.d) % info.q == 0 for n in _support(prefix))


def dominant_singularities(rho: float, q: int) -> list[complex]:
    """The q points ``ρ·e^{2πij/q}``."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if q < 1:
        raise ValueError("q must be positive")
    out = []
    for j in range(q):
        p = rho * cmath.exp(2j * math.pi * j / q)
        out.append(complex(round(p.real, 15) + 0.0, round(p.imag, 15) + 0.0))
    return out


# ----------------------------------------------------------------------
# operator side: spectra of E_n where E(z,w) = Σ_n E_n(z) w^n

Spectrum2 = dict  # w-degree -> bitmask of z-degrees


def _mask(h: int) -> int:
    return (1 << (h + 1)) - 1


def _union(a: Spectrum2, b: Spectrum2) -> Spectrum2:
    out = dict(a)
    for k, m in b.items():
        out[k] = out.get(k, 0) | m
    return out


def _sumset(a: int, b: int, h: int) -> int:
    out, i, mask = 0, 0, _mask(h)
    while a:
        if a & 1:
            out |= (b << i) & mask
        a >>= 1
        i += 1
    return out


def _product(a: Spectrum2, b: Spectrum2, h: int) -> Spectrum2:
    out: Spectrum2 = {}
    for i, ma in a.items():
        for j, mb in b.items():
            if i + j > h + 1:
                continue
            m = _sumset(ma, mb, h)
            if m:
                out[i + j] = out.get(i + j, 0) | m
    return out


def _power_union(arg: Spectrum2, exponents, h: int) -> Spectrum2:
    """``∪_{m∈exponents} arg^{⊙m}`` (exponents ascending, capped by the horizon)."""
    out: Spectrum2 = {}
    cur: Spectrum2 = {0: 1}
    m = 0
    for e in exponents:
        while m < e:
            cur = _product(cur, arg, h)
            m += 1
            if not cur:
                return out
        out = _union(out, cur)
    return out


def _substitute(outer: Spectrum2, inner: Spectrum2, h: int) -> Spectrum2:
    out: Spectrum2 = {}
    powers: Spectrum2 = {0: 1}
    for n in range(0, max(outer, default=0) + 1):
        if n:
            powers = _product(powers, inner, h)
        if n in outer and powers:
            out = _union(out, _product({0: outer[n]}, powers, h))
    return out


def bivariate_spectrum(t: Term, horizon: int = DEFAULT_HORIZON) -> Spectrum2:
    """Support of the elementary series ``t(z, w)`` up to z- and w-degree ``horizon``."""
    h = horizon
    if isinstance(t, _Z):
        return {0: 1 << 1}
    if isinstance(t, _W):
        return {1: 1}
    if isinstance(t, Const):
        idx = t.gen.spectrum_indices(h)
        return {0: sum(1 << i for i in idx)} if idx else {}
    if isinstance(t, Scale):
        return bivariate_spectrum(t.t, h)
    if isinstance(t, Add):
        return _union(bivariate_spectrum(t.left, h), bivariate_spectrum(t.right, h))
    if isinstance(t, Mul):
        return _product(bivariate_spectrum(t.left, h), bivariate_spectrum(t.right, h), h)
    if isinstance(t, PowSum):
        return _power_union(bivariate_spectrum(t.arg, h), t.M.members(2 * h + 2), h)
    if isinstance(t, ExpM1):
        return _power_union(bivariate_spectrum(t.arg, h), range(1, 2 * h + 3), h)
    if isinstance(t, ComposeW):
        return _substitute(bivariate_spectrum(t.outer, h), bivariate_spectrum(t.inner, h), h)
    if isinstance(t, Std):
        raise NotElementary(f"{t.kind}[{t.M}] is not an elementary builtin")
    raise TypeError(f"not a term: {t!r}")


def elementary_dq(t: Term, prefix=None, horizon: int | None = None) -> PeriodInfo:
    """(d, q) from the operator side: ``d = min E_0``, ``q = gcd ∪_n (E_n + (n-1)d)``."""
    if any(isinstance(n, Std) for n in subterms(t)):
        raise NotElementary("term contains a standard operator")
    h = DEFAULT_HORIZON if horizon is None else horizon
    if prefix is not None:
        h = min(getattr(prefix, "order", h), h)
    spec = bivariate_spectrum(t, h)
    e0 = SpectrumPrefix(spec.get(0, 0), h)
    if e0.min is None:
        raise ZeroSolution("E_0 is empty so the solution is zero")
    d = e0.min
    values = []
    for n, bits in spec.items():
        for e in SpectrumPrefix(bits, h).elements:
            values.append(e + (n - 1) * d)
    g = 0
    for v in values:
        g = math.gcd(g, v)
    if g == 0:
        return PeriodInfo(d, 1, 0, "PrefixEstimate")
    values.sort()
    _, settled, span = _stable_gcd([abs(v) for v in values if v], h)
    exact = "ProvedStable" if g == 1 or settled <= h // 2 else "PrefixEstimate"
    return PeriodInfo(d, g, span, exact)
