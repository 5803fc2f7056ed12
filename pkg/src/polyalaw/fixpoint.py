"""Exact solution prefixes of ``w = Θ(w)`` for retro operators.

:func:`apply_operator` gives the exact action of a term on a series.  The
solver runs Newton doubling on the ``p1`` channel: if ``T`` is right through
index ``m`` then the plethystic inputs ``T(z^k)`` (``k >= 2``) are right
through ``2m+1``, so linearizing in ``w`` alone doubles the correct prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .series import (
    Series,
    add,
    exp_series,
    inverse_one_minus,
    mul,
    power,
    power_sum,
    scale,
    substitute_power,
)
from .specset import SpecSet, totient
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
)

__all__ = [
    "apply_operator",
    "apply_with_derivative",
    "solve",
    "SolutionPrefix",
    "NonStabilization",
    "NotRetro",
    "mset_sum",
    "std_series",
]


class NonStabilization(RuntimeError):
    pass


class NotRetro(ValueError):
    pass


# ----------------------------------------------------------------------
# helpers on series lists


def _sub_nonneg(a: Series, b: Series) -> Series:
    """``a - b`` for ``b ⊴ a``."""
    n = min(a.order, b.order)
    l = math.lcm(a.denominator, b.denominator)
    fa, fb = l // a.denominator, l // b.denominator
    nums = [x * fa - y * fb for x, y in zip(a.numerators[: n + 1], b.numerators[: n + 1])]
    if any(x < 0 for x in nums):
        raise ArithmeticError("subtraction left a negative coefficient")
    return Series._make(nums, l)


def _sum(parts: list[Series], order: int) -> Series:
    acc = Series.zero(order)
    for p in parts:
        acc = add(acc, p)
    return acc


def _plethysm(u: Series, k: int, order: int) -> Series:
    return substitute_power(u, k, order)


# ----------------------------------------------------------------------
# index sets for sums of h_m


@dataclass(frozen=True)
class _IndexSet:
    """A set of nonnegative integers: explicit below ``m0``, periodic mod ``s`` from ``m0`` on.

    ``periodic`` is None when the set has no such description (primes).
    """

    contains: Callable[[int], bool]
    m0: int
    s: int
    periodic: frozenset[int] | None


def _index_set(M: SpecSet, shift: int = 0) -> _IndexSet:
    """Description of ``{m - shift : m in M}``."""
    fin, aps, primes = M.progressions()

    def contains(m: int) -> bool:
        return (m + shift) in M

    if primes:
        return _IndexSet(contains, 0, 1, None)
    s = 1
    for _, st in aps:
        s = math.lcm(s, st)
    heads = list(fin) + [a for a, _ in aps]
    m0 = max(heads) + 1 - shift if heads else 0
    m0 = max(m0, 0)
    classes = frozenset(
        r for r in range(s) if any((r + shift - a) % st == 0 for a, st in aps)
    )
    return _IndexSet(contains, m0, s, classes)


def _h_list(u: Series, top: int, order: int) -> list[Series]:
    """h_0..h_top by Newton's identity ``m h_m = Σ_k p_k h_{m-k}``."""
    h = [Series.one(order)]
    ps: dict[int, Series] = {}
    v = u.valuation
    for m in range(1, top + 1):
        terms = []
        for k in range(1, m + 1):
            if v is not None and k * v > order:
                break
            if (m - k) * (v or 1) > order:
                continue
            if k not in ps:
                ps[k] = _plethysm(u, k, order)
            terms.append(mul(ps[k], h[m - k], order))
        h.append(scale(Fraction(1, m), _sum(terms, order)))
    return h


def _cyclic_exp(u: Series, s: int, order: int) -> list[list[Fraction]]:
    """Classes of ``exp(Σ_k p_k y^k / k)`` modulo ``y^s - 1``.

    Returns ``H[r][n]`` = coefficient of ``z^n`` in ``Σ_{m ≡ r} h_m``.
    """
    coeffs = u.all_coeffs()
    L = [[Fraction(0)] * s for _ in range(order + 1)]
    for n in range(1, order + 1):
        for k in range(1, n + 1):
            if n % k == 0 and coeffs[n // k]:
                L[n][k % s] += coeffs[n // k] / k
    jL = [[j * x for x in L[j]] for j in range(order + 1)]
    nz = [j for j in range(1, order + 1) if any(L[j])]
    H = [[Fraction(0)] * s for _ in range(order + 1)]
    H[0][0] = Fraction(1)
    for n in range(1, order + 1):
        acc = [Fraction(0)] * s
        for j in nz:
            if j > n:
                break
            a, b = jL[j], H[n - j]
            for r1 in range(s):
                if a[r1]:
                    for r2 in range(s):
                        if b[r2]:
                            acc[(r1 + r2) % s] += a[r1] * b[r2]
        H[n] = [x / n for x in acc]
    return [[H[n][r] for n in range(order + 1)] for r in range(s)]


def mset_sum(u: Series, S: _IndexSet, order: int) -> Series:
    """``Σ_{m∈S} h_m(u)`` where ``h_m`` is the cycle index of ``S_m`` at ``u``."""
    v = u.valuation
    if v is None:
        return Series.one(order) if S.contains(0) else Series.zero(order)
    top = order // v
    if S.periodic is None or S.m0 > top:
        h = _h_list(u, top, order)
        return _sum([h[m] for m in range(top + 1) if S.contains(m)], order)
    h = _h_list(u, S.m0 - 1, order) if S.m0 > 0 else []
    acc = [Fraction(0)] * (order + 1)
    if S.periodic:
        H = _cyclic_exp(u, S.s, order)
        for r in S.periodic:
            for n in range(order + 1):
                acc[n] += H[r][n]
        for m in range(S.m0):
            if m % S.s in S.periodic:
                for n, c in enumerate(h[m].all_coeffs()):
                    acc[n] -= c
    for m in range(S.m0):
        if S.contains(m):
            for n, c in enumerate(h[m].all_coeffs()):
                acc[n] += c
    return Series(acc, order, start=0)


# ----------------------------------------------------------------------
# standard operators


def _mset_all_exp(u: Series, order: int) -> Series:
    """``exp(Σ_k u(z^k)/k)``."""
    coeffs = u.all_coeffs()
    L = [Fraction(0)] * (order + 1)
    for k in range(1, order + 1):
        for j in range(1, order // k + 1):
            if coeffs[j]:
                L[j * k] += coeffs[j] / k
    return exp_series(Series(L, order, start=0), order)


def _seq_weights(M: SpecSet, bound: int, shift: int = 0, deriv: bool = False):
    w = {}
    for m in M.members(bound + shift):
        if m - shift >= 0:
            w[m - shift] = Fraction(m) if deriv else Fraction(1)
    return w


def _dcycle_parts(u: Series, M: SpecSet, order: int) -> Series:
    """Σ_{k>=2} φ(k)/k · (Σ_{j: jk∈M} u^j/j)(z^k)."""
    v = u.valuation
    parts = []
    if v is None:
        return Series.zero(order)
    for k in range(2, order // v + 1):
        sub = order // k
        if sub < v:
            continue
        weights = {j: Fraction(1, j) for j in range(1, sub // v + 1) if j * k in M}
        if not weights:
            continue
        inner = power_sum(u.truncate(sub), weights, sub)
        parts.append(scale(Fraction(totient(k), k), _plethysm(inner, k, order)))
    return _sum(parts, order)


def _reflection_parts(u: Series, M: SpecSet, order: int, deriv: bool = False) -> Series:
    """The reflection half of the dihedral cycle index, or its ``p1`` derivative.

    value: Σ_{m∈M} [m odd] 2u·p2^{(m-1)/2} + [m even] (u²·p2^{(m-2)/2} + p2^{m/2})
    derivative: Σ_{m∈M} [m odd] 2·p2^{(m-1)/2} + [m even] 2u·p2^{(m-2)/2}
    """
    v = u.valuation
    if v is None:
        if deriv and 1 in M:
            return scale(2, Series.one(order))
        return Series.zero(order)
    half = order // 2
    hu = u.truncate(half)
    # derivative terms have valuation v·(m-1), so one more m fits
    top = order // v + (1 if deriv else 0)
    odd = {(m - 1) // 2: Fraction(1) for m in M.members(top) if m % 2 == 1}
    even = {(m - 2) // 2: Fraction(1) for m in M.members(top) if m % 2 == 0}
    res = []
    if odd:
        q = _plethysm(power_sum(hu, odd, half), 2, order)
        res.append(scale(2, q) if deriv else scale(2, mul(u, q, order)))
    if even:
        q = _plethysm(power_sum(hu, even, half), 2, order)
        if deriv:
            res.append(scale(2, mul(u, q, order)))
        else:
            res.append(mul(mul(u, u, order), q, order))
            shifted = {e + 1: c for e, c in even.items()}
            res.append(_plethysm(power_sum(hu, shifted, half), 2, order))
    return _sum(res, order)


def _ap(M: SpecSet) -> tuple[int, int] | None:
    if M.is_all:
        return 1, 1
    if M.kind == "odd":
        return 1, 2
    if M.kind == "even":
        return 2, 2
    if M.kind == "ap":
        return M.first, M.step
    return None


def _ap_derivative(cu: Series, a: int, s: int, order: int) -> Series:
    """``d/dx Σ_{j>=0} x^(a+js)`` at ``x = cu``."""
    inv = inverse_one_minus(power(cu, s, order), order)
    first = scale(a, mul(power(cu, a - 1, order), inv, order))
    second = scale(s, mul(power(cu, a + s - 1, order), mul(inv, inv, order), order))
    return add(first, second)


def _seq(u: Series, M: SpecSet, order: int, deriv: bool) -> Series:
    v = u.valuation
    bound = order // v if v else 0
    ap = _ap(M)
    if deriv and ap is not None and v is not None:
        return _ap_derivative(u, *ap, order)
    if deriv:
        return power_sum(u, _seq_weights(M, bound, 1, True), order)
    return power_sum(u, _seq_weights(M, bound), order)


def std_series(kind: str, M: SpecSet, u: Series, order: int, deriv: bool = False) -> Series:
    """Value of ``kind_M(u)``, or with ``deriv`` its partial derivative in ``p1``."""
    if not u.is_dom:
        raise ValueError("standard operators need an argument with zero constant term")
    u = u.truncate(order) if u.order > order else u
    v = u.valuation
    if kind == "Seq":
        return _seq(u, M, order, deriv)
    if kind == "MSet":
        if M.is_all:
            e = _mset_all_exp(u, order)
            return e if deriv else e.drop_constant()
        return mset_sum(u, _index_set(M, 1 if deriv else 0), order)
    if kind == "DCycle":
        bound = order // v if v else 0
        if deriv:
            return power_sum(u, {m - 1: Fraction(1) for m in M.members(bound + 1)}, order)
        base = power_sum(u, {m: Fraction(1, m) for m in M.members(bound)}, order)
        return add(base, _dcycle_parts(u, M, order))
    if kind == "Cycle":
        d = std_series("DCycle", M, u, order, deriv)
        r = _reflection_parts(u, M, order, deriv)
        return add(scale(Fraction(1, 2), d), scale(Fraction(1, 4), r))
    raise ValueError(f"unknown standard operator {kind!r}")


def _powsum(c: Fraction, M: SpecSet, u: Series, order: int, deriv: bool) -> Series:
    v = u.valuation
    bound = order // v if v else 0
    ap = _ap(M)
    if deriv and ap is not None and v is not None:
        return scale(c, _ap_derivative(scale(c, u), *ap, order))
    if deriv:
        w = {m - 1: m * c**m for m in M.members(bound + 1)}
    else:
        w = {m: c**m for m in M.members(bound)}
    return power_sum(u, w, order)


# ----------------------------------------------------------------------
# evaluation


class _Evaluator:
    """Evaluates a term at a fixed binding of w, optionally with ``∂/∂p1``.

    Derivatives are ``None`` for w-free subterms.
    """

    def __init__(self, w_value: Series, order: int, want_derivative: bool):
        self.w = w_value
        self.order = order
        self.deriv = want_derivative
        self.memo: dict[int, tuple[Series, Series | None]] = {}

    def __call__(self, t: Term) -> tuple[Series, Series | None]:
        key = id(t)
        got = self.memo.get(key)
        if got is None:
            got = self._eval(t)
            self.memo[key] = got
        return got

    def _eval(self, t: Term) -> tuple[Series, Series | None]:
        n = self.order
        if isinstance(t, _W):
            return self.w, (Series.one(n) if self.deriv else None)
        if isinstance(t, _Z):
            return Series.variable(n), None
        if isinstance(t, Const):
            return t.gen.series(n), None
        if isinstance(t, Scale):
            v, d = self(t.t)
            return scale(t.c, v), (None if d is None else scale(t.c, d))
        if isinstance(t, Add):
            (a, da), (b, db) = self(t.left), self(t.right)
            if da is None or db is None:
                d = da if db is None else db
            else:
                d = add(da, db)
            return add(a, b), d
        if isinstance(t, Mul):
            (a, da), (b, db) = self(t.left), self(t.right)
            d = None
            if self.deriv:
                parts = []
                if da is not None:
                    parts.append(mul(da, b, n))
                if db is not None:
                    parts.append(mul(a, db, n))
                d = _sum(parts, n) if parts else None
            return mul(a, b, n), d
        if isinstance(t, ComposeW):
            vi, di = self(t.inner)
            sub = _Evaluator(vi, n, self.deriv and di is not None)
            vo, do = sub(t.outer)
            d = None if do is None or di is None else mul(do, di, n)
            return vo, d
        if isinstance(t, (Std, PowSum, ExpM1)):
            u, du = self(t.arg)
            if isinstance(t, Std):
                value = std_series(t.kind, t.M, u, n)
                outer = (lambda: std_series(t.kind, t.M, u, n, deriv=True))
            elif isinstance(t, PowSum):
                value = _powsum(t.c, t.M, u, n, False)
                outer = (lambda: _powsum(t.c, t.M, u, n, True))
            else:
                e = exp_series(u, n)
                value = e.drop_constant()
                outer = (lambda: e)
            d = None
            if self.deriv and du is not None:
                d = mul(outer(), du, n)
            return value, d
        raise TypeError(f"not a term: {t!r}")


def apply_operator(t: Term, input: Series, order: int | None = None) -> Series:
    """Exact ``t(input)`` truncated at ``order`` (default: the input's order)."""
    n = input.order if order is None else order
    if input.order < n:
        raise ValueError(f"input has order {input.order} < {n}")
    if input.order > n:
        input = input.truncate(n)
    return _Evaluator(input, n, False)(t)[0]


def apply_with_derivative(t: Term, input: Series, order: int | None = None) -> tuple[Series, Series]:
    """``(t(input), ∂t/∂p1 at input)``; the second is the multiplier of a w-perturbation."""
    n = input.order if order is None else order
    if input.order > n:
        input = input.truncate(n)
    v, d = _Evaluator(input, n, True)(t)
    return v, (Series.zero(n) if d is None else d)


# ----------------------------------------------------------------------
# solving


@dataclass(frozen=True)
class SolutionPrefix:
    series: Series
    stabilized_at: int
    method: str = "newton"

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def integral(self) -> bool:
        return self.series.is_integral

    def coeffs(self) -> tuple[Fraction, ...]:
        """t(1..N)."""
        return self.series.coeffs

    def __getitem__(self, n: int) -> Fraction:
        return self.series[n]


def _check_retro(t: Term) -> None:
    from .classify import Retro, check_retro

    if check_retro(t) is not Retro.RETRO:
        raise NotRetro("solve needs a retro operator")


def _iterate(t: Term, order: int) -> SolutionPrefix:
    s = Series.zero(order)
    for i in range(1, order + 3):
        nxt = apply_operator(t, s, order)
        if not s.dominated_by(nxt):
            raise NonStabilization(f"iterate {i} decreased a coefficient")
        if nxt == s:
            return SolutionPrefix(s, i, "iterate")
        s = nxt
    raise NonStabilization(f"no fixpoint after {order + 2} iterations")


def _newton(t: Term, order: int) -> tuple[Series, int]:
    T = Series.zero(0)
    m, steps = 0, 0
    while m < order:
        m2 = min(2 * m + 1, order)
        base = T.as_polynomial(m2)
        F, D = apply_with_derivative(t, base, m2)
        if D.constant != 0:
            raise NotRetro("the w-derivative has a nonzero constant term")
        nums = list(F.numerators)
        for i in range(m + 1):
            nums[i] = 0
        resid = Series._make(nums, F.denominator)
        T = add(base, mul(resid, inverse_one_minus(D, m2), m2))
        m = m2
        steps += 1
    return T.as_polynomial(order), steps


def solve(t: Term, order: int, method: str = "newton") -> SolutionPrefix:
    """Prefix ``t(1..order)`` of the unique solution of ``w = t(w)``.

    ``method="iterate"`` runs plain fixpoint iteration from 0, checking that
    iterates grow monotonically.  The Newton result is always confirmed by an
    exact re-application; on mismatch the solver falls back to iteration.
    """
    if order < 1:
        raise ValueError("order must be positive")
    _check_retro(t)
    if method == "iterate":
        return _iterate(t, order)
    if method != "newton":
        raise ValueError(f"unknown method {method!r}")
    T, steps = _newton(t, order)
    if T.is_dom and apply_operator(t, T, order) == T:
        return SolutionPrefix(T, steps + 1, "newton")
    return _iterate(t, order)
