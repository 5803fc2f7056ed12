"""Exact truncated power series with nonnegative rational coefficients.

A :class:`Series` stores coefficients ``a(0..N)`` as integer numerators over
one common denominator.  Multiplication packs the numerators into a single
big integer (Kronecker substitution) so that long products run at GMP speed.

Solutions and operator inputs live in DOM[z] (constant term zero).  A constant
term is still representable because constant generators such as ``poly(1)``
and closed forms like ``1/(1-u)`` need it; :attr:`Series.is_dom` reports it.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

try:
    import gmpy2

    _mpz = gmpy2.mpz
    _mpq = gmpy2.mpq
except ImportError:  # pragma: no cover
    _mpz = int
    _mpq = Fraction

__all__ = [
    "Series",
    "add",
    "mul",
    "scale",
    "compose",
    "substitute_power",
    "derivative",
    "eval_real",
    "power_sum",
    "inverse_one_minus",
    "exp_series",
]

# below this many coefficient products schoolbook beats packing
_SCHOOLBOOK_LIMIT = 600


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        return Fraction(repr(c))
    return Fraction(c)


def _normalize(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    g = math.gcd(den, *nums)
    if g > 1:
        return tuple(x // g for x in nums), den // g
    return tuple(nums), den


def _valuation(nums: Sequence[int]) -> int | None:
    for i, x in enumerate(nums):
        if x:
            return i
    return None


def _schoolbook(a: Sequence[int], b: Sequence[int], length: int) -> list[int]:
    out = [0] * length
    for i, x in enumerate(a):
        if not x:
            continue
        top = min(len(b), length - i)
        for j in range(top):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def _kmul(a: Sequence[int], b: Sequence[int], length: int) -> list[int]:
    """Product of two nonnegative integer coefficient lists, first ``length`` terms."""
    va, vb = _valuation(a), _valuation(b)
    if va is None or vb is None or va + vb >= length:
        return [0] * length
    room = length - va - vb
    a2 = list(a[va : va + room])
    b2 = list(b[vb : vb + room])
    while a2 and not a2[-1]:
        a2.pop()
    while b2 and not b2[-1]:
        b2.pop()
    need = min(room, len(a2) + len(b2) - 1)
    if len(a2) * len(b2) <= _SCHOOLBOOK_LIMIT or min(len(a2), len(b2)) < 4:
        core = _schoolbook(a2, b2, need)
    else:
        bits = max(a2).bit_length() + max(b2).bit_length() + min(len(a2), len(b2)).bit_length() + 1
        w = (bits + 3) // 4
        fmt = "0%dx" % w
        pa = _mpz("".join(format(x, fmt) for x in reversed(a2)), 16)
        pb = _mpz("".join(format(x, fmt) for x in reversed(b2)), 16)
        prod = pa * pb
        s = prod.digits(16) if hasattr(prod, "digits") else format(prod, "x")
        total = len(a2) + len(b2) - 1
        s = s.rjust(total * w, "0")
        end = len(s)
        core = [int(s[end - (i + 1) * w : end - i * w], 16) for i in range(need)]
    out = [0] * (va + vb) + core
    out.extend([0] * (length - len(out)))
    return out


class Series:
    """Truncated power series ``a(0) + a(1) z + ... + a(N) z^N`` (mod z^(N+1)).

    ``coeffs`` lists the coefficients starting at index ``start`` (1 by
    default, the DOM convention); ``order`` is the truncation order N and
    defaults to the last listed index.  Coefficients must be nonnegative.
    """

    __slots__ = ("_num", "_den", "_logc")

    def __init__(self, coeffs: Iterable = (), order: int | None = None, *, start: int = 1):
        if start not in (0, 1):
            raise ValueError("start must be 0 or 1")
        fr = [_as_fraction(c) for c in coeffs]
        if order is None:
            order = start + len(fr) - 1
            if order < 0:
                order = 0
        if order < 0:
            raise ValueError("order must be nonnegative")
        if start + len(fr) - 1 > order:
            raise ValueError(f"{len(fr)} coefficients do not fit below order {order}")
        for i, c in enumerate(fr):
            if c < 0:
                raise ValueError(f"negative coefficient {c} at index {i + start}")
        den = math.lcm(*(c.denominator for c in fr)) if fr else 1
        nums = [0] * (order + 1)
        for i, c in enumerate(fr):
            nums[i + start] = c.numerator * (den // c.denominator)
        self._num, self._den = _normalize(nums, den)
        self._logc = None

    @classmethod
    def _make(cls, nums: Sequence[int], den: int = 1) -> "Series":
        obj = cls.__new__(cls)
        obj._num, obj._den = _normalize(list(nums), den)
        obj._logc = None
        return obj

    # --- constructors -------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "Series":
        return cls._make([0] * (order + 1))

    @classmethod
    def one(cls, order: int) -> "Series":
        return cls._make([1] + [0] * order)

    @classmethod
    def variable(cls, order: int) -> "Series":
        nums = [0] * (order + 1)
        if order >= 1:
            nums[1] = 1
        return cls._make(nums)

    @classmethod
    def monomial(cls, k: int, order: int, coeff=1) -> "Series":
        c = _as_fraction(coeff)
        nums = [0] * (order + 1)
        if k <= order:
            nums[k] = c.numerator
        return cls._make(nums, c.denominator)

    # --- access -------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._num) - 1

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    def __getitem__(self, n: int) -> Fraction:
        if n < 0 or n > self.order:
            raise IndexError(f"index {n} outside 0..{self.order}")
        return Fraction(self._num[n], self._den)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        """Coefficients a(1..N)."""
        return tuple(Fraction(x, self._den) for x in self._num[1:])

    def all_coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self._den) for x in self._num)

    @property
    def constant(self) -> Fraction:
        return Fraction(self._num[0], self._den)

    @property
    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, ``None`` for the zero series."""
        return _valuation(self._num)

    @property
    def is_dom(self) -> bool:
        return self._num[0] == 0

    @property
    def is_integral(self) -> bool:
        return self._den == 1

    def is_zero(self) -> bool:
        return not any(self._num)

    def integers(self) -> list[int]:
        if self._den != 1:
            raise ValueError("series has non-integer coefficients")
        return list(self._num[1:])

    # --- structural ---------------------------------------------------

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order}")
        return Series._make(self._num[: order + 1], self._den)

    def as_polynomial(self, order: int) -> "Series":
        """Treat the prefix as an exact polynomial and re-truncate at ``order``."""
        nums = list(self._num[: order + 1])
        nums.extend([0] * (order + 1 - len(nums)))
        return Series._make(nums, self._den)

    def drop_constant(self) -> "Series":
        return Series._make((0,) + self._num[1:], self._den)

    def dominated_by(self, other: "Series") -> bool:
        """``self ⊴ other`` coefficientwise on the common order."""
        n = min(self.order, other.order)
        a, da, b, db = self._num, self._den, other._num, other._den
        return all(a[i] * db <= b[i] * da for i in range(n + 1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self) -> int:
        return hash((self._num, self._den))

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.all_coeffs()[:10])
        more = ", ..." if self.order >= 10 else ""
        return f"Series([{head}{more}], order={self.order})"

    # --- arithmetic ---------------------------------------------------

    def __add__(self, other: "Series") -> "Series":
        return add(self, other)

    def __mul__(self, other):
        if isinstance(other, Series):
            return mul(self, other)
        return scale(other, self)

    def __rmul__(self, other):
        return scale(other, self)

    def __call__(self, inner: "Series") -> "Series":
        return compose(self, inner)

    # --- numerics -----------------------------------------------------

    def log_coeffs(self) -> np.ndarray:
        """Natural logs of the coefficients (``-inf`` for zeros); safe for huge values."""
        if self._logc is None:
            ld = math.log(self._den)
            self._logc = np.array(
                [math.log(x) - ld if x else -math.inf for x in self._num], dtype=float
            )
        return self._logc

    def to_floats(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_coeffs())


# ----------------------------------------------------------------------
# arithmetic operations


def add(a: Series, b: Series) -> Series:
    n = min(a.order, b.order)
    da, db = a._den, b._den
    if da == db:
        return Series._make([x + y for x, y in zip(a._num[: n + 1], b._num[: n + 1])], da)
    l = math.lcm(da, db)
    fa, fb = l // da, l // db
    return Series._make([x * fa + y * fb for x, y in zip(a._num[: n + 1], b._num[: n + 1])], l)


def mul(a: Series, b: Series, order: int | None = None) -> Series:
    n = min(a.order, b.order) if order is None else order
    return Series._make(_kmul(a._num, b._num, n + 1), a._den * b._den)


def scale(c, a: Series) -> Series:
    c = _as_fraction(c)
    if c < 0:
        raise ValueError("scalar must be nonnegative")
    return Series._make([x * c.numerator for x in a._num], a._den * c.denominator)


def power(u: Series, k: int, order: int | None = None) -> Series:
    n = u.order if order is None else order
    result = Series.one(n)
    base = u if u.order == n else u.as_polynomial(n)
    while k:
        if k & 1:
            result = mul(result, base, n)
        k >>= 1
        if k:
            base = mul(base, base, n)
    return result


def inverse_one_minus(u: Series, order: int | None = None) -> Series:
    """``1/(1-u)`` for ``u`` with zero constant term.

    Newton doubling; every intermediate stays nonnegative because the residual
    of a truncated inverse is ``u·v`` above the truncation point.
    """
    if not u.is_dom:
        raise ValueError("inverse_one_minus needs a zero constant term")
    n = u.order if order is None else order
    v = Series.one(0)
    m = 0
    while m < n:
        m2 = min(2 * m + 1, n)
        uv = mul(u.as_polynomial(m2), v.as_polynomial(m2), m2)
        nums = list(uv._num)
        for i in range(m + 1):
            nums[i] = 0
        e = Series._make(nums, uv._den)
        v = add(v.as_polynomial(m2), mul(v.as_polynomial(m2), e, m2))
        m = m2
    return v.as_polynomial(n)


def exp_series(f: Series, order: int | None = None) -> Series:
    """``exp(f)`` for ``f`` with zero constant term (result has constant term 1)."""
    if not f.is_dom:
        raise ValueError("exp_series needs a zero constant term")
    n = f.order if order is None else min(order, f.order)
    g = [Fraction(k * f._num[k], f._den) for k in range(n + 1)]
    nz = [k for k in range(1, n + 1) if g[k]]
    if all(g[k].denominator == 1 for k in nz):
        gi = [int(x) for x in g]
        e = [1] + [0] * n
        ok = True
        for m in range(1, n + 1):
            s = 0
            for k in nz:
                if k > m:
                    break
                s += gi[k] * e[m - k]
            q, r = divmod(s, m)
            if r:
                ok = False
                break
            e[m] = q
        if ok:
            return Series._make(e, 1)
    return Series(_exp_relaxed([k * x for k, x in enumerate(f._num[: n + 1])], f._den, n), n, start=0)


_RELAXED_BLOCK = 16


def _exp_relaxed(gn: list[int], den: int, n: int) -> list[Fraction]:
    """Coefficients of ``exp(f)`` from ``g = z·f' = gn/den`` by divide and conquer.

    The left half of every block is pushed into the right half with one
    Kronecker product, so the cost is O(M(n) log n) instead of n² rational
    additions.  All block products are nonnegative.
    """
    e = [_mpq(0)] * (n + 1)
    acc = [_mpq(0)] * (n + 1)
    e[0] = _mpq(1)

    def rec(lo: int, hi: int) -> None:
        if hi - lo <= _RELAXED_BLOCK:
            for m in range(max(lo, 1), hi):
                s = acc[m]
                for j in range(lo, m):
                    if gn[m - j]:
                        s += e[j] * gn[m - j] / den
                e[m] = s / m
            return
        mid = (lo + hi) // 2
        rec(lo, mid)
        block = e[lo:mid]
        de = 1
        for x in block:
            de = math.lcm(de, int(x.denominator))
        en = [int(x.numerator) * (de // int(x.denominator)) for x in block]
        prod = _kmul(en, gn[1 : hi - lo], hi - lo - 1)
        scale_den = de * den
        for m in range(mid, hi):
            c = prod[m - lo - 1]
            if c:
                acc[m] += _mpq(c, scale_den)
        rec(mid, hi)

    rec(0, n + 1)
    return [Fraction(int(x.numerator), int(x.denominator)) for x in e]


def _linear_combination(parts: Sequence[tuple[Fraction, Series]], order: int) -> Series:
    """Σ c·s over nonnegative rationals ``c``; all series already at ``order``."""
    parts = [(c, s) for c, s in parts if c]
    if not parts:
        return Series.zero(order)
    l = 1
    for c, s in parts:
        l = math.lcm(l, c.denominator * s._den)
    acc = [0] * (order + 1)
    for c, s in parts:
        f = c.numerator * (l // (c.denominator * s._den))
        for i, x in enumerate(s._num[: order + 1]):
            if x:
                acc[i] += f * x
    return Series._make(acc, l)


def _geometric_progression(exps: list[int], ws: list[Fraction], bound: int):
    """Detect ``exps = a, a+s, ..., (all up to bound)`` with geometric weights."""
    if len(exps) < 3:
        return None
    a, s = exps[0], exps[1] - exps[0]
    if s <= 0 or exps != list(range(a, bound + 1, s)) or exps[-1] + s <= bound:
        return None
    if ws[0] == 0:
        return None
    r = ws[1] / ws[0]
    for i in range(1, len(ws)):
        if ws[i] != ws[i - 1] * r:
            return None
    return a, s, ws[0], r


def power_sum(u: Series, weights: Mapping[int, Fraction], order: int | None = None) -> Series:
    """``Σ_e weights[e]·u^e`` truncated at ``order`` (``u`` must lie in DOM[z]).

    Arithmetic progressions with geometric weights use the closed form
    ``c·u^a/(1 - r·u^s)``; everything else goes through baby-step giant-step
    evaluation, which needs about ``2·sqrt(max exponent)`` products.
    """
    if not u.is_dom:
        raise ValueError("power_sum needs a zero constant term")
    n = u.order if order is None else order
    if u.order < n:
        raise ValueError(f"u has order {u.order} < {n}")
    u = u.truncate(n)
    v = u.valuation
    items = sorted((e, _as_fraction(w)) for e, w in weights.items() if w)
    if v is None:
        bound = 0
    else:
        bound = n // v
    items = [(e, w) for e, w in items if e <= bound]
    if not items:
        return Series.zero(n)
    exps = [e for e, _ in items]
    ws = [w for _, w in items]
    if v is not None:
        gp = _geometric_progression(exps, ws, bound)
        if gp is not None:
            a, s, c, r = gp
            head = scale(c, power(u, a, n))
            tail = inverse_one_minus(scale(r, power(u, s, n)), n)
            return mul(head, tail, n)
    top = exps[-1]
    b = max(1, math.isqrt(top + 1))
    baby = [Series.one(n)]
    for _ in range(1, b):
        baby.append(mul(baby[-1], u, n))
    giant = mul(baby[-1], u, n) if b > 1 else u
    wmap = dict(items)
    chunks = []
    for i in range(top // b + 1):
        parts = [(wmap.get(i * b + j, Fraction(0)), baby[j]) for j in range(b)]
        chunks.append(_linear_combination(parts, n))
    result = chunks[-1]
    for i in range(len(chunks) - 2, -1, -1):
        result = add(mul(result, giant, n), chunks[i])
    return result


def compose(a: Series, b: Series) -> Series:
    """``a(b(z))`` truncated at the smaller order; ``b`` needs a zero constant term."""
    if not b.is_dom:
        raise ValueError("inner series of a composition must have zero constant term")
    n = min(a.order, b.order)
    weights = {i: a[i] for i in range(a.order + 1) if a._num[i]}
    return power_sum(b.truncate(n), weights, n)


def substitute_power(a: Series, k: int, order: int | None = None) -> Series:
    """``a(z^k)``.  ``order`` may exceed ``a.order`` up to ``k·(a.order+1) - 1``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    n = a.order if order is None else order
    if n > k * (a.order + 1) - 1:
        raise ValueError(f"a(z^{k}) is only known below index {k * (a.order + 1)}")
    nums = [0] * (n + 1)
    for i in range(0, n // k + 1):
        nums[i * k] = a._num[i]
    return Series._make(nums, a._den)


def derivative(a: Series) -> tuple[Fraction, ...]:
    """Raw coefficients of ``a'(z)`` at indices ``0..N-1`` (not a DOM series)."""
    return tuple(Fraction(n * a._num[n], a._den) for n in range(1, a.order + 1))


def _growth_ratio(logc: np.ndarray, lo: int, hi: int) -> tuple[int, float] | None:
    idx = [i for i in range(lo, hi + 1) if np.isfinite(logc[i])]
    if not idx:
        return None
    last = idx[-1]
    if len(idx) >= 2:
        first = idx[0]
        return last, math.exp((logc[last] - logc[first]) / (last - first))
    prev = [i for i in range(1, lo) if np.isfinite(logc[i])]
    if prev:
        return last, math.exp((logc[last] - logc[prev[-1]]) / (last - prev[-1]))
    return None  # a lone monomial carries no growth evidence; treat it as a polynomial


def eval_real(a: Series, x: float, tail_ratio_hint: float | None = None) -> tuple[float, float]:
    """Value of the prefix at real ``x >= 0`` plus a geometric tail estimate.

    The tail estimate extrapolates the last nonzero coefficient with a growth
    ratio read off the final quarter of the prefix, inflated by 1.25.  An
    infinite bound means the prefix cannot certify convergence at ``x``.
    A prefix with a single nonzero coefficient counts as a polynomial.
    """
    if x < 0:
        raise ValueError("eval_real needs x >= 0")
    logc = a.log_coeffs()
    n = a.order
    if x == 0:
        return float(a[0]), 0.0
    lx = math.log(x)
    with np.errstate(over="ignore"):
        terms = np.exp(logc + lx * np.arange(n + 1))
    value = math.fsum(terms.tolist())
    lo = max(1, n - (n + 3) // 4 + 1)
    if tail_ratio_hint is not None:
        found = _growth_ratio(logc, lo, n)
        if found is None:
            return value, 0.0
        last, r = found[0], float(tail_ratio_hint)
    else:
        found = _growth_ratio(logc, lo, n)
        if found is None:
            return value, 0.0
        last, r = found[0], 1.25 * found[1]
    rx = r * x
    if rx >= 1 or not math.isfinite(value):
        return value, math.inf
    with np.errstate(over="ignore"):
        lead = math.exp(min(logc[last] + last * lx, 700.0))
    tail = lead * rx ** (n + 1 - last) / (1 - rx)
    return value, tail
