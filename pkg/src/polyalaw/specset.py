"""Restriction sets M for the standard operators, and finite spectrum prefixes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable

__all__ = [
    "SpecSet",
    "ALL",
    "ODD",
    "EVEN",
    "PRIMES",
    "member",
    "SpectrumPrefix",
    "sum_shift",
    "odot",
    "gcd_of",
    "is_prime",
    "totient",
]

_SIEVE_LIMIT = 10**6
_sieve: bytearray | None = None
_sieve_size = 0


def _ensure_sieve(n: int) -> None:
    global _sieve, _sieve_size
    if n < _sieve_size:
        return
    size = min(max(2 * n + 1, 1 << 12), _SIEVE_LIMIT + 1)
    s = bytearray([1]) * size
    s[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(size - 1) + 1):
        if s[p]:
            s[p * p :: p] = bytearray(len(range(p * p, size, p)))
    _sieve, _sieve_size = s, size


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= _SIEVE_LIMIT:
        _ensure_sieve(n)
        return bool(_sieve[n])
    if n % 2 == 0:
        return False
    for p in range(3, math.isqrt(n) + 1, 2):
        if n % p == 0:
            return False
    return True


def totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


_BUILTINS = {"all", "odd", "even", "primes"}


@dataclass(frozen=True)
class SpecSet:
    """A nonempty set of positive integers in one of a few finite descriptions.

    ``kind`` is one of ``explicit``, ``ap`` (first, first+step, ...),
    ``union`` or a builtin tag (``all``, ``odd``, ``even``, ``primes``).
    """

    kind: str
    elements: tuple[int, ...] = ()
    first: int = 0
    step: int = 0
    parts: tuple["SpecSet", ...] = field(default=())

    def __post_init__(self):
        if self.kind == "explicit":
            if not self.elements:
                raise ValueError("restriction set must be nonempty")
            if any(e < 1 for e in self.elements):
                raise ValueError("restriction set elements must be positive")
            if list(self.elements) != sorted(set(self.elements)):
                object.__setattr__(self, "elements", tuple(sorted(set(self.elements))))
        elif self.kind == "ap":
            if self.first < 1 or self.step < 1:
                raise ValueError("ap(first, step) needs first >= 1 and step >= 1")
        elif self.kind == "union":
            if not self.parts:
                raise ValueError("restriction set must be nonempty")
        elif self.kind not in _BUILTINS:
            raise ValueError(f"unknown restriction set kind {self.kind!r}")

    # --- constructors ---------------------------------------------------

    @classmethod
    def explicit(cls, elements: Iterable[int]) -> "SpecSet":
        return cls("explicit", tuple(sorted(set(int(e) for e in elements))))

    @classmethod
    def ap(cls, first: int, step: int) -> "SpecSet":
        return cls("ap", first=first, step=step)

    @classmethod
    def union(cls, *parts: "SpecSet") -> "SpecSet":
        return cls("union", parts=tuple(parts))

    # --- membership -----------------------------------------------------

    def __contains__(self, m: int) -> bool:
        return member(self, m)

    def members(self, limit: int) -> list[int]:
        """Sorted members ``<= limit``."""
        if self.kind == "explicit":
            return [e for e in self.elements if e <= limit]
        if self.kind == "all":
            return list(range(1, limit + 1))
        if self.kind == "odd":
            return list(range(1, limit + 1, 2))
        if self.kind == "even":
            return list(range(2, limit + 1, 2))
        if self.kind == "ap":
            return list(range(self.first, limit + 1, self.step))
        if self.kind == "primes":
            if limit >= 2:
                _ensure_sieve(min(limit, _SIEVE_LIMIT))
            return [n for n in range(2, limit + 1) if is_prime(n)]
        out: set[int] = set()
        for p in self.parts:
            out.update(p.members(limit))
        return sorted(out)

    # --- cached attributes ---------------------------------------------

    @property
    def is_finite(self) -> bool:
        if self.kind == "explicit":
            return True
        if self.kind == "union":
            return all(p.is_finite for p in self.parts)
        return False

    @property
    def min(self) -> int:
        if self.kind == "explicit":
            return self.elements[0]
        if self.kind in ("all", "odd"):
            return 1
        if self.kind in ("even", "primes"):
            return 2
        if self.kind == "ap":
            return self.first
        return min(p.min for p in self.parts)

    @property
    def max(self) -> int | None:
        """Largest element, ``None`` when infinite."""
        if not self.is_finite:
            return None
        if self.kind == "explicit":
            return self.elements[-1]
        return max(p.max for p in self.parts)

    @property
    def gcd(self) -> int:
        if self.kind == "explicit":
            return reduce(math.gcd, self.elements)
        if self.kind in ("all", "odd", "primes"):
            return 1
        if self.kind == "even":
            return 2
        if self.kind == "ap":
            return math.gcd(self.first, self.step)
        return reduce(math.gcd, (p.gcd for p in self.parts))

    @property
    def harmonic_divergent(self) -> bool:
        """Whether the sum of 1/m over the set diverges."""
        if self.kind == "explicit":
            return False
        if self.kind == "union":
            return any(p.harmonic_divergent for p in self.parts)
        return True

    @property
    def is_all(self) -> bool:
        return self.kind == "all" or (self.kind == "ap" and self.first == 1 and self.step == 1)

    @property
    def is_identity(self) -> bool:
        return self.kind == "explicit" and self.elements == (1,)

    def progressions(self) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...], bool]:
        """Split into (finite elements, arithmetic progressions (a, s), has-primes)."""
        if self.kind == "explicit":
            return self.elements, (), False
        if self.kind == "all":
            return (), ((1, 1),), False
        if self.kind == "odd":
            return (), ((1, 2),), False
        if self.kind == "even":
            return (), ((2, 2),), False
        if self.kind == "ap":
            return (), ((self.first, self.step),), False
        if self.kind == "primes":
            return (), (), True
        fin: set[int] = set()
        aps: list[tuple[int, int]] = []
        primes = False
        for p in self.parts:
            f, a, pr = p.progressions()
            fin.update(f)
            aps.extend(a)
            primes = primes or pr
        return tuple(sorted(fin)), tuple(aps), primes

    def __str__(self) -> str:
        if self.kind == "explicit":
            return "{" + ",".join(str(e) for e in self.elements) + "}"
        if self.kind == "ap":
            return f"ap({self.first},{self.step})"
        if self.kind == "union":
            return "union(" + ",".join(str(p) for p in self.parts) + ")"
        return self.kind


ALL = SpecSet("all")
ODD = SpecSet("odd")
EVEN = SpecSet("even")
PRIMES = SpecSet("primes")


def member(M: SpecSet, m: int) -> bool:
    if m < 1:
        return False
    k = M.kind
    if k == "explicit":
        return m in M.elements
    if k == "all":
        return True
    if k == "odd":
        return m % 2 == 1
    if k == "even":
        return m % 2 == 0
    if k == "ap":
        return m >= M.first and (m - M.first) % M.step == 0
    if k == "primes":
        return is_prime(m)
    return any(member(p, m) for p in M.parts)


@dataclass(frozen=True)
class SpectrumPrefix:
    """Index set ``{n <= horizon : a(n) != 0}`` as a bitmask (bit n set iff n is in)."""

    bits: int
    horizon: int

    @classmethod
    def from_indices(cls, indices: Iterable[int], horizon: int) -> "SpectrumPrefix":
        b = 0
        for i in indices:
            if 0 <= i <= horizon:
                b |= 1 << i
        return cls(b, horizon)

    @classmethod
    def from_series(cls, series) -> "SpectrumPrefix":
        return cls.from_indices((i for i, x in enumerate(series.numerators) if x), series.order)

    @property
    def elements(self) -> list[int]:
        out, b, i = [], self.bits, 0
        while b:
            if b & 1:
                out.append(i)
            b >>= 1
            i += 1
        return out

    @property
    def min(self) -> int | None:
        if not self.bits:
            return None
        return (self.bits & -self.bits).bit_length() - 1

    def __contains__(self, n: int) -> bool:
        return n >= 0 and bool(self.bits >> n & 1)

    def __or__(self, other: "SpectrumPrefix") -> "SpectrumPrefix":
        return SpectrumPrefix(self.bits | other.bits, min(self.horizon, other.horizon))

    def __len__(self) -> int:
        return bin(self.bits).count("1")


def _mask(h: int) -> int:
    return (1 << (h + 1)) - 1


def sum_shift(I: SpectrumPrefix, J: SpectrumPrefix) -> SpectrumPrefix:
    """Sumset ``{i + j}`` truncated to the common horizon."""
    h = min(I.horizon, J.horizon)
    m = _mask(h)
    out = 0
    for i in I.elements:
        if i > h:
            break
        out |= (J.bits << i) & m
    return SpectrumPrefix(out, h)


def odot(m: int, J: SpectrumPrefix) -> SpectrumPrefix:
    """m-fold sumset of J; ``0 ⊙ J = {0}``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    acc = SpectrumPrefix(1, J.horizon)
    for _ in range(m):
        acc = sum_shift(acc, J)
    return acc


def gcd_of(J: SpectrumPrefix, shift: int = 0) -> int:
    """gcd of ``{j - shift : j in J}``; 0 for an empty prefix or ``{shift}``."""
    g = 0
    for j in J.elements:
        g = math.gcd(g, j - shift)
    return g
