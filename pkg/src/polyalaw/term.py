"""Operator terms over z and w, the equation DSL, and its pretty-printer.

Grammar (``w =`` prefix optional)::

    equation := "w" "=" expr
    expr     := term { "+" term }
    term     := cfactor { "*" cfactor }
    cfactor  := factor [ "@" cfactor ]
    factor   := base [ "^" INT ] { "/" NUMBER }
    base     := "z" | "w" | NUMBER [ "*" ] [ factor ] | "(" expr ")"
              | OPNAME [ "[" mset "]" | "_" INT ] "(" expr ")"
              | "powsum" "(" NUMBER "," mset "," expr ")"
              | "expm1" "(" expr ")" | "poly" "(" NUMBER { "," NUMBER } ")"
              | "geom" "(" NUMBER ")"
    OPNAME   := "MSet" | "Cycle" | "DCycle" | "Seq"
    mset     := "all" | "odd" | "even" | "primes" | "ap" "(" INT "," INT ")"
              | "{" INT { "," INT } "}"

A NUMBER followed by a factor scales that factor; a bare NUMBER is a
constant.  ``poly(c0, c1, ...)`` lists coefficients from index 0.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .series import Series
from .specset import ALL, EVEN, ODD, PRIMES, SpecSet

__all__ = [
    "Term",
    "Z",
    "W",
    "Const",
    "Scale",
    "Add",
    "Mul",
    "ComposeW",
    "Std",
    "PowSum",
    "ExpM1",
    "Generator",
    "Poly",
    "Geometric",
    "ExpGen",
    "UserList",
    "ParseError",
    "NoConstantPart",
    "parse",
    "pretty_print",
    "split_constant_part",
    "contains_w",
    "valuation",
    "subterms",
    "STD_KINDS",
]

STD_KINDS = ("MSet", "Cycle", "DCycle", "Seq")


# ----------------------------------------------------------------------
# generators


class Generator:
    """A w-free series with a closed-form coefficient rule."""

    radius_class = "polynomial"

    def series(self, order: int) -> Series:
        raise NotImplementedError

    @property
    def integral(self) -> bool:
        raise NotImplementedError

    def witness(self) -> tuple[Fraction, Fraction] | None:
        """``(constant term, R)`` with ``self - c0 ⊴ A_R``, or None."""
        raise NotImplementedError

    def value(self, x: float) -> tuple[float, float]:
        """Value and derivative at real ``x`` (``inf`` outside the disc)."""
        raise NotImplementedError

    @property
    def valuation(self) -> int:
        raise NotImplementedError

    def spectrum_indices(self, horizon: int) -> list[int]:
        s = self.series(horizon)
        return [i for i, x in enumerate(s.numerators) if x]


@dataclass(frozen=True)
class Poly(Generator):
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        if any(c < 0 for c in cs):
            raise ValueError("poly coefficients must be nonnegative")
        if not any(cs):
            raise ValueError("poly needs a nonzero coefficient")
        object.__setattr__(self, "coeffs", cs)

    def series(self, order: int) -> Series:
        return Series(self.coeffs[: order + 1], order, start=0)

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def witness(self):
        return self.coeffs[0], max([Fraction(1)] + list(self.coeffs[1:]))

    def value(self, x):
        v = sum(float(c) * x**i for i, c in enumerate(self.coeffs))
        d = sum(i * float(c) * x ** (i - 1) for i, c in enumerate(self.coeffs) if i)
        return v, d

    @property
    def valuation(self) -> int:
        return next(i for i, c in enumerate(self.coeffs) if c)


@dataclass(frozen=True)
class Geometric(Generator):
    """``A_R(z) = Σ_{n>=1} R^n z^n``."""

    R: Fraction
    radius_class = "divergent"

    def __post_init__(self):
        r = Fraction(self.R)
        if r <= 0:
            raise ValueError("geom(R) needs R > 0")
        object.__setattr__(self, "R", r)

    def series(self, order: int) -> Series:
        return Series([self.R**n for n in range(1, order + 1)], order)

    @property
    def integral(self) -> bool:
        return self.R.denominator == 1

    def witness(self):
        return Fraction(0), self.R

    def value(self, x):
        rx = float(self.R) * x
        if rx >= 1:
            return math.inf, math.inf
        return rx / (1 - rx), float(self.R) / (1 - rx) ** 2

    @property
    def valuation(self) -> int:
        return 1


@dataclass(frozen=True)
class ExpGen(Generator):
    """``e^z - 1``."""

    radius_class = "polynomial"  # entire

    def series(self, order: int) -> Series:
        return Series([Fraction(1, math.factorial(n)) for n in range(1, order + 1)], order)

    @property
    def integral(self) -> bool:
        return False

    def witness(self):
        return Fraction(0), Fraction(1)

    def value(self, x):
        return math.expm1(x), math.exp(x)

    @property
    def valuation(self) -> int:
        return 1


@dataclass(frozen=True)
class UserList(Generator):
    """User-declared constant: known coefficients from index 1, zero beyond.

    ``declared`` is the radius class of the series the user has in mind
    (``polynomial``, ``divergent``, ``convergent`` or ``zero``) and ``bound``
    an optional growth witness R with ``a(n) <= R^n``.
    """

    coeffs: tuple[Fraction, ...]
    declared: str = "polynomial"
    bound: Fraction | None = None

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        if any(c < 0 for c in cs) or not any(cs):
            raise ValueError("user list needs nonnegative coefficients, not all zero")
        if self.declared not in ("polynomial", "divergent", "convergent", "zero"):
            raise ValueError(f"unknown radius class {self.declared!r}")
        object.__setattr__(self, "coeffs", cs)

    @property
    def radius_class(self) -> str:  # type: ignore[override]
        return self.declared

    def series(self, order: int) -> Series:
        return Series(self.coeffs[:order], order)

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def witness(self):
        if self.declared == "polynomial":
            return Fraction(0), max([Fraction(1)] + list(self.coeffs))
        if self.declared == "zero" or self.bound is None:
            return None
        return Fraction(0), Fraction(self.bound)

    def value(self, x):
        v = sum(float(c) * x ** (i + 1) for i, c in enumerate(self.coeffs))
        d = sum((i + 1) * float(c) * x**i for i, c in enumerate(self.coeffs))
        return v, d

    @property
    def valuation(self) -> int:
        return next(i + 1 for i, c in enumerate(self.coeffs) if c)


# ----------------------------------------------------------------------
# terms


class Term:
    """Base class of operator terms."""

    def __add__(self, other: "Term") -> "Term":
        return Add(self, other)

    def __mul__(self, other: "Term") -> "Term":
        return Mul(self, other)

    def __str__(self) -> str:
        return pretty_print(self)


@dataclass(frozen=True)
class _Z(Term):
    pass


@dataclass(frozen=True)
class _W(Term):
    pass


Z = _Z()
W = _W()


@dataclass(frozen=True)
class Const(Term):
    gen: Generator


@dataclass(frozen=True)
class Scale(Term):
    c: Fraction
    t: Term

    def __post_init__(self):
        c = Fraction(self.c)
        if c <= 0:
            raise ValueError("scalars must be strictly positive")
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class ComposeW(Term):
    """``outer`` with its w-slot fed by ``inner``."""

    outer: Term
    inner: Term


@dataclass(frozen=True)
class Std(Term):
    kind: str
    M: SpecSet
    arg: Term

    def __post_init__(self):
        if self.kind not in STD_KINDS:
            raise ValueError(f"unknown standard operator {self.kind!r}")


@dataclass(frozen=True)
class PowSum(Term):
    """``Σ_{n∈M} c^n arg^n``."""

    c: Fraction
    M: SpecSet
    arg: Term

    def __post_init__(self):
        c = Fraction(self.c)
        if c <= 0:
            raise ValueError("powsum base must be strictly positive")
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class ExpM1(Term):
    """``Σ_{n>=1} arg^n / n!``."""

    arg: Term


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, (Add, Mul)):
        return (t.left, t.right)
    if isinstance(t, Scale):
        return (t.t,)
    if isinstance(t, ComposeW):
        return (t.outer, t.inner)
    if isinstance(t, (Std, PowSum, ExpM1)):
        return (t.arg,)
    return ()


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order walk over all nodes."""
    yield t
    for c in children(t):
        yield from subterms(c)


def contains_w(t: Term) -> bool:
    if t is W or isinstance(t, _W):
        return True
    if isinstance(t, ComposeW):
        return contains_w(t.outer) and contains_w(t.inner)
    return any(contains_w(c) for c in children(t))


def valuation(t: Term) -> int:
    """Lower bound for the z-valuation of ``t(T)`` when ``T`` has valuation >= 1."""
    if isinstance(t, (_Z, _W)):
        return 1
    if isinstance(t, Const):
        return t.gen.valuation
    if isinstance(t, Scale):
        return valuation(t.t)
    if isinstance(t, Add):
        return min(valuation(t.left), valuation(t.right))
    if isinstance(t, Mul):
        return valuation(t.left) + valuation(t.right)
    if isinstance(t, (Std, PowSum)):
        return t.M.min * valuation(t.arg)
    if isinstance(t, ExpM1):
        return valuation(t.arg)
    if isinstance(t, ComposeW):
        return valuation(t.outer)
    raise TypeError(f"not a term: {t!r}")


# ----------------------------------------------------------------------
# parser


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class NoConstantPart(ValueError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<number>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9]*)
  | (?P<sym>[+*^()\[\]{},=@_/])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        else:
            for i, ch in enumerate(m.group()):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


def _number(text: str) -> Fraction:
    return Fraction(text)


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("sym", "ident"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            found = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return tok

    def expect_int(self) -> int:
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            raise self.error("expected an integer")
        self.i += 1
        return int(tok.text)

    def expect_number(self, allow_zero: bool = False) -> Fraction:
        tok = self.tok
        if tok.kind != "number":
            raise self.error("expected a number")
        self.i += 1
        v = _number(tok.text)
        if v < 0 or (v == 0 and not allow_zero):
            raise self.error("scalars must be strictly positive", tok)
        return v

    # equation := ["w" "="] expr
    def equation(self) -> Term:
        if self.tok.text == "w" and self.toks[self.i + 1].text == "=":
            self.i += 2
        t = self.expr()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return t

    def expr(self) -> Term:
        t = self.term()
        while self.accept("+"):
            t = Add(t, self.term())
        return t

    def term(self) -> Term:
        t = self.cfactor()
        while self.accept("*"):
            t = Mul(t, self.cfactor())
        return t

    def cfactor(self) -> Term:
        t = self.factor()
        if self.accept("@"):
            inner_tok = self.tok
            inner = self.cfactor()
            _require_dom(inner, self, inner_tok)
            return ComposeW(t, inner)
        return t

    def factor(self) -> Term:
        t = self.base()
        if self.accept("^"):
            k = self.expect_int()
            if k < 1:
                raise self.error("exponent must be a positive integer")
            p = t
            for _ in range(k - 1):
                p = Mul(p, t)
            t = p
        while self.tok.text == "/" and self.tok.kind == "sym":
            self.i += 1
            d = self.expect_number()
            t = Scale(1 / d, t)
        return t

    def _starts_base(self) -> bool:
        tok = self.tok
        if tok.kind == "number":
            return True
        if tok.kind == "sym":
            return tok.text == "("
        return tok.kind == "ident"

    def base(self) -> Term:
        tok = self.tok
        if tok.kind == "number":
            c = self.expect_number()
            if self.accept("*"):
                return Scale(c, self.factor())
            if self._starts_base():
                return Scale(c, self.factor())
            return Const(Poly((c,)))
        if self.accept("("):
            t = self.expr()
            self.expect(")")
            return t
        if tok.kind != "ident":
            raise self.error(f"unexpected {tok.text or 'end of input'!r}")
        name = tok.text
        self.i += 1
        if name == "z":
            return Z
        if name == "w":
            return W
        if name in STD_KINDS:
            M = ALL
            if self.accept("["):
                M = self.mset()
                self.expect("]")
            elif self.accept("_"):
                M = SpecSet.explicit([self.expect_int_positive()])
            self.expect("(")
            arg_tok = self.tok
            arg = self.expr()
            self.expect(")")
            _require_dom(arg, self, arg_tok)
            if M.is_identity:
                return arg
            return Std(name, M, arg)
        if name == "powsum":
            self.expect("(")
            c = self.expect_number()
            self.expect(",")
            M = self.mset()
            self.expect(",")
            arg_tok = self.tok
            arg = self.expr()
            self.expect(")")
            _require_dom(arg, self, arg_tok)
            return PowSum(c, M, arg)
        if name == "expm1":
            self.expect("(")
            arg_tok = self.tok
            arg = self.expr()
            self.expect(")")
            _require_dom(arg, self, arg_tok)
            return ExpM1(arg)
        if name == "poly":
            self.expect("(")
            cs = [self.expect_number(allow_zero=True)]
            while self.accept(","):
                cs.append(self.expect_number(allow_zero=True))
            self.expect(")")
            if not any(cs):
                raise self.error("poly needs a nonzero coefficient", tok)
            return Const(Poly(tuple(cs)))
        if name == "geom":
            self.expect("(")
            r = self.expect_number()
            self.expect(")")
            return Const(Geometric(r))
        raise self.error(f"unknown builtin {name!r}", tok)

    def expect_int_positive(self) -> int:
        tok = self.tok
        k = self.expect_int()
        if k < 1:
            raise self.error("restriction set elements must be positive", tok)
        return k

    def mset(self) -> SpecSet:
        tok = self.tok
        if self.accept("{"):
            if self.tok.text == "}":
                raise self.error("empty restriction set", tok)
            els = [self.expect_int_positive()]
            while self.accept(","):
                els.append(self.expect_int_positive())
            self.expect("}")
            return SpecSet.explicit(els)
        for name, M in (("all", ALL), ("odd", ODD), ("even", EVEN), ("primes", PRIMES)):
            if self.accept(name):
                return M
        if self.accept("ap"):
            self.expect("(")
            a = self.expect_int_positive()
            self.expect(",")
            s = self.expect_int_positive()
            self.expect(")")
            return SpecSet.ap(a, s)
        raise self.error(f"unknown restriction set {tok.text!r}")


def _require_dom(t: Term, p: _Parser, tok: _Tok) -> None:
    if valuation(t) < 1:
        raise p.error("operator argument must have zero constant term", tok)


def parse(text: str) -> Term:
    """Parse an equation ``w = ...`` (or just its right-hand side) into a term."""
    return _Parser(text).equation()


# ----------------------------------------------------------------------
# pretty printer


def _num(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _atom_power(t: Mul) -> int:
    """k when ``t`` is the left-nested product the parser builds for ``z^k`` or ``w^k``."""
    base = t.right
    if not isinstance(base, (_Z, _W)):
        return 0
    k = 1
    while isinstance(t, Mul) and type(t.right) is type(base):
        k += 1
        t = t.left
    return k if type(t) is type(base) else 0


def _pp(t: Term, level: int) -> str:
    # levels: 0 expr, 1 term, 2 cfactor, 3 atom
    if isinstance(t, _Z):
        return "z"
    if isinstance(t, _W):
        return "w"
    if isinstance(t, Add):
        s = f"{_pp(t.left, 0)} + {_pp(t.right, 1)}"
        return f"({s})" if level > 0 else s
    if isinstance(t, Mul):
        k = _atom_power(t)
        if k:
            return f"{_pp(t.right, 3)}^{k}"
        s = f"{_pp(t.left, 1)}*{_pp(t.right, 2)}"
        return f"({s})" if level > 1 else s
    if isinstance(t, Scale):
        s = f"{_num(t.c)}*{_pp(t.t, 3)}"
        return f"({s})" if level > 2 else s
    if isinstance(t, ComposeW):
        s = f"{_pp(t.outer, 3)}@{_pp(t.inner, 2)}"
        return f"({s})" if level > 2 else s
    if isinstance(t, Std):
        m = "" if t.M.kind == "all" else f"[{t.M}]"
        return f"{t.kind}{m}({_pp(t.arg, 0)})"
    if isinstance(t, PowSum):
        return f"powsum({_num(t.c)}, {t.M}, {_pp(t.arg, 0)})"
    if isinstance(t, ExpM1):
        return f"expm1({_pp(t.arg, 0)})"
    if isinstance(t, Const):
        g = t.gen
        if isinstance(g, Poly):
            return "poly(" + ", ".join(_num(c) for c in g.coeffs) + ")"
        if isinstance(g, Geometric):
            return f"geom({_num(g.R)})"
        if isinstance(g, ExpGen):
            return "expm1(z)"
        if isinstance(g, UserList):
            return "poly(0, " + ", ".join(_num(c) for c in g.coeffs) + ")"
    raise TypeError(f"cannot print {t!r}")


def pretty_print(t: Term) -> str:
    return _pp(t, 0)


# ----------------------------------------------------------------------
# constant part


def _summands(t: Term) -> list[Term]:
    if isinstance(t, Add):
        return _summands(t.left) + _summands(t.right)
    return [t]


def _expand(t: Term) -> list[Term]:
    """Distribute top-level products and scalings over sums."""
    if isinstance(t, Add):
        return _expand(t.left) + _expand(t.right)
    if isinstance(t, Mul):
        return [Mul(a, b) for a in _expand(t.left) for b in _expand(t.right)]
    if isinstance(t, Scale):
        return [Scale(t.c, a) for a in _expand(t.t)]
    return [t]


def _resum(parts: list[Term]) -> Term:
    out = parts[0]
    for p in parts[1:]:
        out = Add(out, p)
    return out


def split_constant_part(t: Term) -> tuple[Term, Term | None]:
    """Split ``t`` as ``A(z) + Θ1(w)`` with ``A`` the w-free summands.

    Summands are taken from the flattened top-level sum.  A summand that
    mentions w is distributed over inner sums only when that exposes a
    w-free piece, as in ``z/2 * (1 + MSet_2(w))``.  ``Θ1`` is None when no
    summand mentions w.
    """
    free: list[Term] = []
    bound: list[Term] = []
    for s in _summands(t):
        if not contains_w(s):
            free.append(s)
            continue
        pieces = _expand(s)
        if any(not contains_w(p) for p in pieces):
            free.extend(p for p in pieces if not contains_w(p))
            bound.extend(p for p in pieces if contains_w(p))
        else:
            bound.append(s)
    if not free:
        raise NoConstantPart("every summand mentions w")
    return _resum(free), (_resum(bound) if bound else None)
