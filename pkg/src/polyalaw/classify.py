"""Static certification of recursion equations ``w = A(z) + Θ1(w)``.

Every check reads the term syntactically: linearity, retro-ness (through a
lag/valuation calculus), a boundedness witness ``R`` with
``Θ(T) ⊴ A_R(z + T)``, and membership in the operator classes O_E / O_I.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .term import (
    Add,
    ComposeW,
    Const,
    ExpM1,
    Mul,
    NoConstantPart,
    PowSum,
    Scale,
    Std,
    Term,
    _W,
    _Z,
    pretty_print,
    split_constant_part,
    subterms,
    valuation,
)

__all__ = [
    "Retro",
    "Membership",
    "Classification",
    "Check",
    "Certificate",
    "check_nonlinear",
    "check_retro",
    "check_bounded",
    "check_membership",
    "classify",
    "certify",
    "lag",
    "w_degree",
]

INF = math.inf


class Retro(enum.Enum):
    RETRO = "Retro"
    WEAKLY_RETRO = "WeaklyRetro"


def w_degree(t: Term) -> int:
    """0 if w-free, 1 if affine in w, 2 if nonlinear."""
    if isinstance(t, _W):
        return 1
    if isinstance(t, (_Z, Const)):
        return 0
    if isinstance(t, Scale):
        return w_degree(t.t)
    if isinstance(t, Add):
        return max(w_degree(t.left), w_degree(t.right))
    if isinstance(t, Mul):
        a, b = w_degree(t.left), w_degree(t.right)
        return 2 if a and b else max(a, b)
    if isinstance(t, Std):
        return 2 if w_degree(t.arg) else 0
    if isinstance(t, PowSum):
        d = w_degree(t.arg)
        if not d:
            return 0
        return d if t.M.is_identity else 2
    if isinstance(t, ExpM1):
        return 2 if w_degree(t.arg) else 0
    if isinstance(t, ComposeW):
        o, i = w_degree(t.outer), w_degree(t.inner)
        if not o or not i:
            return 0
        return 2 if o == 2 or i == 2 else 1
    raise TypeError(f"not a term: {t!r}")


def check_nonlinear(t: Term) -> bool:
    """Nonlinear iff some nonlinear operator has w below it, or some product
    has w below both factors."""
    return w_degree(t) == 2


def lag(t: Term) -> float:
    """Largest s such that output coefficient n reads input coefficients <= n - s.

    ``inf`` for w-free terms.  Composite operators always have lag >= 0.
    """
    if isinstance(t, _W):
        return 0
    if isinstance(t, (_Z, Const)):
        return INF
    if isinstance(t, Scale):
        return lag(t.t)
    if isinstance(t, Add):
        return min(lag(t.left), lag(t.right))
    if isinstance(t, Mul):
        return min(lag(t.left) + valuation(t.right), lag(t.right) + valuation(t.left))
    if isinstance(t, (Std, PowSum)):
        return lag(t.arg) + (t.M.min - 1) * valuation(t.arg)
    if isinstance(t, ExpM1):
        return lag(t.arg)
    if isinstance(t, ComposeW):
        return lag(t.outer) + lag(t.inner)
    raise TypeError(f"not a term: {t!r}")


def check_retro(t: Term) -> Retro:
    return Retro.RETRO if lag(t) >= 1 else Retro.WEAKLY_RETRO


def _witness(t: Term) -> tuple[Fraction, Fraction] | None:
    """(constant term bound c0, R) with ``t(T) ⊴ c0 + A_R(z + T)``."""
    if isinstance(t, (_Z, _W)):
        return Fraction(0), Fraction(1)
    if isinstance(t, Const):
        return t.gen.witness()
    if isinstance(t, Scale):
        w = _witness(t.t)
        if w is None:
            return None
        return t.c * w[0], (t.c + 1) * w[1]
    if isinstance(t, Add):
        a, b = _witness(t.left), _witness(t.right)
        if a is None or b is None:
            return None
        return a[0] + b[0], a[1] + b[1]
    if isinstance(t, Mul):
        a, b = _witness(t.left), _witness(t.right)
        if a is None or b is None:
            return None
        (c0, r1), (d0, r2) = a, b
        r = r1 + r2
        if c0:
            r += (c0 + 1) * r2
        if d0:
            r += (d0 + 1) * r1
        return c0 * d0, r
    if isinstance(t, (Std, PowSum, ExpM1)):
        base = t.c if isinstance(t, PowSum) else Fraction(1)
        if isinstance(t.arg, _W):
            return Fraction(0), base
        w = _witness(t.arg)
        if w is None:
            return None
        return Fraction(0), 2 * (1 + base + w[1]) ** 2
    if isinstance(t, ComposeW):
        o, i = _witness(t.outer), _witness(t.inner)
        if o is None or i is None:
            return None
        return o[0], 2 * (1 + o[1] + i[1]) ** 2
    raise TypeError(f"not a term: {t!r}")


def check_bounded(t: Term) -> Fraction | None:
    """Witness R with ``Θ(T) ⊴ A_R(z + T)``, or None when none can be derived."""
    w = _witness(t)
    if w is None or w[0] != 0:
        return None
    return w[1]


@dataclass(frozen=True)
class Membership:
    kind: str  # "OE", "OI" or "neither"
    reason: str = ""

    def __str__(self) -> str:
        if self.kind == "neither":
            return f"InONeither({self.reason})"
        return f"In{self.kind}"


def _node_label(t: Term) -> str:
    try:
        return pretty_print(t)
    except TypeError:
        return type(t).__name__


def _integrality_failure(t: Term) -> str | None:
    if isinstance(t, Scale) and t.c.denominator != 1:
        return f"non-integral scalar {t.c}"
    if isinstance(t, PowSum) and t.c.denominator != 1:
        return f"non-integral powsum base {t.c}"
    if isinstance(t, ExpM1):
        return f"non-integral builtin {_node_label(t)}"
    if isinstance(t, Const) and not t.gen.integral:
        return f"non-integral constant {_node_label(t)}"
    return None


def check_membership(t: Term) -> Membership:
    """Decide whether ``t`` lies in O_E, O_I, or neither."""
    std_nodes = []
    non_integral = None
    for node in subterms(t):
        if isinstance(node, Const):
            g = node.gen
            if g.witness() is None:
                return Membership("neither", f"constant {_node_label(node)} is not bounded")
            if g.radius_class in ("convergent", "zero"):
                return Membership(
                    "neither", f"constant {_node_label(node)} is not open ({g.radius_class} at its radius)"
                )
        if isinstance(node, Std):
            std_nodes.append(node)
            if node.kind in ("Cycle", "DCycle") and not (
                node.M.is_finite or node.M.harmonic_divergent
            ):
                return Membership(
                    "neither",
                    f"{node.kind}[{node.M}] needs a finite set or a divergent sum of 1/m",
                )
        if non_integral is None:
            non_integral = _integrality_failure(node)
    if not std_nodes:
        return Membership("OE")
    if non_integral is not None:
        first = std_nodes[0]
        return Membership(
            "neither",
            f"{non_integral} alongside standard operator {first.kind}[{first.M}]; "
            "not in either O_E or O_I",
        )
    return Membership("OI")


def is_integral(t: Term) -> bool:
    return all(_integrality_failure(n) is None for n in subterms(t))


@dataclass(frozen=True)
class Classification:
    retro: Retro
    nonlinear: bool
    bounded: Fraction | None
    integral: bool
    openness: str  # OpenElementary | OpenForSolutionPending | NotOpen(reason)
    membership: Membership

    def to_dict(self) -> dict:
        return {
            "retro": self.retro.value,
            "nonlinear": self.nonlinear,
            "bounded": None if self.bounded is None else str(self.bounded),
            "integral": self.integral,
            "openness": self.openness,
            "membership": str(self.membership),
        }


def classify(t: Term) -> Classification:
    m = check_membership(t)
    if m.kind == "OE":
        openness = "OpenElementary"
    elif m.kind == "OI":
        openness = "OpenForSolutionPending"
    else:
        openness = f"NotOpen({m.reason})"
    return Classification(
        retro=check_retro(t),
        nonlinear=check_nonlinear(t),
        bounded=check_bounded(t),
        integral=is_integral(t),
        openness=openness,
        membership=m,
    )


@dataclass(frozen=True)
class Check:
    hypothesis: str
    passed: bool
    reason: str = ""


@dataclass(frozen=True)
class Certificate:
    A_part: Term | None
    theta1: Term | None
    checks: tuple[Check, ...]
    verdict: str  # "Certified" or "Rejected"
    path: str | None = None  # "O_E" or "O_I" when certified
    reason: str = ""
    classification: Classification | None = field(default=None, compare=False)

    @property
    def certified(self) -> bool:
        return self.verdict == "Certified"

    def __str__(self) -> str:
        if self.certified:
            return f"Certified({self.path})"
        return f"Rejected({self.reason})"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "path": self.path,
            "reason": self.reason,
            "A": None if self.A_part is None else pretty_print(self.A_part),
            "theta1": None if self.theta1 is None else pretty_print(self.theta1),
            "checks": [
                {"hypothesis": c.hypothesis, "passed": c.passed, "reason": c.reason}
                for c in self.checks
            ],
        }


def _a_diverges_at_radius(a: Term) -> tuple[bool, str]:
    for node in subterms(a):
        if isinstance(node, Const) and node.gen.radius_class in ("convergent", "zero"):
            return False, f"{_node_label(node)} is {node.gen.radius_class} at its radius"
    return True, ""


def certify(t: Term) -> Certificate:
    """Check the hypotheses of the universal-law theorem for ``w = t``."""
    checks: list[Check] = []

    def reject(a, theta, reason):
        return Certificate(a, theta, tuple(checks), "Rejected", None, reason)

    try:
        a, theta = split_constant_part(t)
    except NoConstantPart as e:
        checks.append(Check("constant part A(z) nonzero", False, str(e)))
        return reject(None, None, "no constant part")
    checks.append(Check("constant part A(z) nonzero", True))
    if theta is None:
        checks.append(Check("theta1 present", False, "equation does not mention w"))
        return reject(a, None, "no recursive part")

    ok, why = _a_diverges_at_radius(a)
    checks.append(Check("A(rho_A) = infinity", ok, why))
    if not ok:
        return reject(a, theta, f"constant part: {why}")

    retro_theta = check_retro(theta)
    ok = retro_theta is Retro.RETRO
    checks.append(Check("theta1 retro", ok, "" if ok else "theta1 reads t(n) at index n"))
    if not ok:
        return reject(a, theta, "not retro")

    ok = check_nonlinear(theta)
    checks.append(Check("theta1 nonlinear", ok, "" if ok else "theta1 is linear in w"))
    if not ok:
        return reject(a, theta, "linear")

    cls = classify(theta)
    m = cls.membership
    ok = m.kind in ("OE", "OI")
    checks.append(Check("theta1 in O_E or O_I", ok, str(m)))
    if not ok:
        return reject(a, theta, f"membership: {m.reason}")

    bounded = cls.bounded is not None
    checks.append(
        Check("theta1 bounded", bounded, f"R = {cls.bounded}" if bounded else "no witness")
    )
    if not bounded:
        return reject(a, theta, "unbounded")

    path = "O_E" if m.kind == "OE" else "O_I"
    if path == "O_I":
        ok = is_integral(a)
        checks.append(Check("A(z) integral", ok, "" if ok else "O_I path needs A in IDOM[z]"))
        if not ok:
            return reject(a, theta, "constant part not integral")

    ok = check_retro(t) is Retro.RETRO
    checks.append(Check("whole term retro", ok))
    if not ok:
        return reject(a, theta, "not retro")

    return Certificate(a, theta, tuple(checks), "Certified", path, "", cls)
