"""The characteristic point (ρ, τ) and the constant of the universal law.

The representative ``E(z, w)`` of a term at a solution ``T`` keeps ``w`` in
the ``p1`` slot of every standard operator and freezes the plethystic inputs
``p_k = S(z^k)`` (``k >= 2``) as known series, ``S`` being the operator's
argument evaluated at ``T``.  :class:`Jet2` carries the value together with
``∂z, ∂w, ∂²w, ∂z∂w``; every node combines jets by the chain rule.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .fixpoint import _index_set, apply_operator
from .series import Series
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
    children,
    subterms,
)

__all__ = [
    "Jet2",
    "Representative",
    "eval_jet",
    "find_char_point",
    "asymptotic_constant",
    "CharSolution",
    "AsymptoticLaw",
    "SingularityError",
    "OrderTooLow",
    "DivergentEvaluation",
    "NoCriticalPoint",
    "PrecisionLoss",
    "DegenerateSecondDerivative",
]

M_MAX = 400
_NEGLIGIBLE = 1e-18


class SingularityError(ArithmeticError):
    pass


class OrderTooLow(SingularityError):
    pass


class DivergentEvaluation(SingularityError):
    pass


class NoCriticalPoint(SingularityError):
    pass


class PrecisionLoss(SingularityError):
    pass


class DegenerateSecondDerivative(SingularityError):
    pass


# ----------------------------------------------------------------------
# jets


class Jet2:
    """Second-order jet in (z, w): value, ∂z, ∂w, ∂²w and the mixed ∂z∂w."""

    __slots__ = ("v", "dz", "dw", "dww", "dzw")

    def __init__(self, v=0.0, dz=0.0, dw=0.0, dww=0.0, dzw=0.0):
        self.v, self.dz, self.dw, self.dww, self.dzw = v, dz, dw, dww, dzw

    @classmethod
    def const(cls, v: float, dz: float = 0.0) -> "Jet2":
        return cls(v, dz, 0.0, 0.0, 0.0)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.v, self.dz, self.dw, self.dww, self.dzw)

    def __repr__(self) -> str:
        return f"Jet2(v={self.v!r}, dz={self.dz!r}, dw={self.dw!r}, dww={self.dww!r}, dzw={self.dzw!r})"

    def __add__(self, o: "Jet2") -> "Jet2":
        return Jet2(self.v + o.v, self.dz + o.dz, self.dw + o.dw, self.dww + o.dww, self.dzw + o.dzw)

    def __mul__(self, o: "Jet2") -> "Jet2":
        return Jet2(
            self.v * o.v,
            self.dz * o.v + self.v * o.dz,
            self.dw * o.v + self.v * o.dw,
            self.dww * o.v + 2 * self.dw * o.dw + self.v * o.dww,
            self.dzw * o.v + self.dz * o.dw + self.dw * o.dz + self.v * o.dzw,
        )

    def scale(self, c: float) -> "Jet2":
        return Jet2(c * self.v, c * self.dz, c * self.dw, c * self.dww, c * self.dzw)

    def apply(self, f0: float, f1: float, f2: float) -> "Jet2":
        """``f(self)`` given ``f, f', f''`` at ``self.v``."""
        return Jet2(
            f0,
            f1 * self.dz,
            f1 * self.dw,
            f2 * self.dw * self.dw + f1 * self.dww,
            f2 * self.dz * self.dw + f1 * self.dzw,
        )

    def finite(self) -> bool:
        return all(math.isfinite(c) for c in self.as_tuple())


_ONE = Jet2.const(1.0)


# ----------------------------------------------------------------------
# univariate power sums f(t) = Σ w_m t^m over a restriction set


class _PowerFunction:
    """``f(t) = Σ_{e∈E} w_e t^e`` with ``f'`` and ``f''``.

    Either a closed form ``t^a/(1 - t^s)`` or ``-log(1 - t)``, or an explicit
    exponent list.  An explicit list that stands for an infinite set is
    summed up to its last exponent with a geometric tail check.
    """

    def __init__(self, exps=(), weights=(), infinite=False, closed=None):
        self.closed = closed
        self.e = np.asarray(exps, dtype=float)
        self.w = np.asarray(weights, dtype=float)
        self.c1 = self.w * self.e
        self.c2 = self.w * self.e * (self.e - 1)
        self.e1 = np.maximum(self.e - 1, 0)
        self.e2 = np.maximum(self.e - 2, 0)
        self.infinite = infinite or closed is not None
        self.top = int(self.e.max()) if len(self.e) else 0

    @classmethod
    def geometric(cls, a: int, s: int) -> "_PowerFunction":
        return cls(closed=(a, s))

    @classmethod
    def from_set(cls, M: SpecSet, kind: str, m_max: int) -> "_PowerFunction":
        """Σ_{m∈M} t^m (``plain``) or Σ_{m∈M} t^m/m (``harmonic``)."""
        if kind == "harmonic" and M.is_all:
            return cls(closed="log")
        if kind == "plain":
            ap = {"all": (1, 1), "odd": (1, 2), "even": (2, 2)}.get(M.kind)
            if M.kind == "ap":
                ap = (M.first, M.step)
            if ap is not None:
                return cls.geometric(*ap)
        members = M.members(m_max)
        w = [1.0 / m for m in members] if kind == "harmonic" else [1.0] * len(members)
        return cls(members, w, not M.is_finite)

    def __call__(self, t: float, tol: float) -> tuple[float, float, float, float]:
        """``(f, f', f'', relative tail)``."""
        if t < 0:
            raise DivergentEvaluation("negative argument")
        if self.infinite and t >= 1:
            raise DivergentEvaluation(f"power sum diverges at {t}")
        if self.closed == "log":
            return -math.log1p(-t), 1 / (1 - t), 1 / (1 - t) ** 2, 0.0
        if self.closed is not None:
            a, s = self.closed
            g = 1 / (1 - t**s)

            def mono(c, e):
                return c * t**e if c else 0.0

            f0 = t**a * g
            f1 = mono(a, a - 1) * g + mono(s, a + s - 1) * g * g
            f2 = (
                mono(a * (a - 1), a - 2) * g
                + mono(a * s + s * (a + s - 1), a + s - 2) * g * g
                + mono(2 * s * s, a + 2 * s - 2) * g**3
            )
            return f0, f1, f2, 0.0
        if not len(self.e):
            return 0.0, 0.0, 0.0, 0.0
        with np.errstate(over="ignore"):
            f0 = float(self.w @ (t**self.e))
            f1 = float(self.c1 @ (t**self.e1))
            f2 = float(self.c2 @ (t**self.e2))
        tail = 0.0
        if self.infinite:
            m = self.top
            bound = (m + 1) ** 2 * t ** max(m - 1, 0) / (1 - t) ** 3
            tail = bound / f2 if f2 > 0 else bound
            if t >= 0.9 and tail > tol:
                raise OrderTooLow(f"power sum tail {tail:.2e} at t={t:.4f} needs m_max > {m}")
        return f0, f1, f2, tail


# ----------------------------------------------------------------------
# plethystic inputs S(x^k)


class _PlethysmTable:
    """Evaluates ``S(x^k)`` and ``k·x^(k-1)·S'(x^k)`` for ``k = 2..K`` from a prefix."""

    def __init__(self, S: Series):
        self.series = S
        self.order = S.order
        logc = S.log_coeffs()
        idx = np.nonzero(np.isfinite(logc))[0]
        self.idx = idx.astype(float)
        self.logc = logc[idx]
        self.valuation = int(idx[0]) if len(idx) else None
        # growth ratio of the trailing quarter, inflated for the tail bound
        lo = max(1, self.order - (self.order + 3) // 4 + 1)
        tailidx = idx[idx >= lo]
        if len(tailidx) >= 2:
            a, b = tailidx[0], tailidx[-1]
            r = math.exp((logc[b] - logc[a]) / (b - a))
        elif len(idx) >= 2:
            a, b = idx[-2], idx[-1]
            r = math.exp((logc[b] - logc[a]) / (b - a))
        else:
            r = 1.0
        self.ratio = 1.25 * r
        self.last = int(idx[-1]) if len(idx) else 0
        self.last_log = float(logc[self.last]) if len(idx) else -math.inf

    def cutoff(self, x: float, m_max: int) -> int:
        """Largest k worth evaluating at x."""
        if self.valuation is None or x <= 0:
            return 1
        if x >= 1:
            raise DivergentEvaluation("plethystic terms need x < 1")
        lx = math.log(x)
        need = math.ceil(math.log(_NEGLIGIBLE) / (self.valuation * lx)) + 1
        return max(1, min(m_max, need))

    def values(self, x: float, K: int) -> tuple[np.ndarray, np.ndarray, float]:
        """Arrays over k = 0..K (entries 0, 1 unused) plus the worst relative tail."""
        val = np.zeros(K + 1)
        der = np.zeros(K + 1)
        if K < 2 or self.valuation is None or x <= 0:
            return val, der, 0.0
        ks = np.arange(2, K + 1, dtype=float)
        lx = math.log(x)
        lt = ks * lx  # log x^k
        if np.any(self.ratio * np.exp(lt) >= 1):
            raise DivergentEvaluation(f"prefix of order {self.order} cannot reach x^2 = {x * x:.4f}")
        with np.errstate(over="ignore", under="ignore"):
            L = self.logc[None, :] + self.idx[None, :] * lt[:, None]
            v = np.exp(L).sum(axis=1)
            mask = self.idx > 0
            Ld = (
                self.logc[None, mask]
                + np.log(self.idx[None, mask])
                + (self.idx[None, mask] - 1) * lt[:, None]
            )
            d = np.exp(Ld).sum(axis=1)
            rt = self.ratio * np.exp(lt)
            n = self.order
            lead = np.exp(self.last_log + self.last * lt)
            tail = lead * rt ** (n + 1 - self.last) / (1 - rt)
        val[2:] = v
        der[2:] = ks * np.exp((ks - 1) * lx) * d
        rel = float(np.max(np.where(v > 0, tail / np.where(v > 0, v, 1), 0.0)))
        return val, der, rel


# ----------------------------------------------------------------------
# representative


@dataclass
class _StdInfo:
    node: Std
    table: _PlethysmTable
    main: _PowerFunction | None = None
    aux: dict = field(default_factory=dict)


class Representative:
    """The representative of ``t`` at the solution ``T``, evaluated as jets."""

    def __init__(self, t: Term, T: Series, m_max: int = M_MAX, tol: float = 1e-8):
        self.term = t
        self.T = getattr(T, "series", T)
        self.m_max = m_max
        self.tol = tol
        self.std: dict[tuple[int, int], _StdInfo] = {}
        self.elem: dict[int, _PowerFunction] = {}
        self._bindings: list[Series] = [self.T]
        self._compose_binding: dict[tuple[int, int], int] = {}
        self._prepare(t, 0)
        self.tail = 0.0
        self._x = None
        self._cache: dict = {}

    # --- preprocessing -------------------------------------------------

    def _prepare(self, t: Term, b: int) -> None:
        if isinstance(t, ComposeW):
            self._prepare(t.inner, b)
            inner_series = apply_operator(t.inner, self._bindings[b])
            self._bindings.append(inner_series)
            self._compose_binding[(id(t), b)] = len(self._bindings) - 1
            self._prepare(t.outer, len(self._bindings) - 1)
            return
        if isinstance(t, Std):
            S = apply_operator(t.arg, self._bindings[b])
            self.std[(id(t), b)] = self._std_info(t, S)
        elif isinstance(t, PowSum):
            self.elem[id(t)] = _PowerFunction.from_set(t.M, "plain", self.m_max)
        for c in children(t):
            self._prepare(c, b)

    def _std_info(self, t: Std, S: Series) -> _StdInfo:
        info = _StdInfo(t, _PlethysmTable(S))
        M, m_max = t.M, self.m_max
        infinite = not M.is_finite
        if t.kind == "Seq":
            info.main = _PowerFunction.from_set(M, "plain", m_max)
        elif t.kind in ("DCycle", "Cycle"):
            info.main = _PowerFunction.from_set(M, "harmonic", m_max)
            # g_k(y) = Σ_{j: jk∈M} y^j / j
            for k in range(2, m_max + 1):
                if M.is_all:
                    info.aux[k] = _PowerFunction(closed="log")
                    continue
                js = [j for j in range(1, m_max // k + 1) if j * k in M]
                if js:
                    info.aux[k] = _PowerFunction(js, [1.0 / j for j in js], infinite)
            if t.kind == "Cycle":
                if M.is_all:
                    info.aux["A"] = info.aux["B"] = _PowerFunction.geometric(0, 1)
                else:
                    odd = [(m - 1) // 2 for m in M.members(m_max) if m % 2 == 1]
                    even = [(m - 2) // 2 for m in M.members(m_max) if m % 2 == 0]
                    info.aux["A"] = _PowerFunction(odd, [1.0] * len(odd), infinite)
                    info.aux["B"] = _PowerFunction(even, [1.0] * len(even), infinite)
        return info

    # --- evaluation ------------------------------------------------------

    def jet(self, x: float, y: float) -> Jet2:
        """Jet of the representative at ``(x, y)``."""
        if x < 0 or y < 0:
            raise DivergentEvaluation("evaluation point must be nonnegative")
        if self._x != x:
            self._x = x
            self._cache = {}
            self.tail = 0.0
        w = Jet2(y, 0.0, 1.0, 0.0, 0.0)
        zj = Jet2(x, 1.0, 0.0, 0.0, 0.0)
        j = self._eval(self.term, 0, w, zj)
        if not j.finite():
            raise DivergentEvaluation(f"representative is infinite at ({x}, {y})")
        return j

    def _pleth(self, key, info: _StdInfo, x: float, K: int):
        got = self._cache.get(key)
        if got is None or len(got[0]) < K + 1:
            val, der, rel = info.table.values(x, K)
            self.tail = max(self.tail, rel)
            got = (val, der)
            self._cache[key] = got
        return got

    def _eval(self, t: Term, b: int, w: Jet2, zj: Jet2) -> Jet2:
        x = zj.v
        if isinstance(t, _W):
            return w
        if isinstance(t, _Z):
            return zj
        if isinstance(t, Const):
            v, d = t.gen.value(x)
            return Jet2.const(v, d)
        if isinstance(t, Scale):
            return self._eval(t.t, b, w, zj).scale(float(t.c))
        if isinstance(t, Add):
            return self._eval(t.left, b, w, zj) + self._eval(t.right, b, w, zj)
        if isinstance(t, Mul):
            return self._eval(t.left, b, w, zj) * self._eval(t.right, b, w, zj)
        if isinstance(t, ComposeW):
            inner = self._eval(t.inner, b, w, zj)
            return self._eval(t.outer, self._compose_binding[(id(t), b)], inner, zj)
        if isinstance(t, ExpM1):
            u = self._eval(t.arg, b, w, zj)
            if u.v > 700:
                raise DivergentEvaluation("exp overflow")
            e = math.exp(u.v)
            return u.apply(math.expm1(u.v), e, e)
        if isinstance(t, PowSum):
            u = self._eval(t.arg, b, w, zj)
            c = float(t.c)
            f0, f1, f2, tail = self.elem[id(t)](c * u.v, self.tol)
            self.tail = max(self.tail, tail)
            return u.apply(f0, c * f1, c * c * f2)
        if isinstance(t, Std):
            u = self._eval(t.arg, b, w, zj)
            return self._std(t, (id(t), b), u, x)
        raise TypeError(f"not a term: {t!r}")

    def _pjets(self, key, info, x, K) -> list[Jet2]:
        val, der = self._pleth(key, info, x, K)
        return [Jet2.const(float(val[k]), float(der[k])) for k in range(K + 1)]

    def _std(self, t: Std, key, u: Jet2, x: float) -> Jet2:
        info = self.std[key]
        M = t.M
        if u.v < 0:
            raise DivergentEvaluation("negative argument")
        if t.kind == "Seq":
            f0, f1, f2, tail = info.main(u.v, self.tol)
            self.tail = max(self.tail, tail)
            return u.apply(f0, f1, f2)
        if t.kind == "MSet":
            return self._mset(info, key, u, x)
        K = info.table.cutoff(x, self.m_max)
        if M.is_finite:
            K = min(K, M.max)
        if t.kind in ("DCycle", "Cycle"):
            f0, f1, f2, tail = info.main(u.v, self.tol)
            self.tail = max(self.tail, tail)
            out = u.apply(f0, f1, f2)
            if K >= 2:
                p = self._pjets(key, info, x, K)
                for k in range(2, K + 1):
                    g = info.aux.get(k)
                    if g is None or p[k].v == 0:
                        continue
                    g0, g1, g2, _ = g(p[k].v, self.tol)
                    out = out + p[k].apply(g0, g1, g2).scale(totient(k) / k)
            if t.kind == "DCycle":
                return out
            if K >= 2:
                p2 = self._pjets(key, info, x, max(K, 2))[2]
            else:
                val, der, rel = info.table.values(x, 2)
                self.tail = max(self.tail, rel)
                p2 = Jet2.const(float(val[2]), float(der[2]))
            A, B = info.aux["A"], info.aux["B"]
            a = p2.apply(*A(p2.v, self.tol)[:3])
            bb = p2.apply(*B(p2.v, self.tol)[:3])
            refl = (u * a).scale(2.0) + (u * u) * bb + p2 * bb
            return out.scale(0.5) + refl.scale(0.25)
        raise ValueError(f"unknown standard operator {t.kind!r}")

    def _mset(self, info: _StdInfo, key, u: Jet2, x: float) -> Jet2:
        M = info.node.M
        if M.is_all:
            K = info.table.cutoff(x, self.m_max)
            acc = u
            if K >= 2:
                p = self._pjets(key, info, x, K)
                for k in range(2, K + 1):
                    acc = acc + p[k].scale(1.0 / k)
            if acc.v > 700:
                raise DivergentEvaluation("exp overflow")
            e = math.exp(acc.v)
            return acc.apply(math.expm1(acc.v), e, e)
        S = _index_set(M)
        if not M.is_finite and S.periodic is not None:
            return self._mset_periodic(info, key, u, x, S)
        top = M.max if M.is_finite else self.m_max
        H = self._h_table(info, key, u, x, top)
        if not M.is_finite and top >= 2 and H[top - 1, 0] > 0:
            r = H[top, 0] / H[top - 1, 0]
            if r >= 1:
                raise DivergentEvaluation(f"multiset terms grow (ratio {r:.3f})")
            if r >= 0.9:
                rel = H[top, 0] * r / (1 - r) / max(H[:, 0].sum(), 1e-300)
                if rel > self.tol:
                    raise OrderTooLow(f"multiset tail ratio {r:.3f} needs m_max > {top}")
        tot = H[M.members(top)].sum(axis=0)
        return Jet2(*map(float, tot))

    def _h_table(self, info: _StdInfo, key, u: Jet2, x: float, top: int) -> np.ndarray:
        """Jets of h_0..h_top from ``m h_m = Σ_k p_k h_{m-k}`` (rows are jet tuples)."""
        K = min(info.table.cutoff(x, self.m_max), top)
        p = self._pjets(key, info, x, K) if K >= 2 else []
        P = np.zeros((top + 1, 5))
        if top >= 1:
            P[1] = u.as_tuple()
        for k in range(2, K + 1):
            P[k] = p[k].as_tuple()
        H = np.zeros((top + 1, 5))
        H[0, 0] = 1.0
        for m in range(1, top + 1):
            a = P[1 : m + 1]
            b = H[m - 1 :: -1][:m]
            s = np.empty(5)
            s[0] = a[:, 0] @ b[:, 0]
            s[1] = a[:, 1] @ b[:, 0] + a[:, 0] @ b[:, 1]
            s[2] = a[:, 2] @ b[:, 0] + a[:, 0] @ b[:, 2]
            s[3] = a[:, 3] @ b[:, 0] + 2 * (a[:, 2] @ b[:, 2]) + a[:, 0] @ b[:, 3]
            s[4] = a[:, 4] @ b[:, 0] + a[:, 1] @ b[:, 2] + a[:, 2] @ b[:, 1] + a[:, 0] @ b[:, 4]
            H[m] = s / m
            if not np.all(np.isfinite(H[m])):
                raise DivergentEvaluation("multiset recurrence overflowed")
        return H

    def _mset_periodic(self, info: _StdInfo, key, u: Jet2, x: float, S) -> Jet2:
        """Roots-of-unity filter on ``exp(Σ_k p_k y^k / k)`` for eventually periodic M."""
        K = info.table.cutoff(x, self.m_max)
        p = self._pjets(key, info, x, K) if K >= 2 else []
        s = S.s
        omega = [cmath.exp(2j * math.pi * j / s) for j in range(s)]
        exps = []
        for j in range(s):
            acc = u.scale(omega[j])
            for k in range(2, K + 1):
                acc = acc + p[k].scale(omega[j] ** k / k)
            if acc.v.real > 700:
                raise DivergentEvaluation("exp overflow")
            e = cmath.exp(acc.v)
            exps.append(acc.apply(e, e, e))
        out = Jet2()
        for r in S.periodic:
            for j in range(s):
                out = out + exps[j].scale(omega[j] ** (-r) / s)
        if S.m0 > 0:
            H = self._h_table(info, key, u, x, S.m0 - 1)
            for m in range(S.m0):
                sign = (1.0 if S.contains(m) else 0.0) - (1.0 if m % s in S.periodic else 0.0)
                if sign:
                    out = out + Jet2(*H[m]).scale(sign)
        return Jet2(*(float(c.real) for c in out.as_tuple()))


def eval_jet(t: Term, T, x: float, y: float, m_max: int = M_MAX) -> Jet2:
    """Jet of the representative of ``t`` at the solution ``T``."""
    return Representative(t, T, m_max).jet(x, y)


# ----------------------------------------------------------------------
# characteristic point


@dataclass(frozen=True)
class CharSolution:
    rho: float
    tau: float
    Ez: float
    Ew: float
    Eww: float
    Ezw: float
    residuals: tuple[float, float]
    rho_error: float
    tau_error: float
    tail: float

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "tau": self.tau,
            "Ez": self.Ez,
            "Ew": self.Ew,
            "Eww": self.Eww,
            "residuals": list(self.residuals),
            "rho_error": self.rho_error,
            "tau_error": self.tau_error,
        }


def _inner_solve(rep: Representative, x: float, max_iter: int = 400):
    """Smallest fixed point of ``y ↦ E(x, y)`` with ``E_w < 1``, or None (super-critical).

    ``h(y) = E(x,y) - y`` is convex, so Newton from ``y = 0`` climbs
    monotonically to the smallest root; reaching ``E_w >= 1`` while ``h > 0``
    proves there is none.  Hitting the iteration cap counts as no root.
    """
    y = 0.0
    for _ in range(max_iter):
        try:
            j = rep.jet(x, y)
        except (DivergentEvaluation, OverflowError, ZeroDivisionError):
            return None
        h = j.v - y
        if j.dw >= 1:
            return None
        if h <= 1e-15 * max(1.0, y):
            return y, j
        step = h / (1 - j.dw)
        y_new = y + step
        if y_new == y or step <= 1e-16 * max(1.0, y):
            try:
                return y_new, rep.jet(x, y_new)
            except DivergentEvaluation:
                return None
        y = y_new
    return None


def _subcritical(rep: Representative, x: float):
    try:
        return _inner_solve(rep, x)
    except OrderTooLow:
        return None


def find_char_point(
    t: Term,
    T,
    *,
    integral: bool | None = None,
    x_hi: float | None = None,
    tol: float = 1e-8,
    m_max: int = M_MAX,
    rep: Representative | None = None,
) -> CharSolution:
    """Solve ``E(ρ, τ) = τ``, ``E_w(ρ, τ) = 1`` by bisection on ``x`` and a 2-D Newton polish."""
    series = getattr(T, "series", T)
    if rep is None:
        rep = Representative(t, series, m_max, tol)
    has_std = any(isinstance(n, Std) for n in subterms(t))
    if integral is None:
        integral = series.is_integral
    if x_hi is None:
        x_hi = 0.999 if (integral or has_std) else _ratio_guess(series)
    hi = x_hi
    for _ in range(60):
        if _subcritical(rep, hi) is None:
            break
        if has_std or integral:
            raise NoCriticalPoint("no super-critical point below 1")
        hi *= 2
    else:
        raise NoCriticalPoint("no super-critical point found")
    lo = hi / 2
    lo_sol = None
    for _ in range(200):
        lo_sol = _subcritical(rep, lo)
        if lo_sol is not None:
            break
        hi = lo
        lo /= 2
    if lo_sol is None:
        raise NoCriticalPoint("no sub-critical point found")
    while hi - lo > 1e-12 * lo:
        mid = 0.5 * (lo + hi)
        s = _subcritical(rep, mid)
        if s is None:
            hi = mid
        else:
            lo, lo_sol = mid, s
    x, y = lo, lo_sol[0]
    # 2-D Newton polish on (E - y, E_w - 1)
    last = 0.0
    for _ in range(8):
        j = rep.jet(x, y)
        f1, f2 = j.v - y, j.dw - 1
        a, bq, c, d = j.dz, j.dw - 1, j.dzw, j.dww
        det = a * d - bq * c
        if det == 0 or not math.isfinite(det):
            break
        dx = (f1 * d - bq * f2) / det
        dy = (a * f2 - c * f1) / det
        if not (0 < x - dx < 1.5 * hi) or y - dy < 0:
            break
        x, y = x - dx, y - dy
        last = abs(dx)
        if abs(dx) <= 1e-16 * x and abs(dy) <= 1e-16 * max(1.0, y):
            break
    j = rep.jet(x, y)
    residuals = (abs(y - j.v), abs(1 - j.dw))
    if max(residuals) > max(tol, 1e-8):
        raise PrecisionLoss(f"characteristic residuals {residuals[0]:.2e}, {residuals[1]:.2e}")
    if rep.tail > tol:
        raise PrecisionLoss(f"series tail {rep.tail:.2e} exceeds tolerance at rho")
    if j.dz <= 0 or j.dww <= 0:
        raise DegenerateSecondDerivative(f"E_z = {j.dz}, E_ww = {j.dww}")
    rho_err = max(hi - lo, last, 4 * abs(residuals[1]) * x, rep.tail * x, 1e-15 * x)
    tau_err = max(residuals[0], abs(j.dz) * rho_err, rep.tail * y)
    return CharSolution(x, y, j.dz, j.dw, j.dww, j.dzw, residuals, rho_err, tau_err, rep.tail)


def _ratio_guess(series: Series) -> float:
    logc = series.log_coeffs()
    idx = [i for i in range(1, series.order + 1) if np.isfinite(logc[i])]
    if len(idx) < 2:
        return 1.0
    tail = idx[len(idx) // 2 :]
    a, b = tail[0], tail[-1]
    if a == b:
        return 1.0
    r = math.exp((logc[b] - logc[a]) / (b - a))
    return 1.5 / r


# ----------------------------------------------------------------------
# the constant


@dataclass(frozen=True)
class AsymptoticLaw:
    C: float
    rho: float
    d: int
    q: int
    C_error: float = 0.0

    @property
    def support(self) -> str:
        return f"n ≡ {self.d} (mod {self.q})"

    def predict(self, n: int) -> float:
        """``C·ρ^{-n}·n^{-3/2}`` on the support class, else 0."""
        if (n - self.d) % self.q:
            return 0.0
        return self.C * self.rho ** (-n) * n ** (-1.5)

    def log_predict(self, n: int) -> float:
        return math.log(self.C) - n * math.log(self.rho) - 1.5 * math.log(n)


def asymptotic_constant(sol: CharSolution, period, tol: float = 1e-12) -> AsymptoticLaw:
    """``C = q·sqrt(ρ·E_z / (2π·E_ww))``."""
    if sol.Eww <= tol:
        raise DegenerateSecondDerivative(f"E_ww = {sol.Eww}")
    q = period.q
    C = q * math.sqrt(sol.rho * sol.Ez / (2 * math.pi * sol.Eww))
    rel = 0.5 * (sol.rho_error / sol.rho) + sol.tail + sum(sol.residuals)
    return AsymptoticLaw(C, sol.rho, period.d, q, C * rel)
