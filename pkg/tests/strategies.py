"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from polyalaw.series import Series

small_fraction = st.builds(
    Fraction, st.integers(min_value=0, max_value=12), st.integers(min_value=1, max_value=8)
)
small_int = st.integers(min_value=0, max_value=12).map(Fraction)


@st.composite
def series(draw, min_order=1, max_order=14, dom=True, integral=False, order=None):
    n = order if order is not None else draw(st.integers(min_order, max_order))
    start = 1 if dom else 0
    coeff = small_int if integral else small_fraction
    cs = draw(st.lists(coeff, min_size=n + 1 - start, max_size=n + 1 - start))
    return Series(cs, n, start=start)


@st.composite
def series_pair(draw, dom=True, integral=False):
    n = draw(st.integers(1, 14))
    return draw(series(dom=dom, integral=integral, order=n)), draw(series(dom=dom, integral=integral, order=n))


@st.composite
def series_triple(draw, dom=True):
    n = draw(st.integers(1, 12))
    return tuple(draw(series(dom=dom, order=n)) for _ in range(3))


@st.composite
def dominating_pair(draw, dom=True, order=None):
    """(a, b) with a ⊴ b coefficientwise."""
    a = draw(series(dom=dom, order=order))
    extra = draw(series(dom=True, order=a.order))
    return a, a + extra


# ----------------------------------------------------------------------
# terms

from polyalaw.specset import ALL, EVEN, ODD, PRIMES, SpecSet  # noqa: E402
from polyalaw.term import (  # noqa: E402
    Add,
    ComposeW,
    Const,
    ExpM1,
    Mul,
    Poly,
    PowSum,
    Scale,
    Std,
    W,
    Z,
)

spec_sets = st.one_of(
    st.sampled_from([ALL, ODD, EVEN, PRIMES]),
    st.lists(st.integers(1, 6), min_size=1, max_size=3).map(SpecSet.explicit).filter(lambda M: not M.is_identity),
    st.builds(SpecSet.ap, st.integers(1, 4), st.integers(1, 3)),
)
finite_spec_sets = st.lists(st.integers(1, 5), min_size=1, max_size=3).map(SpecSet.explicit).filter(
    lambda M: not M.is_identity
)
scalars = st.sampled_from([Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(2, 3)])
int_scalars = st.sampled_from([Fraction(1), Fraction(2), Fraction(3)])
polys = st.lists(st.integers(0, 3), min_size=1, max_size=4).filter(any).map(lambda cs: Const(Poly(tuple(cs))))


def dom_terms(max_leaves=6, std=True, integral=False):
    """Terms with zero constant term, so any of them may sit inside an operator."""
    sc = int_scalars if integral else scalars
    sets = spec_sets

    def extend(children):
        options = [
            st.builds(Add, children, children),
            st.builds(Mul, children, children),
            st.builds(Mul, st.just(Z), polys),
            st.builds(Scale, sc, children),
            st.builds(PowSum, sc, sets, children),
            st.builds(ComposeW, children, children),
        ]
        if not integral:
            options.append(st.builds(ExpM1, children))
        if std:
            options.append(
                st.builds(Std, st.sampled_from(["MSet", "Seq", "Cycle", "DCycle"]), finite_spec_sets, children)
            )
            options.append(st.builds(Std, st.sampled_from(["MSet", "Seq"]), sets, children))
        return st.one_of(*options)

    return st.recursive(st.sampled_from([Z, W]), extend, max_leaves=max_leaves)
