from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyalaw.report import catalan_prefix
from polyalaw.series import (
    Series,
    add,
    compose,
    derivative,
    eval_real,
    exp_series,
    inverse_one_minus,
    mul,
    power,
    power_sum,
    scale,
    substitute_power,
)
from strategies import dominating_pair, series, series_pair, series_triple

Z = Series([1], 8)


def poly(*cs, order=8):
    return Series(cs, order)


class TestExamples:
    def test_add(self):
        assert add(Series([1], 4), Series([1], 4)) == Series([2], 4)
        assert add(poly(1, 1), poly(0, 0, 1)) == poly(1, 1, 1)

    def test_add_zero_is_identity(self):
        T = catalan_prefix(30)
        assert add(T, Series.zero(30)) == T

    def test_mul(self):
        assert mul(Z, Z) == poly(0, 1)
        assert mul(poly(1, 1), poly(1, 1)) == poly(0, 1, 2, 1)

    def test_catalan_convolution(self):
        c = catalan_prefix(40)
        sq = mul(c, c)
        # c(n+1) = sum_{k=1}^{n} c(k) c(n+1-k)
        assert all(sq[n + 1] == c[n + 1] for n in range(1, 39))

    def test_scale(self):
        assert scale(3, poly(1, 1)) == poly(3, 3)
        assert scale(0, poly(1, 1)).is_zero()
        assert scale(Fraction(1, 2), poly(2)) == poly(1)

    def test_negative_scalar_rejected(self):
        with pytest.raises(ValueError):
            scale(-1, Z)

    def test_negative_coefficient_rejected(self):
        with pytest.raises(ValueError):
            Series([1, -1], 3)

    def test_compose(self):
        w2 = poly(0, 1)
        assert compose(w2, poly(1, 1)) == poly(0, 1, 2, 1)
        a = poly(3, 1, 4, 1, 5)
        assert compose(a, Z) == a

    def test_compose_geometric_into_linear(self):
        n = 20
        geo = Series([1] * n, n)
        two_z = Series([2], n)
        # Σ (2z)^k then divide by 2 gives z/(1-2z)
        got = scale(Fraction(1, 2), compose(geo, two_z))
        assert got == Series([2 ** (k - 1) for k in range(1, n + 1)], n)

    def test_substitute_power(self):
        assert substitute_power(poly(1, 1), 2) == poly(0, 1, 0, 1)
        a = poly(1, 2, 3)
        assert substitute_power(a, 1) == a

    def test_substitute_power_beyond_known_prefix(self):
        with pytest.raises(ValueError):
            substitute_power(Series([1, 1], 2), 2, order=6)

    def test_derivative(self):
        assert derivative(poly(0, 1, order=3)) == (0, 2, 0)
        assert derivative(poly(1, order=3)) == (1, 0, 0)
        assert derivative(Series([1] * 5, 5)) == tuple(Fraction(k) for k in range(1, 6))

    def test_eval_real(self):
        assert eval_real(Series([1], 1), 0.5) == (0.5, 0.0)
        v, tail = eval_real(Series([1] * 64, 64), 0.5)
        assert abs(v - 1.0) < 1e-15 and tail < 1e-18

    def test_eval_real_planar_binary_at_rho(self):
        from polyalaw.fixpoint import solve
        from polyalaw.term import parse

        T = solve(parse("z + z*w^2"), 1201).series
        v, _ = eval_real(T, 0.5)
        # the prefix converges like n^(-1/2) at the singularity
        assert abs(v - 1.0) < 0.05

    def test_eval_real_negative_point(self):
        with pytest.raises(ValueError):
            eval_real(Z, -0.1)

    def test_inverse_one_minus(self):
        assert inverse_one_minus(Z) == Series([1] * 9, 8, start=0)

    def test_exp_of_z(self):
        e = exp_series(Series([1], 10))
        import math

        assert list(e.all_coeffs()) == [Fraction(1, math.factorial(k)) for k in range(11)]

    def test_exp_integer_fast_path_falls_back(self):
        # exp(2z) has non-integral coefficients though 2z is integral
        e = exp_series(Series([2], 6))
        assert e[3] == Fraction(8, 6)


def _naive_exp(f: Series):
    n = f.order
    g = [k * f[k] for k in range(n + 1)]
    e = [Fraction(1)] + [Fraction(0)] * n
    for m in range(1, n + 1):
        e[m] = sum(g[k] * e[m - k] for k in range(1, m + 1)) / m
    return e


@given(series(max_order=60))
def test_exp_matches_recurrence(f):
    assert list(exp_series(f).all_coeffs()) == _naive_exp(f)


@given(series_pair(dom=False))
def test_mul_commutes(ab):
    a, b = ab
    assert mul(a, b) == mul(b, a)


@given(series_triple(dom=False))
def test_mul_associates(abc):
    a, b, c = abc
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@given(series_triple(dom=False))
def test_distributive(abc):
    a, b, c = abc
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@given(series_triple(dom=False))
def test_add_associates_and_commutes(abc):
    a, b, c = abc
    assert add(add(a, b), c) == add(a, add(b, c))
    assert add(a, b) == add(b, a)


@given(series(dom=False))
def test_one_is_unit(a):
    assert mul(a, Series.one(a.order)) == a


@given(series(dom=False), st.integers(0, 5))
def test_power_is_repeated_product(a, k):
    expect = Series.one(a.order)
    for _ in range(k):
        expect = mul(expect, a)
    assert power(a, k) == expect


@given(series_pair(dom=False), st.integers(1, 4))
def test_substitute_power_is_multiplicative(ab, k):
    a, b = ab
    assert substitute_power(mul(a, b), k) == mul(substitute_power(a, k), substitute_power(b, k))


@given(series(dom=False), series(max_order=10))
def test_compose_matches_horner(a, b):
    n = min(a.order, b.order)
    expect = Series.zero(n)
    for i in range(a.order, -1, -1):
        expect = add(mul(expect, b.truncate(n), n), Series.monomial(0, n, a[i]))
    assert compose(a, b) == expect


@given(series(max_order=40), st.dictionaries(st.integers(1, 40), st.fractions(0, 5), max_size=12))
def test_power_sum_matches_naive(u, weights):
    weights = {k: w for k, w in weights.items() if w > 0}
    expect = Series.zero(u.order)
    for k, w in weights.items():
        expect = add(expect, scale(w, power(u, k)))
    assert power_sum(u, weights) == expect


@given(series(max_order=40))
def test_power_sum_geometric_closed_form(u):
    # weights r^k on an arithmetic progression exercise the closed-form path
    w = {k: Fraction(3, 2) ** k for k in range(2, u.order + 1, 3)}
    expect = Series.zero(u.order)
    for k, c in w.items():
        expect = add(expect, scale(c, power(u, k)))
    assert power_sum(u, w) == expect


@given(series(max_order=30))
def test_inverse_one_minus_inverts(u):
    v = inverse_one_minus(u)
    # v = 1 + u v
    assert v == add(Series.one(u.order), mul(u, v))


@given(series(dom=False))
def test_series_equality_is_value_equality(a):
    b = Series(list(a.all_coeffs()), a.order, start=0)
    assert a == b and hash(a) == hash(b)


class TestDominance:
    @given(dominating_pair(dom=False), dominating_pair(dom=False))
    def test_sum_and_product_preserve(self, ab, cd):
        (a, b), (c, d) = ab, cd
        n = min(a.order, c.order)
        a, b, c, d = (s.truncate(n) for s in (a, b, c, d))
        assert add(a, c).dominated_by(add(b, d))
        assert mul(a, c).dominated_by(mul(b, d))

    @given(dominating_pair(), series(max_order=10))
    def test_compose_preserves(self, ab, outer):
        a, b = ab
        assert compose(outer, a).dominated_by(compose(outer, b))

    @given(dominating_pair(), st.integers(1, 4))
    def test_plethysm_preserves(self, ab, k):
        a, b = ab
        assert substitute_power(a, k).dominated_by(substitute_power(b, k))
