import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyalaw.acceptance import cycle_index_mset
from polyalaw.fixpoint import NotRetro, apply_operator, solve, std_series
from polyalaw.report import catalan_prefix, euler_product_prefix
from polyalaw.series import Series, add, mul, power, scale, substitute_power
from polyalaw.specset import ALL, EVEN, ODD, PRIMES, SpecSet, totient
from polyalaw.term import Add, Mul, Z, parse
from strategies import dom_terms, series


def coeffs(s):
    return list(s.coeffs)


class TestApplyExamples:
    def test_seq_of_z(self):
        assert apply_operator(parse("Seq(w)"), Series([1], 4)) == Series([1, 1, 1, 1], 4)

    def test_mset2(self):
        out = apply_operator(parse("MSet[{2}](w)"), Series([1, 1], 4))
        assert coeffs(out) == [0, 1, 1, 1]

    def test_dcycle3(self):
        assert apply_operator(parse("DCycle[{3}](w)"), Series([1], 3)) == Series([0, 0, 1], 3)

    def test_scale_and_constants(self):
        out = apply_operator(parse("2*z + geom(3)*w"), Series([1], 4))
        assert coeffs(out) == [2, 3, 9, 27]


def _cyclic_index(u, m, order):
    total = Series.zero(order)
    for d in range(1, m + 1):
        if m % d == 0:
            term = power(substitute_power(u, d, order), m // d, order)
            total = add(total, scale(Fraction(totient(d), m), term))
    return total


def _dihedral_index(u, m, order):
    p1, p2 = u, substitute_power(u, 2, order)
    if m % 2:
        refl = scale(Fraction(1, 2), mul(p1, power(p2, (m - 1) // 2, order), order))
    else:
        refl = scale(
            Fraction(1, 4),
            add(mul(power(p1, 2, order), power(p2, (m - 2) // 2, order), order), power(p2, m // 2, order)),
        )
    return add(scale(Fraction(1, 2), _cyclic_index(u, m, order)), refl)


ORACLES = {
    "MSet": cycle_index_mset,
    "DCycle": _cyclic_index,
    "Cycle": _dihedral_index,
    "Seq": lambda u, m, n: power(u, m, n),
}


@pytest.mark.parametrize("kind", sorted(ORACLES))
@given(u=series(max_order=12), m=st.integers(1, 6))
def test_single_m_matches_cycle_index(kind, u, m):
    n = u.order
    assert std_series(kind, SpecSet.explicit([m]), u, n) == ORACLES[kind](u, m, n)


@pytest.mark.parametrize("kind", sorted(ORACLES))
@pytest.mark.parametrize(
    "M",
    [ALL, ODD, EVEN, PRIMES, SpecSet.ap(2, 3), SpecSet.union(SpecSet.explicit([2]), SpecSet.ap(5, 4))],
    ids=str,
)
@given(u=series(max_order=14))
def test_infinite_set_is_sum_of_single_terms(kind, M, u):
    n = u.order
    expect = Series.zero(n)
    for m in M.members(n):
        expect = add(expect, ORACLES[kind](u, m, n))
    assert std_series(kind, M, u, n) == expect


def _power0(u, k, n):
    return Series.one(n) if k == 0 else power(u, k, n)


def _dihedral_d(u, m, n):
    p2 = substitute_power(u, 2, n)
    rot = scale(Fraction(1, 2), _power0(u, m - 1, n))
    if m % 2:
        refl = scale(Fraction(1, 2), _power0(p2, (m - 1) // 2, n))
    else:
        refl = scale(Fraction(1, 2), mul(u, _power0(p2, (m - 2) // 2, n), n))
    return add(rot, refl)


# ∂/∂p1 of each cycle index with the other power sums held fixed
DERIV_ORACLES = {
    "MSet": lambda u, m, n: Series.one(n) if m == 1 else cycle_index_mset(u, m - 1, n),
    "DCycle": lambda u, m, n: _power0(u, m - 1, n),
    "Cycle": _dihedral_d,
    "Seq": lambda u, m, n: scale(m, _power0(u, m - 1, n)),
}


@pytest.mark.parametrize("kind", sorted(DERIV_ORACLES))
@pytest.mark.parametrize("M", [ALL, ODD, EVEN, PRIMES, SpecSet.explicit([2, 3]), SpecSet.ap(3, 4)], ids=str)
@given(u=series(max_order=12))
def test_p1_derivative_matches_cycle_index(kind, M, u):
    n = u.order
    expect = Series.zero(n)
    for m in M.members(n + 1):
        expect = add(expect, DERIV_ORACLES[kind](u, m, n))
    assert std_series(kind, M, u, n, deriv=True) == expect


class TestSolve:
    def test_catalan(self):
        assert [int(c) for c in solve(parse("z + z*Seq(w)"), 8).coeffs()] == [1, 1, 2, 5, 14, 42, 132, 429]

    def test_planar_binary(self):
        assert [int(c) for c in solve(parse("z + z*w^2"), 7).coeffs()] == [1, 0, 1, 0, 2, 0, 5]

    def test_rooted(self):
        got = [int(c) for c in solve(parse("z + z*MSet(w)"), 10).coeffs()]
        assert got == [1, 1, 2, 4, 9, 20, 48, 115, 286, 719]

    def test_rooted_oracle_500(self):
        assert solve(parse("z + z*MSet(w)"), 500).series == euler_product_prefix(500)

    def test_planar_oracle_600(self):
        assert solve(parse("z + z*Seq(w)"), 600).series == catalan_prefix(600)

    def test_labelled(self):
        T = solve(parse("z + z*expm1(w)"), 60)
        assert all(T[n] * math.factorial(n) == n ** (n - 1) for n in range(1, 61))
        assert not T.integral

    def test_methods_agree(self):
        for eq in ("z + z*Cycle(w)", "z + z*(w + MSet[{2}](w))", "z + z*expm1(w)"):
            t = parse(eq)
            assert solve(t, 40).series == solve(t, 40, method="iterate").series

    def test_not_retro(self):
        with pytest.raises(NotRetro):
            solve(parse("z + w"), 10)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            solve(parse("z + z*w^2"), 10, method="magic")

    def test_dominance_between_binary_classes(self):
        lo = solve(parse("z + z*MSet[{2}](w)"), 200).series
        hi = solve(parse("z + z*Seq[{2}](w)"), 200).series
        assert lo.dominated_by(hi)


def _equation(t):
    return Add(Z, Mul(Z, t))


@given(dom_terms(max_leaves=5))
def test_fixpoint_property_and_monotone_iterates(t):
    n = 14
    eq = _equation(t)
    T = solve(eq, n).series
    assert T.is_dom
    assert apply_operator(eq, T) == T
    cur = Series.zero(n)
    for _ in range(n + 2):
        nxt = apply_operator(eq, cur)
        assert cur.dominated_by(nxt)
        if nxt == cur:
            break
        cur = nxt
    assert cur == T


@given(dom_terms(max_leaves=5, integral=True))
def test_integral_operators_give_integers(t):
    assert solve(_equation(t), 14).integral


@given(dom_terms(max_leaves=4))
def test_newton_agrees_with_iteration(t):
    eq = _equation(t)
    assert solve(eq, 16).series == solve(eq, 16, method="iterate").series
