import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyalaw.acceptance import JET_EQUATIONS, jet_fd_errors
from polyalaw.corpus import entry
from polyalaw.fixpoint import solve
from polyalaw.periodicity import PeriodInfo, compute_dq
from polyalaw.series import eval_real
from polyalaw.singularity import (
    AsymptoticLaw,
    CharSolution,
    DegenerateSecondDerivative,
    DivergentEvaluation,
    Jet2,
    NoCriticalPoint,
    Representative,
    _subcritical,
    asymptotic_constant,
    eval_jet,
    find_char_point,
)
from polyalaw.term import parse


def _setup(name_or_eq, order=None):
    try:
        e = entry(name_or_eq)
        text, order = e.equation, order or min(e.order, 600)
    except KeyError:
        text, order = name_or_eq, order or 400
    t = parse(text)
    T = solve(t, order)
    return t, T, Representative(t, T.series)


@pytest.fixture(scope="module")
def binary():
    return _setup("labelled_binary", 1201)


@pytest.fixture(scope="module")
def rooted():
    return _setup("rooted", 400)


# ---------------------------------------------------------------- jets


def test_eval_jet_of_quadratic():
    t = parse("z + z*w^2")
    T = solve(t, 50)
    j = eval_jet(t, T.series, 0.5, 1.0)
    assert j.as_tuple() == pytest.approx((1.0, 2.0, 1.0, 1.0, 2.0))


def test_eval_jet_at_origin():
    t = parse("z + z*w^2")
    T = solve(t, 50)
    j = eval_jet(t, T.series, 0.0, 0.0)
    assert j.as_tuple()[:4] == pytest.approx((0.0, 1.0, 0.0, 0.0))


def test_rooted_dw_against_difference(rooted):
    _, _, rep = rooted
    x, y, h = 0.3, 0.2, 1e-6
    j = rep.jet(x, y)
    fd = (rep.jet(x, y + h).v - rep.jet(x, y - h).v) / (2 * h)
    assert j.dw == pytest.approx(fd, rel=1e-6)
    # the MSet factor is exp(y) times a y-free part
    assert j.dww == pytest.approx(j.dw, rel=1e-9)


@pytest.mark.parametrize("name,order", JET_EQUATIONS)
def test_jet_partials_match_differences(name, order):
    assert jet_fd_errors(name, order, 8, random.Random(7)) == []


def test_divergent_power_sum():
    _, _, rep = _setup("planar", 50)
    with pytest.raises(DivergentEvaluation):
        rep.jet(0.1, 1.5)


def test_plethysm_beyond_prefix_reach():
    _, _, rep = _setup("rooted", 32)
    with pytest.raises(DivergentEvaluation):
        rep.jet(0.9, 0.1)


def _jets():
    c = st.floats(-3, 3, allow_nan=False)
    return st.builds(Jet2, c, c, c, c, c)


@given(_jets(), _jets(), _jets())
def test_jet_product_is_associative_and_distributive(a, b, c):
    lhs, rhs = ((a * b) * c).as_tuple(), (a * (b * c)).as_tuple()
    assert lhs == pytest.approx(rhs, abs=1e-9)
    lhs, rhs = (a * (b + c)).as_tuple(), (a * b + a * c).as_tuple()
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_jet_apply_matches_square(v, dz, dw):
    u = Jet2(v, dz, dw, 0.3, -0.2)
    sq = u.apply(v * v, 2 * v, 2.0)
    assert sq.as_tuple() == pytest.approx((u * u).as_tuple(), abs=1e-9)


def test_jet_finite_flag():
    assert Jet2(1, 2, 3, 4, 5).finite()
    assert not Jet2(1, math.inf).finite()
    assert Jet2.const(2.0, 1.0).as_tuple() == (2.0, 1.0, 0.0, 0.0, 0.0)


# ---------------------------------------------------------------- (rho, tau)


def test_planar_binary_point(binary):
    t, T, rep = binary
    s = find_char_point(t, T, rep=rep)
    assert s.rho == pytest.approx(0.5, abs=1e-10)
    assert s.tau == pytest.approx(1.0, abs=1e-8)
    assert s.rho_error < 1e-9


def test_planar_point():
    t, T, _ = _setup("planar", 600)
    s = find_char_point(t, T)
    assert s.rho == pytest.approx(0.25, abs=1e-9)
    assert s.tau == pytest.approx(0.5, abs=1e-7)


def test_labelled_point():
    t, T, _ = _setup("labelled", 600)
    s = find_char_point(t, T)
    assert s.rho == pytest.approx(math.exp(-1), abs=1e-8)
    assert s.tau == pytest.approx(1.0, abs=1e-6)


def test_linear_equation_has_no_point():
    t, T, _ = _setup("chains", 200)
    with pytest.raises(NoCriticalPoint):
        find_char_point(t, T)


def test_subcritical_branch_below_rho(rooted):
    t, T, rep = rooted
    s = find_char_point(t, T, rep=rep)
    ys = [_subcritical(rep, s.rho * f)[0] for f in (0.2, 0.5, 0.8, 0.95, 0.999)]
    assert ys == sorted(ys)
    assert ys[-1] < s.tau
    assert _subcritical(rep, s.rho * 1.01) is None


def test_subcritical_value_matches_series(rooted):
    _, T, rep = rooted
    y, _ = _subcritical(rep, 0.2)
    assert y == pytest.approx(eval_real(T.series, 0.2)[0], rel=1e-12)


@pytest.mark.parametrize("name", ["labelled_binary", "planar", "rooted", "labelled", "necklaces"])
def test_tau_exceeds_prefix_by_law_tail(name):
    e = entry(name)
    order = min(e.order, 600)
    t = parse(e.equation)
    T = solve(t, order)
    s = find_char_point(t, T)
    law = asymptotic_constant(s, compute_dq(T))
    logc = T.series.log_coeffs()
    lr = math.log(s.rho)
    partial = sum(math.exp(logc[n] + n * lr) for n in range(1, order + 1) if math.isfinite(logc[n]))
    # sum of C n^{-3/2} over the support beyond N is about (C/q) 2/sqrt(N)
    predicted = law.C / law.q * 2 / math.sqrt(order)
    assert (s.tau - partial) / predicted == pytest.approx(1.0, abs=0.02)


def test_char_solution_dict(binary):
    t, T, rep = binary
    d = find_char_point(t, T, rep=rep).to_dict()
    assert set(d) == {"rho", "tau", "Ez", "Ew", "Eww", "residuals", "rho_error", "tau_error"}
    assert d["Ew"] == pytest.approx(1.0, abs=1e-8)
    assert max(d["residuals"]) < 1e-8


# ---------------------------------------------------------------- the constant


def test_planar_binary_constant(binary):
    t, T, rep = binary
    s = find_char_point(t, T, rep=rep)
    law = asymptotic_constant(s, PeriodInfo(1, 2, 0, "ProvedStable"))
    # E_z = 1 + tau^2 = 2 and E_ww = 2 rho = 1, doubled for the odd-only support
    assert law.C == pytest.approx(math.sqrt(2 / math.pi), rel=1e-8)


def test_labelled_constant():
    t, T, _ = _setup("labelled", 600)
    s = find_char_point(t, T)
    law = asymptotic_constant(s, PeriodInfo(1, 1, 0, "ProvedStable"))
    assert law.C == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-6)


def test_zero_second_derivative_rejected():
    s = CharSolution(0.5, 1.0, 1.0, 1.0, 0.0, 0.0, (0.0, 0.0), 0.0, 0.0, 0.0)
    with pytest.raises(DegenerateSecondDerivative):
        asymptotic_constant(s, PeriodInfo(1, 1, 0, "ProvedStable"))


def test_period_scales_constant():
    s = CharSolution(0.5, 1.0, 2.0, 1.0, 3.0, 0.0, (0.0, 0.0), 0.0, 0.0, 0.0)
    one = asymptotic_constant(s, PeriodInfo(1, 1, 0, "ProvedStable"))
    two = asymptotic_constant(s, PeriodInfo(1, 2, 0, "ProvedStable"))
    assert two.C == pytest.approx(2 * one.C)
    assert two.support == "n ≡ 1 (mod 2)"


def test_law_predict_off_support_is_zero():
    law = AsymptoticLaw(C=1.5, rho=0.25, d=1, q=2)
    assert law.predict(4) == 0.0
    assert law.predict(5) == pytest.approx(1.5 * 4**5 * 5**-1.5)
    assert math.log(law.predict(7)) == pytest.approx(law.log_predict(7))
