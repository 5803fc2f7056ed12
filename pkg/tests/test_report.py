import json
import math
from fractions import Fraction

import jsonschema
import pytest

from polyalaw.corpus import entry
from polyalaw.fixpoint import solve
from polyalaw.periodicity import PeriodInfo
from polyalaw.report import (
    InsufficientSupportPoints,
    analyze,
    catalan_prefix,
    empirical_fit,
    euler_product_prefix,
    ratio_rho_estimate,
    report_schema,
)
from polyalaw.series import Series
from polyalaw.singularity import AsymptoticLaw
from polyalaw.term import parse


@pytest.fixture(scope="module")
def planar_report():
    return analyze(entry("planar").equation, order=400)


@pytest.fixture(scope="module")
def schema():
    return report_schema()


# ---------------------------------------------------------------- oracles


def test_euler_product_head():
    assert [int(c) for c in euler_product_prefix(5).coeffs] == [1, 1, 2, 4, 9]
    assert [int(c) for c in euler_product_prefix(1).coeffs] == [1]


def test_catalan_head():
    assert [int(c) for c in catalan_prefix(6).coeffs] == [1, 1, 2, 5, 14, 42]


@pytest.mark.parametrize("bad", [0, -3])
def test_oracles_reject_nonpositive_order(bad):
    with pytest.raises(ValueError):
        euler_product_prefix(bad)
    with pytest.raises(ValueError):
        catalan_prefix(bad)


def test_rooted_solution_matches_euler_product():
    assert solve(parse("z + z*MSet(w)"), 300).series == euler_product_prefix(300)


# ---------------------------------------------------------------- fit


def test_fit_accepts_exact_law():
    rho, C = 0.5, 0.7
    coeffs = [C * rho**-n * n**-1.5 for n in range(1, 201)]
    T = Series([Fraction(round(c * 2**40), 2**40) for c in coeffs], 200)
    fit = empirical_fit(T, AsymptoticLaw(C, rho, 1, 1))
    assert fit.passed
    assert fit.relative_deviation < 1e-6


def test_fit_flags_wrong_constant():
    T = catalan_prefix(400)
    good = AsymptoticLaw(1 / (4 * math.sqrt(math.pi)), 0.25, 1, 1)
    bad = AsymptoticLaw(2 * good.C, 0.25, 1, 1)
    assert empirical_fit(T, good).passed
    f = empirical_fit(T, bad)
    assert not f.passed
    assert f.relative_deviation == pytest.approx(0.5, abs=0.01)
    assert f.to_dict() == {"deviation": f.relative_deviation, "pass": False}


def test_fit_needs_enough_points():
    with pytest.raises(InsufficientSupportPoints):
        empirical_fit(catalan_prefix(30), AsymptoticLaw(0.14, 0.25, 1, 1))


def test_fit_uses_only_the_support_class():
    T = solve(parse("z + z*w^2"), 400)
    fit = empirical_fit(T, AsymptoticLaw(math.sqrt(2 / math.pi), 0.5, 1, 2))
    assert all(n % 2 == 1 for n, _ in fit.samples)
    assert fit.passed


def test_ratio_estimate_tracks_inverse_rho():
    est = ratio_rho_estimate(catalan_prefix(600), PeriodInfo(1, 1, 0, "ProvedStable"))
    assert est == pytest.approx(4.0, rel=0.01)
    est = ratio_rho_estimate(solve(parse("z + z*w^2"), 600), PeriodInfo(1, 2, 0, "ProvedStable"))
    assert est == pytest.approx(2.0, rel=0.01)


def test_ratio_estimate_needs_two_support_points():
    with pytest.raises(InsufficientSupportPoints):
        ratio_rho_estimate(Series([1], 5), PeriodInfo(1, 1, 0, "PrefixEstimate"))


# ---------------------------------------------------------------- reports


def test_planar_report_values(planar_report):
    r = planar_report
    assert r.exit_code == 0
    assert r.char.rho == pytest.approx(0.25, abs=1e-9)
    assert r.law.C == pytest.approx(1 / (4 * math.sqrt(math.pi)), rel=1e-6)
    assert r.confidence == "full"


def test_report_validates_against_schema(planar_report, schema):
    jsonschema.validate(planar_report.to_dict(), schema)
    jsonschema.validate(json.loads(planar_report.to_json()), schema)


def test_rejected_report_validates(schema):
    r = analyze("w = z + z*w", order=64)
    assert r.exit_code == 2
    assert r.char is None and r.law is None
    d = r.to_dict()
    jsonschema.validate(d, schema)
    assert d["certificate"]["reason"] == "linear"
    assert d["rho"] is None and d["C"] is None
    assert "law not asserted" in r.to_text()


def test_not_retro_report_has_no_coefficients(schema):
    r = analyze("w = z + w + z*w^2", order=64)
    assert r.exit_code == 2
    assert r.prefix is None
    assert any("not retro" in w for w in r.warnings)
    jsonschema.validate(r.to_dict(), schema)


def test_text_report_mentions_every_quantity(planar_report):
    text = planar_report.to_text()
    for key in ("certificate", "period", "rho", "tau", "C ", "fit", "t(1..20)"):
        assert key in text
    assert "1, 1, 2, 5, 14, 42" in text


def test_coefficients_head_is_twenty_long(planar_report):
    head = planar_report.to_dict()["coefficients_head"]
    assert head[:6] == [1, 1, 2, 5, 14, 42]
    assert len(head) == 20


def test_halved_binary_is_rejected_but_estimated(schema):
    e = entry("halved_binary")
    r = analyze(e.equation, order=e.order)
    assert r.exit_code == 2
    assert r.ratio_estimate > 0.9
    assert r.to_dict()["coefficients_head"][:3] == ["1/2", 0, "3/16"]
    jsonschema.validate(r.to_dict(), schema)


def test_small_order_surfaces_warnings():
    r = analyze(entry("planar").equation, order=32)
    assert r.warnings
    assert r.exit_code in (0, 3)


def test_schema_rejects_missing_key(planar_report, schema):
    d = planar_report.to_dict()
    del d["certificate"]
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(d, schema)
