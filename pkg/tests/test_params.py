import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gouq.errors import DegenerateModel, InvalidC, InvalidRate
from gouq.params import CValue, ModelParams, RawRates, as_c, degenerate_value, normalize


def test_normalize_independent_rates():
    par = normalize(RawRates(1, 1, 0), 2)
    assert (par.p, par.q, par.r) == (0.5, 0.5, 0.0)
    assert par.exact == (Fraction(1, 2), Fraction(1, 2), Fraction(0))


def test_normalize_mixed_rates():
    par = normalize(RawRates(3, 5, 2), 2)
    assert par.exact == (Fraction(3, 10), Fraction(1, 2), Fraction(1, 5))


def test_normalize_float_rates():
    par = normalize(RawRates(0.3, 0.5, 0.2), 2.5)
    assert math.isclose(par.p + par.q + par.r, 1.0)
    assert par.exact is None


def test_all_joint_is_degenerate():
    with pytest.raises(DegenerateModel):
        normalize(RawRates(0, 0, 1), 2)
    assert degenerate_value(2) == 2.0
    assert math.isclose(degenerate_value(3), 1.5)


@pytest.mark.parametrize("rates", [(0, 1, 0), (1, 0, 0), (-1, 1, 1), (float("nan"), 1, 1)])
def test_rates_rejected(rates):
    with pytest.raises(InvalidRate):
        RawRates(*rates)


@pytest.mark.parametrize("c", [1, 0.5, -2, 1.0])
def test_c_must_exceed_one(c):
    with pytest.raises(InvalidC):
        as_c(c)


def test_c_tags():
    assert as_c(2).kind == "integer"
    assert as_c("3").exact == 3
    assert as_c(Fraction(3, 2)).kind == "rational"
    assert as_c("2.718281828").kind == "float"
    alg = CValue.algebraic((1 + 5 ** 0.5) / 2, [1, -1, -1])
    assert alg.poly == (1, -1, -1)
    assert as_c(alg) is alg


def test_create_from_two():
    par = ModelParams.create(2, q="0.4", r="0.2")
    assert par.exact == (Fraction(2, 5), Fraction(2, 5), Fraction(1, 5))
    with pytest.raises(InvalidRate):
        ModelParams.create(2, q=0.4)
    with pytest.raises(InvalidRate):
        ModelParams.create(2, p="0.5", q="0.5", r="0.1")


def test_create_float_normalises_rounding():
    par = ModelParams.create(2, p=0.1, q=0.7, r=0.2)
    assert par.p + par.q + par.r == pytest.approx(1.0, abs=1e-15)


def test_with_c_keeps_rates():
    par = ModelParams.create(2, q=Fraction(1, 2), r=0).with_c(3)
    assert par.c.exact == 3 and par.exact[1] == Fraction(1, 2)


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_normalize_sums_to_one(u, v, w):
    try:
        par = normalize(RawRates(u, v, w), 2)
    except (InvalidRate, DegenerateModel):
        assert u + w == 0 or v + w == 0 or u + v == 0
        return
    assert sum(par.exact) == 1
    assert par.exact[0] == Fraction(u, u + v + w)
