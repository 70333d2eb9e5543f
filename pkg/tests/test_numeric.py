from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lazyshuffle.numeric import (
    Interval,
    Surd,
    arith,
    eval_interval,
    is_probability,
    rat,
    scalar_from_json,
    scalar_sign,
    scalar_to_json,
    set_working_precision,
    solve_division_q,
    surd,
    working_precision,
)

fractions = st.fractions(min_value=-10, max_value=10, max_denominator=50)
radicands = st.sampled_from([2, 3, 5, 6, 7, Fraction(1, 3), Fraction(3, 7), Fraction(8, 9)])


def mp_value(x, dps=80):
    with mpmath.workdps(dps):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mp_value(x.a, dps) + mp_value(x.b, dps) * mpmath.sqrt(mp_value(x.c, dps))


# -- rationals ---------------------------------------------------------------------


def test_rat_canonical_forms():
    assert rat(2, 4) == Fraction(1, 2)
    r = rat(3, -6)
    assert (r.numerator, r.denominator) == (-1, 2)
    assert rat(1, 1) == 1


def test_rat_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        rat(1, 0)


@given(fractions, fractions, fractions)
def test_rational_field_laws(x, y, z):
    assert arith(arith(x, y, "+"), z, "+") == arith(x, arith(y, z, "+"), "+")
    assert arith(arith(x, y, "*"), z, "*") == arith(x, arith(y, z, "*"), "*")
    assert arith(x, y, "+") == arith(y, x, "+")
    assert arith(x, y, "×") == arith(y, x, "*")


# -- surds ---------------------------------------------------------------------------


def test_surd_collapses_rational_roots():
    assert surd(1, 1, 4) == 3
    assert isinstance(surd(1, 2, Fraction(9, 4)), Fraction)
    assert surd(Fraction(1, 2), 0, 3) == Fraction(1, 2)


def test_surd_normalises_radicand():
    x = surd(0, 1, Fraction(1, 3))
    assert isinstance(x, Surd) and x.c == 3 and x.b == Fraction(1, 3)
    assert surd(0, 1, 8) == surd(0, 2, 2)


def test_conjugate_sum_is_exact():
    half = Fraction(1, 2)
    x = surd(half, -half, Fraction(1, 3))
    y = surd(half, half, Fraction(1, 3))
    assert arith(x, y, "+") == 1
    assert isinstance(arith(x, y, "+"), Fraction)


def test_mixed_radicands_demote_to_interval():
    q2, q4 = solve_division_q(2), solve_division_q(4)
    prod = arith(q2, q4, "×")
    assert isinstance(prod, Interval)
    with mpmath.workdps(40):
        ref = mp_value(q2) * mp_value(q4)
    assert prod.lo <= ref <= prod.hi
    assert prod.width < 1e-15


@given(fractions, fractions.filter(bool), radicands, fractions, fractions.filter(bool), st.sampled_from("+-*/"))
@settings(max_examples=300)
def test_surd_arithmetic_matches_high_precision(a1, b1, c, a2, b2, op):
    x, y = surd(a1, b1, c), surd(a2, b2, c)
    ops = {"+": lambda u, v: u + v, "-": lambda u, v: u - v, "*": lambda u, v: u * v, "/": lambda u, v: u / v}
    if op == "/" and y == 0:
        return
    got = ops[op](x, y)
    assert isinstance(got, (Fraction, Surd))
    with mpmath.workdps(80):
        ref = ops[op](mp_value(x), mp_value(y))
        assert abs(mp_value(got) - ref) <= mpmath.mpf(10) ** -60 * (1 + abs(ref))


@given(fractions, fractions.filter(bool), radicands, fractions)
@settings(max_examples=300)
def test_sign_and_order_are_exact(a, b, c, r):
    x = surd(a, b, c)
    ref = mp_value(x)
    assert scalar_sign(x) == (1 if ref > 0 else -1 if ref < 0 else 0)
    assert (x < r) == (ref < mp_value(Fraction(r)))
    assert (x >= r) == (ref >= mp_value(Fraction(r)))


def test_surd_equality_and_hash():
    x = surd(Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3))
    y = surd(Fraction(1, 2), Fraction(-1, 6), 3)
    assert x == y and hash(x) == hash(y)
    assert x != surd(Fraction(1, 2), Fraction(1, 6), 3)
    assert x != Fraction(1, 2)


# -- division q ---------------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 129, 2))
def test_division_q_solves_quadratic_exactly(n):
    q = solve_division_q(n)
    assert q * (1 - q) - Fraction(n, 4 * (2 * n - 1)) == 0
    assert 0 < q < Fraction(1, 2)


def test_division_q_examples():
    q2 = solve_division_q(2)
    assert q2 == surd(Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3))
    assert q2 * (1 - q2) == Fraction(1, 6)
    assert abs(float(q2) - 0.2113248654051871) < 1e-15
    q4 = solve_division_q(4)
    assert q4 == surd(Fraction(1, 2), Fraction(-1, 2), Fraction(3, 7))
    assert q4 * (1 - q4) == Fraction(1, 7)


@pytest.mark.parametrize("n", [0, 3, -2])
def test_division_q_rejects_bad_n(n):
    with pytest.raises(ValueError):
        solve_division_q(n)


# -- intervals ---------------------------------------------------------------------------


def test_eval_interval_examples():
    third = eval_interval(Fraction(1, 3), 53)
    assert third.contains(Fraction(1, 3)) and third.width < 1e-15
    zero = eval_interval(Fraction(0))
    assert zero.lo == zero.hi == 0.0
    q = eval_interval(solve_division_q(2))
    with mpmath.workdps(50):
        ref = (1 - mpmath.sqrt(mpmath.mpf(1) / 3)) / 2
    assert q.lo <= ref <= q.hi


@given(fractions, fractions.filter(bool), radicands, st.integers(53, 300))
@settings(max_examples=200)
def test_eval_interval_encloses_and_is_narrow(a, b, c, bits):
    x = surd(a, b, c)
    iv = eval_interval(x, bits)
    with mpmath.workprec(600):
        ref = mp_value(x, 200)
        assert iv.lo <= ref <= iv.hi
    # binary64 endpoints cap the attainable width at a few ulps
    assert iv.width <= max(2.0 ** (-bits + 2) * (1 + abs(float(b)) * 4), 4 * abs(float(x)) * 2.0**-52 + 1e-300)


@given(fractions, fractions, fractions, fractions)
def test_interval_arithmetic_contains_exact_result(a, b, c, d):
    x = Interval.enclosing(min(a, b), max(a, b))
    y = Interval.enclosing(min(c, d), max(c, d))
    for u in (a, b):
        for v in (c, d):
            assert (x + y).contains(u + v)
            assert (x - y).contains(u - v)
            assert (x * y).contains(u * v)


def test_working_precision_setting():
    assert working_precision() == 128
    set_working_precision(200)
    try:
        assert working_precision() == 200
        narrow = eval_interval(solve_division_q(6))
        assert narrow.contains(Fraction(0)) is False
    finally:
        set_working_precision(128)
    with pytest.raises(ValueError):
        set_working_precision(8)


def test_is_probability():
    assert is_probability(Fraction(0)) and is_probability(Fraction(1))
    assert not is_probability(Fraction(3, 2))
    assert is_probability(solve_division_q(10))
    assert not is_probability(surd(1, 1, 2))


# -- JSON ----------------------------------------------------------------------------------


@given(st.fractions())
def test_rational_json_round_trip(x):
    doc = scalar_to_json(x)
    assert set(doc) == {"rat"}
    back = scalar_from_json(doc)
    assert back == x and (back.numerator, back.denominator) == (x.numerator, x.denominator)


def test_surd_json_round_trip():
    q = solve_division_q(12)
    assert scalar_from_json(scalar_to_json(q)) == q


@pytest.mark.parametrize(
    "doc",
    [{"rat": {"num": 1, "den": "2"}}, {"rat": {"num": "1", "den": "0"}}, {"float": 0.5}, {}, "1/2"],
)
def test_scalar_json_rejects_malformed(doc):
    with pytest.raises((ValueError, ZeroDivisionError)):
        scalar_from_json(doc)
