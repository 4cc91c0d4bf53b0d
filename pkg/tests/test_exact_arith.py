from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trc.errors import DivisionByZero, FieldMismatch, InvalidField, ParseError
from trc.exact_arith import (
    CONWAY_POLYNOMIALS,
    QQ,
    QQI,
    FFElem,
    GaloisField,
    GaussianInteger,
    GaussianRational,
    gaussian_gcd,
    height,
    is_irreducible,
    parse_field,
)


def ceil_log2_oracle(n):
    k = 0
    while 2 ** k < n:
        k += 1
    return k


def height_oracle(x):
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    return ceil_log2_oracle(q) + (1 if p == 0 else max(1, ceil_log2_oracle(2 * abs(p))))


def test_height_examples():
    assert height(Fraction(3, 4)) == 5
    assert height(Fraction(1)) == 1
    assert height(Fraction(0)) == 1
    assert height(-7) == height(7) == 4


rationals = st.fractions(max_denominator=10 ** 6).filter(lambda x: abs(x.numerator) < 10 ** 9)


@given(rationals)
def test_height_matches_oracle(x):
    assert height(x) == height_oracle(x)


@given(rationals, rationals)
def test_height_submultiplicative(a, b):
    assert height(a * b) <= height(a) + height(b) + 2


def test_field_op_examples():
    assert QQ.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
    G2 = GaloisField(2)
    assert G2.one + G2.one == G2.zero
    i = GaussianRational(0, 1)
    assert i * i == GaussianRational(-1, 0)


def test_rational_division_by_zero():
    with pytest.raises(DivisionByZero):
        QQ.div(Fraction(1), Fraction(0))
    with pytest.raises(ZeroDivisionError):
        QQ.inv(QQ.zero)


def _fields():
    return [GaloisField(2), GaloisField(5), GaloisField(2, 3), GaloisField(3, 2), GaloisField(2, 4)]


@pytest.mark.parametrize("F", _fields(), ids=lambda F: F.spec_line())
def test_finite_field_axioms_exhaustive(F):
    els = F.elements
    assert len(set(F.index(x) for x in els)) == F.order
    for a in els:
        assert a + (-a) == F.zero
        if a != F.zero:
            assert a * a.inverse() == F.one
            assert a ** (F.order - 1) == F.one
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a and a * b == b * a
    sample = els[: min(len(els), 9)]
    for a, b, c in itertools.product(sample, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


gauss = st.builds(GaussianRational, rationals, rationals)


@settings(max_examples=60)
@given(gauss, gauss, gauss)
def test_gaussian_rational_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a.conjugate() * a).im == 0
    if a != GaussianRational(0, 0):
        assert a * a.inverse() == GaussianRational(1, 0)


def test_gaussian_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        GaussianRational(0, 0).inverse()


@settings(max_examples=80)
@given(st.integers(-500, 500), st.integers(-500, 500), st.integers(-50, 50), st.integers(-50, 50))
def test_gaussian_integer_euclidean_division(a, b, c, d):
    x, y = GaussianInteger(a, b), GaussianInteger(c, d)
    if y.norm() == 0:
        return
    q, r = divmod(x, y)
    assert q * y + r == x
    assert r.norm() < y.norm()


def test_gaussian_gcd_divides_both():
    a = GaussianInteger(3, 4) * GaussianInteger(1, 1)
    b = GaussianInteger(1, 1) * GaussianInteger(2, -1)
    g = gaussian_gcd(a, b)
    assert g.norm() == 2
    assert divmod(a, g)[1].norm() == 0 and divmod(b, g)[1].norm() == 0


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        GaloisField(2).one + GaloisField(3).one
    with pytest.raises(FieldMismatch):
        GaloisField(2, 2).one * GaloisField(2, 3).one


def test_conway_moduli_are_irreducible():
    for (p, l), m in CONWAY_POLYNOMIALS.items():
        assert p ** l <= 64
        assert is_irreducible(m, p)
        assert GaloisField(p, l).order == p ** l


def _has_factor(poly, p):
    """Exhaustive factor search: try every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    for k in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            divisor = list(low) + [1]
            rem = list(poly)
            for shift in range(deg - k, -1, -1):
                coef = rem[shift + k] % p
                if coef:
                    for i, c in enumerate(divisor):
                        rem[shift + i] = (rem[shift + i] - coef * c) % p
            if not any(x % p for x in rem[:k]):
                return True
    return False


def test_reducible_moduli_rejected():
    checked = 0
    for p, l in [(2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (7, 2)]:
        if p * l > 16:
            continue
        for low in itertools.product(range(p), repeat=l):
            m = list(low) + [1]
            if _has_factor(m, p):
                checked += 1
                with pytest.raises(InvalidField):
                    GaloisField(p, l, m)
            else:
                assert GaloisField(p, l, m).order == p ** l
    assert checked > 50


def test_invalid_fields():
    with pytest.raises(InvalidField):
        GaloisField(4)
    with pytest.raises(InvalidField):
        GaloisField(2, 2, [1, 0, 2])


def test_scalar_syntax_round_trip():
    assert QQ.parse("-3/6") == Fraction(-1, 2)
    assert QQ.format(Fraction(-1, 2)) == "-1/2"
    for text, value in [("1/2+3/4*i", GaussianRational(Fraction(1, 2), Fraction(3, 4))),
                        ("i", GaussianRational(0, 1)), ("-i", GaussianRational(0, -1)),
                        ("1-2*i", GaussianRational(1, -2)), ("5", GaussianRational(5, 0))]:
        x = QQI.parse(text)
        assert x == value
        assert QQI.parse(QQI.format(x)) == x
    F = GaloisField(3, 2)
    x = F.parse("[2,1]")
    assert x == FFElem(F, [2, 1]) and F.format(x) == "[2,1]"
    with pytest.raises(ParseError):
        GaloisField(5).parse("5")
    with pytest.raises(ParseError):
        F.parse("[1,2,0]")


def test_parse_field_lines():
    assert parse_field("Q") is QQ
    assert parse_field(["QI"]) is QQI
    assert parse_field("GF 7 1") == GaloisField(7)
    F = parse_field("GF 2 3 [1,1,0,1]")
    assert F == GaloisField(2, 3)
    assert parse_field(F.spec_line().split()[1:]) == F
    with pytest.raises(ParseError):
        parse_field("R")
