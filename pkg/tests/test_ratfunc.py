"""Rational function arithmetic, parsing, and Gauss point norms."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from berkpatch.exponents import Exponent
from berkpatch.padic import DomainError
from berkpatch.ratfunc import (
    Polynomial,
    RationalFunction,
    ParseError,
    parse_ratfunc,
    point_norm_exponent,
    poly_gcd,
)

small_polys = st.lists(
    st.integers(min_value=-9, max_value=9), min_size=1, max_size=5
).map(Polynomial)


class TestPolynomial:
    def test_shift_is_taylor(self):
        p = Polynomial([1, 2, 1])  # (T+1)^2
        shifted = p.shift(Fraction(3))  # p(T+3) = (T+4)^2
        assert shifted.coeffs == (Fraction(16), Fraction(8), Fraction(1))

    @given(small_polys, st.integers(min_value=-5, max_value=5), st.integers(-4, 4))
    def test_shift_evaluates(self, p, c, x):
        assert p.shift(c).evaluate(x) == p.evaluate(x + c)

    @given(small_polys, small_polys)
    def test_divmod_identity(self, a, b):
        if b.is_zero:
            return
        q, r = a.divmod(b)
        assert (q * b + r).coeffs == a.coeffs
        assert r.is_zero or r.degree < b.degree

    def test_gcd(self):
        a = Polynomial([1, 1]) * Polynomial([-2, 1])
        b = Polynomial([1, 1]) * Polynomial([5, 1])
        assert poly_gcd(a, b).coeffs == (Fraction(1), Fraction(1))


class TestParser:
    @pytest.mark.parametrize(
        "text, at, expected",
        [
            ("T", 2, Fraction(2)),
            ("T^2 - 3*T + 1", 2, Fraction(-1)),
            ("(T - 1)/(T + 5)", 2, Fraction(1, 7)),
            ("3/2", 0, Fraction(3, 2)),
            ("-T^3 + 2", 1, Fraction(1)),
            ("1/(T-1)", 3, Fraction(1, 2)),
        ],
    )
    def test_evaluates(self, text, at, expected):
        f = parse_ratfunc(text)
        num = f.numerator.evaluate(at)
        den = f.denominator.evaluate(at)
        assert num / den == expected

    def test_rejects_garbage(self):
        with pytest.raises(ParseError):
            parse_ratfunc("T +")
        with pytest.raises(ParseError):
            parse_ratfunc("2 ** 3")

    def test_reduction(self):
        f = parse_ratfunc("(T^2 - 1)/(T - 1)")
        assert f.denominator.coeffs == (Fraction(1),)
        assert f.numerator.coeffs == (Fraction(1), Fraction(1))


class TestPointNorm:
    def test_coordinate_function(self):
        # |T| at the disc point (0, r) equals r for any radius
        e = Exponent(Fraction(1), Fraction(1, 2))
        f = parse_ratfunc("T")
        assert point_norm_exponent(f, 0, e, 3) == e

    def test_shifted_coordinate(self):
        e = Exponent(Fraction(2))
        f = parse_ratfunc("T - 5")
        assert point_norm_exponent(f, 5, e, 3) == e

    def test_inverse_off_center(self):
        # 1/(T-1) at (0, r) with r < 1: |T-1| = max(1, r) = 1
        f = parse_ratfunc("1/(T-1)")
        e = Exponent(Fraction(1))
        assert point_norm_exponent(f, 0, e, 3) == Exponent(0)

    def test_zero_function_rejected(self):
        with pytest.raises(DomainError):
            point_norm_exponent(RationalFunction(Polynomial(())), 0, Exponent(1), 3)

    @given(small_polys, small_polys, st.sampled_from([3, 5]))
    def test_multiplicative(self, a, b, p):
        if a.is_zero or b.is_zero:
            return
        e = Exponent(Fraction(1), Fraction(1, 3))  # type-3 radius: norms multiply
        fa = RationalFunction(a)
        fb = RationalFunction(b)
        va = point_norm_exponent(fa, 0, e, p)
        vb = point_norm_exponent(fb, 0, e, p)
        assert point_norm_exponent(fa * fb, 0, e, p) == va + vb
