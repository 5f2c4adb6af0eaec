"""Annulus series arithmetic and the exact circle norm."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berkpatch.exponents import Exponent
from berkpatch.padic import DomainError
from berkpatch.series import (
    AnnulusRing,
    annulus_norm,
    geometric_inverse,
    parse_series,
)

RING = AnnulusRing(prime=3, rho_log=Exponent(Fraction(1, 2)), window=24)

coeff_maps = st.dictionaries(
    st.integers(min_value=-8, max_value=8),
    st.fractions(min_value=-50, max_value=50, max_denominator=9),
    max_size=6,
)


class TestNorm:
    def test_coordinate(self):
        s = RING.series({1: 1})
        assert annulus_norm(s) == Exponent(Fraction(1, 2))

    def test_max_of_terms(self):
        # p + t^2 at rho = p^(-1/2): both terms have norm p^-1
        s = RING.series({0: 3, 2: 1})
        assert annulus_norm(s) == Exponent(1)

    def test_negative_degree(self):
        s = RING.series({-1: 1})
        assert annulus_norm(s) == Exponent(Fraction(-1, 2))

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            annulus_norm(RING.zero())

    @given(coeff_maps, coeff_maps)
    @settings(max_examples=200)
    def test_multiplicative_without_truncation(self, c1, c2):
        s1, s2 = RING.series(c1), RING.series(c2)
        prod = s1 * s2
        if s1.is_zero or s2.is_zero:
            assert prod.is_zero
            return
        if prod.truncated:
            return
        assert annulus_norm(prod) == annulus_norm(s1) + annulus_norm(s2)

    @given(coeff_maps, coeff_maps)
    def test_ultrametric(self, c1, c2):
        s1, s2 = RING.series(c1), RING.series(c2)
        total = s1 + s2
        if total.is_zero or s1.is_zero or s2.is_zero:
            return
        v1, v2 = annulus_norm(s1), annulus_norm(s2)
        vmin = v1 if v1 < v2 else v2
        assert annulus_norm(total) >= vmin
        if v1 != v2:
            assert annulus_norm(total) == vmin


class TestWindow:
    def test_truncation_flag(self):
        small = AnnulusRing(prime=3, rho_log=Exponent(Fraction(1, 2)), window=2)
        s = small.series({2: 1})
        assert not s.truncated
        assert (s * s).truncated  # degree 4 falls outside
        assert (s * s).is_zero

    def test_edge_flag(self):
        s = RING.series({RING.window: 1})
        assert s.norm_at_window_edge()
        assert not RING.series({0: 1}).norm_at_window_edge()


class TestParse:
    def test_string(self):
        s = parse_series("t^-1 + 5 + t", RING)
        assert s.coeffs == {-1: Fraction(1), 0: Fraction(5), 1: Fraction(1)}

    def test_map(self):
        s = parse_series({"-2": "1/3", "0": 2}, RING)
        assert s.coeffs == {-2: Fraction(1, 3), 0: Fraction(2)}

    def test_split_parts(self):
        s = parse_series("t^-1 + 5 + t", RING)
        assert s.plus_part().coeffs == {0: Fraction(5), 1: Fraction(1)}
        assert s.minus_part().coeffs == {-1: Fraction(1)}


class TestInverse:
    def test_geometric(self):
        s = RING.one() + RING.series({1: 3})
        inv = geometric_inverse(s, Exponent(40))
        prod = s * inv
        resid = prod - RING.one()
        assert resid.is_zero or annulus_norm(resid) > Exponent(24)


class TestAgainstPointNorm:
    @given(
        st.lists(st.integers(min_value=-9, max_value=9), min_size=1, max_size=5),
        st.integers(min_value=-3, max_value=3),
    )
    @settings(max_examples=100)
    def test_recentring_matches_series_norm(self, coeffs, c):
        """Expanding a polynomial in (T - c) and reading it as a series on
        the circle of the same radius gives the same norm exponent."""
        from berkpatch.ratfunc import Polynomial, RationalFunction, point_norm_exponent

        poly = Polynomial(coeffs)
        if poly.is_zero:
            return
        e = Exponent(Fraction(1), Fraction(1, 3))
        f = RationalFunction(poly)
        via_point = point_norm_exponent(f, c, e, 3)
        ring = AnnulusRing(3, e, 64)
        shifted = poly.shift(Fraction(c))
        series = ring.series(dict(enumerate(shifted.coeffs)))
        assert annulus_norm(series) == via_point
