"""Truncated two-sided Laurent series on a circle |t| = p**(-rho_log).

Coefficients are exact rationals; the sup norm on the circle is the max of
|c_d| * rho**d over stored degrees, tracked in valuation scale as the
exponent min_d (v_p(c_d) + d*rho_log).  Arithmetic truncates to the window
[-N, N] and records whether a nonzero term was dropped, so callers can
distinguish exact results from windowed ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .exponents import Exponent, ExponentLike, as_exponent
from .padic import DomainError, check_odd_prime, padic_valuation

RationalLike = Union[int, Fraction, str]

DEFAULT_WINDOW = 64


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class WindowSaturation(RuntimeError):
    """A truncation dropped a term too large for the requested precision."""


@dataclass(frozen=True)
class AnnulusRing:
    """Shared parameters of a family of series: prime, radius, window."""

    prime: int
    rho_log: Exponent
    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        check_odd_prime(self.prime)
        object.__setattr__(self, "rho_log", as_exponent(self.rho_log))
        if self.window < 1:
            raise DomainError("window must be positive")

    def series(
        self, coeffs: Mapping[int, RationalLike], truncated: bool = False
    ) -> "AnnulusSeries":
        return AnnulusSeries(self, coeffs, truncated)

    def zero(self) -> "AnnulusSeries":
        return self.series({})

    def one(self) -> "AnnulusSeries":
        return self.series({0: 1})

    def constant(self, c: RationalLike) -> "AnnulusSeries":
        return self.series({0: c})

    def term_valuation(self, degree: int, coeff: Fraction) -> Exponent:
        return as_exponent(Fraction(padic_valuation(coeff, self.prime))) + (
            self.rho_log * degree
        )


@dataclass(frozen=True)
class AnnulusSeries:
    ring: AnnulusRing
    coeffs: Mapping[int, Fraction] = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        clean: Dict[int, Fraction] = {}
        dropped = False
        for d, c in self.coeffs.items():
            c = _frac(c)
            if c == 0:
                continue
            if abs(d) > self.ring.window:
                dropped = True
                continue
            clean[int(d)] = c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "truncated", self.truncated or dropped)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.coeffs))

    def __add__(self, other: "AnnulusSeries") -> "AnnulusSeries":
        self._check_ring(other)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, Fraction(0)) + c
        return AnnulusSeries(self.ring, out, self.truncated or other.truncated)

    def __sub__(self, other: "AnnulusSeries") -> "AnnulusSeries":
        return self + (-other)

    def __neg__(self) -> "AnnulusSeries":
        return AnnulusSeries(
            self.ring, {d: -c for d, c in self.coeffs.items()}, self.truncated
        )

    def __mul__(self, other: "AnnulusSeries") -> "AnnulusSeries":
        self._check_ring(other)
        dropped = False
        window = self.ring.window
        # integer fast path: the solver pipelines stay in Z[1/1]
        if all(c.denominator == 1 for c in self.coeffs.values()) and all(
            c.denominator == 1 for c in other.coeffs.values()
        ):
            iout: Dict[int, int] = {}
            items2 = [(d, c.numerator) for d, c in other.coeffs.items()]
            for d1, c1 in self.coeffs.items():
                n1 = c1.numerator
                for d2, n2 in items2:
                    d = d1 + d2
                    if abs(d) > window:
                        dropped = True
                        continue
                    iout[d] = iout.get(d, 0) + n1 * n2
            out: Dict[int, Fraction] = {d: Fraction(n) for d, n in iout.items()}
        else:
            out = {}
            for d1, c1 in self.coeffs.items():
                for d2, c2 in other.coeffs.items():
                    d = d1 + d2
                    if abs(d) > window:
                        dropped = True
                        continue
                    out[d] = out.get(d, Fraction(0)) + c1 * c2
        return AnnulusSeries(
            self.ring, out, self.truncated or other.truncated or dropped
        )

    def scale(self, s: RationalLike) -> "AnnulusSeries":
        s = _frac(s)
        if s == 0:
            return self.ring.zero()
        return AnnulusSeries(
            self.ring, {d: c * s for d, c in self.coeffs.items()}, self.truncated
        )

    def shift_degree(self, k: int) -> "AnnulusSeries":
        return AnnulusSeries(
            self.ring, {d + k: c for d, c in self.coeffs.items()}, self.truncated
        )

    def valuation(self) -> Optional[Exponent]:
        """Log of the sup norm (valuation scale); None for the zero series."""
        if self.is_zero:
            return None
        best = None
        for d, c in self.coeffs.items():
            v = self.ring.term_valuation(d, c)
            if best is None or v < best:
                best = v
        return best

    def norm_at_window_edge(self) -> bool:
        """True when the sup norm is attained at degree +-window."""
        val = self.valuation()
        if val is None:
            return False
        edge = self.ring.window
        return any(
            abs(d) == edge and self.ring.term_valuation(d, c) == val
            for d, c in self.coeffs.items()
        )

    def valuation_at_least(self, bound: ExponentLike) -> bool:
        val = self.valuation()
        return val is None or val >= as_exponent(bound)

    def plus_part(self) -> "AnnulusSeries":
        """Terms of degree >= 0 (functions on the closed inner disc)."""
        return AnnulusSeries(
            self.ring,
            {d: c for d, c in self.coeffs.items() if d >= 0},
            self.truncated,
        )

    def minus_part(self) -> "AnnulusSeries":
        """Terms of degree < 0 (functions outside, vanishing at infinity)."""
        return AnnulusSeries(
            self.ring,
            {d: c for d, c in self.coeffs.items() if d < 0},
            self.truncated,
        )

    def drop_below(self, threshold: ExponentLike) -> "AnnulusSeries":
        """Remove terms of valuation strictly above the threshold (norm below
        p**-threshold); used to keep geometric-series loops finite."""
        t = as_exponent(threshold)
        return AnnulusSeries(
            self.ring,
            {
                d: c
                for d, c in self.coeffs.items()
                if not self.ring.term_valuation(d, c) > t
            },
            self.truncated,
        )

    def reduce_precision(self, working_valuation: ExponentLike) -> "AnnulusSeries":
        """Reduce each coefficient mod the p-power that keeps every term
        valuation up to the working level intact.

        Replacing c_d by its residue mod p**K_d with K_d above
        working_valuation - d*rho changes the series only above the working
        valuation, so all norm comparisons at or below it are unaffected.
        Keeps coefficient sizes bounded across long iterations.
        """
        from .exponents import int_above

        tau = as_exponent(working_valuation)
        p = self.ring.prime
        out: Dict[int, Fraction] = {}
        for d, c in self.coeffs.items():
            if c.denominator % p == 0:
                out[d] = c  # negative valuation: leave exact
                continue
            k = max(1, int_above(tau - self.ring.rho_log * d))
            mod = p**k
            r = c.numerator * pow(c.denominator, -1, mod) % mod
            if r:
                out[d] = Fraction(r)
        return AnnulusSeries(self.ring, out, self.truncated)

    def _check_ring(self, other: "AnnulusSeries") -> None:
        if self.ring != other.ring:
            raise DomainError("series from different annulus rings")

    def __repr__(self) -> str:
        terms = ", ".join(f"{d}: {c}" for d, c in sorted(self.coeffs.items()))
        return f"AnnulusSeries({{{terms}}})"


def annulus_norm(s: AnnulusSeries) -> Exponent:
    """Exact log norm of a nonzero series; errors on zero."""
    val = s.valuation()
    if val is None:
        raise DomainError("norm of the zero series")
    return val


def geometric_inverse(s: AnnulusSeries, tail_valuation: ExponentLike) -> AnnulusSeries:
    """Inverse of 1 + x for x of positive valuation, via the geometric series.

    Terms are summed until x**k has valuation above ``tail_valuation``; the
    result equals (1+x)**-1 up to that valuation.
    """
    one = s.ring.one()
    x = s - one
    if x.is_zero:
        return one
    xval = x.valuation()
    if not (xval is not None and xval.sign() > 0):
        raise DomainError("geometric inverse needs |s - 1| < 1")
    target = as_exponent(tail_valuation)
    out = one
    power = one
    k = 0
    while True:
        power = power * (-x)
        k += 1
        pval = power.valuation()
        if pval is None:
            break
        out = out + power
        if pval > target:
            break
        if k > 4 * s.ring.window:
            raise WindowSaturation("geometric inverse did not converge in window")
    return out


def parse_series(
    text_or_map: Union[str, Mapping], ring: AnnulusRing, varname: str = "t"
) -> AnnulusSeries:
    """Series from a degree->coefficient map or a Laurent polynomial string.

    Strings use the rational-function grammar in the given variable and must
    reduce to a Laurent polynomial (denominator a pure power of the
    variable).
    """
    if isinstance(text_or_map, Mapping):
        return ring.series({int(d): _frac(c) for d, c in text_or_map.items()})
    from .ratfunc import parse_ratfunc

    f = parse_ratfunc(text_or_map, varname=varname)
    den = f.denominator
    nonzero = [(j, c) for j, c in enumerate(den.coeffs) if c != 0]
    if len(nonzero) != 1:
        raise DomainError("series strings must have a monomial denominator")
    shift, lead = nonzero[0]
    coeffs = {
        j - shift: c / lead for j, c in enumerate(f.numerator.coeffs) if c != 0
    }
    return ring.series(coeffs)


def series_to_map(s: AnnulusSeries) -> Dict[str, str]:
    return {str(d): str(c) for d, c in sorted(s.coeffs.items())}
