"""Rational functions over Q in one variable T, with generalized Gauss
norms at disc points of the projective line.

Polynomials are dense tuples of Fractions.  The point norm of a function
at the point with center c and radius p**(-e) is read off the (T - c)
expansions of numerator and denominator: each contributes
min_j (v_p(a_j) + j*e), and the norm exponent is their difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

from .exponents import Exponent, as_exponent
from .padic import DomainError, padic_valuation

RationalLike = Union[int, Fraction, str]


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial over Q; coeffs[i] multiplies T**i."""

    coeffs: Tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[RationalLike]):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def leading(self) -> Fraction:
        if self.is_zero:
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(
            (self.coeffs[i] if i < len(self.coeffs) else 0)
            + (other.coeffs[i] if i < len(other.coeffs) else 0)
            for i in range(n)
        )

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero or other.is_zero:
            return Polynomial(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    def scale(self, s: RationalLike) -> "Polynomial":
        s = _frac(s)
        return Polynomial(c * s for c in self.coeffs)

    def divmod(self, other: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q: List[Fraction] = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.coeffs
        while len(rem) >= len(d):
            coeff = rem[-1] / d[-1]
            shift = len(rem) - len(d)
            q[shift] = coeff
            for i, b in enumerate(d):
                rem[shift + i] -= coeff * b
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(q), Polynomial(rem)

    def evaluate(self, x: RationalLike) -> Fraction:
        x = _frac(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, c: RationalLike) -> "Polynomial":
        """Coefficients of the expansion in powers of (T - c), i.e. P(T + c)."""
        c = _frac(c)
        out = list(self.coeffs)
        # synthetic Taylor shift: repeated Horner division by (T - c)
        n = len(out)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                out[j] += c * out[j + 1]
        return Polynomial(out)

    def monic(self) -> "Polynomial":
        if self.is_zero:
            return self
        return self.scale(1 / self.leading())

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero:
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic() if not a.is_zero else a


POLY_ZERO = Polynomial(())
POLY_ONE = Polynomial((1,))
POLY_T = Polynomial((0, 1))


@dataclass(frozen=True)
class RationalFunction:
    """gcd-reduced fraction of polynomials with monic denominator."""

    numerator: Polynomial
    denominator: Polynomial

    def __init__(self, numerator: Polynomial, denominator: Polynomial = POLY_ONE):
        if denominator.is_zero:
            raise DomainError("zero denominator")
        if numerator.is_zero:
            numerator, denominator = POLY_ZERO, POLY_ONE
        else:
            g = poly_gcd(numerator, denominator)
            if g.degree > 0:
                numerator, _ = numerator.divmod(g)
                denominator, _ = denominator.divmod(g)
            lead = denominator.leading()
            numerator = numerator.scale(1 / lead)
            denominator = denominator.scale(1 / lead)
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    @classmethod
    def constant(cls, c: RationalLike) -> "RationalFunction":
        return cls(Polynomial((_frac(c),)))

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    def inverse(self) -> "RationalFunction":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.denominator, self.numerator)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return self * other.inverse()

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return self.inverse() ** (-k)
        out = RationalFunction.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (
            self.numerator.coeffs == other.numerator.coeffs
            and self.denominator.coeffs == other.denominator.coeffs
        )

    def __hash__(self):
        return hash((self.numerator.coeffs, self.denominator.coeffs))

    def __repr__(self) -> str:
        return f"RationalFunction({format_ratfunc(self)!r})"


RF_ONE = RationalFunction(POLY_ONE)
RF_T = RationalFunction(POLY_T)


# ---------------------------------------------------------------------------
# Gauss point norms
# ---------------------------------------------------------------------------


def gauss_valuation(
    poly: Polynomial, center: RationalLike, log_radius: Exponent, p: int
) -> Tuple[Exponent, int]:
    """min_j (v_p(a_j) + j*e) over the (T-c) expansion, with attaining index.

    When several indices attain the minimum (possible only for rational
    log-radius) the smallest one is reported.
    """
    if poly.is_zero:
        raise DomainError("Gauss valuation of the zero polynomial")
    e = as_exponent(log_radius)
    shifted = poly.shift(_frac(center))
    best: Optional[Exponent] = None
    best_j = -1
    for j, a in enumerate(shifted.coeffs):
        if a == 0:
            continue
        val = as_exponent(Fraction(padic_valuation(a, p))) + e * j
        if best is None or val < best:
            best = val
            best_j = j
    assert best is not None
    return best, best_j


def point_norm_exponent(
    f: RationalFunction, center: RationalLike, log_radius: Exponent, p: int
) -> Exponent:
    """Valuation-scale log norm v with |f| = p**(-v) at the point (c, r).

    Computed as the Gauss valuation of the numerator minus that of the
    denominator; requires r > 0 and f != 0.
    """
    if f.is_zero:
        raise DomainError("point norm of the zero function")
    num_val, _ = gauss_valuation(f.numerator, center, log_radius, p)
    den_val, _ = gauss_valuation(f.denominator, center, log_radius, p)
    return num_val - den_val


# ---------------------------------------------------------------------------
# plain text grammar: rational literals, T, + - * / ^, parentheses
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    pass


class _Parser:
    def __init__(self, text: str, varname: str = "T"):
        self.text = text
        self.pos = 0
        self.varname = varname

    def parse(self) -> RationalFunction:
        result = self._expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ParseError(f"unexpected input at position {self.pos}")
        return result

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expr(self) -> RationalFunction:
        left = self._term()
        while True:
            ch = self._peek()
            if ch == "+":
                self.pos += 1
                left = left + self._term()
            elif ch == "-":
                self.pos += 1
                left = left - self._term()
            else:
                return left

    def _term(self) -> RationalFunction:
        left = self._factor()
        while True:
            ch = self._peek()
            if ch == "*":
                self.pos += 1
                left = left * self._factor()
            elif ch == "/":
                self.pos += 1
                left = left / self._factor()
            else:
                return left

    def _factor(self) -> RationalFunction:
        ch = self._peek()
        if ch == "-":
            self.pos += 1
            return -self._factor()
        if ch == "+":
            self.pos += 1
            return self._factor()
        base = self._atom()
        if self._peek() == "^":
            self.pos += 1
            exp = self._int()
            return base**exp
        return base

    def _atom(self) -> RationalFunction:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            inner = self._expr()
            if self._peek() != ")":
                raise ParseError("missing closing parenthesis")
            self.pos += 1
            return inner
        if ch.isdigit():
            return RationalFunction.constant(self._int())
        if ch and (ch == self.varname or ch.lower() == self.varname.lower()):
            self.pos += 1
            return RationalFunction(POLY_T)
        raise ParseError(f"unexpected character {ch!r} at position {self.pos}")

    def _int(self) -> int:
        self._skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or not self.text[start:self.pos].lstrip("+-"):
            raise ParseError(f"expected integer at position {start}")
        return int(self.text[start : self.pos])


def parse_ratfunc(text: str, varname: str = "T") -> RationalFunction:
    """Parse ``3/2*T^2 - (T-1)/(T+5)`` style expressions."""
    return _Parser(text, varname).parse()


def format_poly(poly: Polynomial, varname: str = "T") -> str:
    if poly.is_zero:
        return "0"
    parts = []
    for j, c in enumerate(poly.coeffs):
        if c == 0:
            continue
        if j == 0:
            parts.append(str(c))
        else:
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            var = varname if j == 1 else f"{varname}^{j}"
            sign = "-" if c < 0 else ""
            parts.append(f"{sign}{mag}{var}")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


def format_ratfunc(f: RationalFunction, varname: str = "T") -> str:
    num = format_poly(f.numerator, varname)
    if f.denominator.coeffs == (Fraction(1),):
        return num
    return f"({num})/({format_poly(f.denominator, varname)})"
