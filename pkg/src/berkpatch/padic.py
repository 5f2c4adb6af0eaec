"""Exact p-adic scalars over Q for odd p: valuations, square classes,
Hensel square roots.

Scalars are plain rationals; modular arithmetic only enters through the
Newton lifting of square roots, where precision is explicit.  Only odd
primes are supported (residue characteristic 2 is out of scope).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import sympy

RationalLike = Union[int, Fraction, str]


class DomainError(ValueError):
    """Precondition violation in a library operation."""


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def check_odd_prime(p: int) -> int:
    if p == 2 or not sympy.isprime(p):
        raise DomainError(f"{p} is not an odd prime")
    return p


def padic_valuation(x: RationalLike, p: int) -> int:
    """Exact p-adic valuation of a nonzero rational."""
    x = _frac(x)
    if x == 0:
        raise DomainError("valuation of zero is undefined")
    check_odd_prime(p)
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x: RationalLike, p: int) -> Fraction:
    """x / p**v_p(x); a rational whose numerator and denominator avoid p."""
    x = _frac(x)
    v = padic_valuation(x, p)
    return x / Fraction(p) ** v


def residue(x: RationalLike, p: int) -> int:
    """Residue mod p of a rational with nonnegative valuation."""
    x = _frac(x)
    if x.denominator % p == 0:
        raise DomainError("negative valuation has no residue mod p")
    return x.numerator * pow(x.denominator, -1, p) % p


def legendre(a: int, p: int) -> int:
    """Legendre symbol of a unit residue: +1 square, -1 non-square."""
    a = a % p
    if a == 0:
        raise DomainError("legendre symbol of 0")
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class SquareClass:
    """Class of a nonzero element in Q_p^x / (Q_p^x)^2 for odd p.

    val_parity is the valuation mod 2; unit_bit is 0 when the residue of
    the unit part is a square mod p and 1 otherwise.  Multiplication is
    componentwise xor, so there are exactly four classes.
    """

    val_parity: int
    unit_bit: int

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass(
            self.val_parity ^ other.val_parity, self.unit_bit ^ other.unit_bit
        )

    @property
    def is_square(self) -> bool:
        return self.val_parity == 0 and self.unit_bit == 0


def square_class(x: RationalLike, p: int) -> SquareClass:
    x = _frac(x)
    if x == 0:
        raise DomainError("square class of zero is undefined")
    check_odd_prime(p)
    v = padic_valuation(x, p)
    u = residue(unit_part(x, p), p)
    return SquareClass(v % 2, 0 if legendre(u, p) == 1 else 1)


def hensel_sqrt(u: RationalLike, p: int, precision: int) -> Optional[int]:
    """Square root of a unit rational mod p**precision, or None.

    Newton iteration doubles the modulus exponent each step from a seed
    root mod p.  The result is canonicalized so its residue mod p lies in
    [1, (p-1)/2].
    """
    u = _frac(u)
    check_odd_prime(p)
    if precision < 1:
        raise DomainError("precision must be >= 1")
    if u == 0 or padic_valuation(u, p) != 0:
        raise DomainError("hensel_sqrt requires a p-adic unit")
    r0 = residue(u, p)
    if legendre(r0, p) != 1:
        return None
    s = int(sympy.ntheory.sqrt_mod(r0, p))
    k = 1
    while k < precision:
        k = min(2 * k, precision)
        mod = p**k
        target = _frac(u).numerator * pow(_frac(u).denominator, -1, mod) % mod
        # Newton step: s <- (s + target/s) / 2 mod p**k
        s = (s + target * pow(s, -1, mod)) % mod * pow(2, -1, mod) % mod
    mod = p**precision
    if s % p > (p - 1) // 2:
        s = mod - s
    target = u.numerator * pow(u.denominator, -1, mod) % mod
    if s * s % mod != target:
        raise AssertionError("hensel lift failed to verify")
    return s


@dataclass(frozen=True)
class PadicScalar:
    """A rational viewed inside Q_p, with optional working precision."""

    value: Fraction
    prime: int
    precision: Optional[int] = None

    def __post_init__(self):
        check_odd_prime(self.prime)
        object.__setattr__(self, "value", _frac(self.value))

    @property
    def valuation(self) -> int:
        return padic_valuation(self.value, self.prime)

    def square_class(self) -> SquareClass:
        return square_class(self.value, self.prime)
