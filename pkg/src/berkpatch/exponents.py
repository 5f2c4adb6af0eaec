"""Exact arithmetic in the ordered exponent group Q + Q*sqrt(2).

Radii and norms on the p-adic projective line are tracked through their
logarithms: a value ``p**(-e)`` is stored as the exponent ``e``.  Exponents
live in the ordered group ``Q + Q*sqrt(2)``; the irrational part is what
distinguishes radii inside the divisible value group ``p**Q`` (irr == 0)
from those outside it (irr != 0).  All comparisons are decided exactly by
integer arithmetic, never by floating point.

The module also implements the square-class reductions of value vectors
over a fixed value-group basis: the order/base bookkeeping, the parity
reduction for odd order, and the Bezout construction for even order.  Every
reduction returns a certificate relating input and output modulo doubled
vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

RationalLike = Union[int, Fraction, str]


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class Exponent:
    """Element ``rat + irr*sqrt(2)`` of the ordered exponent group."""

    rat: Fraction = Fraction(0)
    irr: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rat", _frac(self.rat))
        object.__setattr__(self, "irr", _frac(self.irr))

    @property
    def is_rational(self) -> bool:
        return self.irr == 0

    def sign(self) -> int:
        """Exact sign of ``rat + irr*sqrt(2)``.

        Decided by comparing ``rat**2`` with ``2*irr**2`` together with the
        signs of the two parts; sqrt(2) never enters numerically.
        """
        a, b = self.rat, self.irr
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: |a| vs |b|*sqrt(2) via squares
        if a > 0:  # b < 0
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1  # a < 0, b > 0

    def __add__(self, other: "ExponentLike") -> "Exponent":
        other = as_exponent(other)
        return Exponent(self.rat + other.rat, self.irr + other.irr)

    __radd__ = __add__

    def __sub__(self, other: "ExponentLike") -> "Exponent":
        other = as_exponent(other)
        return Exponent(self.rat - other.rat, self.irr - other.irr)

    def __rsub__(self, other: "ExponentLike") -> "Exponent":
        return as_exponent(other) - self

    def __neg__(self) -> "Exponent":
        return Exponent(-self.rat, -self.irr)

    def __mul__(self, scalar: RationalLike) -> "Exponent":
        s = _frac(scalar)
        return Exponent(self.rat * s, self.irr * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar: RationalLike) -> "Exponent":
        s = _frac(scalar)
        return Exponent(self.rat / s, self.irr / s)

    def __lt__(self, other):
        return (self - as_exponent(other)).sign() < 0

    def __le__(self, other):
        return (self - as_exponent(other)).sign() <= 0

    def __gt__(self, other):
        return (self - as_exponent(other)).sign() > 0

    def __ge__(self, other):
        return (self - as_exponent(other)).sign() >= 0

    def __float__(self) -> float:
        return float(self.rat) + float(self.irr) * math.sqrt(2.0)

    def __repr__(self) -> str:
        if self.irr == 0:
            return f"Exponent({self.rat})"
        return f"Exponent({self.rat} + {self.irr}*sqrt2)"


ExponentLike = Union[Exponent, int, Fraction, str]


def as_exponent(x: ExponentLike) -> Exponent:
    if isinstance(x, Exponent):
        return x
    return Exponent(_frac(x), Fraction(0))


def compare(e1: ExponentLike, e2: ExponentLike) -> int:
    """Total order on exponents: -1, 0 or 1, consistent with the real order."""
    return (as_exponent(e1) - as_exponent(e2)).sign()


def exponent_min(values: Iterable[Exponent]) -> Exponent:
    values = list(values)
    if not values:
        raise ValueError("min of empty exponent collection")
    best = values[0]
    for v in values[1:]:
        if v < best:
            best = v
    return best


def sort_exponents(values: Sequence[Exponent]) -> list:
    import functools

    return sorted(values, key=functools.cmp_to_key(lambda a, b: (a - b).sign()))


def int_above(e: Exponent) -> int:
    """Smallest integer strictly above the exponent, exactly."""
    n = int(float(e)) - 2
    while not as_exponent(n) > e:
        n += 1
    return n


# ---------------------------------------------------------------------------
# value vectors over a fixed basis |pi_1|, ..., |pi_n|
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValueVector:
    """Exponent tuple (p_1, ..., p_n) for a norm ``prod |pi_i|**p_i``."""

    coords: Tuple[Fraction, ...]

    def __init__(self, coords: Iterable[RationalLike]):
        object.__setattr__(self, "coords", tuple(_frac(c) for c in coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __add__(self, other: "ValueVector") -> "ValueVector":
        self._check_rank(other)
        return ValueVector(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "ValueVector") -> "ValueVector":
        self._check_rank(other)
        return ValueVector(a - b for a, b in zip(self.coords, other.coords))

    def __mul__(self, scalar: RationalLike) -> "ValueVector":
        s = _frac(scalar)
        return ValueVector(c * s for c in self.coords)

    __rmul__ = __mul__

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def _check_rank(self, other: "ValueVector") -> None:
        if self.rank != other.rank:
            raise ValueError("value vectors of different rank")

    def __repr__(self) -> str:
        return f"ValueVector({', '.join(str(c) for c in self.coords)})"


def unit_vector(rank: int, index: int) -> ValueVector:
    return ValueVector(Fraction(1 if i == index else 0) for i in range(rank))


@dataclass(frozen=True)
class OrderBaseData:
    """Order (lcm of reduced denominators) and an optional base coordinate."""

    order: int
    base_index: Optional[int]


@dataclass(frozen=True)
class SquareCertificate:
    """Witness that two value vectors agree modulo doubled vectors.

    The relation certified is ``v_out == odd_power * v_in + 2 * half_shift``
    with ``odd_power`` odd; equivalently v_out - v_in lies in the doubled
    subgroup generated by v_in and the basis.
    """

    odd_power: int
    half_shift: Tuple[int, ...]

    def verify(self, v_in: ValueVector, v_out: ValueVector) -> bool:
        if self.odd_power % 2 == 0:
            return False
        shifted = v_in * self.odd_power + ValueVector(
            2 * s for s in self.half_shift
        )
        return shifted.coords == v_out.coords


def order_of(v: ValueVector) -> int:
    """lcm of the denominators of the coordinates in lowest terms."""
    order = 1
    for c in v.coords:
        order = order * c.denominator // math.gcd(order, c.denominator)
    return order


def order_base(v: ValueVector) -> OrderBaseData:
    """Order of the vector plus the smallest base coordinate, if any.

    A base is a coordinate whose scaled numerator over the common
    denominator equals 1, i.e. the coordinate is exactly 1/order.
    """
    order = order_of(v)
    base = None
    target = Fraction(1, order)
    for i, c in enumerate(v.coords):
        if c == target:
            base = i
            break
    return OrderBaseData(order=order, base_index=base)


def reduce_odd_order(v: ValueVector) -> Tuple[ValueVector, SquareCertificate]:
    """Reduce a vector of odd order to a {0,1} vector modulo doubled vectors.

    With alpha the (odd) order, alpha*v is integral and delta is its
    coordinatewise parity; v == delta mod 2*(Z*v + Z^n).
    """
    alpha = order_of(v)
    if alpha % 2 == 0:
        raise ValueError(f"vector has even order {alpha}")
    scaled = v * alpha  # integral
    delta = ValueVector(Fraction(int(c) % 2) for c in scaled.coords)
    half_shift = tuple((int(d) - int(s)) // 2 for s, d in zip(scaled.coords, delta.coords))
    cert = SquareCertificate(odd_power=alpha, half_shift=half_shift)
    if not cert.verify(v, delta):
        raise AssertionError("odd-order reduction certificate failed")
    return delta, cert


def _bezout_odd_inverse(e0: int, two_y: int) -> Tuple[int, int]:
    """Smallest-|A| solution of A*e0 + two_y*B == 1 (A automatically odd)."""
    a0 = pow(e0 % two_y, -1, two_y)  # in [0, two_y)
    candidates = [a0, a0 - two_y] if a0 != 0 else [two_y, -two_y]
    best = min(candidates, key=lambda a: (abs(a), -a))
    return best, (1 - best * e0) // two_y


def reduce_even_order(
    v: ValueVector, base_index: Optional[int] = None
) -> Tuple[ValueVector, int, SquareCertificate]:
    """Reduce a vector of even order to base form modulo doubled vectors.

    Returns ``(v', i0, certificate)`` where v' has coordinates x_i / 2**y
    with x_{i0} == 1.  Writing the order as 2**y * z with z odd, the scaled
    vector e = order * v has an odd entry e_{i0}; the Bezout relation
    A*e_{i0} + 2**y * B == 1 with A odd drives the construction, with an
    extra correction step when B is odd.

    If ``base_index`` is given, that coordinate is used as the base (its
    scaled numerator must be odd); otherwise an index making the reduction
    a no-op is preferred, then the smallest index with odd scaled numerator.
    """
    alpha = order_of(v)
    if alpha % 2 != 0:
        raise ValueError(f"vector has odd order {alpha}")
    y = 0
    z = alpha
    while z % 2 == 0:
        z //= 2
        y += 1
    two_y = 1 << y
    e = [int(c) for c in (v * alpha).coords]  # integral by definition of order

    odd_indices = [i for i, ei in enumerate(e) if ei % 2 != 0]
    if not odd_indices:
        raise AssertionError("even-order vector with no odd scaled numerator")
    if base_index is not None:
        if base_index not in odd_indices:
            raise ValueError(
                f"scaled numerator at index {base_index} is even; cannot rebase"
            )
        i0 = base_index
    else:
        noop = [i for i in odd_indices if z == 1 and e[i] == 1]
        i0 = noop[0] if noop else odd_indices[0]

    A, B = _bezout_odd_inverse(e[i0], two_y)
    n = v.rank
    ei0_unit = unit_vector(n, i0)
    if B % 2 == 0:
        v_out = v * (z * A) + ei0_unit * B
        odd_power = z * A
        shift = [0] * n
        shift[i0] = B // 2
    else:
        w = v * (z * A) + ei0_unit * (B + 1)
        v_out = w * (1 + two_y) - ei0_unit * (2 + two_y)
        odd_power = (1 + two_y) * z * A
        coeff = (1 + two_y) * (B + 1) - 2 - two_y
        shift = [0] * n
        shift[i0] = coeff // 2
    cert = SquareCertificate(odd_power=odd_power, half_shift=tuple(shift))
    if not cert.verify(v, v_out):
        raise AssertionError("even-order reduction certificate failed")
    if v_out.coords[i0] != Fraction(1, two_y):
        raise AssertionError("even-order reduction did not produce a base")
    return v_out, i0, cert


def rebase(
    v: ValueVector, target_index: int
) -> Tuple[ValueVector, int, SquareCertificate]:
    """Move the base of a 2-power-order vector to ``target_index``.

    Requires order 2**nu and an odd scaled numerator at the target.  Order
    1 is the degenerate case: the target coordinate only needs an odd
    integer entry, corrected by an even shift.
    """
    alpha = order_of(v)
    if alpha & (alpha - 1):
        raise ValueError(f"order {alpha} is not a power of two")
    if alpha == 1:
        entry = int(v.coords[target_index])
        if entry % 2 == 0:
            raise ValueError(
                f"scaled numerator at index {target_index} is even; cannot rebase"
            )
        shift = [0] * v.rank
        shift[target_index] = (1 - entry) // 2
        v_out = v + unit_vector(v.rank, target_index) * (1 - entry)
        cert = SquareCertificate(odd_power=1, half_shift=tuple(shift))
        if not cert.verify(v, v_out):
            raise AssertionError("rebase certificate failed")
        return v_out, target_index, cert
    return reduce_even_order(v, base_index=target_index)
