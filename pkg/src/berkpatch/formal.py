"""Synthetic valued-field elements: a free multiplicative group with a
prescribed valuation map onto a rank-n rational lattice.

Elements are formal products of named generators with integer exponents.
Basis generators pi_1..pi_n carry the unit coordinate vectors; additional
generators model field elements whose norms have prescribed (possibly
fractional) coordinates.  The model is exactly what square-class rewrites
need: multiplication, integer powers, and an exact value vector, with
equality of formal products standing in for equality in the field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

from .exponents import ValueVector, unit_vector
from .padic import DomainError


@dataclass(frozen=True)
class FormalElement:
    """Formal product prod g**e_g over named generators."""

    powers: Mapping[str, int]

    def __init__(self, powers: Mapping[str, int]):
        object.__setattr__(
            self, "powers", {g: int(e) for g, e in powers.items() if e != 0}
        )

    def __mul__(self, other: "FormalElement") -> "FormalElement":
        out = dict(self.powers)
        for g, e in other.powers.items():
            out[g] = out.get(g, 0) + e
        return FormalElement(out)

    def __pow__(self, k: int) -> "FormalElement":
        return FormalElement({g: e * k for g, e in self.powers.items()})

    def inverse(self) -> "FormalElement":
        return self**-1

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalElement):
            return NotImplemented
        return self.powers == other.powers

    def __hash__(self):
        return hash(tuple(sorted(self.powers.items())))

    def __repr__(self) -> str:
        if not self.powers:
            return "FormalElement(1)"
        body = "*".join(
            g if e == 1 else f"{g}^{e}" for g, e in sorted(self.powers.items())
        )
        return f"FormalElement({body})"


FORMAL_ONE = FormalElement({})


class SyntheticField:
    """Valued field model over a rank-n basis with named coefficients.

    Each generator name maps to its value vector over the basis.  Basis
    generators are installed automatically as ``pi1..pin``.
    """

    def __init__(self, rank: int):
        if rank < 1:
            raise DomainError("synthetic field needs rank >= 1")
        self.rank = rank
        self._values: Dict[str, ValueVector] = {
            f"pi{i + 1}": unit_vector(rank, i) for i in range(rank)
        }

    def basis_element(self, i: int) -> FormalElement:
        return FormalElement({f"pi{i + 1}": 1})

    @property
    def one(self) -> FormalElement:
        return FORMAL_ONE

    def add_element(self, name: str, vector: ValueVector) -> FormalElement:
        if vector.rank != self.rank:
            raise DomainError("vector rank does not match field rank")
        if name in self._values and self._values[name].coords != vector.coords:
            raise DomainError(f"generator {name!r} already bound to another value")
        self._values[name] = vector
        return FormalElement({name: 1})

    def mul(self, a: FormalElement, b: FormalElement) -> FormalElement:
        return a * b

    def pow(self, a: FormalElement, k: int) -> FormalElement:
        return a**k

    def eq(self, a: FormalElement, b: FormalElement) -> bool:
        return a == b

    def is_zero(self, a: FormalElement) -> bool:
        return False  # formal products are invertible, never zero

    def vector_of(self, a: FormalElement) -> ValueVector:
        out = ValueVector([Fraction(0)] * self.rank)
        for g, e in a.powers.items():
            if g not in self._values:
                raise DomainError(f"unknown generator {g!r}")
            out = out + self._values[g] * e
        return out

    def is_unit(self, a: FormalElement) -> bool:
        return self.vector_of(a).is_zero
