"""Diagonal quadratic form rewrites over valued fields.

All rewrites preserve the isometry class and say so explicitly: every
output coefficient comes with a certificate (u, s) such that the original
coefficient equals scale * u * s**2 with u a unit, verified by exact
arithmetic in the underlying field model.

Three field models are supported through a small duck-typed protocol
(mul/pow/eq/vector_of/is_unit/basis_element): exact rationals inside Q_p,
synthetic formal elements with prescribed value vectors, and rational
functions at a point of the projective line (defined in `isotropy`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

from .exponents import (
    ValueVector,
    order_of,
    rebase,
    reduce_even_order,
    reduce_odd_order,
)
from .padic import DomainError, check_odd_prime, padic_valuation

RationalLike = Union[int, Fraction, str]


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


# ---------------------------------------------------------------------------
# field models
# ---------------------------------------------------------------------------


class PadicField:
    """Q_p with the rank-1 value lattice generated by |p|."""

    def __init__(self, p: int):
        self.p = check_odd_prime(p)
        self.rank = 1
        self.one = Fraction(1)

    def basis_element(self, i: int) -> Fraction:
        if i != 0:
            raise DomainError("Q_p has a rank-1 value group")
        return Fraction(self.p)

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return _frac(a) * _frac(b)

    def pow(self, a: Fraction, k: int) -> Fraction:
        return _frac(a) ** k

    def eq(self, a: Fraction, b: Fraction) -> bool:
        return _frac(a) == _frac(b)

    def is_zero(self, a: Fraction) -> bool:
        return _frac(a) == 0

    def vector_of(self, a: Fraction) -> ValueVector:
        return ValueVector([Fraction(padic_valuation(a, self.p))])

    def is_unit(self, a: Fraction) -> bool:
        return self.vector_of(a).is_zero


@dataclass(frozen=True)
class DiagonalForm:
    """Diagonal quadratic form <a_1, ..., a_m> over a field model."""

    coefficients: Tuple[object, ...]
    field: object

    def __init__(self, coefficients: Sequence[object], field: object):
        object.__setattr__(self, "coefficients", tuple(coefficients))
        object.__setattr__(self, "field", field)

    @property
    def dimension(self) -> int:
        return len(self.coefficients)

    def __repr__(self) -> str:
        return f"DiagonalForm(dim={self.dimension})"


# ---------------------------------------------------------------------------
# Witt split of the totally isotropic part
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WittSplit:
    totally_isotropic: DiagonalForm
    regular: DiagonalForm
    regular_indices: Tuple[int, ...]
    forces_isotropy: bool


def witt_split_trivial(q: DiagonalForm) -> WittSplit:
    """Separate zero coefficients; a zero coefficient in dimension >= 2
    already makes the form isotropic."""
    zeros = [i for i, a in enumerate(q.coefficients) if q.field.is_zero(a)]
    regular = [i for i, a in enumerate(q.coefficients) if not q.field.is_zero(a)]
    return WittSplit(
        totally_isotropic=DiagonalForm(
            [q.coefficients[i] for i in zeros], q.field
        ),
        regular=DiagonalForm([q.coefficients[i] for i in regular], q.field),
        regular_indices=tuple(regular),
        forces_isotropy=bool(zeros) and q.dimension >= 2,
    )


# ---------------------------------------------------------------------------
# unit block decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientCertificate:
    """Witness a == scale * unit * square**2 in the field model."""

    original_index: int
    unit: object
    square: object

    def verify(self, original, scale, field) -> bool:
        rebuilt = field.mul(field.mul(scale, self.unit), field.pow(self.square, 2))
        return field.eq(original, rebuilt) and field.is_unit(self.unit)


@dataclass(frozen=True)
class Block:
    scale: object
    unit_form: DiagonalForm
    certificates: Tuple[CoefficientCertificate, ...]


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: Tuple[Block, ...]
    mode: str
    rank: int

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def verify(self, q: DiagonalForm) -> bool:
        total = 0
        for block in self.blocks:
            total += block.unit_form.dimension
            for cert in block.certificates:
                if not cert.verify(
                    q.coefficients[cert.original_index], block.scale, q.field
                ):
                    return False
        if total != q.dimension:
            return False
        bound = 2**self.rank if self.mode == "free" else 2 ** (self.rank + 1)
        return self.block_count <= bound


def _entry(field, coeff, index):
    vec = field.vector_of(coeff)
    return {"coeff": coeff, "vector": vec, "index": index, "square": field.one}


def _entry_mul_square(field, entry, factor):
    """Multiply a coefficient by factor**2, accumulating sqrt into the
    certificate: replaces (c, s) by (c*factor^2, s*factor^-1).

    Invariant throughout the rewrites: original == coeff * square**2,
    possibly times the scales divided out so far."""
    coeff = field.mul(entry["coeff"], field.pow(factor, 2))
    vec = entry["vector"] + field.vector_of(factor) * 2
    square = field.mul(entry["square"], field.pow(factor, -1))
    return {
        "coeff": coeff,
        "vector": vec,
        "index": entry["index"],
        "square": square,
    }


def _basis_product(field, exponents: Sequence[int]):
    out = field.one
    for i, e in enumerate(exponents):
        if e:
            out = field.mul(out, field.pow(field.basis_element(i), int(e)))
    return out


def _finalize_block(field, scale, entries) -> Block:
    units = []
    certs = []
    for entry in entries:
        unit = field.mul(entry["coeff"], field.pow(scale, -1))
        if not field.is_unit(unit):
            raise AssertionError("block coefficient failed to normalize to a unit")
        units.append(unit)
        certs.append(
            CoefficientCertificate(
                original_index=entry["index"], unit=unit, square=entry["square"]
            )
        )
    return Block(
        scale=scale,
        unit_form=DiagonalForm(units, field),
        certificates=tuple(certs),
    )


def _free_mode_blocks(q: DiagonalForm) -> List[Block]:
    field = q.field
    n = field.rank
    grouped: Dict[Tuple[int, ...], List[dict]] = {}
    for i, a in enumerate(q.coefficients):
        vec = field.vector_of(a)
        if not vec.is_integral():
            raise DomainError(
                "free mode requires integral value vectors "
                f"(coefficient {i} has vector {vec})"
            )
        delta = tuple(int(c) % 2 for c in vec.coords)
        halves = [(int(c) - d) // 2 for c, d in zip(vec.coords, delta)]
        s = _basis_product(field, halves)
        entry = _entry(field, a, i)
        entry = _entry_mul_square(field, entry, field.pow(s, -1))
        grouped.setdefault(delta, []).append(entry)
    blocks = []
    for delta in sorted(grouped):
        scale = _basis_product(field, delta)
        blocks.append(_finalize_block(field, scale, grouped[delta]))
    return blocks


def _apply_vector_certificate(field, entry, cert):
    """Apply a square-class certificate v_out = m*v_in + 2*shift at the
    element level: c -> c**m * prod pi**(2*shift)."""
    m = cert.odd_power
    coeff = field.pow(entry["coeff"], m)
    coeff = field.mul(coeff, _basis_product(field, [2 * s for s in cert.half_shift]))
    vec = field.vector_of(coeff)
    # original = new * (original^((1-m)/2) * prod pi^-shift)^2
    adj = field.pow(entry["coeff"], (1 - m) // 2)
    adj = field.mul(adj, _basis_product(field, [-s for s in cert.half_shift]))
    square = field.mul(entry["square"], adj)
    return {
        "coeff": coeff,
        "vector": vec,
        "index": entry["index"],
        "square": square,
    }


def _two_power_split(field, entries, params: List[int]) -> List[Tuple[object, List[dict]]]:
    """Recursive parameter elimination for coefficients of order 1 or even.

    Each level removes one parameter index, splitting the form into a
    pivot-scaled part and a complementary part; recursion bottoms out at
    unit (zero-vector) coefficients.  Returns (scale, entries) pairs.
    """
    if not entries:
        return []
    if all(e["vector"].is_zero for e in entries):
        return [(field.one, entries)]
    if not params:
        raise AssertionError("nonunit coefficients left with no parameters")

    orders = [order_of(e["vector"]) for e in entries]
    if all(o == 1 for o in orders):
        pivot = next(
            i for i in params if any(e["vector"][i] != 0 for e in entries)
        )
        side_unit: List[dict] = []
        side_pivot: List[dict] = []
        for entry in entries:
            val = int(entry["vector"][pivot])
            d = val % 2
            k = (val - d) // 2
            if k:
                shift = [0] * field.rank
                shift[pivot] = -k
                entry = _entry_mul_square(field, entry, _basis_product(field, shift))
            if d:
                side_pivot.append(entry)
            else:
                side_unit.append(entry)
        rest = [i for i in params if i != pivot]
        out = []
        for scale0, divide, group in (
            (field.one, False, side_unit),
            (field.basis_element(pivot), True, side_pivot),
        ):
            if not group:
                continue
            if divide:
                group = [_divide_entry(field, g, scale0) for g in group]
            for scale, sub in _two_power_split(field, group, rest):
                out.append((field.mul(scale0, scale), sub))
        return out

    # normalize even-order coefficients to base form
    normalized = []
    for entry in entries:
        if order_of(entry["vector"]) % 2 == 0:
            _, _, cert = reduce_even_order(entry["vector"])
            entry = _apply_vector_certificate(field, entry, cert)
        normalized.append(entry)
    entries = normalized

    # pivot coefficient: largest order, first by original position
    def order_key(e):
        return order_of(e["vector"])

    max_order = max(order_key(e) for e in entries)
    a_pos = next(i for i, e in enumerate(entries) if order_key(e) == max_order)
    a_entry = entries[a_pos]
    alpha_log = max_order.bit_length() - 1  # orders are 2-powers after normalizing
    pivot = next(
        i
        for i, c in enumerate(a_entry["vector"].coords)
        if c == Fraction(1, max_order)
    )

    side_pivot: List[dict] = []  # becomes pi_pivot * tau_1
    side_a: List[dict] = []  # becomes a' * tau_2
    for pos, entry in enumerate(entries):
        vec = entry["vector"]
        gamma_order = order_of(vec)
        gamma_log = gamma_order.bit_length() - 1
        gamma1 = int(vec[pivot] * gamma_order)
        if pos == a_pos:
            side_a.append(entry)
            continue
        if gamma_order == max_order and gamma1 % 2 != 0:
            _, _, cert = rebase(vec, pivot)
            entry = _apply_vector_certificate(field, entry, cert)
            side_a.append(entry)
            continue
        if gamma_order == max_order:  # gamma1 even
            v2 = (gamma1 & -gamma1).bit_length() - 1 if gamma1 else gamma_log
            delta_log = gamma_log - min(v2, gamma_log)
            gamma1_red = gamma1 >> min(v2, gamma_log)
            k = (2**delta_log - gamma1_red) * 2 ** (alpha_log - delta_log)
        else:  # strictly smaller order (including order 1)
            k = (2**gamma_log - gamma1) * 2 ** (alpha_log - gamma_log)
        if k % 2 != 0:
            raise AssertionError("pivot multiplier exponent must be even")
        entry = _entry_mul_square(field, entry, field.pow(a_entry["coeff"], k // 2))
        if entry["vector"][pivot] != 1:
            raise AssertionError("pivot exponent did not normalize to 1")
        side_pivot.append(entry)

    rest = [i for i in params if i != pivot]
    out = []
    for scale0, group in (
        (field.basis_element(pivot), side_pivot),
        (a_entry["coeff"], side_a),
    ):
        if not group:
            continue
        adjusted = [_divide_entry(field, g, scale0) for g in group]
        for scale, sub in _two_power_split(field, adjusted, rest):
            out.append((field.mul(scale0, scale), sub))
    return out


def _divide_entry(field, entry, scale):
    coeff = field.mul(entry["coeff"], field.pow(scale, -1))
    return {
        "coeff": coeff,
        "vector": field.vector_of(coeff),
        "index": entry["index"],
        "square": entry["square"],
    }


def _general_mode_blocks(q: DiagonalForm) -> List[Block]:
    field = q.field
    n = field.rank
    odd_entries: List[dict] = []
    even_entries: List[dict] = []
    for i, a in enumerate(q.coefficients):
        entry = _entry(field, a, i)
        if order_of(entry["vector"]) % 2 == 1:
            odd_entries.append(entry)
        else:
            even_entries.append(entry)

    blocks: List[Block] = []
    # odd-order part: parity reduction onto {0,1} basis exponents
    grouped: Dict[Tuple[int, ...], List[dict]] = {}
    for entry in odd_entries:
        delta_vec, cert = reduce_odd_order(entry["vector"])
        entry = _apply_vector_certificate(field, entry, cert)
        delta = tuple(int(c) for c in delta_vec.coords)
        grouped.setdefault(delta, []).append(entry)
    for delta in sorted(grouped):
        scale = _basis_product(field, delta)
        blocks.append(_finalize_block(field, scale, grouped[delta]))

    # even-order part: recursive parameter elimination.  The splitter divides
    # scales out of the coefficients level by level, so multiply them back in
    # to restore the original == coeff * square**2 contract of the finalizer.
    for scale, entries in _two_power_split(field, even_entries, list(range(n))):
        restored = [
            {
                "coeff": field.mul(scale, e["coeff"]),
                "vector": e["vector"],
                "index": e["index"],
                "square": e["square"],
            }
            for e in entries
        ]
        blocks.append(_finalize_block(field, scale, restored))
    return blocks


def unit_block_decomposition(q: DiagonalForm, mode: str = "free") -> BlockDecomposition:
    """Rewrite q as an orthogonal sum of scaled unit-coefficient forms.

    Free mode assumes integral value vectors and uses square-free basis
    products as scales (at most 2**n blocks).  General mode splits by the
    parity of the order and eliminates parameters recursively (at most
    2**(n+1) blocks).  Certificates tie every output coefficient to its
    source exactly.
    """
    if mode not in ("free", "general"):
        raise DomainError(f"unknown mode {mode!r}")
    if any(q.field.is_zero(a) for a in q.coefficients):
        raise DomainError("decomposition requires nonzero coefficients")
    blocks = _free_mode_blocks(q) if mode == "free" else _general_mode_blocks(q)
    # merge blocks with identical scales (can only shrink the count)
    merged: List[Block] = []
    for block in blocks:
        for i, existing in enumerate(merged):
            if q.field.eq(existing.scale, block.scale):
                merged[i] = Block(
                    scale=existing.scale,
                    unit_form=DiagonalForm(
                        existing.unit_form.coefficients
                        + block.unit_form.coefficients,
                        q.field,
                    ),
                    certificates=existing.certificates + block.certificates,
                )
                break
        else:
            merged.append(block)
    decomp = BlockDecomposition(
        blocks=tuple(merged), mode=mode, rank=q.field.rank
    )
    if not decomp.verify(q):
        raise AssertionError("block decomposition failed self-verification")
    return decomp


# ---------------------------------------------------------------------------
# Springer-type split over a discretely valued field
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpringerSplit:
    """q ~ q1 + pi*q2 with unit coefficients, index maps and certificates."""

    unit_part: DiagonalForm
    uniformizer_part: DiagonalForm
    unit_indices: Tuple[int, ...]
    uniformizer_indices: Tuple[int, ...]
    certificates: Tuple[CoefficientCertificate, ...]
    uniformizer: object


def springer_split(q: DiagonalForm, uniformizer=None) -> SpringerSplit:
    """Split by valuation parity over a rank-1 discretely valued field."""
    field = q.field
    if field.rank != 1:
        raise DomainError("springer split needs a rank-1 value lattice")
    pi = uniformizer if uniformizer is not None else field.basis_element(0)
    units: List[object] = []
    unit_idx: List[int] = []
    pis: List[object] = []
    pi_idx: List[int] = []
    certs: List[CoefficientCertificate] = []
    for i, a in enumerate(q.coefficients):
        if field.is_zero(a):
            raise DomainError("springer split requires nonzero coefficients")
        vec = field.vector_of(a)
        if not vec.is_integral():
            raise DomainError("springer split requires integer valuations")
        v = int(vec[0])
        d = v % 2
        s = field.pow(pi, (v - d) // 2)
        u = field.mul(a, field.pow(field.mul(field.pow(s, 2), field.pow(pi, d)), -1))
        cert = CoefficientCertificate(original_index=i, unit=u, square=s)
        scale = field.pow(pi, d)
        if not cert.verify(a, scale, field):
            raise AssertionError("springer certificate failed")
        certs.append(cert)
        if d:
            pis.append(u)
            pi_idx.append(i)
        else:
            units.append(u)
            unit_idx.append(i)
    return SpringerSplit(
        unit_part=DiagonalForm(units, field),
        uniformizer_part=DiagonalForm(pis, field),
        unit_indices=tuple(unit_idx),
        uniformizer_indices=tuple(pi_idx),
        certificates=tuple(certs),
        uniformizer=pi,
    )


# ---------------------------------------------------------------------------
# u-invariant bound calculator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldProfile:
    """Value-group shape of a complete field: rational rank, freeness, and
    the strong u-invariant of the residue field."""

    n: int
    free: bool
    residue_us: int

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("rank must be nonnegative")
        if self.residue_us < 1:
            raise DomainError("residue strong u-invariant must be >= 1")


@dataclass(frozen=True)
class UBound:
    field_bound: int
    function_field_bound: int
    equality: bool


def u_bound(profile: FieldProfile) -> UBound:
    """Upper bounds 2**n * us (free) or 2**(n+1) * us (general) for the
    strong u-invariant, doubled for function fields of curves; exact
    equality is known only in the rank-1 free case."""
    factor = 2**profile.n if profile.free else 2 ** (profile.n + 1)
    fb = factor * profile.residue_us
    return UBound(
        field_bound=fb,
        function_field_bound=2 * fb,
        equality=(profile.n == 1 and profile.free),
    )
