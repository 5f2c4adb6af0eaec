"""Form rewrites: Witt split, unit blocks, Springer split, u-bounds."""

import random
from fractions import Fraction

import pytest

from berkpatch.exponents import ValueVector
from berkpatch.formal import SyntheticField
from berkpatch.forms import (
    DiagonalForm,
    FieldProfile,
    PadicField,
    springer_split,
    u_bound,
    unit_block_decomposition,
    witt_split_trivial,
)
from berkpatch.padic import DomainError


def padic_form(coeffs, p=3):
    return DiagonalForm([Fraction(c) for c in coeffs], PadicField(p))


def synthetic_form(vectors, rank):
    field = SyntheticField(rank)
    coeffs = [
        field.add_element(f"a{i}", ValueVector([Fraction(c) for c in vec]))
        for i, vec in enumerate(vectors)
    ]
    return DiagonalForm(coeffs, field)


class TestWittSplit:
    def test_mixed(self):
        split = witt_split_trivial(padic_form([1, 0, 2]))
        assert split.totally_isotropic.dimension == 1
        assert split.regular.dimension == 2
        assert split.regular_indices == (0, 2)
        assert split.forces_isotropy

    def test_regular(self):
        split = witt_split_trivial(padic_form([1, 2]))
        assert split.totally_isotropic.dimension == 0
        assert not split.forces_isotropy

    def test_two_zeros(self):
        split = witt_split_trivial(padic_form([0, 0, 5]))
        assert split.totally_isotropic.dimension == 2
        assert split.regular.dimension == 1
        assert split.forces_isotropy


class TestFreeBlocks:
    def test_all_units(self):
        q = padic_form([1, 2])
        decomp = unit_block_decomposition(q, mode="free")
        assert decomp.block_count == 1
        assert decomp.blocks[0].scale == 1
        assert decomp.verify(q)

    def test_reference_example(self):
        # <1, p, u, u*p^2> over Q_p: (1)<1, u, u> + (p)<1>
        p, u = 3, 2
        q = padic_form([1, p, u, u * p * p], p=p)
        decomp = unit_block_decomposition(q, mode="free")
        assert decomp.block_count == 2
        by_scale = {block.scale: block for block in decomp.blocks}
        assert set(by_scale) == {Fraction(1), Fraction(p)}
        assert sorted(by_scale[Fraction(1)].unit_form.coefficients) == [1, 2, 2]
        assert by_scale[Fraction(p)].unit_form.coefficients == (Fraction(1),)
        assert decomp.verify(q)

    def test_rejects_fractional_vectors(self):
        q = synthetic_form([[Fraction(1, 2)]], rank=1)
        with pytest.raises(DomainError):
            unit_block_decomposition(q, mode="free")

    def test_bound_randomized(self):
        rng = random.Random(7)
        p = 5
        for _ in range(50):
            dim = rng.randint(1, 6)
            coeffs = []
            for _ in range(dim):
                u = rng.choice([1, 2, 3, 4, 6, 7])
                coeffs.append(Fraction(u) * Fraction(p) ** rng.randint(-3, 3))
            q = padic_form(coeffs, p=p)
            decomp = unit_block_decomposition(q, mode="free")
            assert decomp.block_count <= 2
            assert decomp.verify(q)


class TestGeneralBlocks:
    def test_synthetic_reference_example(self):
        # value 3/4 reduces to a block scaled by an element of value 1/4
        q = synthetic_form([[Fraction(3, 4)]], rank=1)
        decomp = unit_block_decomposition(q, mode="general")
        assert decomp.block_count == 1
        scale_vec = q.field.vector_of(decomp.blocks[0].scale)
        assert scale_vec.coords == (Fraction(1, 4),)
        assert decomp.verify(q)

    def test_integer_vectors_use_parity(self):
        q = synthetic_form([[0], [1], [2], [3]], rank=1)
        decomp = unit_block_decomposition(q, mode="general")
        assert decomp.block_count <= 2
        assert decomp.verify(q)

    def test_mixed_orders(self):
        q = synthetic_form(
            [[Fraction(1, 3)], [Fraction(1, 2)], [Fraction(5, 6)], [2]], rank=1
        )
        decomp = unit_block_decomposition(q, mode="general")
        assert decomp.block_count <= 4
        assert decomp.verify(q)

    @pytest.mark.parametrize("rank", [1, 2, 3])
    def test_bound_randomized(self, rank):
        rng = random.Random(100 + rank)
        for _ in range(60):
            dim = rng.randint(1, 7)
            vectors = [
                [
                    Fraction(rng.randint(-8, 8), rng.choice([1, 1, 2, 3, 4, 6, 8]))
                    for _ in range(rank)
                ]
                for _ in range(dim)
            ]
            q = synthetic_form(vectors, rank)
            decomp = unit_block_decomposition(q, mode="general")
            assert decomp.block_count <= 2 ** (rank + 1)
            assert decomp.verify(q)


class TestSpringer:
    def test_units_only(self):
        split = springer_split(padic_form([2, 7]))
        assert split.unit_part.dimension == 2
        assert split.uniformizer_part.dimension == 0

    def test_single_p(self):
        split = springer_split(padic_form([3]))
        assert split.unit_part.dimension == 0
        assert split.uniformizer_part.coefficients == (Fraction(1),)

    def test_reference_example(self):
        split = springer_split(padic_form([1, 3, -1]))
        assert split.unit_part.coefficients == (Fraction(1), Fraction(-1))
        assert split.uniformizer_part.coefficients == (Fraction(1),)
        assert split.unit_indices == (0, 2)
        assert split.uniformizer_indices == (1,)

    def test_certificates_randomized(self):
        rng = random.Random(11)
        for _ in range(100):
            dim = rng.randint(1, 6)
            coeffs = [
                Fraction(rng.choice([1, 2, 4, 5, 7, -1, -2]))
                * Fraction(3) ** rng.randint(-4, 4)
                for _ in range(dim)
            ]
            q = padic_form(coeffs)
            split = springer_split(q)
            total = split.unit_part.dimension + split.uniformizer_part.dimension
            assert total == dim
            assert max(
                split.unit_part.dimension, split.uniformizer_part.dimension
            ) * 2 >= dim or dim == 0


class TestUBound:
    def test_qp_chain(self):
        b = u_bound(FieldProfile(n=1, free=True, residue_us=2))
        assert b.field_bound == 4
        assert b.function_field_bound == 8
        assert b.equality

    def test_rank_zero(self):
        b = u_bound(FieldProfile(n=0, free=True, residue_us=5))
        assert b.field_bound == 5 and b.function_field_bound == 10
        assert not b.equality

    def test_general_rank_two(self):
        b = u_bound(FieldProfile(n=2, free=False, residue_us=2))
        assert b.field_bound == 16 and b.function_field_bound == 32
        assert not b.equality
