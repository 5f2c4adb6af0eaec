"""Additive split, the fixed-point solver, and matrix factorization."""

import random
from fractions import Fraction

import pytest

from berkpatch.berkovich import (
    AffinoidDomain,
    BerkPoint,
    annulus_piece,
    closed_disc_piece,
    complement_piece,
    nice_refinement,
    parity_function,
)
from berkpatch.exponents import Exponent, as_exponent
from berkpatch.padic import DomainError
from berkpatch.patching import (
    CHARTS,
    PatchingProblem,
    factor_matrix,
    laurent_split,
    mat_identity,
    mat_mul,
    mat_sub,
    mat_min_valuation,
    mat_valuation_at_least,
    patch_over_cover,
    reexpand_series,
    successive_approximation,
)
from berkpatch.series import AnnulusRing, annulus_norm

P = 3
RING = AnnulusRing(prime=P, rho_log=Exponent(Fraction(1, 2)), window=64)


def rand_series(rng, ring, min_val, degree_span=6):
    """Random series whose norm exponent is at least min_val."""
    coeffs = {}
    for d in range(-degree_span, degree_span + 1):
        if rng.random() < 0.4:
            continue
        # term valuation v + d*rho >= min_val: pick v accordingly
        rho = ring.rho_log
        need = as_exponent(min_val) - rho * d
        v = max(0, int(float(need.rat) + float(need.irr) * 1.5) + 1)
        while not (as_exponent(Fraction(v)) + rho * d) >= as_exponent(min_val):
            v += 1
        unit = rng.choice([1, 2, -1, -2, 4])
        coeffs[d] = Fraction(unit * P**v)
    return ring.series(coeffs)


class TestLaurentSplit:
    def test_degree_split(self):
        s = RING.series({-1: 1, 0: 5, 1: 1})
        out = laurent_split(s)
        assert out.plus.coeffs == {0: Fraction(5), 1: Fraction(1)}
        assert out.minus.coeffs == {-1: Fraction(1)}

    def test_zero(self):
        out = laurent_split(RING.zero())
        assert out.plus.is_zero and out.minus.is_zero

    def test_norm_preserved_randomized(self):
        rng = random.Random(3)
        for _ in range(50):
            s = rand_series(rng, RING, 0)
            if s.is_zero:
                continue
            out = laurent_split(s)
            resum = out.plus + out.minus
            assert resum.coeffs == s.coeffs
            vals = [
                annulus_norm(part)
                for part in (out.plus, out.minus)
                if not part.is_zero
            ]
            assert min(vals, key=lambda e: (float(e))) == annulus_norm(s) or (
                vals and not (min(vals, key=float) < annulus_norm(s))
            )


class TestSuccessiveApproximation:
    def test_zero_target(self):
        prob = PatchingProblem(CHARTS["gl1"], (RING.zero(),), RING)
        res = successive_approximation(prob)
        assert all(x.is_zero for x in res.u + res.v)
        assert res.residual_valuation is None
        assert len(res.trace) == 1

    def test_gl1_converges_and_multiplies_back(self):
        rng = random.Random(7)
        for _ in range(5):
            a = rand_series(rng, RING, 3)
            prob = PatchingProblem(CHARTS["gl1"], (a,), RING)
            res = successive_approximation(prob)
            assert res.residual_valuation is None or res.residual_valuation >= as_exponent(32)
            # (1+u)(1+v) == 1 + a to the stop valuation
            one = RING.one()
            lhs = (one + res.u[0]) * (one + res.v[0])
            resid = lhs - (one + a)
            assert resid.valuation_at_least(32)
            # support separation
            assert all(d >= 0 for d in res.u[0].support())
            assert all(d < 0 for d in res.v[0].support())

    def test_bounds_recorded(self):
        rng = random.Random(11)
        a = rand_series(rng, RING, 3)
        prob = PatchingProblem(CHARTS["gl1"], (a,), RING)
        res = successive_approximation(prob)
        E = prob.eps_exponent
        for row in res.trace:
            if row.u_valuation is not None:
                assert row.u_valuation >= as_exponent(E)
            if row.residual_valuation is not None:
                bound = prob.d_exponent + E * Fraction(row.step + 2, 2)
                assert row.residual_valuation >= as_exponent(bound)

    def test_rejects_large_target(self):
        with pytest.raises(DomainError):
            PatchingProblem(CHARTS["gl1"], (RING.series({0: 1}),), RING)

    def test_additive_chart_one_step(self):
        rng = random.Random(31)
        a = rand_series(rng, RING, 3)
        prob = PatchingProblem(CHARTS["ga"], (a,), RING)
        res = successive_approximation(prob)
        # linear case: the first split solves exactly
        assert len(res.trace) == 2
        assert res.residual_valuation is None
        split = laurent_split(a)
        assert res.u[0].coeffs == split.plus.coeffs
        assert res.v[0].coeffs == split.minus.coeffs


def near_identity_matrix(rng, ring, min_val=3, span=4):
    """Random determinant-1 matrix close to the identity."""
    from berkpatch.patching import sl2_matrix_of

    a = rand_series(rng, ring, min_val, span)
    b = rand_series(rng, ring, min_val, span)
    c = rand_series(rng, ring, min_val, span)
    tail = as_exponent(Fraction(ring.window, 2)) + 8
    return sl2_matrix_of((a, b, c), tail)


class TestFactorMatrix:
    def test_identity(self):
        g = mat_identity(RING)
        fac = factor_matrix(g)
        assert mat_sub(fac.plus_factor, g)[0].is_zero
        assert all(x.is_zero for x in mat_sub(fac.minus_factor, g))

    def test_plus_supported_input(self):
        rng = random.Random(13)
        coeffs = {d: Fraction(27 * rng.choice([1, 2])) for d in range(0, 3)}
        a = RING.series(coeffs)
        tail = as_exponent(Fraction(40))
        from berkpatch.patching import sl2_matrix_of

        g = sl2_matrix_of((a, RING.zero(), RING.zero()), tail)
        fac = factor_matrix(g)
        # one factor absorbs everything: the minus factor is the identity
        assert all(x.is_zero for x in mat_sub(fac.minus_factor, mat_identity(RING)))

    def test_random_factorization(self):
        rng = random.Random(17)
        for _ in range(4):
            g = near_identity_matrix(rng, RING)
            fac = factor_matrix(g)
            resid = mat_sub(mat_mul(fac.plus_factor, fac.minus_factor), g)
            assert mat_valuation_at_least(resid, Fraction(32))
            one = RING.one()
            for idx, entry in enumerate(fac.plus_factor):
                base = entry - one if idx in (0, 3) else entry
                assert all(d >= 0 for d in base.support())
            for idx, entry in enumerate(fac.minus_factor):
                base = entry - one if idx in (0, 3) else entry
                assert all(d < 0 for d in base.support())

    def test_minus_first(self):
        rng = random.Random(19)
        g = near_identity_matrix(rng, RING)
        fac = factor_matrix(g, minus_first=True)
        resid = mat_sub(mat_mul(fac.minus_factor, fac.plus_factor), g)
        assert mat_valuation_at_least(resid, Fraction(32))

    def test_rejects_bad_determinant(self):
        g = mat_identity(RING)
        g = (g[0] + RING.series({0: 3}), g[1], g[2], g[3])
        with pytest.raises(DomainError):
            factor_matrix(g)

    def test_patch_rejects_out_of_radius_transition(self):
        cover = chain_cover()
        parity = parity_function(cover)
        transitions = {}
        for k, pt in enumerate(cover.intersection_points):
            ring = AnnulusRing(P, pt.log_radius, 64)
            ident = mat_identity(ring)
            # valuation 1 perturbation: above eps = p^-3
            transitions[k] = (ident[0] + ring.series({0: 3}), ident[1],
                              ident[2], ident[3])
        with pytest.raises(DomainError):
            patch_over_cover(cover, parity, transitions)


class TestReexpansion:
    def test_same_center(self):
        ring2 = AnnulusRing(P, Exponent(Fraction(3, 2)), 64)
        s = RING.series({-2: 9, 1: 3})
        out = reexpand_series(s, Fraction(0), Fraction(0), ring2)
        assert out.coeffs == s.coeffs

    def test_inverse_recenters_exactly(self):
        # 1/T expanded at center 1 on a small circle: geometric series
        ring2 = AnnulusRing(P, Exponent(2), 24)
        s = RING.series({-1: 1})  # 1/T at center 0
        out = reexpand_series(s, Fraction(0), Fraction(1), ring2)
        # 1/(1+s) = sum (-s)^k
        for k in range(10):
            assert out.coeffs.get(k, 0) == Fraction((-1) ** k)

    def test_outside_regime(self):
        # 1/T at a center far from 0 on a large circle: negative degrees
        ring2 = AnnulusRing(P, Exponent(Fraction(-3, 2)), 24)
        s = RING.series({-1: 1})
        out = reexpand_series(s, Fraction(0), Fraction(1), ring2)
        assert all(d < 0 for d in out.support())
        # 1/(s+1) = s^-1 (1 + s^-1)^-1 = sum_{k>=1} (-1)^(k-1) s^-k
        assert out.coeffs[-1] == 1 and out.coeffs[-2] == -1


def chain_cover():
    """Three concentric pieces split at two type-3 radii."""
    e1 = Exponent(2, Fraction(1, 7))
    e2 = Exponent(1, Fraction(1, 7))
    doms = [
        AffinoidDomain(P, [closed_disc_piece(P, 0, e1)]),
        AffinoidDomain(P, [annulus_piece(P, 0, e1, e2)]),
        AffinoidDomain(P, [complement_piece(P, 0, e2)]),
    ]
    return nice_refinement(doms)


class TestPatchOverCover:
    def test_identity_transitions(self):
        cover = chain_cover()
        parity = parity_function(cover)
        transitions = {}
        for k, pt in enumerate(cover.intersection_points):
            ring = AnnulusRing(P, pt.log_radius, 64)
            transitions[k] = mat_identity(ring)
        result = patch_over_cover(cover, parity, transitions)
        for k, rv in result.checks:
            assert rv is None or rv >= as_exponent(32)
        for el, germs in result.germs.items():
            for k, g in germs.items():
                ring = g[0].ring
                resid = mat_sub(g, mat_identity(ring))
                assert mat_valuation_at_least(resid, Fraction(32))

    def test_three_piece_chain(self):
        rng = random.Random(23)
        cover = chain_cover()
        parity = parity_function(cover)
        transitions = {}
        for k, pt in enumerate(cover.intersection_points):
            ring = AnnulusRing(P, pt.log_radius, 64)
            transitions[k] = near_identity_matrix(rng, ring, min_val=4, span=3)
        result = patch_over_cover(cover, parity, transitions)
        assert len(result.checks) == 2
        for k, rv in result.checks:
            assert rv is None or rv >= as_exponent(32)

    def test_two_piece_cover(self):
        rng = random.Random(29)
        e = Exponent(1, Fraction(1, 7))
        doms = [
            AffinoidDomain(P, [closed_disc_piece(P, 0, e)]),
            AffinoidDomain(P, [complement_piece(P, 0, e)]),
        ]
        cover = nice_refinement(doms)
        parity = parity_function(cover)
        pt = cover.intersection_points[0]
        ring = AnnulusRing(P, pt.log_radius, 64)
        g = near_identity_matrix(rng, ring, min_val=4, span=3)
        result = patch_over_cover(cover, parity, {0: g})
        (k, rv), = result.checks
        assert rv is None or rv >= as_exponent(32)

    def test_chain_with_distinct_centers(self):
        # intersection points at centers 1 and 0: pushing a multiplier from
        # one point to the other exercises the exact geometric re-expansion
        rng = random.Random(41)
        e_deep = Exponent(1, Fraction(1, 7))  # around center 1
        e_wide = Exponent(-1, Fraction(1, 7))  # around center 0, radius 3^1.x
        from berkpatch.berkovich import SwissCheese, Disc

        inner = AffinoidDomain(P, [closed_disc_piece(P, 1, e_deep)])
        middle = AffinoidDomain(
            P,
            [
                SwissCheese(
                    P,
                    Disc(P, Fraction(0), e_wide),
                    (Disc(P, Fraction(1), e_deep),),
                )
            ],
        )
        outer = AffinoidDomain(P, [complement_piece(P, 0, e_wide)])
        cover = nice_refinement([inner, middle, outer])
        assert len(cover.intersection_points) == 2
        centers = {pt.center for pt in cover.intersection_points}
        assert centers == {Fraction(0), Fraction(1)}
        parity = parity_function(cover)
        transitions = {}
        for k, pt in enumerate(cover.intersection_points):
            ring = AnnulusRing(P, pt.log_radius, 64)
            transitions[k] = near_identity_matrix(rng, ring, min_val=6, span=2)
        result = patch_over_cover(cover, parity, transitions)
        for k, rv in result.checks:
            assert rv is None or rv >= as_exponent(32)

    def test_peeling_order_irrelevant_to_identities(self):
        # both peeling orders satisfy the defining identities (the elements
        # themselves may differ); compared through the checks, not the germs
        rng = random.Random(37)
        cover = chain_cover()
        parity = parity_function(cover)
        transitions = {}
        for k, pt in enumerate(cover.intersection_points):
            ring = AnnulusRing(P, pt.log_radius, 64)
            transitions[k] = near_identity_matrix(rng, ring, min_val=4, span=3)
        for order in ("low", "high"):
            result = patch_over_cover(cover, parity, transitions, peel=order)
            for k, rv in result.checks:
                assert rv is None or rv >= as_exponent(32)
