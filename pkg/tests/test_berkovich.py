"""Disc geometry: classification, membership, covers, refinement, parity."""

import random
from fractions import Fraction

import pytest

from berkpatch.berkovich import (
    INFINITY,
    AffinoidDomain,
    BerkPoint,
    Disc,
    NiceCover,
    annulus_piece,
    boundary,
    classify_point,
    closed_disc_piece,
    complement_piece,
    cover_with_intersections,
    domains_equal_on_grid,
    intersection_points,
    is_nice_cover,
    membership,
    nice_refinement,
    parity_function,
    point_piece,
    refine_pair,
)
from berkpatch.exponents import Exponent
from berkpatch.padic import DomainError

P = 3


def e3(rat, irr=Fraction(1, 7)):
    """Irrational (type-3) exponent near rat."""
    return Exponent(Fraction(rat), Fraction(irr))


def disc_dom(center, log_radius):
    return AffinoidDomain(P, [closed_disc_piece(P, center, log_radius)])


def annulus_dom(center, inner_log, outer_log):
    return AffinoidDomain(P, [annulus_piece(P, center, inner_log, outer_log)])


def complement_dom(center, log_radius):
    return AffinoidDomain(P, [complement_piece(P, center, log_radius)])


class TestClassification:
    def test_type2(self):
        assert classify_point(BerkPoint(P, 0, Exponent(1))) == 2

    def test_type3(self):
        assert classify_point(BerkPoint(P, 0, Exponent(0, 1))) == 3

    def test_type1(self):
        assert classify_point(BerkPoint(P, 0)) == 1
        assert classify_point(BerkPoint(P, INFINITY)) == 1

    def test_recentering_invariance(self):
        # eta_{c,r} == eta_{c',r} whenever |c - c'| <= r
        a = BerkPoint(P, 0, Exponent(1))
        b = BerkPoint(P, 3, Exponent(1))  # |3| = 1/3 <= 1/3
        c = BerkPoint(P, 1, Exponent(1))  # |1| = 1 > 1/3
        assert a.same_point(b)
        assert not a.same_point(c)
        assert classify_point(a) == classify_point(b)


class TestMembership:
    def test_inside(self):
        assert membership(BerkPoint(P, 0, Exponent(2)), disc_dom(0, 1)) == "inside"

    def test_shilov(self):
        assert (
            membership(BerkPoint(P, 0, Exponent(1)), disc_dom(0, 1))
            == "on_boundary"
        )

    def test_outside(self):
        assert membership(BerkPoint(P, 1, Exponent(1)), disc_dom(0, 1)) == "outside"

    def test_infinity(self):
        assert membership(BerkPoint(P, INFINITY), disc_dom(0, 1)) == "outside"
        assert membership(BerkPoint(P, INFINITY), complement_dom(0, e3(1))) == "inside"


class TestBoundary:
    def test_disc(self):
        pts = boundary(disc_dom(0, e3(1)))
        assert len(pts) == 1
        assert pts[0].same_point(BerkPoint(P, 0, e3(1)))

    def test_annulus(self):
        pts = boundary(annulus_dom(0, e3(2), e3(1)))
        assert len(pts) == 2

    def test_complement(self):
        pts = boundary(complement_dom(0, e3(1)))
        assert len(pts) == 1
        assert pts[0].same_point(BerkPoint(P, 0, e3(1)))


class TestRefinePair:
    def test_contained(self):
        c = disc_dom(0, e3(2))
        d = disc_dom(0, e3(1))
        assert refine_pair(c, d) == [d]

    def test_disc_meets_annulus(self):
        c = disc_dom(0, e3(2))  # inner disc
        d = annulus_dom(0, e3(3), e3(1))  # annulus spanning past it
        out = refine_pair(c, d)
        assert len(out) == 2
        # the leftover component of C is the deeper disc D(0, inner radius)
        got = [dom for dom in out if dom != d]
        expected = disc_dom(0, e3(3))
        assert domains_equal_on_grid(got, [expected], P)

    def test_disjoint(self):
        c = disc_dom(0, e3(1))
        d = disc_dom(1, e3(1))
        out = refine_pair(c, d)
        assert domains_equal_on_grid(out, [c, d], P)
        assert len(out) == 2

    def test_union_preserved_randomized(self):
        rng = random.Random(5)
        centers = [0, 1, 3, Fraction(1, 3)]
        for _ in range(25):
            doms = []
            for _ in range(2):
                c = rng.choice(centers)
                lo = e3(rng.randint(-1, 2), Fraction(rng.randint(1, 5), 7))
                kind = rng.random()
                if kind < 0.5:
                    doms.append(disc_dom(c, lo))
                elif kind < 0.8:
                    doms.append(annulus_dom(c, lo + 1, lo))
                else:
                    doms.append(complement_dom(c, lo))
            out = refine_pair(doms[0], doms[1])
            assert domains_equal_on_grid(out, doms, P)
            # pairwise: the C_i are disjoint, and meet D in at most a point
            for i in range(len(out) - 1):
                for j in range(i + 1, len(out) - 1):
                    from berkpatch.berkovich import pieces_intersect

                    assert not pieces_intersect(
                        out[i].pieces[0], out[j].pieces[0]
                    )


class TestNiceCover:
    def test_two_piece_cover(self):
        cover = [disc_dom(0, e3(1)), complement_dom(0, e3(1))]
        report = is_nice_cover(cover)
        assert report.ok

    def test_containment_violation(self):
        cover = [disc_dom(0, e3(2)), disc_dom(0, e3(1))]
        report = is_nice_cover(cover)
        assert not report.ok
        assert "contains" in report.violation

    def test_type2_boundary_violation(self):
        cover = [disc_dom(0, Exponent(1)), complement_dom(0, Exponent(1))]
        report = is_nice_cover(cover)
        assert not report.ok
        assert "type-2" in report.violation

    def test_overlap_violation(self):
        cover = [disc_dom(0, e3(2)), annulus_dom(0, e3(3), e3(1))]
        report = is_nice_cover(cover)
        assert not report.ok


class TestNiceRefinement:
    def test_single_domain(self):
        cover = nice_refinement([disc_dom(0, e3(1))])
        assert len(cover.elements) == 1

    def test_nested_discs(self):
        # two "overlapping" discs: nested with distinct type-3 radii
        small = disc_dom(0, e3(2))
        large = disc_dom(0, e3(1))
        cover = nice_refinement([small, large])
        assert len(cover.elements) == 2
        assert is_nice_cover(list(cover.elements)).ok
        assert len(cover.intersection_points) == 1
        assert cover.intersection_points[0].kind == 3
        assert domains_equal_on_grid(list(cover.elements), [small, large], P)

    def test_rejects_type2_boundary(self):
        with pytest.raises(DomainError):
            nice_refinement([disc_dom(0, Exponent(1))])

    def test_chain_of_three(self):
        doms = [
            disc_dom(0, e3(3)),
            disc_dom(0, e3(2)),
            disc_dom(0, e3(1)),
        ]
        cover = nice_refinement(doms)
        assert is_nice_cover(list(cover.elements)).ok
        assert domains_equal_on_grid(list(cover.elements), doms, P)
        # no point lies in three elements
        for pt in cover.intersection_points:
            holders = [
                el for el in cover.elements if el.contains_point(pt)
            ]
            assert len(holders) == 2

    def test_randomized_families(self):
        rng = random.Random(23)
        centers = [0, 1, 3, 9, Fraction(1, 3), 2]
        for trial in range(20):
            doms = []
            for _ in range(rng.randint(1, 5)):
                c = rng.choice(centers)
                lo = e3(rng.randint(-1, 2), Fraction(rng.randint(1, 6), 7))
                kind = rng.random()
                if kind < 0.6:
                    doms.append(disc_dom(c, lo))
                elif kind < 0.85:
                    doms.append(annulus_dom(c, lo + 1, lo))
                else:
                    doms.append(complement_dom(c, lo))
            cover = nice_refinement(doms)
            report = is_nice_cover(list(cover.elements))
            assert report.ok, (trial, report.violation)
            assert domains_equal_on_grid(list(cover.elements), doms, P)
            # every element refines some input
            from berkpatch.berkovich import piece_contains

            for el in cover.elements:
                assert any(
                    piece_contains(dom.pieces[0], el.pieces[0]) for dom in doms
                )


class TestCoverWithIntersections:
    def test_empty_set(self):
        dom = disc_dom(0, Exponent(0))
        cover = cover_with_intersections(dom, [])
        assert cover.elements == (dom,)

    def test_single_split(self):
        dom = disc_dom(0, Exponent(0))  # unit disc, rational radius allowed
        pt = BerkPoint(P, 0, e3(1))
        cover = cover_with_intersections(dom, [pt])
        assert len(cover.elements) == 2
        assert len(cover.intersection_points) == 1
        assert cover.intersection_points[0].same_point(pt)
        assert domains_equal_on_grid(list(cover.elements), [dom], P)

    def test_two_nested_radii(self):
        dom = disc_dom(0, Exponent(0))
        pts = [BerkPoint(P, 0, e3(1)), BerkPoint(P, 0, e3(2))]
        cover = cover_with_intersections(dom, pts)
        assert len(cover.elements) == 3
        assert len(cover.intersection_points) == 2

    def test_rejects_type2_point(self):
        dom = disc_dom(0, Exponent(0))
        with pytest.raises(DomainError):
            cover_with_intersections(dom, [BerkPoint(P, 0, Exponent(1))])

    def test_rejects_exterior_point(self):
        dom = disc_dom(0, Exponent(0))
        with pytest.raises(DomainError):
            cover_with_intersections(dom, [BerkPoint(P, 0, e3(-2))])


class TestContainmentAgainstGrid:
    def test_piece_contains_matches_membership(self):
        """Exact containment agrees with pointwise membership on the grid."""
        from berkpatch.berkovich import piece_contains, probe_points

        rng = random.Random(31)
        centers = [0, 1, 3, Fraction(1, 3)]
        for _ in range(60):
            doms = []
            for _ in range(2):
                c = rng.choice(centers)
                lo = e3(rng.randint(-1, 2), Fraction(rng.randint(1, 6), 7))
                kind = rng.random()
                if kind < 0.5:
                    doms.append(disc_dom(c, lo))
                elif kind < 0.8:
                    doms.append(annulus_dom(c, lo + 1, lo))
                else:
                    doms.append(complement_dom(c, lo))
            a, b = doms
            claimed = piece_contains(a.pieces[0], b.pieces[0])
            pts = probe_points([a, b], P)
            pointwise = all(
                a.contains_point(pt) for pt in pts if b.contains_point(pt)
            )
            assert claimed == pointwise, (a, b)


class TestParity:
    def test_single(self):
        cover = nice_refinement([disc_dom(0, e3(1))])
        assert parity_function(cover) == {0: 0}

    def test_chain_alternates(self):
        doms = [
            disc_dom(0, e3(3)),
            disc_dom(0, e3(2)),
            disc_dom(0, e3(1)),
        ]
        cover = nice_refinement(doms)
        bits = parity_function(cover)
        pts = cover.intersection_points
        for pt in pts:
            holders = [
                i for i, el in enumerate(cover.elements) if el.contains_point(pt)
            ]
            assert bits[holders[0]] != bits[holders[1]]

    def test_disjoint_components(self):
        doms = [disc_dom(0, e3(1)), disc_dom(1, e3(1))]
        cover = nice_refinement(doms)
        bits = parity_function(cover)
        assert set(bits.values()) <= {0, 1}

    def test_from_prescribed_points(self):
        dom = disc_dom(0, Exponent(0))
        pts = [BerkPoint(P, 0, e3(1)), BerkPoint(P, 0, e3(2))]
        cover = cover_with_intersections(dom, pts)
        bits = parity_function(cover)
        # concentric chain: alternating bits
        assert sorted(bits.values()) == [0, 0, 1] or sorted(bits.values()) == [0, 1, 1]
