"""Exact disc arithmetic on the Berkovich projective line over Q_p.

Points are disc descriptors (center, log-radius) plus the point at
infinity; a domain is a finite union of "Swiss cheese" pieces, each a
closed disc (or the whole line) minus finitely many open holes.  All
predicates reduce to comparisons of exponents and center distances, which
are exact: radii live in the quadratic exponent group and distances of
rational centers are integer powers of p.

The ultrametric makes every pair of discs nested or disjoint, so
intersections, differences against interiors, and containment tests all
stay within the Swiss-cheese normal form.  That is what the cover
refinement, prescribed-intersection, and parity operations build on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .exponents import Exponent, as_exponent, int_above, sort_exponents
from .padic import DomainError, check_odd_prime, padic_valuation

RationalLike = Union[int, Fraction, str]

INFINITY = "inf"  # marker for the point at infinity / center at infinity
WHOLE_LINE = "whole"  # marker for a piece covering all of P^1


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _dist_val(c1: Fraction, c2: Fraction, p: int) -> Optional[Fraction]:
    """v_p(c1 - c2); None encodes +infinity (equal centers)."""
    if c1 == c2:
        return None
    return Fraction(padic_valuation(c1 - c2, p))


def _ge(v: Optional[Fraction], e: Exponent) -> bool:
    """v >= e with None = +infinity."""
    return v is None or as_exponent(v) >= e


def _gt(v: Optional[Fraction], e: Exponent) -> bool:
    return v is None or as_exponent(v) > e


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BerkPoint:
    """Disc descriptor eta_{c, r} with r = p**(-log_radius), or infinity.

    log_radius None encodes radius 0 (a classical rational point); center
    INFINITY with log_radius None is the point at infinity.
    """

    prime: int
    center: Union[Fraction, str]
    log_radius: Optional[Exponent] = None

    def __post_init__(self):
        check_odd_prime(self.prime)
        if self.center != INFINITY:
            object.__setattr__(self, "center", _frac(self.center))
        if self.log_radius is not None:
            object.__setattr__(self, "log_radius", as_exponent(self.log_radius))
        if self.center == INFINITY and self.log_radius is not None:
            raise DomainError("infinity carries no radius descriptor")

    @property
    def kind(self) -> int:
        """1 for classical points, 2 for radii in p**Q, 3 otherwise."""
        if self.log_radius is None:
            return 1
        return 2 if self.log_radius.is_rational else 3

    def same_point(self, other: "BerkPoint") -> bool:
        """Descriptor equality: same radius and centers within it."""
        if self.prime != other.prime:
            return False
        if (self.log_radius is None) != (other.log_radius is None):
            return False
        if self.center == INFINITY or other.center == INFINITY:
            return self.center == other.center
        if self.log_radius is None:
            return self.center == other.center
        if self.log_radius != other.log_radius:
            return False
        return _ge(
            _dist_val(self.center, other.center, self.prime), self.log_radius
        )


def classify_point(pt: BerkPoint) -> int:
    return pt.kind


# ---------------------------------------------------------------------------
# discs and pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Disc:
    """A disc descriptor; open or closed is decided by the using context."""

    prime: int
    center: Fraction
    log_radius: Exponent

    def __post_init__(self):
        check_odd_prime(self.prime)
        object.__setattr__(self, "center", _frac(self.center))
        object.__setattr__(self, "log_radius", as_exponent(self.log_radius))

    def shilov_point(self) -> BerkPoint:
        return BerkPoint(self.prime, self.center, self.log_radius)

    def sort_key(self):
        lr = self.log_radius
        return (self.center, float(lr.rat) , float(lr.irr))


def _contains_disc(
    outer: Disc, outer_closed: bool, inner: Disc, inner_closed: bool
) -> bool:
    """inner subset of outer, exact, via the nested-or-disjoint dichotomy."""
    v = _dist_val(inner.center, outer.center, outer.prime)
    eo, ei = outer.log_radius, inner.log_radius
    if outer_closed and inner_closed:
        return _ge(v, eo) and ei >= eo
    if not outer_closed and not inner_closed:
        return _gt(v, eo) and ei >= eo
    if outer_closed and not inner_closed:  # open inside closed
        return _ge(v, eo) and ei >= eo
    # closed inside open
    return _gt(v, eo) and ei > eo


def _discs_intersect(
    d1: Disc, closed1: bool, d2: Disc, closed2: bool
) -> bool:
    return (
        _contains_disc(d1, closed1, d2, closed2)
        or _contains_disc(d2, closed2, d1, closed1)
    )


def _point_in_disc(pt: BerkPoint, disc: Disc, closed: bool) -> bool:
    if pt.center == INFINITY:
        return False
    v = _dist_val(pt.center, disc.center, disc.prime)
    e = disc.log_radius
    radius_ok = (
        True
        if pt.log_radius is None
        else (pt.log_radius >= e if closed else pt.log_radius > e)
    )
    return radius_ok and (_ge(v, e) if closed else _gt(v, e))


@dataclass(frozen=True)
class SwissCheese:
    """Closed disc (or the whole line) minus pairwise disjoint open holes."""

    prime: int
    outer: Union[Disc, str]
    holes: Tuple[Disc, ...]

    def __post_init__(self):
        if self.outer != WHOLE_LINE and not isinstance(self.outer, Disc):
            raise DomainError("outer must be a Disc or WHOLE_LINE")

    @property
    def is_whole_outer(self) -> bool:
        return self.outer == WHOLE_LINE

    def is_point(self) -> bool:
        """True when the piece degenerates to a single (type 3) point.

        That happens exactly when a hole has the same radius as the outer
        disc and an irrational log-radius; for rational log-radius the
        leftover sphere contains more points than the Shilov point.
        """
        if self.is_whole_outer:
            return False
        e = self.outer.log_radius
        if e.is_rational:
            return False
        return any(
            h.log_radius == e
            and _ge(_dist_val(h.center, self.outer.center, self.prime), e)
            for h in self.holes
        )

    def boundary_points(self) -> List[BerkPoint]:
        pts: List[BerkPoint] = []
        if not self.is_whole_outer:
            pts.append(self.outer.shilov_point())
        for h in self.holes:
            cand = h.shilov_point()
            if not any(cand.same_point(q) for q in pts):
                pts.append(cand)
        return pts

    def contains_point(self, pt: BerkPoint) -> bool:
        if pt.center == INFINITY:
            inside_outer = self.is_whole_outer
        else:
            inside_outer = self.is_whole_outer or _point_in_disc(
                pt, self.outer, closed=True
            )
        if not inside_outer:
            return False
        return not any(_point_in_disc(pt, h, closed=False) for h in self.holes)

    def all_discs(self) -> List[Disc]:
        out = [] if self.is_whole_outer else [self.outer]
        return out + list(self.holes)

    def sort_key(self):
        if self.is_whole_outer:
            return (1, 0, 0.0, 0.0)
        return (0,) + self.outer.sort_key()


def make_piece(
    prime: int, outer: Union[Disc, str], holes: Iterable[Disc]
) -> Optional[SwissCheese]:
    """Normalize a piece; None when the holes swallow it entirely.

    Holes are clipped to the outer disc, nested holes merged, and a hole
    strictly containing the outer disc empties the piece.
    """
    hole_list: List[Disc] = []
    for h in holes:
        if outer != WHOLE_LINE:
            if _contains_disc(h, False, outer, True):
                return None  # piece removed entirely
            if not _discs_intersect(h, False, outer, True):
                continue
        hole_list.append(h)
    kept = _prune_nested_holes(hole_list)
    return SwissCheese(prime, outer, tuple(sorted(kept, key=Disc.sort_key)))


def _prune_nested_holes(holes: Sequence[Disc]) -> List[Disc]:
    kept: List[Disc] = []
    for h in holes:
        absorbed = False
        result = []
        for other in kept:
            if _contains_disc(other, False, h, False):
                absorbed = True
                result.append(other)
            elif _contains_disc(h, False, other, False):
                continue  # h absorbs other
            else:
                result.append(other)
        if not absorbed:
            result.append(h)
        kept = result
    return kept


def closed_disc_piece(prime: int, center: RationalLike, log_radius) -> SwissCheese:
    return SwissCheese(
        prime, Disc(prime, _frac(center), as_exponent(log_radius)), ()
    )


def annulus_piece(
    prime: int, center: RationalLike, inner_log: Exponent, outer_log: Exponent
) -> SwissCheese:
    """Closed annulus p**-outer_log <= |T - c| <= ... i.e. radii between
    the two exponents; inner_log > outer_log in exponent scale."""
    inner_log, outer_log = as_exponent(inner_log), as_exponent(outer_log)
    if not inner_log > outer_log:
        raise DomainError("annulus needs inner radius strictly smaller")
    c = _frac(center)
    return SwissCheese(
        prime,
        Disc(prime, c, outer_log),
        (Disc(prime, c, inner_log),),
    )


def complement_piece(prime: int, center: RationalLike, log_radius) -> SwissCheese:
    """The whole line minus the open disc (contains infinity)."""
    return SwissCheese(
        prime, WHOLE_LINE, (Disc(prime, _frac(center), as_exponent(log_radius)),)
    )


def point_piece(prime: int, center: RationalLike, log_radius) -> SwissCheese:
    """The singleton {eta_{c,r}} for an irrational log-radius."""
    e = as_exponent(log_radius)
    if e.is_rational:
        raise DomainError("singleton pieces need a type-3 radius")
    c = _frac(center)
    return SwissCheese(prime, Disc(prime, c, e), (Disc(prime, c, e),))


# --- piece-level set operations -------------------------------------------


def intersect_piece_closed(
    piece: SwissCheese, disc: Disc
) -> Optional[SwissCheese]:
    """piece intersected with a closed disc, or None when empty."""
    if piece.is_whole_outer:
        outer = disc
    else:
        if _contains_disc(disc, True, piece.outer, True):
            outer = piece.outer
        elif _contains_disc(piece.outer, True, disc, True):
            outer = disc
        else:
            return None
    return make_piece(piece.prime, outer, piece.holes)


def subtract_open_disc(piece: SwissCheese, disc: Disc) -> Optional[SwissCheese]:
    """piece minus an open disc, or None when empty."""
    if not piece.is_whole_outer:
        if _contains_disc(disc, False, piece.outer, True):
            return None
        if not _discs_intersect(disc, False, piece.outer, True):
            return piece
    for h in piece.holes:
        if _contains_disc(h, False, disc, False):
            return piece  # already removed
    return make_piece(piece.prime, piece.outer, piece.holes + (disc,))


def piece_intersection(
    p1: SwissCheese, p2: SwissCheese
) -> Optional[SwissCheese]:
    if p1.is_whole_outer and p2.is_whole_outer:
        outer: Union[Disc, str] = WHOLE_LINE
    elif p1.is_whole_outer:
        outer = p2.outer
    elif p2.is_whole_outer:
        outer = p1.outer
    else:
        if _contains_disc(p2.outer, True, p1.outer, True):
            outer = p1.outer
        elif _contains_disc(p1.outer, True, p2.outer, True):
            outer = p2.outer
        else:
            return None
    return make_piece(p1.prime, outer, p1.holes + p2.holes)


def piece_contains(outer_piece: SwissCheese, inner_piece: SwissCheese) -> bool:
    """inner_piece subset of outer_piece, exact."""
    if not outer_piece.is_whole_outer:
        if inner_piece.is_whole_outer:
            return False
        if not _contains_disc(
            outer_piece.outer, True, inner_piece.outer, True
        ):
            return False
    for h in outer_piece.holes:
        if _hole_meets_piece(h, inner_piece):
            return False
    return True


def _hole_meets_piece(h: Disc, piece: SwissCheese) -> bool:
    """Does the open disc h intersect the piece?"""
    if not piece.is_whole_outer:
        if _contains_disc(h, False, piece.outer, True):
            return True  # whole piece sits inside h
        if not _discs_intersect(h, False, piece.outer, True):
            return False
    # h reaches inside the outer disc; it survives unless a hole covers it
    return not any(_contains_disc(hq, False, h, False) for hq in piece.holes)


def pieces_intersect(p1: SwissCheese, p2: SwissCheese) -> bool:
    return piece_intersection(p1, p2) is not None


def piece_minus_interior(
    piece: SwissCheese, cut: SwissCheese
) -> List[SwissCheese]:
    """Connected components of piece minus the interior of cut.

    Valid for nondegenerate cut (nonempty interior): the complement of the
    interior is the closed outside of the outer disc plus the closures of
    the holes, and those meet the piece in pairwise disjoint connected
    sets.  Components that collapse to single points are dropped.
    """
    if cut.is_point():
        return [piece]
    out: List[SwissCheese] = []
    if not cut.is_whole_outer:
        t = subtract_open_disc(piece, cut.outer)
        if t is not None and not t.is_point():
            out.append(t)
    for h in cut.holes:
        t = intersect_piece_closed(piece, h)
        if t is not None and not t.is_point():
            out.append(t)
    return out


# ---------------------------------------------------------------------------
# affinoid domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffinoidDomain:
    """Finite union of Swiss-cheese pieces, merged to disjoint normal form."""

    prime: int
    pieces: Tuple[SwissCheese, ...]

    def __init__(self, prime: int, pieces: Iterable[SwissCheese]):
        object.__setattr__(self, "prime", check_odd_prime(prime))
        merged = _merge_pieces(list(pieces))
        object.__setattr__(
            self, "pieces", tuple(sorted(merged, key=SwissCheese.sort_key))
        )

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def is_connected(self) -> bool:
        return len(self.pieces) == 1

    def contains_point(self, pt: BerkPoint) -> bool:
        return any(piece.contains_point(pt) for piece in self.pieces)

    def boundary_points(self) -> List[BerkPoint]:
        pts: List[BerkPoint] = []
        for piece in self.pieces:
            for cand in piece.boundary_points():
                if not any(cand.same_point(q) for q in pts):
                    pts.append(cand)
        return pts

    def all_discs(self) -> List[Disc]:
        return [d for piece in self.pieces for d in piece.all_discs()]


def _union_of_overlapping(p1: SwissCheese, p2: SwissCheese) -> SwissCheese:
    """Union of two intersecting pieces (connected, hence a single piece).

    The union's outer disc is the larger outer; surviving holes are the
    pairwise intersections of the two hole families plus the holes of the
    larger piece that avoid the smaller outer disc entirely.
    """
    prime = p1.prime
    if p2.is_whole_outer or (
        not p1.is_whole_outer
        and not p2.is_whole_outer
        and _contains_disc(p2.outer, True, p1.outer, True)
    ):
        p1, p2 = p2, p1  # p1 now has the larger outer
    holes: List[Disc] = []
    for h in p1.holes:
        if p2.is_whole_outer:
            inter_ok = True
        else:
            inter_ok = _discs_intersect(h, False, p2.outer, True)
        if not inter_ok:
            holes.append(h)  # untouched by the smaller piece
            continue
        for h2 in p2.holes:
            if _contains_disc(h, False, h2, False):
                holes.append(h2)
            elif _contains_disc(h2, False, h, False):
                holes.append(h)
    piece = make_piece(prime, p1.outer, holes)
    assert piece is not None
    return piece


def _merge_pieces(pieces: List[SwissCheese]) -> List[SwissCheese]:
    pieces = [p for p in pieces if p is not None]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(pieces)), 2):
            if pieces_intersect(pieces[i], pieces[j]):
                merged = _union_of_overlapping(pieces[i], pieces[j])
                rest = [
                    p for k, p in enumerate(pieces) if k not in (i, j)
                ]
                pieces = rest + [merged]
                changed = True
                break
    return pieces


def membership(pt: BerkPoint, dom: AffinoidDomain) -> str:
    """"inside", "on_boundary", or "outside" (boundary = Shilov points)."""
    if not dom.contains_point(pt):
        return "outside"
    for b in dom.boundary_points():
        if pt.same_point(b):
            return "on_boundary"
    return "inside"


def boundary(dom: AffinoidDomain) -> List[BerkPoint]:
    return dom.boundary_points()


# ---------------------------------------------------------------------------
# probe grids: exact sampling that separates all critical radii
# ---------------------------------------------------------------------------


def _critical_exponents(
    discs: Sequence[Disc], center: Fraction, p: int
) -> List[Exponent]:
    vals: List[Exponent] = []
    seen = set()
    for d in discs:
        for e in (d.log_radius,):
            key = (e.rat, e.irr)
            if key not in seen:
                seen.add(key)
                vals.append(e)
        v = _dist_val(center, d.center, p)
        if v is not None:
            e = as_exponent(v)
            key = (e.rat, e.irr)
            if key not in seen:
                seen.add(key)
                vals.append(e)
    return sort_exponents(vals)


def probe_points(domains: Sequence[AffinoidDomain], p: int) -> List[BerkPoint]:
    """Exact sample grid: all centers, with radii at and between criticals.

    Membership of a descriptor point only changes at critical exponents
    (disc radii and center distances), so sampling those plus midpoints
    and the two extremes decides set equality of unions of the inputs.
    """
    discs = [d for dom in domains for d in dom.all_discs()]
    centers = sorted({d.center for d in discs})
    pts: List[BerkPoint] = [BerkPoint(p, INFINITY)]
    for c in centers:
        criticals = _critical_exponents(discs, c, p)
        samples: List[Exponent] = []
        if criticals:
            samples.append(criticals[0] - 1)
            for a, b in zip(criticals, criticals[1:]):
                samples.append(a)
                samples.append((a + b) / 2)
            samples.append(criticals[-1])
            samples.append(criticals[-1] + 1)
        else:
            samples.append(Exponent(0))
        pts.append(BerkPoint(p, c))  # type-1 point at the center
        for e in samples:
            pts.append(BerkPoint(p, c, e))
    return pts


def domains_equal_on_grid(
    d1: Sequence[AffinoidDomain], d2: Sequence[AffinoidDomain], p: int
) -> bool:
    pts = probe_points(list(d1) + list(d2), p)
    for pt in pts:
        in1 = any(dom.contains_point(pt) for dom in d1)
        in2 = any(dom.contains_point(pt) for dom in d2)
        if in1 != in2:
            return False
    return True


# ---------------------------------------------------------------------------
# relative boundaries
# ---------------------------------------------------------------------------


def _branch_probes(
    descriptor: Disc, arrangement: Sequence[Disc], p: int
) -> List[BerkPoint]:
    """Points close to the descriptor's Shilov point, one per relevant branch.

    Outward plus the branch toward each arrangement center inside the
    disc; branches containing no arrangement center have the same
    membership pattern as the Shilov point itself in every arrangement
    disc, so they can never witness a boundary and need no probe.
    """
    c, e = descriptor.center, descriptor.log_radius
    criticals = _critical_exponents(arrangement, c, p)
    above = [x for x in criticals if x > e]
    below = [x for x in criticals if x < e]
    inward_e = (e + above[0]) / 2 if above else e + 1
    outward_e = (e + below[-1]) / 2 if below else e - 1
    probes = [BerkPoint(p, c, outward_e), BerkPoint(p, c, inward_e)]
    inner_centers = sorted(
        {
            d.center
            for d in arrangement
            if d.center != c and _ge(_dist_val(d.center, c, p), e)
        }
    )
    for c2 in inner_centers:
        criticals2 = _critical_exponents(arrangement, c2, p)
        above2 = [x for x in criticals2 if x > e]
        e2 = (e + above2[0]) / 2 if above2 else e + 1
        probes.append(BerkPoint(p, c2, e2))
    return probes


def relative_boundary(
    element: AffinoidDomain,
    target: Optional[Sequence[AffinoidDomain]],
    p: int,
) -> List[BerkPoint]:
    """Boundary of the element inside the covered space.

    A Shilov descriptor is a relative boundary point iff some branch at it
    carries points of the target that are outside the element; with target
    None the ambient line is used and every descriptor qualifies.
    """
    if target is None:
        return element.boundary_points()
    arrangement = element.all_discs() + [
        d for dom in target for d in dom.all_discs()
    ]
    out: List[BerkPoint] = []
    for piece in element.pieces:
        for disc in piece.all_discs():
            pt = disc.shilov_point()
            if any(pt.same_point(q) for q in out):
                continue
            if not element.contains_point(pt):
                continue
            for probe in _branch_probes(disc, arrangement, p):
                in_target = any(t.contains_point(probe) for t in target)
                if in_target and not element.contains_point(probe):
                    out.append(pt)
                    break
    return out


# ---------------------------------------------------------------------------
# nice covers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NiceCover:
    elements: Tuple[AffinoidDomain, ...]
    intersection_points: Tuple[BerkPoint, ...]
    parity: Optional[Dict[int, int]] = None


@dataclass(frozen=True)
class NiceCoverReport:
    ok: bool
    violation: Optional[str] = None


def _pair_intersection_point(
    u: AffinoidDomain, v: AffinoidDomain
) -> Tuple[str, Optional[BerkPoint]]:
    """Classify U cap V: "empty", "point" (with the point), or "big"."""
    found: Optional[BerkPoint] = None
    for pu in u.pieces:
        for pv in v.pieces:
            inter = piece_intersection(pu, pv)
            if inter is None:
                continue
            if not inter.is_point():
                return "big", None
            pt = inter.outer.shilov_point()
            if found is not None and not found.same_point(pt):
                return "big", None
            found = pt
    if found is None:
        return "empty", None
    return "point", found


def is_nice_cover(
    cover: Sequence[AffinoidDomain],
    target: Optional[AffinoidDomain] = None,
) -> NiceCoverReport:
    """Check the nice-cover conditions, reporting the first violation.

    Clause 1: connected elements whose relative boundary (in the covered
    space) contains only irrational-radius points.  Clause 2: pairwise
    intersections are single shared Shilov points.  Clause 3: no element
    contains another.  Coverage of the target is checked on an exact grid.
    """
    if not cover:
        return NiceCoverReport(False, "empty cover")
    p = cover[0].prime
    target_list = list(cover) if target is None else [target]
    for i, u in enumerate(cover):
        if not u.is_connected:
            return NiceCoverReport(False, f"element {i} is not connected")
        for pt in relative_boundary(u, target_list, p):
            if pt.kind != 3:
                return NiceCoverReport(
                    False,
                    f"element {i} has a type-{pt.kind} boundary point",
                )
    for i, j in itertools.combinations(range(len(cover)), 2):
        if piece_contains(cover[i].pieces[0], cover[j].pieces[0]):
            return NiceCoverReport(False, f"element {i} contains element {j}")
        if piece_contains(cover[j].pieces[0], cover[i].pieces[0]):
            return NiceCoverReport(False, f"element {j} contains element {i}")
        kind, pt = _pair_intersection_point(cover[i], cover[j])
        if kind == "big":
            return NiceCoverReport(
                False, f"elements {i} and {j} overlap beyond a point"
            )
        if kind == "point":
            in_bi = any(pt.same_point(b) for b in cover[i].boundary_points())
            in_bj = any(pt.same_point(b) for b in cover[j].boundary_points())
            if not (in_bi and in_bj):
                return NiceCoverReport(
                    False,
                    f"intersection of {i} and {j} is not a shared boundary point",
                )
            if pt.kind != 3:
                return NiceCoverReport(
                    False, f"intersection of {i} and {j} is not type 3"
                )
    if target is not None:
        if not domains_equal_on_grid(list(cover), [target], p):
            return NiceCoverReport(False, "cover does not match the target")
    return NiceCoverReport(True)


def intersection_points(cover: Sequence[AffinoidDomain]) -> List[BerkPoint]:
    pts: List[BerkPoint] = []
    for u, v in itertools.combinations(cover, 2):
        kind, pt = _pair_intersection_point(u, v)
        if kind == "point" and not any(pt.same_point(q) for q in pts):
            pts.append(pt)
    return pts


def _require_type3_boundaries(domains: Sequence[AffinoidDomain]) -> None:
    for i, dom in enumerate(domains):
        for pt in dom.boundary_points():
            if pt.kind != 3:
                raise DomainError(
                    f"domain {i} has a type-{pt.kind} boundary point"
                )


def refine_pair(
    c_dom: AffinoidDomain, d_dom: AffinoidDomain
) -> List[AffinoidDomain]:
    """Nice refinement {C_1, ..., C_n, D} of a pair of connected domains.

    The C_i are the components of C minus the interior of D that are not
    single points; each meets D in at most one irrational-radius point.
    """
    for dom, name in ((c_dom, "C"), (d_dom, "D")):
        if not dom.is_connected:
            raise DomainError(f"{name} must be connected")
    _require_type3_boundaries([c_dom, d_dom])
    p = c_dom.prime
    c_piece, d_piece = c_dom.pieces[0], d_dom.pieces[0]
    if piece_contains(d_piece, c_piece):
        return [d_dom]
    parts = piece_minus_interior(c_piece, d_piece)
    return [AffinoidDomain(p, [part]) for part in parts] + [d_dom]


def nice_refinement(domains: Sequence[AffinoidDomain]) -> NiceCover:
    """Refine connected domains into a nice cover of their union.

    Inductively: take the first piece, subtract its interior from the
    rest, refine what remains, and drop pieces that were absorbed.  The
    result's pairwise intersections are empty or single irrational-radius
    points and no point lies in three elements.
    """
    if not domains:
        raise DomainError("no domains to refine")
    p = domains[0].prime
    _require_type3_boundaries(domains)
    work: List[SwissCheese] = []
    for dom in domains:
        work.extend(dom.pieces)

    def recurse(pieces: List[SwissCheese]) -> List[SwissCheese]:
        pieces = [w for w in pieces if not w.is_point()]
        if not pieces:
            return []
        head = pieces[0]
        rest = [w for w in pieces[1:] if not piece_contains(head, w)]
        shaved: List[SwissCheese] = []
        for w in rest:
            shaved.extend(piece_minus_interior(w, head))
        refined = recurse(shaved)
        refined = [w for w in refined if not piece_contains(head, w)]
        return [head] + refined

    elements = [AffinoidDomain(p, [w]) for w in recurse(work)]
    return NiceCover(
        elements=tuple(elements),
        intersection_points=tuple(intersection_points(elements)),
    )


def cover_with_intersections(
    domain: AffinoidDomain, points: Sequence[BerkPoint]
) -> NiceCover:
    """Nice cover of the domain whose intersection set is exactly S.

    Inductively splits the element whose interior holds the next point
    along {|T - c| <= r} / {|T - c| >= r}; every point of S must be an
    irrational-radius point interior to the domain.
    """
    if not domain.is_connected:
        raise DomainError("target domain must be connected")
    p = domain.prime
    for i, pt in enumerate(points):
        if pt.kind != 3:
            raise DomainError(f"prescribed point {i} is not type 3")
        if membership(pt, domain) != "inside":
            raise DomainError(f"prescribed point {i} is not interior")
        for j in range(i):
            if pt.same_point(points[j]):
                raise DomainError(f"prescribed points {j} and {i} coincide")
    elements: List[SwissCheese] = [domain.pieces[0]]
    for pt in points:
        cut = Disc(p, pt.center, pt.log_radius)
        hosts = [
            k
            for k, piece in enumerate(elements)
            if piece.contains_point(
                BerkPoint(p, pt.center, pt.log_radius)
            )
        ]
        if len(hosts) != 1:
            raise DomainError("prescribed point not interior to a unique piece")
        host = elements[hosts[0]]
        inner = intersect_piece_closed(host, cut)
        outer = subtract_open_disc(host, cut)
        if inner is None or outer is None or inner.is_point() or outer.is_point():
            raise DomainError("prescribed point sits on an existing boundary")
        elements[hosts[0] : hosts[0] + 1] = [inner, outer]
    doms = [AffinoidDomain(p, [piece]) for piece in elements]
    pts = intersection_points(doms)
    matched = (
        len(pts) == len(points)
        and all(any(pt.same_point(q) for q in pts) for pt in points)
    )
    if not matched:
        raise AssertionError("intersection set does not match the request")
    return NiceCover(elements=tuple(doms), intersection_points=tuple(pts))


def parity_function(cover: NiceCover) -> Dict[int, int]:
    """Alternating 2-coloring of a nice cover.

    Elements are peeled off while the rest stays connected (reverse
    breadth-first order on the intersection graph), then reinserted with
    the opposite bit of their unique already-placed neighbor; the result
    is validated on every intersecting pair.
    """
    n = len(cover.elements)
    adj: Dict[int, Set[int]] = {i: set() for i in range(n)}
    for i, j in itertools.combinations(range(n), 2):
        kind, _ = _pair_intersection_point(cover.elements[i], cover.elements[j])
        if kind == "big":
            raise DomainError("cover is not nice: overlapping elements")
        if kind == "point":
            adj[i].add(j)
            adj[j].add(i)
    bits: Dict[int, int] = {}
    seen: Set[int] = set()
    for root in range(n):
        if root in seen:
            continue
        order = [root]
        seen.add(root)
        for v in order:
            for w in sorted(adj[v]):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
        # rebuild in BFS order: each vertex joins a connected union and, for
        # a nice cover, touches exactly one already-placed element
        for v in order:
            placed = [w for w in adj[v] if w in bits]
            if not placed:
                bits[v] = 0
            else:
                first = bits[placed[0]]
                if any(bits[w] != first for w in placed):
                    raise DomainError(
                        "cover admits no parity function (odd adjacency)"
                    )
                bits[v] = 1 - first
    for i in range(n):
        for j in adj[i]:
            if bits[i] == bits[j]:
                raise DomainError("parity validation failed")
    return bits
