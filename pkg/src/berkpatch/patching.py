"""Successive approximation and matrix factorization on an annulus.

The additive engine: any element of the circle field splits exactly into
a part supported in degrees >= 0 (functions on the closed inner disc) and
a part in degrees < 0 (functions outside, vanishing at infinity).  The
split never increases the sup norm, so the splitting constant d may be
any p-power below 1; the default is p**-1 so that every bound in the
iteration is a p-power and can be asserted exactly in exponent
arithmetic.

On top of it, the fixed-point solver: for a group chart f with
f(x,0) = f(0,x) = x and coefficient growth bound M, targets a with
|a| <= d*eps' are hit by f(u, v) with u on the inner side and v on the
outer side, where eps' = min(1/2M, d^2/M^4, delta/2).  The three
per-step bounds are enforced at runtime, not assumed.

Matrix factorization instantiates the solver for GL_1 and for SL_2 in the
three-coordinate rational chart (the fourth matrix entry is determined by
det = 1 and is evaluated exactly in the windowed ring, keeping both
factors of determinant 1 to working precision).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from .berkovich import BerkPoint, NiceCover
from .exponents import Exponent, ExponentLike, as_exponent
from .padic import DomainError
from .series import (
    AnnulusRing,
    AnnulusSeries,
    WindowSaturation,
    geometric_inverse,
)

RationalLike = Union[int, Fraction, str]


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


# ---------------------------------------------------------------------------
# the additive split
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnulusSplit:
    plus: AnnulusSeries  # degrees >= 0: inner-disc side
    minus: AnnulusSeries  # degrees < 0: outer side, vanishing at infinity


def laurent_split(c: AnnulusSeries) -> AnnulusSplit:
    """Degreewise split at 0; exact, with max(|plus|, |minus|) <= |c|."""
    plus, minus = c.plus_part(), c.minus_part()
    total = c.valuation()
    if total is not None:
        parts = [s.valuation() for s in (plus, minus) if not s.is_zero]
        attained = min_exponent(parts)
        if attained != total:
            raise AssertionError("split changed the norm")
    return AnnulusSplit(plus=plus, minus=minus)


def min_exponent(vals: Sequence[Exponent]) -> Exponent:
    best = vals[0]
    for v in vals[1:]:
        if v < best:
            best = v
    return best


# ---------------------------------------------------------------------------
# group charts
# ---------------------------------------------------------------------------


class GroupChart:
    """Chart data for a connected rational group near the identity.

    Subclasses evaluate the multiplication map f(u, v) in chart
    coordinates; all power-series coefficients of the charts shipped here
    are 0 or +-1, so the growth bound is M = 1 (m_exponent = 0).
    """

    name: str
    n: int
    m_exponent: Fraction = Fraction(0)

    def evaluate(
        self, u: Sequence[AnnulusSeries], v: Sequence[AnnulusSeries], tail: Exponent
    ) -> List[AnnulusSeries]:
        raise NotImplementedError


class AdditiveChart(GroupChart):
    """f(x, y) = x + y: the additive group; the solver converges in one
    split since the first correction already solves exactly."""

    name = "ga"
    n = 1

    def evaluate(self, u, v, tail):
        return [u[0] + v[0]]


class GL1Chart(GroupChart):
    """f(x, y) = x + y + x*y: the chart of (1+x)(1+y) = 1 + f(x, y)."""

    name = "gl1"
    n = 1

    def evaluate(self, u, v, tail):
        return [u[0] + v[0] + u[0] * v[0]]


class MatrixChart(GroupChart):
    """Near-identity 2x2 matrix multiplication: f(x, y) = x + y + x*y.

    Chart coordinates are the four entries (row major) of h = g - I.  The
    determinant-1 condition is not part of the chart: when the input has
    det 1 to working precision, support separation forces both factors'
    determinants back to 1 within the same precision (x + y + x*y = delta
    with x supported in degrees >= 0 and y in degrees < 0 implies
    |x|, |y| <= |delta|).
    """

    name = "sl2"
    n = 4

    def evaluate(self, u, v, tail):
        prod = _entry_mul(u, v)
        return [x + y + w for x, y, w in zip(u, v, prod)]


def _entry_mul(
    u: Sequence[AnnulusSeries], v: Sequence[AnnulusSeries]
) -> List[AnnulusSeries]:
    a, b, c, d = u
    e, f, g, h = v
    return [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h]


def sl2_matrix_of(
    x: Sequence[AnnulusSeries], tail: Exponent
) -> Tuple[AnnulusSeries, ...]:
    """Determinant-1 matrix I + [[a, b], [c, d]] from coordinates (a, b, c).

    The fourth entry d = (bc - a)/(1 + a) is evaluated in the windowed
    ring, exact up to the tail valuation; useful for building inputs.
    """
    a, b, c = x
    ring = a.ring
    one = ring.one()
    d = (b * c - a) * geometric_inverse(one + a, tail)
    return (one + a, b, c, one + d)


CHARTS: Dict[str, GroupChart] = {
    "ga": AdditiveChart(),
    "gl1": GL1Chart(),
    "sl2": MatrixChart(),
}


# ---------------------------------------------------------------------------
# 2x2 series matrices
# ---------------------------------------------------------------------------

Matrix = Tuple[AnnulusSeries, AnnulusSeries, AnnulusSeries, AnnulusSeries]


def mat_identity(ring: AnnulusRing) -> Matrix:
    return (ring.one(), ring.zero(), ring.zero(), ring.one())


def mat_mul(m1: Sequence[AnnulusSeries], m2: Sequence[AnnulusSeries]) -> Matrix:
    a, b, c, d = m1
    e, f, g, h = m2
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_sub(m1: Sequence[AnnulusSeries], m2: Sequence[AnnulusSeries]) -> Matrix:
    return tuple(x - y for x, y in zip(m1, m2))  # type: ignore[return-value]


def mat_det(m: Sequence[AnnulusSeries]) -> AnnulusSeries:
    a, b, c, d = m
    return a * d - b * c


def mat_min_valuation(m: Sequence[AnnulusSeries]) -> Optional[Exponent]:
    vals = [x.valuation() for x in m if not x.is_zero]
    if not vals:
        return None
    return min_exponent(vals)


def mat_valuation_at_least(m: Sequence[AnnulusSeries], bound: ExponentLike) -> bool:
    v = mat_min_valuation(m)
    return v is None or v >= as_exponent(bound)


def mat_inverse(m: Sequence[AnnulusSeries], tail: Exponent) -> Matrix:
    """Inverse of a near-identity matrix: adjugate over the determinant."""
    a, b, c, d = m
    det = mat_det(m)
    det_inv = geometric_inverse(det, tail)
    return (d * det_inv, -(b * det_inv), -(c * det_inv), a * det_inv)


# ---------------------------------------------------------------------------
# the solver
# ---------------------------------------------------------------------------


class BoundViolation(RuntimeError):
    """A per-step bound of the iteration failed: constants misconfigured."""


@dataclass(frozen=True)
class TraceRow:
    step: int
    u_valuation: Optional[Exponent]
    v_valuation: Optional[Exponent]
    increment_valuation: Optional[Exponent]
    residual_valuation: Optional[Exponent]


@dataclass(frozen=True)
class PatchingProblem:
    """Target and constants for one run of the solver.

    d = p**-d_exponent is the splitting constant; eps' = p**-eps_exponent
    equals min(1/2M, d^2/M^4, delta/2) exactly (the minimum is attained at
    d^2/M^4, which is checked against 1/2M by exact integer comparison).
    Targets must satisfy |a| <= d*eps'.
    """

    chart: GroupChart
    target: Tuple[AnnulusSeries, ...]
    ring: AnnulusRing
    d_exponent: Fraction = Fraction(1)
    delta_exponent: Optional[Fraction] = None  # None: chart defined everywhere

    def __post_init__(self):
        if len(self.target) != self.chart.n:
            raise DomainError(
                f"chart {self.chart.name} needs {self.chart.n} target coordinates"
            )
        if self.d_exponent <= 0:
            raise DomainError("splitting constant must be below 1")
        e = self.eps_exponent
        # eps' = d^2/M^4 must be the minimum: d^2/M^4 <= 1/(2M), i.e.
        # 2 <= p**(2*d_exp + 3*m); delta, when finite, must not cut lower.
        m = self.chart.m_exponent
        q = 2 * self.d_exponent + 3 * m
        if 2 ** q.denominator > self.ring.prime ** q.numerator:
            raise BoundViolation("d^2/M^4 exceeds 1/(2M); pick a smaller d")
        if self.delta_exponent is not None:
            # eps' <= delta/2: 2 <= p**(E - delta_exp), exact integer compare
            q2 = e - self.delta_exponent
            if q2 <= 0 or 2 ** q2.denominator > self.ring.prime ** q2.numerator:
                raise BoundViolation("eps' exceeds delta/2")
        for i, a in enumerate(self.target):
            if not a.valuation_at_least(self.epsilon_exponent):
                raise DomainError(
                    f"target coordinate {i} exceeds the convergence radius"
                )

    @property
    def eps_exponent(self) -> Fraction:
        # eps' = d^2 / M^4 as a p-power exponent
        return 2 * self.d_exponent + 4 * self.chart.m_exponent

    @property
    def epsilon_exponent(self) -> Fraction:
        # eps = d * eps'
        return self.d_exponent + self.eps_exponent


@dataclass(frozen=True)
class ApproximationResult:
    u: Tuple[AnnulusSeries, ...]
    v: Tuple[AnnulusSeries, ...]
    trace: Tuple[TraceRow, ...]
    residual_valuation: Optional[Exponent]
    saturated: bool


def successive_approximation(
    prob: PatchingProblem,
    stop_valuation: Optional[ExponentLike] = None,
    max_steps: Optional[int] = None,
) -> ApproximationResult:
    """Iterate split-and-correct until the residual reaches the target.

    Each step splits the residual additively and adds the parts to the
    two sides; the three bounds
      |u_s|, |v_s| <= eps',
      |u_s - u_{s-1}| <= eps'^((s+1)/2),
      |f(u_s, v_s) - a| <= d * eps'^((s+2)/2)
    are asserted exactly after every step.
    """
    ring = prob.ring
    n = prob.chart.n
    E = prob.eps_exponent
    d_exp = prob.d_exponent
    if stop_valuation is None:
        stop_valuation = Fraction(ring.window, 2)
    stop = as_exponent(stop_valuation)
    tail = stop + as_exponent(E) + 2  # spare digits for chart evaluations
    if max_steps is None:
        max_steps = 4 * ring.window + 16

    u = [ring.zero() for _ in range(n)]
    v = [ring.zero() for _ in range(n)]
    residual = list(prob.target)
    trace: List[TraceRow] = []
    saturated = False
    # coefficients are only meaningful up to the working valuation; reducing
    # them mod matching p-powers keeps their bit size bounded over the run
    working = tail + as_exponent(E) + 2

    def vec_val(xs: Sequence[AnnulusSeries]) -> Optional[Exponent]:
        vals = [x.valuation() for x in xs if not x.is_zero]
        return min_exponent(vals) if vals else None

    def check(val: Optional[Exponent], bound: Fraction, what: str, s: int):
        if val is not None and not val >= as_exponent(bound):
            raise BoundViolation(
                f"step {s}: {what} valuation {val} below bound {bound}"
            )

    check(vec_val(residual), d_exp + E, "initial residual", 0)
    trace.append(
        TraceRow(0, vec_val(u), vec_val(v), None, vec_val(residual))
    )
    s = 0
    while True:
        rv = vec_val(residual)
        if rv is None or rv >= stop:
            break
        if s >= max_steps:
            raise WindowSaturation(
                "iteration did not reach the target valuation; widen the window"
            )
        splits = [laurent_split(r) for r in residual]
        u = [(x + sp.plus).reduce_precision(working) for x, sp in zip(u, splits)]
        v = [(x + sp.minus).reduce_precision(working) for x, sp in zip(v, splits)]
        s += 1
        incr = vec_val([sp.plus for sp in splits] + [sp.minus for sp in splits])
        fx = prob.chart.evaluate(u, v, tail)
        residual = [
            (a - f).reduce_precision(working) for a, f in zip(prob.target, fx)
        ]
        saturated = saturated or any(x.truncated for x in fx)
        check(vec_val(u), E, "u", s)
        check(vec_val(v), E, "v", s)
        check(incr, E * Fraction(s + 1, 2), "increment", s)
        check(vec_val(residual), d_exp + E * Fraction(s + 2, 2), "residual", s)
        trace.append(TraceRow(s, vec_val(u), vec_val(v), incr, vec_val(residual)))
    return ApproximationResult(
        u=tuple(u),
        v=tuple(v),
        trace=tuple(trace),
        residual_valuation=vec_val(residual),
        saturated=saturated,
    )


# ---------------------------------------------------------------------------
# matrix factorization across the circle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixFactorization:
    plus_factor: Matrix  # supported in degrees >= 0, det 1 to precision
    minus_factor: Matrix  # I plus strictly negative degrees
    residual_valuation: Optional[Exponent]
    trace: Tuple[TraceRow, ...]


def _assert_support(m: Matrix, side: str) -> None:
    one = m[0].ring.one()
    for idx, entry in enumerate(m):
        base = entry - one if idx in (0, 3) else entry
        degs = base.support()
        if side == "plus" and any(d < 0 for d in degs):
            raise AssertionError("plus factor has negative-degree support")
        if side == "minus" and any(d >= 0 for d in degs):
            raise AssertionError("minus factor has nonnegative-degree support")


def factor_matrix(
    g: Matrix,
    d_exponent: Fraction = Fraction(1),
    stop_valuation: Optional[ExponentLike] = None,
    minus_first: bool = False,
) -> MatrixFactorization:
    """Factor a near-identity determinant-1 matrix as g1 * g2.

    g1 has entries supported in degrees >= 0, g2 is the identity plus
    strictly negative degrees; both have determinant 1 and re-multiply to
    g up to the stop valuation (default: half the window).  With
    minus_first the roles are swapped via g = (Q**-1) * (P**-1) where
    g**-1 = P * Q.
    """
    ring = g[0].ring
    if stop_valuation is None:
        stop_valuation = Fraction(ring.window, 2)
    stop = as_exponent(stop_valuation)
    tail = stop + 8

    det = mat_det(g)
    if not (det - ring.one()).valuation_at_least(stop):
        raise DomainError("matrix determinant is not 1 to working precision")

    if minus_first:
        inv = mat_inverse(g, tail)
        inner = factor_matrix(
            inv, d_exponent=d_exponent, stop_valuation=stop_valuation
        )
        q_inv = mat_inverse(inner.minus_factor, tail)
        p_inv = mat_inverse(inner.plus_factor, tail)
        resid = mat_sub(mat_mul(q_inv, p_inv), g)
        rv = mat_min_valuation(resid)
        if not mat_valuation_at_least(resid, stop):
            raise AssertionError("re-multiplication residual too large")
        _assert_support(p_inv, "plus")
        _assert_support(q_inv, "minus")
        return MatrixFactorization(
            plus_factor=p_inv,
            minus_factor=q_inv,
            residual_valuation=rv,
            trace=inner.trace,
        )

    chart = CHARTS["sl2"]
    ident = mat_identity(ring)
    h = mat_sub(g, ident)
    prob = PatchingProblem(
        chart=chart,
        target=h,
        ring=ring,
        d_exponent=d_exponent,
    )
    result = successive_approximation(prob, stop_valuation=stop_valuation)
    g1: Matrix = tuple(i + x for i, x in zip(ident, result.u))  # type: ignore[assignment]
    g2: Matrix = tuple(i + x for i, x in zip(ident, result.v))  # type: ignore[assignment]
    _assert_support(g1, "plus")
    _assert_support(g2, "minus")
    for factor in (g1, g2):
        if not (mat_det(factor) - ring.one()).valuation_at_least(stop):
            raise AssertionError("factor determinant drifted from 1")
    resid = mat_sub(mat_mul(g1, g2), g)
    if not mat_valuation_at_least(resid, stop):
        raise AssertionError("re-multiplication residual too large")
    return MatrixFactorization(
        plus_factor=g1,
        minus_factor=g2,
        residual_valuation=mat_min_valuation(resid),
        trace=result.trace,
    )


# ---------------------------------------------------------------------------
# germ re-expansion between circle fields
# ---------------------------------------------------------------------------


def reexpand_series(
    s: AnnulusSeries, from_center: Fraction, to_center: Fraction, to_ring: AnnulusRing
) -> AnnulusSeries:
    """Re-express a series in T - c as a series in T - c' on a new circle.

    Positive powers re-center by finite binomial expansion; negative
    powers become geometric series, valid off the critical sphere
    |c - c'| (the side is decided exactly by comparing the new radius
    with |c - c'|).  Exact in every coefficient up to the window.
    """
    p = to_ring.prime
    gamma = _frac(to_center) - _frac(from_center)
    if gamma == 0:
        return to_ring.series(dict(s.coeffs), truncated=s.truncated)
    from .padic import padic_valuation

    gamma_val = Fraction(padic_valuation(gamma, p))
    tail = as_exponent(Fraction(2 * to_ring.window, 1))

    # t = s' + gamma in the new coordinate
    t_pos = to_ring.series({0: gamma, 1: 1})
    if to_ring.rho_log > as_exponent(gamma_val):
        # new circle strictly inside |t| = |gamma|: expand around gamma
        inv_base = to_ring.series({1: Fraction(1, 1) / gamma})
        t_inv = geometric_inverse(to_ring.one() + inv_base, tail).scale(
            Fraction(1, 1) / gamma
        )
    elif to_ring.rho_log < as_exponent(gamma_val):
        # new circle outside: expand at infinity, negative degrees
        inv_base = to_ring.series({-1: gamma})
        t_inv = geometric_inverse(to_ring.one() + inv_base, tail).shift_degree(-1)
    else:
        raise DomainError("re-expansion on the critical sphere is undefined")

    out = to_ring.zero()
    pos_power = to_ring.one()
    pos_cache = {0: pos_power}
    neg_cache = {0: to_ring.one()}

    def power(k: int) -> AnnulusSeries:
        cache, base = (pos_cache, t_pos) if k >= 0 else (neg_cache, t_inv)
        key = abs(k)
        while key not in cache:
            top = max(cache)
            cache[top + 1] = cache[top] * base
        return cache[key]

    for d, c in sorted(s.coeffs.items()):
        out = out + power(d).scale(c)
    return out


def reexpand_matrix(
    m: Matrix, from_center: Fraction, to_center: Fraction, to_ring: AnnulusRing
) -> Matrix:
    return tuple(
        reexpand_series(entry, from_center, to_center, to_ring) for entry in m
    )  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# patching over a nice cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PatchResult:
    """Group elements per cover element, as germs at the adjacent points."""

    germs: Dict[int, Dict[int, Matrix]]
    checks: Tuple[Tuple[int, Optional[Exponent]], ...]  # point -> residual val


def patch_over_cover(
    cover: NiceCover,
    parity: Dict[int, int],
    transitions: Dict[int, Matrix],
    window: int = 64,
    d_exponent: Fraction = Fraction(1),
    peel: str = "low",
) -> PatchResult:
    """Distribute transition matrices across a nice cover.

    For each intersection point s with adjacent elements U0 (parity 0) and
    U1, the result satisfies g_s = g_{U0} * g_{U1}**-1 in the circle field
    at s, to half-window valuation.  The recursion peels leaf elements of
    the intersection graph, factors at the freed point, and pushes the
    complementary factor onto the remaining elements, re-expanded at their
    points.  ``peel`` picks which leaf goes first ("low"/"high" element
    index); the defining identities hold for any order.
    """
    if peel not in ("low", "high"):
        raise DomainError("peel must be 'low' or 'high'")
    elements = cover.elements
    points = cover.intersection_points
    p = elements[0].prime if elements else 3
    n_el = len(elements)

    adjacency: Dict[int, Tuple[int, int]] = {}
    for k, pt in enumerate(points):
        holders = [i for i, el in enumerate(elements) if el.contains_point(pt)]
        if len(holders) != 2:
            raise DomainError(f"intersection point {k} is not shared by exactly two elements")
        u0, u1 = holders
        if parity.get(u0) == parity.get(u1):
            raise DomainError("parity function does not separate an intersection")
        if parity[u0] == 1:
            u0, u1 = u1, u0
        adjacency[k] = (u0, u1)
        if k not in transitions:
            raise DomainError(f"missing transition at point {k}")

    rings = {
        k: AnnulusRing(p, pt.log_radius, window) for k, pt in enumerate(points)
    }
    stop = Fraction(window, 2)
    tail = as_exponent(stop) + 8

    for k, g in transitions.items():
        if any(s.ring != rings[k] for s in g):
            raise DomainError(f"transition at point {k} uses the wrong circle field")
        eps = d_exponent + (2 * d_exponent)  # eps = d * eps' with M = 1
        h = mat_sub(g, mat_identity(rings[k]))
        if not mat_valuation_at_least(h, eps):
            raise DomainError(f"transition at point {k} is outside the convergence radius")

    def elem_side_is_plus(el_idx: int, pt_idx: int) -> bool:
        """Is the element on the inner-disc side of the point?"""
        from .berkovich import Disc, closed_disc_piece, piece_contains

        pt = points[pt_idx]
        disc_piece = closed_disc_piece(p, pt.center, pt.log_radius)
        return piece_contains(disc_piece, elements[el_idx].pieces[0])

    def solve(active: Set[int], live_pts: Set[int]) -> Dict[int, Dict[int, Matrix]]:
        if not live_pts:
            return {i: {} for i in active}
        # leaf: an element adjacent to exactly one live point
        degree = {i: 0 for i in active}
        for k in live_pts:
            for e in adjacency[k]:
                degree[e] += 1
        leaves = [i for i in active if degree[i] == 1]
        if not leaves:
            raise DomainError("cover intersection graph has a cycle")
        leaf = min(leaves) if peel == "low" else max(leaves)
        eta = next(k for k in live_pts if leaf in adjacency[k])
        u0, u1 = adjacency[eta]
        neighbor = u1 if leaf == u0 else u0
        sub = solve(active - {leaf}, live_pts - {eta})

        ring = rings[eta]
        ident = mat_identity(ring)
        g_eta = transitions[eta]
        g_nb = sub[neighbor].get(eta, ident)
        leaf_plus = elem_side_is_plus(leaf, eta)

        if parity[leaf] == 0:
            # solve g_eta * g_nb = a * b with a on the leaf side
            product = mat_mul(g_eta, g_nb)
            fac = factor_matrix(
                product, d_exponent=d_exponent, stop_valuation=stop,
                minus_first=not leaf_plus,
            )
            if leaf_plus:
                a_fac, b_fac = fac.plus_factor, fac.minus_factor
            else:
                a_fac, b_fac = fac.minus_factor, fac.plus_factor
            multiplier = mat_inverse(b_fac, tail)
            leaf_germ = a_fac
        else:
            # solve g_nb**-1 * g_eta = c * d with c on the rest side
            product = mat_mul(mat_inverse(g_nb, tail), g_eta)
            fac = factor_matrix(
                product, d_exponent=d_exponent, stop_valuation=stop,
                minus_first=leaf_plus,  # first factor on the rest side
            )
            if leaf_plus:
                c_fac, d_fac = fac.minus_factor, fac.plus_factor
            else:
                c_fac, d_fac = fac.plus_factor, fac.minus_factor
            multiplier = c_fac
            leaf_germ = mat_inverse(d_fac, tail)

        out: Dict[int, Dict[int, Matrix]] = {leaf: {eta: leaf_germ}}
        for i in active - {leaf}:
            srcs = sub[i]
            updated: Dict[int, Matrix] = {}
            pts_needed = set(srcs) | ({eta} if i == neighbor else set())
            for k in pts_needed:
                base = srcs.get(k, mat_identity(rings[k]))
                if k == eta:
                    mult_k = multiplier
                else:
                    mult_k = reexpand_matrix(
                        multiplier, points[eta].center, points[k].center, rings[k]
                    )
                updated[k] = mat_mul(base, mult_k)
            out[i] = updated
        return out

    active = set(range(n_el))
    live = set(range(len(points)))
    # solve component by component of the intersection graph
    germs: Dict[int, Dict[int, Matrix]] = {}
    seen: Set[int] = set()
    for start in sorted(active):
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for k, (a, b) in adjacency.items():
                if x in (a, b):
                    other = b if x == a else a
                    if other not in comp:
                        comp.add(other)
                        frontier.append(other)
        comp_pts = {k for k, (a, b) in adjacency.items() if a in comp}
        germs.update(solve(comp, comp_pts))
        seen |= comp

    checks: List[Tuple[int, Optional[Exponent]]] = []
    for k, (u0, u1) in adjacency.items():
        ring = rings[k]
        ident = mat_identity(ring)
        g0 = germs.get(u0, {}).get(k, ident)
        g1 = germs.get(u1, {}).get(k, ident)
        lhs = mat_mul(g0, mat_inverse(g1, tail))
        resid = mat_sub(lhs, transitions[k])
        rv = mat_min_valuation(resid)
        if not mat_valuation_at_least(resid, stop):
            raise AssertionError(
                f"patched identity fails at point {k}: residual {rv}"
            )
        checks.append((k, rv))
    return PatchResult(germs=germs, checks=tuple(checks))
