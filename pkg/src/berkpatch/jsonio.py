"""Canonical JSON forms for every wire object the CLI exchanges.

Conventions: rationals are "num/den" strings (plain integers allowed on
input), exponents are {"rat", "irr"} pairs, series are degree -> coefficient
maps with string keys, matrices are 2x2 nested arrays.  Dumps always sort
keys so golden files are bit-exact.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from .berkovich import (
    INFINITY,
    WHOLE_LINE,
    AffinoidDomain,
    BerkPoint,
    Disc,
    NiceCover,
    SwissCheese,
)
from .exponents import Exponent, as_exponent
from .padic import DomainError
from .ratfunc import RationalFunction, format_ratfunc, parse_ratfunc
from .series import AnnulusRing, AnnulusSeries


def frac_str(x: Union[int, Fraction]) -> str:
    return str(Fraction(x))


def parse_frac(x) -> Fraction:
    if isinstance(x, bool):
        raise DomainError("expected a rational, got a boolean")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    raise DomainError(f"expected a rational, got {type(x).__name__}")


def exponent_to_json(e: Optional[Exponent]) -> Optional[Dict[str, str]]:
    if e is None:
        return None
    return {"irr": frac_str(e.irr), "rat": frac_str(e.rat)}


def exponent_from_json(data) -> Exponent:
    if isinstance(data, (int, str)):
        return as_exponent(parse_frac(data))
    if isinstance(data, Mapping):
        return Exponent(
            parse_frac(data.get("rat", 0)), parse_frac(data.get("irr", 0))
        )
    raise DomainError("malformed exponent")


def point_to_json(pt: BerkPoint) -> Dict[str, Any]:
    center = "inf" if pt.center == INFINITY else frac_str(pt.center)
    return {"center": center, "log_radius": exponent_to_json(pt.log_radius)}


def point_from_json(data: Mapping, prime: int) -> BerkPoint:
    center = data.get("center")
    if center == "inf":
        return BerkPoint(prime, INFINITY)
    lr = data.get("log_radius")
    return BerkPoint(
        prime,
        parse_frac(center),
        None if lr is None else exponent_from_json(lr),
    )


def disc_to_json(d: Disc) -> Dict[str, Any]:
    return {
        "center": frac_str(d.center),
        "log_radius": exponent_to_json(d.log_radius),
    }


def disc_from_json(data: Mapping, prime: int) -> Disc:
    return Disc(
        prime, parse_frac(data["center"]), exponent_from_json(data["log_radius"])
    )


def piece_to_json(piece: SwissCheese) -> Dict[str, Any]:
    outer = "whole" if piece.is_whole_outer else disc_to_json(piece.outer)
    return {"holes": [disc_to_json(h) for h in piece.holes], "outer": outer}


def piece_from_json(data: Mapping, prime: int) -> SwissCheese:
    outer = data["outer"]
    holes = tuple(disc_from_json(h, prime) for h in data.get("holes", ()))
    if outer == "whole":
        return SwissCheese(prime, WHOLE_LINE, holes)
    return SwissCheese(prime, disc_from_json(outer, prime), holes)


def domain_to_json(dom: AffinoidDomain) -> Dict[str, Any]:
    return {"pieces": [piece_to_json(p) for p in dom.pieces]}


def domain_from_json(data: Mapping, prime: int) -> AffinoidDomain:
    return AffinoidDomain(
        prime, [piece_from_json(p, prime) for p in data["pieces"]]
    )


def cover_to_json(cover: NiceCover) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "elements": [domain_to_json(el) for el in cover.elements],
        "intersection_points": [
            point_to_json(pt) for pt in cover.intersection_points
        ],
    }
    if cover.parity is not None:
        out["parity"] = {str(k): v for k, v in cover.parity.items()}
    return out


def cover_from_json(data: Mapping, prime: int) -> NiceCover:
    elements = tuple(
        domain_from_json(el, prime) for el in data["elements"]
    )
    pts = tuple(
        point_from_json(pt, prime)
        for pt in data.get("intersection_points", ())
    )
    parity = data.get("parity")
    return NiceCover(
        elements=elements,
        intersection_points=pts,
        parity=None
        if parity is None
        else {int(k): int(v) for k, v in parity.items()},
    )


def series_to_json(s: AnnulusSeries) -> Dict[str, str]:
    return {str(d): frac_str(c) for d, c in sorted(s.coeffs.items())}


def series_from_json(data, ring: AnnulusRing) -> AnnulusSeries:
    from .series import parse_series

    if isinstance(data, str):
        return parse_series(data, ring)
    if isinstance(data, Mapping):
        return ring.series({int(d): parse_frac(c) for d, c in data.items()})
    raise DomainError("malformed series")


def matrix_to_json(m: Sequence[AnnulusSeries]) -> List[List[Dict[str, str]]]:
    a, b, c, d = m
    return [[series_to_json(a), series_to_json(b)], [series_to_json(c), series_to_json(d)]]


def matrix_from_json(data, ring: AnnulusRing):
    if not (isinstance(data, Sequence) and len(data) == 2):
        raise DomainError("matrix must be a 2x2 array")
    (a, b), (c, d) = data
    return tuple(series_from_json(x, ring) for x in (a, b, c, d))


def ratfunc_to_json(f: RationalFunction) -> str:
    return format_ratfunc(f)


def ratfunc_from_json(data) -> RationalFunction:
    if isinstance(data, str):
        return parse_ratfunc(data)
    raise DomainError("rational functions are serialized as strings")


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
