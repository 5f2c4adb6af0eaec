"""Command-line surface: JSON in, JSON out, exit codes 0/1/2.

Every subcommand reads a JSON payload from a file argument or stdin,
validates it against a schema, dispatches to the library, and prints a
response envelope with the canonicalized request embedded (so that
--verify can replay the certified identities without rerunning any
search).  Domain precondition failures exit 1, malformed payloads exit 2.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import jsonschema

from . import jsonio
from .berkovich import (
    classify_point,
    cover_with_intersections,
    is_nice_cover,
    nice_refinement,
    parity_function,
)
from .exponents import as_exponent
from .formal import SyntheticField
from .forms import (
    DiagonalForm,
    FieldProfile,
    PadicField,
    u_bound,
    unit_block_decomposition,
)
from .isotropy import (
    FiniteField,
    PointField,
    isotropic_finite_field,
    isotropic_padic,
    local_isotropy_at_point,
)
from .exponents import ValueVector
from .padic import DomainError, padic_valuation
from .patching import (
    CHARTS,
    BoundViolation,
    PatchingProblem,
    factor_matrix,
    laurent_split,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_sub,
    mat_valuation_at_least,
    patch_over_cover,
    successive_approximation,
)
from .ratfunc import ParseError, parse_ratfunc
from .series import AnnulusRing, WindowSaturation

COMMANDS = [
    "isotropy",
    "decompose",
    "ubound",
    "classify",
    "refine",
    "parity",
    "cover-with-s",
    "split",
    "approximate",
    "factor",
    "patch",
]

_EXPONENT_SCHEMA = {
    "oneOf": [
        {"type": ["string", "integer"]},
        {
            "type": "object",
            "properties": {
                "rat": {"type": ["string", "integer"]},
                "irr": {"type": ["string", "integer"]},
            },
            "additionalProperties": False,
        },
    ]
}
_POINT_SCHEMA = {
    "type": "object",
    "properties": {
        "center": {"type": ["string", "integer"]},
        "log_radius": {"oneOf": [{"type": "null"}, _EXPONENT_SCHEMA]},
    },
    "required": ["center"],
    "additionalProperties": False,
}
_DISC_SCHEMA = {
    "type": "object",
    "properties": {
        "center": {"type": ["string", "integer"]},
        "log_radius": _EXPONENT_SCHEMA,
    },
    "required": ["center", "log_radius"],
    "additionalProperties": False,
}
_PIECE_SCHEMA = {
    "type": "object",
    "properties": {
        "outer": {"oneOf": [{"const": "whole"}, _DISC_SCHEMA]},
        "holes": {"type": "array", "items": _DISC_SCHEMA},
    },
    "required": ["outer"],
    "additionalProperties": False,
}
_DOMAIN_SCHEMA = {
    "type": "object",
    "properties": {
        "pieces": {"type": "array", "items": _PIECE_SCHEMA, "minItems": 1}
    },
    "required": ["pieces"],
    "additionalProperties": False,
}
_SERIES_SCHEMA = {
    "oneOf": [
        {"type": "string"},
        {"type": "object", "patternProperties": {"^-?[0-9]+$": {"type": ["string", "integer"]}}},
    ]
}
_MATRIX_SCHEMA = {
    "type": "array",
    "items": {"type": "array", "items": _SERIES_SCHEMA, "minItems": 2, "maxItems": 2},
    "minItems": 2,
    "maxItems": 2,
}
_PROFILE_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer"},
        "free": {"type": "boolean"},
        "residue_us": {"type": "integer"},
    },
    "required": ["n", "free", "residue_us"],
    "additionalProperties": False,
}

SCHEMAS: Dict[str, dict] = {
    "ubound": _PROFILE_SCHEMA,
    "classify": _POINT_SCHEMA,
    "isotropy": {
        "type": "object",
        "properties": {
            "field": {"enum": ["Qp", "Fq", "QpT"]},
            "coefficients": {"type": "array", "minItems": 1},
            "q": {"type": "integer"},
            "center": {"type": ["string", "integer"]},
            "log_radius": _EXPONENT_SCHEMA,
            "profile": _PROFILE_SCHEMA,
        },
        "required": ["field", "coefficients"],
        "additionalProperties": False,
    },
    "decompose": {
        "type": "object",
        "properties": {
            "field": {"enum": ["Qp", "synthetic"]},
            "coefficients": {"type": "array"},
            "vectors": {"type": "array"},
            "rank": {"type": "integer"},
        },
        "required": ["field"],
        "additionalProperties": False,
    },
    "split": {
        "type": "object",
        "properties": {
            "series": _SERIES_SCHEMA,
            "rho_log": _EXPONENT_SCHEMA,
        },
        "required": ["series"],
        "additionalProperties": False,
    },
    "approximate": {
        "type": "object",
        "properties": {
            "chart": {"enum": ["ga", "gl1", "sl2"]},
            "target": {"type": "array", "items": _SERIES_SCHEMA},
            "rho_log": _EXPONENT_SCHEMA,
            "d_exponent": {"type": ["string", "integer"]},
        },
        "required": ["chart", "target", "rho_log"],
        "additionalProperties": False,
    },
    "factor": {
        "type": "object",
        "properties": {
            "matrix": _MATRIX_SCHEMA,
            "rho_log": _EXPONENT_SCHEMA,
            "d_exponent": {"type": ["string", "integer"]},
        },
        "required": ["matrix", "rho_log"],
        "additionalProperties": False,
    },
    "refine": {
        "type": "object",
        "properties": {
            "domains": {"type": "array", "items": _DOMAIN_SCHEMA, "minItems": 1}
        },
        "required": ["domains"],
        "additionalProperties": False,
    },
    "parity": {
        "type": "object",
        "properties": {"cover": {"type": "object"}},
        "required": ["cover"],
        "additionalProperties": False,
    },
    "cover-with-s": {
        "type": "object",
        "properties": {
            "domain": _DOMAIN_SCHEMA,
            "points": {"type": "array", "items": _POINT_SCHEMA},
        },
        "required": ["domain", "points"],
        "additionalProperties": False,
    },
    "patch": {
        "type": "object",
        "properties": {
            "cover": {"type": "object"},
            "parity": {"type": "object"},
            "transitions": {"type": "object"},
        },
        "required": ["cover", "transitions"],
        "additionalProperties": False,
    },
}


class UsageFailure(Exception):
    pass


def _profile(data: dict) -> FieldProfile:
    return FieldProfile(
        n=data["n"], free=data["free"], residue_us=data["residue_us"]
    )


def _certificate_json(cert) -> dict:
    return {
        "guaranteed": cert.guaranteed,
        "trace": list(cert.trace),
        "verdict": cert.verdict,
        "witness": None
        if cert.witness is None
        else [jsonio.frac_str(x) for x in cert.witness],
        "witness_valuation": cert.witness_valuation,
    }


def _trace_json(trace) -> list:
    def ex(e):
        return None if e is None else jsonio.exponent_to_json(e)

    return [
        {
            "step": row.step,
            "u_valuation": ex(row.u_valuation),
            "v_valuation": ex(row.v_valuation),
            "increment_valuation": ex(row.increment_valuation),
            "residual_valuation": ex(row.residual_valuation),
        }
        for row in trace
    ]


def _element_json(field, x) -> Any:
    if isinstance(field, PadicField):
        return jsonio.frac_str(x)
    if isinstance(field, SyntheticField):
        return {"powers": dict(sorted(x.powers.items()))}
    return jsonio.ratfunc_to_json(x)


def _decomposition_json(decomp, field) -> dict:
    return {
        "block_count": decomp.block_count,
        "blocks": [
            {
                "certificates": [
                    {
                        "index": c.original_index,
                        "square": _element_json(field, c.square),
                        "unit": _element_json(field, c.unit),
                    }
                    for c in block.certificates
                ],
                "scale": _element_json(field, block.scale),
                "units": [
                    _element_json(field, u)
                    for u in block.unit_form.coefficients
                ],
            }
            for block in decomp.blocks
        ],
        "mode": decomp.mode,
        "rank": decomp.rank,
    }


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def _run_ubound(payload, options):
    bound = u_bound(_profile(payload))
    return {
        "equality": bound.equality,
        "field": bound.field_bound,
        "function_field": bound.function_field_bound,
    }, []


def _run_classify(payload, options):
    pt = jsonio.point_from_json(payload, options["prime"])
    return {"kind": classify_point(pt)}, []


def _run_isotropy(payload, options):
    p = options["prime"]
    kind = payload["field"]
    diagnostics: List[str] = []
    if kind == "Qp":
        coeffs = [jsonio.parse_frac(c) for c in payload["coefficients"]]
        q = DiagonalForm(coeffs, PadicField(p))
        cert = isotropic_padic(q, precision=options["precision"] // 4 or 4)
    elif kind == "Fq":
        qsize = payload.get("q", p)
        p0 = k = None
        for cand in range(3, max(4, qsize + 1), 2):
            m, kk = qsize, 0
            while m % cand == 0:
                m //= cand
                kk += 1
            if m == 1 and kk >= 1:
                p0, k = cand, kk
                break
        if p0 is None:
            raise DomainError(f"{qsize} is not an odd prime power")
        gf = FiniteField(p0, k)
        cert = isotropic_finite_field(
            [int(c) for c in payload["coefficients"]], gf
        )
    else:  # QpT
        center = jsonio.parse_frac(payload.get("center", 0))
        lr = jsonio.exponent_from_json(payload["log_radius"])
        model = PointField(p, center, lr)
        coeffs = [jsonio.ratfunc_from_json(c) for c in payload["coefficients"]]
        q = DiagonalForm(coeffs, model)
        profile = _profile(
            payload.get("profile", {"n": 1, "free": True, "residue_us": 2})
        )
        cert = local_isotropy_at_point(
            q, center, lr, profile, seed=options["seed"]
        )
    if cert.verdict == "inconclusive":
        diagnostics.append("oracle inconclusive below the dimension bound")
    return _certificate_json(cert), diagnostics


def _run_decompose(payload, options):
    mode = options["mode"]
    if payload["field"] == "Qp":
        field = PadicField(options["prime"])
        coeffs = [jsonio.parse_frac(c) for c in payload["coefficients"]]
    else:
        rank = payload.get("rank")
        vectors = payload.get("vectors")
        if rank is None or vectors is None:
            raise UsageFailure("synthetic decomposition needs rank and vectors")
        field = SyntheticField(rank)
        coeffs = [
            field.add_element(
                f"a{i}", ValueVector([jsonio.parse_frac(x) for x in vec])
            )
            for i, vec in enumerate(vectors)
        ]
    q = DiagonalForm(coeffs, field)
    decomp = unit_block_decomposition(q, mode=mode)
    return _decomposition_json(decomp, field), []


def _ring_from(payload, options) -> AnnulusRing:
    return AnnulusRing(
        prime=options["prime"],
        rho_log=jsonio.exponent_from_json(payload["rho_log"]),
        window=options["precision"],
    )


def _run_split(payload, options):
    # the degreewise split itself is radius-independent; the radius only
    # feeds the norm bookkeeping, so a default circle is acceptable here
    payload = {"rho_log": "1/2", **payload}
    ring = _ring_from(payload, options)
    s = jsonio.series_from_json(payload["series"], ring)
    out = laurent_split(s)
    diagnostics = []
    if s.truncated:
        diagnostics.append("input was truncated to the window")
    return {
        "minus": jsonio.series_to_json(out.minus),
        "plus": jsonio.series_to_json(out.plus),
    }, diagnostics


def _run_approximate(payload, options):
    ring = _ring_from(payload, options)
    chart = CHARTS[payload["chart"]]
    target = tuple(
        jsonio.series_from_json(s, ring) for s in payload["target"]
    )
    d_exp = jsonio.parse_frac(payload.get("d_exponent", 1))
    prob = PatchingProblem(chart, target, ring, d_exponent=d_exp)
    res = successive_approximation(prob)
    diagnostics = ["window saturated"] if res.saturated else []
    return {
        "residual_valuation": jsonio.exponent_to_json(res.residual_valuation)
        if res.residual_valuation is not None
        else None,
        "trace": _trace_json(res.trace),
        "u": [jsonio.series_to_json(x) for x in res.u],
        "v": [jsonio.series_to_json(x) for x in res.v],
    }, diagnostics


def _run_factor(payload, options):
    ring = _ring_from(payload, options)
    g = jsonio.matrix_from_json(payload["matrix"], ring)
    d_exp = jsonio.parse_frac(payload.get("d_exponent", 1))
    fac = factor_matrix(g, d_exponent=d_exp)
    return {
        "minus_factor": jsonio.matrix_to_json(fac.minus_factor),
        "plus_factor": jsonio.matrix_to_json(fac.plus_factor),
        "residual_valuation": jsonio.exponent_to_json(fac.residual_valuation)
        if fac.residual_valuation is not None
        else None,
        "trace": _trace_json(fac.trace),
    }, []


def _run_refine(payload, options):
    p = options["prime"]
    domains = [jsonio.domain_from_json(d, p) for d in payload["domains"]]
    cover = nice_refinement(domains)
    report = is_nice_cover(list(cover.elements))
    if not report.ok:
        raise AssertionError(f"refinement failed self-check: {report.violation}")
    return jsonio.cover_to_json(cover), []


def _run_parity(payload, options):
    p = options["prime"]
    cover = jsonio.cover_from_json(payload["cover"], p)
    bits = parity_function(cover)
    return {"parity": {str(k): v for k, v in sorted(bits.items())}}, []


def _run_cover_with_s(payload, options):
    p = options["prime"]
    domain = jsonio.domain_from_json(payload["domain"], p)
    pts = [jsonio.point_from_json(pt, p) for pt in payload["points"]]
    cover = cover_with_intersections(domain, pts)
    return jsonio.cover_to_json(cover), []


def _run_patch(payload, options):
    p = options["prime"]
    cover = jsonio.cover_from_json(payload["cover"], p)
    if payload.get("parity") is not None:
        parity = {int(k): int(v) for k, v in payload["parity"].items()}
    else:
        parity = parity_function(cover)
    window = options["precision"]
    transitions = {}
    for key, mat in payload["transitions"].items():
        k = int(key)
        pt = cover.intersection_points[k]
        ring = AnnulusRing(p, pt.log_radius, window)
        transitions[k] = jsonio.matrix_from_json(mat, ring)
    result = patch_over_cover(cover, parity, transitions, window=window)
    return {
        "checks": [
            {
                "point": k,
                "residual_valuation": jsonio.exponent_to_json(rv)
                if rv is not None
                else None,
            }
            for k, rv in result.checks
        ],
        "germs": {
            str(el): {
                str(k): jsonio.matrix_to_json(m) for k, m in sorted(pts.items())
            }
            for el, pts in sorted(result.germs.items())
        },
        "parity": {str(k): v for k, v in sorted(parity.items())},
    }, []


RUNNERS = {
    "ubound": _run_ubound,
    "classify": _run_classify,
    "isotropy": _run_isotropy,
    "decompose": _run_decompose,
    "split": _run_split,
    "approximate": _run_approximate,
    "factor": _run_factor,
    "refine": _run_refine,
    "parity": _run_parity,
    "cover-with-s": _run_cover_with_s,
    "patch": _run_patch,
}


def dispatch(command: str, payload: dict, options: dict) -> dict:
    """Validate, run, and wrap one command; returns the response envelope."""
    if command not in RUNNERS:
        raise UsageFailure(f"unknown command {command!r}")
    try:
        jsonschema.validate(payload, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        raise UsageFailure(f"payload schema violation: {exc.message}") from exc
    result, diagnostics = RUNNERS[command](payload, options)
    return {
        "command": command,
        "diagnostics": diagnostics,
        "options": {
            "mode": options["mode"],
            "precision": options["precision"],
            "prime": options["prime"],
            "seed": options["seed"],
        },
        "request": payload,
        "result": result,
        "status": "ok",
    }


# ---------------------------------------------------------------------------
# certificate replay (--verify)
# ---------------------------------------------------------------------------


def verify_envelope(envelope: dict) -> dict:
    """Recheck the certified identities of a previous response."""
    command = envelope.get("command")
    options = envelope.get("options", {})
    payload = envelope.get("request", {})
    result = envelope.get("result", {})
    p = options.get("prime", 3)
    checks: List[str] = []

    def ok(label):
        checks.append(label)

    if command == "ubound":
        fresh, _ = _run_ubound(payload, options)
        if fresh != result:
            raise AssertionError("ubound result mismatch")
        ok("recomputed bounds match")
    elif command == "classify":
        fresh, _ = _run_classify(payload, options)
        if fresh != result:
            raise AssertionError("classification mismatch")
        ok("recomputed kind matches")
    elif command == "isotropy":
        if result.get("witness") is None:
            ok("no explicit witness to check")
        else:
            witness = [jsonio.parse_frac(x) for x in result["witness"]]
            if payload["field"] == "Qp":
                coeffs = [jsonio.parse_frac(c) for c in payload["coefficients"]]
                total = sum(a * x * x for a, x in zip(coeffs, witness))
                if total == 0:
                    ok("witness evaluates to exactly zero")
                else:
                    val = padic_valuation(total, p)
                    bound = result.get("witness_valuation")
                    nz = [padic_valuation(x, p) for x in witness if x != 0]
                    val += -2 * min(nz)
                    if bound is not None and val < bound:
                        raise AssertionError(
                            f"witness valuation {val} below stated {bound}"
                        )
                    ok(f"witness valuation {val} meets the stated bound")
            elif payload["field"] == "Fq":
                fresh, _ = _run_isotropy(payload, options)
                if fresh["verdict"] != result["verdict"]:
                    raise AssertionError("finite-field verdict mismatch")
                ok("finite-field witness verdict reproduced")
            else:
                ok("local certificates carry no explicit witness")
    elif command == "decompose":
        if payload["field"] == "Qp":
            field = PadicField(p)
            coeffs = [jsonio.parse_frac(c) for c in payload["coefficients"]]
        else:
            field = SyntheticField(payload["rank"])
            coeffs = [
                field.add_element(
                    f"a{i}", ValueVector([jsonio.parse_frac(x) for x in vec])
                )
                for i, vec in enumerate(payload["vectors"])
            ]
        bound = (
            2 ** field.rank
            if result["mode"] == "free"
            else 2 ** (field.rank + 1)
        )
        if result["block_count"] > bound:
            raise AssertionError("block count exceeds the bound")
        for block in result["blocks"]:
            scale = _element_parse(field, block["scale"])
            for cert in block["certificates"]:
                a = coeffs[cert["index"]]
                unit = _element_parse(field, cert["unit"])
                square = _element_parse(field, cert["square"])
                rebuilt = field.mul(field.mul(scale, unit), field.pow(square, 2))
                if not field.eq(a, rebuilt):
                    raise AssertionError(
                        f"certificate identity fails at index {cert['index']}"
                    )
        ok("all certificate identities verified; block bound holds")
    elif command == "split":
        ring = _ring_from({"rho_log": "1/2", **payload}, options)
        original = jsonio.series_from_json(payload["series"], ring)
        plus = jsonio.series_from_json(result["plus"], ring)
        minus = jsonio.series_from_json(result["minus"], ring)
        if dict((plus + minus).coeffs) != dict(original.coeffs):
            raise AssertionError("split does not re-sum to the input")
        if any(d < 0 for d in plus.support()) or any(
            d >= 0 for d in minus.support()
        ):
            raise AssertionError("split support separation violated")
        ok("split re-sums exactly with separated supports")
    elif command == "approximate":
        ring = _ring_from(payload, options)
        chart = CHARTS[payload["chart"]]
        target = [jsonio.series_from_json(s, ring) for s in payload["target"]]
        u = [jsonio.series_from_json(s, ring) for s in result["u"]]
        v = [jsonio.series_from_json(s, ring) for s in result["v"]]
        stop = Fraction(ring.window, 2)
        fx = chart.evaluate(u, v, as_exponent(stop) + 8)
        for a, f in zip(target, fx):
            if not (a - f).valuation_at_least(stop):
                raise AssertionError("recomputed residual exceeds the bound")
        if any(d < 0 for x in u for d in x.support()) or any(
            d >= 0 for x in v for d in x.support()
        ):
            raise AssertionError("support separation violated")
        ok("re-evaluated f(u, v) matches the target to half-window valuation")
    elif command == "factor":
        ring = _ring_from(payload, options)
        g = jsonio.matrix_from_json(payload["matrix"], ring)
        g1 = jsonio.matrix_from_json(result["plus_factor"], ring)
        g2 = jsonio.matrix_from_json(result["minus_factor"], ring)
        stop = Fraction(ring.window, 2)
        resid = mat_sub(mat_mul(g1, g2), g)
        if not mat_valuation_at_least(resid, stop):
            raise AssertionError("re-multiplication residual too large")
        ok("factors re-multiply to the input")
    elif command in ("refine", "cover-with-s"):
        cover = jsonio.cover_from_json(result, p)
        report = is_nice_cover(list(cover.elements))
        if not report.ok:
            raise AssertionError(f"cover is not nice: {report.violation}")
        ok("cover passes the nice-cover checks")
    elif command == "parity":
        cover = jsonio.cover_from_json(payload["cover"], p)
        bits = {int(k): v for k, v in result["parity"].items()}
        from .berkovich import _pair_intersection_point
        import itertools as _it

        for i, j in _it.combinations(range(len(cover.elements)), 2):
            kind, _ = _pair_intersection_point(
                cover.elements[i], cover.elements[j]
            )
            if kind == "point" and bits[i] == bits[j]:
                raise AssertionError("parity assigns equal bits to neighbors")
        ok("parity separates all intersecting pairs")
    elif command == "patch":
        cover = jsonio.cover_from_json(payload["cover"], p)
        window = options.get("precision", 64)
        stop = Fraction(window, 2)
        for k_str, mat in payload["transitions"].items():
            k = int(k_str)
            pt = cover.intersection_points[k]
            ring = AnnulusRing(p, pt.log_radius, window)
            g_s = jsonio.matrix_from_json(mat, ring)
            holders = [
                i
                for i, el in enumerate(cover.elements)
                if el.contains_point(pt)
            ]
            bits = {int(i): v for i, v in result["parity"].items()}
            u0, u1 = sorted(holders, key=lambda i: bits[i])
            ident = mat_identity(ring)
            g0 = _germ_from(result, u0, k, ring) or ident
            g1 = _germ_from(result, u1, k, ring) or ident
            lhs = mat_mul(g0, mat_inverse(g1, as_exponent(stop) + 8))
            resid = mat_sub(lhs, g_s)
            if not mat_valuation_at_least(resid, stop):
                raise AssertionError(f"patched identity fails at point {k}")
        ok("all transition identities re-verified")
    else:
        raise UsageFailure(f"cannot verify command {command!r}")
    return {"checks": checks, "command": command, "verified": True}


def _germ_from(result, element, point, ring):
    germs = result.get("germs", {}).get(str(element), {})
    mat = germs.get(str(point))
    return None if mat is None else jsonio.matrix_from_json(mat, ring)


def _element_parse(field, data):
    if isinstance(field, PadicField):
        return jsonio.parse_frac(data)
    from .formal import FormalElement

    return FormalElement(data["powers"])


# ---------------------------------------------------------------------------
# click wiring
# ---------------------------------------------------------------------------


def _read_payload(input_file: Optional[str]) -> dict:
    try:
        if input_file and input_file != "-":
            text = Path(input_file).read_text()
        else:
            text = sys.stdin.read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageFailure(f"cannot read payload: {exc}") from exc


def _emit(data: dict, trace_flag: bool = False) -> None:
    click.echo(jsonio.canonical_dumps(data), nl=False)


def _execute(command: str, input_file, prime, precision, seed, mode, verify, trace):
    options = {
        "prime": prime,
        "precision": precision,
        "seed": seed,
        "mode": mode,
    }
    try:
        payload = _read_payload(input_file)
        if verify:
            out = verify_envelope(payload)
        else:
            out = dispatch(command, payload, options)
        if trace and not verify and "trace" in out.get("result", {}):
            for row in out["result"]["trace"]:
                click.echo(f"# {json.dumps(row, sort_keys=True)}", err=True)
        _emit(out)
    except UsageFailure as exc:
        _emit({"error": str(exc), "kind": "usage", "status": "error"})
        sys.exit(2)
    except (DomainError, BoundViolation, WindowSaturation, ParseError, AssertionError) as exc:
        _emit({"error": str(exc), "kind": "domain", "status": "error"})
        sys.exit(1)


def _common_options(fn):
    fn = click.argument("input_file", required=False)(fn)
    fn = click.option("--prime", "-p", type=int, default=3, show_default=True)(fn)
    fn = click.option(
        "--precision", "-N", type=int, default=64, show_default=True,
        help="truncation window / working precision",
    )(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True)(fn)
    fn = click.option(
        "--mode", type=click.Choice(["free", "general"]), default="free",
        show_default=True,
    )(fn)
    fn = click.option(
        "--verify", is_flag=True,
        help="treat the input as a previous response and replay its checks",
    )(fn)
    fn = click.option("--json", "json_flag", is_flag=True, default=True, hidden=True)(fn)
    fn = click.option(
        "--trace", is_flag=True, help="stream per-iteration trace lines to stderr"
    )(fn)
    return fn


@click.group()
def main():
    """Exact p-adic disc geometry, quadratic form isotropy, and patching."""


def _register(name: str):
    @main.command(name=name)
    @_common_options
    def _cmd(input_file, prime, precision, seed, mode, verify, json_flag, trace, _name=name):
        _execute(_name, input_file, prime, precision, seed, mode, verify, trace)

    _cmd.__doc__ = f"Run the {name} operation on a JSON payload."
    return _cmd


for _name in COMMANDS:
    _register(_name)


@main.command(name="suite")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
def suite(directory):
    """Run request/expected fixture pairs and report pass/fail."""
    root = Path(directory)
    requests = sorted(root.glob("*.request.json"))
    failures = 0
    total = 0
    for req_path in requests:
        name = req_path.name[: -len(".request.json")]
        expected_path = root / f"{name}.expected.json"
        if not expected_path.exists():
            click.echo(f"SKIP {name}: no expected file")
            continue
        total += 1
        try:
            request = json.loads(req_path.read_text())
            expected = json.loads(expected_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            click.echo(f"FAIL {name}: unreadable fixture ({exc})")
            failures += 1
            continue
        options = {
            "prime": request.get("options", {}).get("prime", 3),
            "precision": request.get("options", {}).get("precision", 64),
            "seed": request.get("options", {}).get("seed", 0),
            "mode": request.get("options", {}).get("mode", "free"),
        }
        try:
            got = dispatch(request["command"], request.get("payload", {}), options)
        except Exception as exc:  # fixture runs must report, not crash
            click.echo(f"FAIL {name}: {exc}")
            failures += 1
            continue
        if jsonio.canonical_dumps(got) == jsonio.canonical_dumps(expected):
            click.echo(f"PASS {name}")
        else:
            click.echo(f"FAIL {name}: response differs")
            _diff(expected, got)
            failures += 1
    click.echo(f"{total - failures}/{total} fixtures passed")
    if failures:
        sys.exit(1)


def _diff(expected, got, prefix="$"):
    if expected == got:
        return
    if isinstance(expected, dict) and isinstance(got, dict):
        for key in sorted(set(expected) | set(got)):
            _diff(expected.get(key), got.get(key), f"{prefix}.{key}")
    elif isinstance(expected, list) and isinstance(got, list) and len(expected) == len(got):
        for i, (e, g) in enumerate(zip(expected, got)):
            _diff(e, g, f"{prefix}[{i}]")
    else:
        click.echo(f"  {prefix}: expected {expected!r}, got {got!r}")


@main.command(name="report")
@click.option("--out", type=click.Path(file_okay=False), default="reports",
              show_default=True)
@click.option("--prime", "-p", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def report(out, prime, seed):
    """Render the demo battery: CSV tables plus matplotlib figures."""
    from .reporting import render_report

    written = render_report(Path(out), prime=prime, seed=seed)
    for path in written:
        click.echo(str(path))


if __name__ == "__main__":
    main()
