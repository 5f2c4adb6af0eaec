"""Demo battery rendered to CSV tables and matplotlib figures.

Three exhibits: convergence traces of the fixed-point solver for both
group charts, the disc layout of a nice refinement, and the u-invariant
bound table.  Each CSV is written next to its figure so the numbers in
the plots can be consumed directly.
"""

from __future__ import annotations

import csv
import random
from fractions import Fraction
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .berkovich import (
    AffinoidDomain,
    annulus_piece,
    closed_disc_piece,
    complement_piece,
    is_nice_cover,
    nice_refinement,
    parity_function,
)
from .exponents import Exponent
from .forms import FieldProfile, u_bound
from .patching import CHARTS, PatchingProblem, successive_approximation
from .series import AnnulusRing


def _demo_series(ring: AnnulusRing, rng: random.Random, min_val: int, span: int = 5):
    p = ring.prime
    coeffs = {}
    for d in range(-span, span + 1):
        if rng.random() < 0.5:
            continue
        need = min_val + max(0, -(d // 2)) + 1
        coeffs[d] = Fraction(rng.choice([1, 2, -1, -2]) * p**need)
    return ring.series(coeffs)


def _trace_rows(prime: int, seed: int) -> List[dict]:
    ring = AnnulusRing(prime, Exponent(Fraction(1, 2)), 64)
    rng = random.Random(seed)
    rows = []
    for chart_name, n_targets in (("gl1", 1), ("sl2", 4)):
        chart = CHARTS[chart_name]
        target = tuple(_demo_series(ring, rng, 3) for _ in range(chart.n))
        prob = PatchingProblem(chart, target, ring)
        res = successive_approximation(prob)
        for row in res.trace:
            rv = row.residual_valuation
            rows.append(
                {
                    "chart": chart_name,
                    "step": row.step,
                    "residual_valuation": "" if rv is None else float(rv),
                    "u_valuation": ""
                    if row.u_valuation is None
                    else float(row.u_valuation),
                }
            )
    return rows


def _cover_rows(prime: int) -> List[dict]:
    e1 = Exponent(2, Fraction(1, 7))
    e2 = Exponent(1, Fraction(1, 7))
    e3 = Exponent(0, Fraction(1, 7))
    doms = [
        AffinoidDomain(prime, [closed_disc_piece(prime, 0, e1)]),
        AffinoidDomain(prime, [annulus_piece(prime, 0, e1, e2)]),
        AffinoidDomain(prime, [closed_disc_piece(prime, 0, e3)]),
        AffinoidDomain(prime, [complement_piece(prime, 0, e3)]),
    ]
    cover = nice_refinement(doms)
    assert is_nice_cover(list(cover.elements)).ok
    bits = parity_function(cover)
    rows = []
    for i, el in enumerate(cover.elements):
        piece = el.pieces[0]
        if piece.is_whole_outer:
            outer = ""
        else:
            outer = float(piece.outer.log_radius)
        inner = max(
            (float(h.log_radius) for h in piece.holes), default=None
        )
        rows.append(
            {
                "element": i,
                "outer_log_radius": outer,
                "inner_log_radius": "" if inner is None else inner,
                "parity": bits[i],
            }
        )
    return rows


def _ubound_rows() -> List[dict]:
    rows = []
    for n in range(0, 4):
        for free in (True, False):
            b = u_bound(FieldProfile(n=n, free=free, residue_us=2))
            rows.append(
                {
                    "rank": n,
                    "free": free,
                    "field_bound": b.field_bound,
                    "function_field_bound": b.function_field_bound,
                    "equality": b.equality,
                }
            )
    return rows


def _write_csv(path: Path, rows: List[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def render_report(outdir: Path, prime: int = 3, seed: int = 0) -> List[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    # 1. solver convergence
    trace_rows = _trace_rows(prime, seed)
    csv_path = outdir / "approximation_trace.csv"
    _write_csv(csv_path, trace_rows)
    written.append(csv_path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for chart_name, marker in (("gl1", "o"), ("sl2", "s")):
        pts = [
            (r["step"], r["residual_valuation"])
            for r in trace_rows
            if r["chart"] == chart_name and r["residual_valuation"] != ""
        ]
        ax.plot(
            [x for x, _ in pts],
            [y for _, y in pts],
            marker=marker,
            label=chart_name,
        )
    ax.set_xlabel("iteration")
    ax.set_ylabel("residual valuation (p-exponent)")
    ax.set_title(f"Successive approximation on the annulus (p = {prime})")
    ax.legend()
    fig.tight_layout()
    fig_path = outdir / "approximation_trace.png"
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    written.append(fig_path)

    # 2. nice-cover layout
    cover_rows = _cover_rows(prime)
    csv_path = outdir / "cover_layout.csv"
    _write_csv(csv_path, cover_rows)
    written.append(csv_path)
    fig, ax = plt.subplots(figsize=(6, 4))
    span = 3.5
    for row in cover_rows:
        lo = row["outer_log_radius"] if row["outer_log_radius"] != "" else -span
        hi = (
            row["inner_log_radius"] if row["inner_log_radius"] != "" else span
        )
        color = "tab:blue" if row["parity"] == 0 else "tab:orange"
        ax.barh(
            row["element"],
            hi - lo,
            left=lo,
            height=0.6,
            color=color,
            edgecolor="black",
        )
    ax.set_xlabel("log-radius interval occupied (around center 0)")
    ax.set_ylabel("cover element")
    ax.set_title("Nice refinement of concentric domains (parity by color)")
    fig.tight_layout()
    fig_path = outdir / "cover_layout.png"
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    written.append(fig_path)

    # 3. u-invariant bounds
    ub_rows = _ubound_rows()
    csv_path = outdir / "ubound_table.csv"
    _write_csv(csv_path, ub_rows)
    written.append(csv_path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ranks = sorted({r["rank"] for r in ub_rows})
    free_vals = [
        r["function_field_bound"] for r in ub_rows if r["free"]
    ]
    gen_vals = [
        r["function_field_bound"] for r in ub_rows if not r["free"]
    ]
    width = 0.35
    ax.bar([x - width / 2 for x in ranks], free_vals, width, label="free")
    ax.bar([x + width / 2 for x in ranks], gen_vals, width, label="general")
    ax.set_xlabel("value-group rank n")
    ax.set_ylabel("function-field bound (residue u_s = 2)")
    ax.set_title("Anisotropy dimension bounds")
    ax.set_xticks(ranks)
    ax.legend()
    fig.tight_layout()
    fig_path = outdir / "ubound_table.png"
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    written.append(fig_path)

    return written
