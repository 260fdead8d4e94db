"""Figure rendering for CLI reports: PNG files next to CSV data."""

from __future__ import annotations

import csv
from pathlib import Path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    from matplotlib import pyplot

    return pyplot


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def render_hensel(precisions, residues, residual_exponents, outdir) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "hensel_trace.csv"
    _write_csv(csv_path, ["stage", "precision", "residue", "residual_exponent"],
               [(i, k, r, e) for i, (k, r, e) in
                enumerate(zip(precisions, residues, residual_exponents))])
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.step(range(len(precisions)), residual_exponents, where="mid", marker="o")
    ax.set_xlabel("lift stage")
    ax.set_ylabel("exponent of p in P(x)")
    ax.set_title("residual valuation per stage")
    fig.tight_layout()
    png_path = outdir / "hensel_trace.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [str(csv_path), str(png_path)]


def render_banach(step_distances, eps, outdir) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "banach_run.csv"
    _write_csv(csv_path, ["iteration", "gap"],
               [(i, str(d)) for i, d in enumerate(step_distances)])
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.semilogy(range(len(step_distances)), [float(d) for d in step_distances], marker=".")
    ax.axhline(float(eps), linestyle="--", linewidth=0.8, label="eps")
    ax.set_xlabel("iteration")
    ax.set_ylabel("d(x, fx)")
    ax.set_title("contraction gap per iteration")
    ax.legend()
    fig.tight_layout()
    png_path = outdir / "banach_run.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [str(csv_path), str(png_path)]


def render_oag(gap_exponents, outdir) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "oag_run.csv"
    _write_csv(csv_path, ["step", "gap_leading_exponent"],
               list(enumerate(gap_exponents)))
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.step(range(len(gap_exponents)), gap_exponents, where="mid", marker="o")
    ax.set_xlabel("orbit step")
    ax.set_ylabel("leading exponent of |x - fx|")
    ax.set_title("gap class per step")
    fig.tight_layout()
    png_path = outdir / "oag_run.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [str(csv_path), str(png_path)]


def render_sweep(family: str, counts: dict, outdir) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"sweep_{family}.csv"
    _write_csv(csv_path, ["category", "count"], sorted(counts.items()))
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3))
    keys = sorted(counts)
    ax.bar(range(len(keys)), [counts[k] for k in keys])
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(keys, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.set_title(f"{family} sweep")
    fig.tight_layout()
    png_path = outdir / f"sweep_{family}.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [str(csv_path), str(png_path)]


def render_scenario(report, outdir) -> list:
    """Kind-aware rendering for a scenario report; returns the written paths."""
    kind = report.kind
    if kind == "padic" and "trace" in report.outputs:
        residues = report.outputs["trace"]
        precisions = report.outputs["precisions"]
        exponents = report.outputs.get("residual_exponents", precisions)
        return render_hensel(precisions, residues, exponents, outdir)
    if kind == "banach" and "step_distances" in report.outputs:
        from fractions import Fraction

        steps = [Fraction(s) for s in report.outputs["step_distances"]]
        return render_banach(steps, steps[0] if steps else 1, outdir)
    if kind == "ordered" and "gap_exponents" in report.outputs:
        return render_oag(report.outputs["gap_exponents"], outdir)
    return []
