"""Serialization of confluence-check reports: text, JSON, CSV, figures."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .gsb import GsbReport
from .rules import Family, _FAMILY_NAMES


def family_name(code: int) -> str:
    return _FAMILY_NAMES[Family(code)]


def report_text(report: GsbReport) -> str:
    lines = [
        f"rule set: {report.mode}",
        f"bounds: degree <= {report.max_degree}, depth <= {report.max_depth}",
        f"cases checked: {report.total_cases}",
        f"elapsed: {report.elapsed:.2f}s",
        f"verdict: {'PASS' if report.passed else 'FAIL'}",
        "",
        "counts (kind, f, g -> cases):",
    ]
    for (kind, ff, gf), n in sorted(report.counts.items()):
        lines.append(f"  {kind:<12} {family_name(ff):<16} {family_name(gf):<16} {n}")
    if report.failures:
        lines.append("")
        lines.append(f"failures ({len(report.failures)}):")
        for rec in report.failures:
            lines.append("  " + rec.describe())
    return "\n".join(lines) + "\n"


def report_json_dict(report: GsbReport) -> dict:
    return {
        "rule_set": report.mode,
        "bounds": {"max_degree": report.max_degree, "max_depth": report.max_depth},
        "total_cases": report.total_cases,
        "passed": report.passed,
        "elapsed_seconds": round(report.elapsed, 3),
        "counts": [
            {"kind": kind, "f_family": family_name(ff),
             "g_family": family_name(gf), "cases": n}
            for (kind, ff, gf), n in sorted(report.counts.items())
        ],
        "failures": [
            {"index": rec.index, "kind": rec.kind, "f": rec.f_label,
             "g": rec.g_label, "ambiguity": rec.ambiguity,
             "witness": rec.witness, "verdict": rec.verdict,
             "residual": rec.residual}
            for rec in report.failures
        ],
    }


def _counts_matrix(report: GsbReport, kind: str):
    fams = [int(f) for f in Family]
    size = len(fams)
    grid = [[0] * size for _ in range(size)]
    for (k, ff, gf), n in report.counts.items():
        if k == kind:
            grid[ff - 1][gf - 1] = n
    return grid


def write_figures(report: GsbReport, outdir: Path) -> list[Path]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [family_name(int(f)) for f in Family]
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.6))
    for ax, kind in zip(axes, ("intersection", "including")):
        grid = _counts_matrix(report, kind)
        im = ax.imshow(grid, cmap="viridis")
        ax.set_xticks(range(len(labels)), labels, rotation=45, ha="right", fontsize=7)
        ax.set_yticks(range(len(labels)), labels, fontsize=7)
        ax.set_title(f"{kind} cases (f row, g column)", fontsize=9)
        for i, row in enumerate(grid):
            for j, n in enumerate(row):
                if n:
                    ax.text(j, i, str(n), ha="center", va="center", fontsize=6,
                            color="white")
        fig.colorbar(im, ax=ax, shrink=0.8)
    fig.suptitle(f"composition counts, {report.mode} at degree<={report.max_degree}, "
                 f"depth<={report.max_depth}")
    fig.tight_layout()
    path = outdir / "composition_counts.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def write_report(report: GsbReport, outdir) -> list[Path]:
    """Write text, JSON, CSV and figure files; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    txt = outdir / "report.txt"
    txt.write_text(report_text(report), encoding="utf-8")
    paths.append(txt)
    js = outdir / "report.json"
    js.write_text(json.dumps(report_json_dict(report), indent=2) + "\n",
                  encoding="utf-8")
    paths.append(js)
    cv = outdir / "counts.csv"
    with open(cv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "f_family", "g_family", "cases"])
        for (kind, ff, gf), n in sorted(report.counts.items()):
            writer.writerow([kind, family_name(ff), family_name(gf), n])
    paths.append(cv)
    paths.extend(write_figures(report, outdir))
    return paths
