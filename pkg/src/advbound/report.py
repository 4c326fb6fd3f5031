"""Report emission: delimited output plus rendered figures.

Bound evaluations flatten into stable CSV columns (or a JSON mirror of the
full report objects); scan-style reports also render matplotlib figures
next to the delimited file.  Output is deterministic for a fixed config
and seed: no timestamps, sorted keys, repr-exact floats in JSON and 12
significant digits in CSV.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from advbound.bounds import BoundReport

CSV_COLUMNS = [
    "method",
    "problem",
    "n",
    "m",
    "gamma",
    "epsilon",
    "lambda_threshold",
    "eta",
    "numerator",
    "denominator",
    "bound",
    "witness_x",
    "flags",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def report_row(report: BoundReport) -> dict:
    params = report.params
    return {
        "method": report.method,
        "problem": report.problem,
        "n": params.get("n"),
        "m": params.get("m"),
        "gamma": params.get("gamma"),
        "epsilon": report.epsilon,
        "lambda_threshold": report.lambda_threshold,
        "eta": report.eta,
        "numerator": report.numerator,
        "denominator": report.denominator,
        "bound": report.bound,
        "witness_x": report.witness_x,
        "flags": "+".join(report.flags),
    }


def reports_to_csv(reports: list[BoundReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        row = report_row(rep)
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def reports_to_json(reports: list[BoundReport], config: dict | None = None) -> str:
    doc = {
        "config": dict(sorted((config or {}).items())),
        "reports": [r.to_dict() for r in reports],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def emit_report(
    reports: list[BoundReport],
    fmt: str = "json",
    path: str | Path | None = None,
    config: dict | None = None,
) -> str:
    """Serialize reports; write to ``path`` when given, and return the text."""
    if fmt == "csv":
        text = reports_to_csv(reports)
    elif fmt == "json":
        text = reports_to_json(reports, config)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    return text


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def figure_epsilon_scan(
    rows: list[dict], path: str | Path, title: str = "bounds over the error grid"
) -> Path:
    """Bound value per method against epsilon, one line per method."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    methods = sorted({r["method"] for r in rows})
    for method in methods:
        pts = sorted(
            (r["epsilon"], r["bound"]) for r in rows if r["method"] == method and r["bound"] is not None
        )
        if pts:
            ax.plot(*zip(*pts), marker="o", markersize=3, label=method)
    ax.set_xlabel("allowed error")
    ax.set_ylabel("query lower bound")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    _save(fig, path)
    return path


def figure_gamma_scan(
    points: list[tuple[float, float]],
    reference: float | None,
    path: str | Path,
    title: str = "multiplicative family scan",
) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    xs, ys = zip(*sorted(points))
    ax.semilogx(xs, ys, marker="o", markersize=3, label="multiplicative bound")
    if reference is not None:
        ax.axhline(reference, color="tab:red", linestyle="--", label="hybrid bound")
    ax.set_xlabel("family parameter")
    ax.set_ylabel("bound")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    _save(fig, path)
    return path


def figure_progress(
    w_series, allowed: float, path: str | Path, title: str = "progress per oracle call"
) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(range(len(w_series)), w_series, marker="o", markersize=3, label="progress value")
    ax.axhline(1.0, color="gray", linewidth=0.8)
    ax.set_xlabel("oracle calls")
    ax.set_ylabel("trace against the adversary matrix")
    ax.set_title(f"{title} (per-call change at most {allowed:.4g})")
    ax.grid(alpha=0.3)
    ax.legend()
    _save(fig, path)
    return path


def figure_census(entries, path: str | Path, title: str = "block dimensions") -> Path:
    """Bar chart of block dimensions; bad blocks highlighted."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    labels = [f"{tuple(e.lam_n.parts)}|{tuple(e.lam_m.parts)}" for e in entries]
    dims = [e.dim for e in entries]
    colors = ["tab:red" if e.is_bad else "tab:blue" for e in entries]
    ax.bar(range(len(entries)), dims, color=colors)
    ax.set_xticks(range(len(entries)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("dimension")
    ax.set_title(f"{title} (red: matching shapes)")
    fig.tight_layout()
    _save(fig, path)
    return path
