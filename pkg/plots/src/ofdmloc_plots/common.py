"""Shared CSV loading, schema validation, and styling for the figure scripts.

The scripts consume the simulator's results CSV verbatim: plotted series are
numerically identical to the file contents, with no smoothing or resampling.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # batch scripts, never interactive

RESULTS_COLUMNS = [
    "experiment",
    "sweep_param",
    "sweep_value",
    "snr_db",
    "estimator",
    "n_trials",
    "hitrate_aoa",
    "rmse_sin_aoa",
    "hitrate_range",
    "rmse_range_lambda",
    "ser",
]

SURFACE_COLUMNS = ["k_r", "k_a", "range_lambda", "sin_aoa", "value"]

# One fixed style per estimator so curves are comparable across figures.
ESTIMATOR_STYLES = {
    "jpudl": {"color": "tab:green", "marker": "o"},
    "pilot_only": {"color": "tab:red", "marker": "s"},
    "bound": {"color": "tab:blue", "marker": "^"},
    "dd_lmmse": {"color": "tab:orange", "marker": "d"},
    "dd_zf": {"color": "tab:purple", "marker": "v"},
}

FIGURE_KINDS = ("snr_curves", "n_sweep", "q_sweep", "surface_heatmap")


class SchemaError(ValueError):
    """The CSV header does not match the expected column contract."""


@dataclass(frozen=True)
class PlotJob:
    csv_path: Path
    kind: str
    out_path: Path
    estimators: tuple[str, ...] = ()  # empty means all present in the file
    styles: dict = field(default_factory=lambda: dict(ESTIMATOR_STYLES))

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")


def _check_header(header: list[str], expected: list[str], path) -> None:
    if header == expected:
        return
    missing = [c for c in expected if c not in header]
    extra = [c for c in header if c not in expected]
    raise SchemaError(
        f"{path}: column mismatch\n  missing: {missing}\n  unexpected: {extra}\n"
        f"  expected order: {expected}"
    )


def load_results(path) -> list[dict]:
    """Load a results CSV, enforcing the exact column contract."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        _check_header(header, RESULTS_COLUMNS, path)
        rows = []
        for raw in reader:
            row = dict(zip(header, raw))
            for key in ("sweep_value", "snr_db", "hitrate_aoa", "rmse_sin_aoa",
                        "hitrate_range", "rmse_range_lambda"):
                row[key] = float(row[key])
            row["n_trials"] = int(row["n_trials"])
            row["ser"] = float(row["ser"]) if row["ser"] else None
            rows.append(row)
    return rows


def load_surface(path) -> list[dict]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        _check_header(header, SURFACE_COLUMNS, path)
        rows = []
        for raw in reader:
            row = dict(zip(header, raw))
            row["k_r"] = int(row["k_r"])
            row["k_a"] = int(row["k_a"])
            for key in ("range_lambda", "sin_aoa", "value"):
                row[key] = float(row[key])
            rows.append(row)
    return rows


def select_estimators(rows: list[dict], requested: tuple[str, ...]) -> list[str]:
    """Resolve the estimator filter; an empty selection is an error."""
    available = sorted({row["estimator"] for row in rows})
    if not requested:
        if not available:
            raise ValueError("no estimators present in the CSV")
        return available
    missing = [name for name in requested if name not in available]
    if missing:
        raise ValueError(
            f"estimators {missing} not present in the CSV; available: {available}"
        )
    return list(requested)


def series(rows: list[dict], estimator: str, x_key: str, y_key: str,
           where: dict | None = None) -> tuple[list[float], list[float]]:
    """Extract one (x, y) series, sorted by x, values verbatim from the CSV."""
    picked = [
        row
        for row in rows
        if row["estimator"] == estimator
        and all(row[k] == v for k, v in (where or {}).items())
    ]
    picked.sort(key=lambda row: row[x_key])
    return [row[x_key] for row in picked], [row[y_key] for row in picked]


def style_for(job: PlotJob, estimator: str) -> dict:
    return dict(job.styles.get(estimator, {"marker": "x"}))


def build_arg_parser(description: str, with_estimators: bool = True) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--csv", required=True, help="input results CSV")
    parser.add_argument("--out", required=True, help="output image path")
    if with_estimators:
        parser.add_argument(
            "--estimators",
            default="",
            help="comma-separated estimator filter (default: all in the file)",
        )
    return parser


def parse_estimators(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def run_script(render_fn, args) -> int:
    """Shared driver: render, save, and map contract errors to exit code 2."""
    import matplotlib.pyplot as plt

    try:
        fig = render_fn(args)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig.savefig(args.out, dpi=150)
    plt.close(fig)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0
