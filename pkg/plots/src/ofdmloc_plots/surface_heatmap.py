"""Heatmap of one coarse metric surface dumped by the simulator CLI."""

from __future__ import annotations

import sys

import numpy as np

from .common import PlotJob, build_arg_parser, load_surface, run_script


def render(job: PlotJob):
    import matplotlib.pyplot as plt

    rows = load_surface(job.csv_path)
    n_r = max(row["k_r"] for row in rows) + 1
    n_a = max(row["k_a"] for row in rows) + 1
    values = np.full((n_r, n_a), np.nan)
    range_axis = np.full(n_r, np.nan)
    sin_axis = np.full(n_a, np.nan)
    for row in rows:
        values[row["k_r"], row["k_a"]] = row["value"]
        range_axis[row["k_r"]] = row["range_lambda"]
        sin_axis[row["k_a"]] = row["sin_aoa"]

    # Column order in the file follows the DFT bin index; sort by the actual
    # sin(AoA) value so the axis is monotone. Values move with their bins.
    order = np.argsort(sin_axis)
    fig, ax = plt.subplots(figsize=(7, 5))
    mesh = ax.pcolormesh(sin_axis[order], range_axis, values[:, order], shading="nearest")
    fig.colorbar(mesh, ax=ax, label="metric value")
    ax.set_xlabel("sin(AoA)")
    ax.set_ylabel("range (wavelengths)")
    ax.set_title("coarse localization metric")
    fig.tight_layout()
    return fig


def main(argv=None) -> int:
    args = build_arg_parser(__doc__.splitlines()[0], with_estimators=False).parse_args(argv)

    def do_render(ns):
        return render(PlotJob(csv_path=ns.csv, kind="surface_heatmap", out_path=ns.out))

    return run_script(do_render, args)


if __name__ == "__main__":
    sys.exit(main())
