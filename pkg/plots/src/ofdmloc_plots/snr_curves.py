"""HitRate and RMSE versus SNR, for angle and range (four panels).

RMSE panels are logarithmic; HitRate panels are linear in [0, 1]. One curve
per estimator, point-for-point from the CSV.
"""

from __future__ import annotations

import sys

from .common import (
    PlotJob,
    build_arg_parser,
    load_results,
    parse_estimators,
    run_script,
    select_estimators,
    series,
    style_for,
)

_PANELS = (
    ("hitrate_aoa", "AoA HitRate", "linear"),
    ("rmse_sin_aoa", "RMSE of sin(AoA)", "log"),
    ("hitrate_range", "Range HitRate", "linear"),
    ("rmse_range_lambda", "Range RMSE (wavelengths)", "log"),
)


def render(job: PlotJob):
    import matplotlib.pyplot as plt

    rows = load_results(job.csv_path)
    names = select_estimators(rows, job.estimators)
    fig, axes = plt.subplots(2, 2, figsize=(11, 7), sharex=True)
    for ax, (key, title, scale) in zip(axes.ravel(), _PANELS):
        for name in names:
            x, y = series(rows, name, "snr_db", key)
            ax.plot(x, y, label=name, **style_for(job, name))
        ax.set_yscale(scale)
        if scale == "linear":
            ax.set_ylim(0.0, 1.0)
        ax.set_title(title)
        ax.set_xlabel("SNR (dB)")
        ax.grid(True, which="both", alpha=0.3)
    axes[0, 0].legend()
    fig.tight_layout()
    return fig


def main(argv=None) -> int:
    args = build_arg_parser(__doc__.splitlines()[0]).parse_args(argv)

    def do_render(ns):
        return render(
            PlotJob(
                csv_path=ns.csv,
                kind="snr_curves",
                out_path=ns.out,
                estimators=parse_estimators(ns.estimators),
            )
        )

    return run_script(do_render, args)


if __name__ == "__main__":
    sys.exit(main())
