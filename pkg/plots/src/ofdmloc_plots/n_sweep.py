"""RMSE of sin(AoA) versus the antenna count, one curve per estimator and SNR."""

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


def render_param_sweep(job: PlotJob, y_key: str, x_label: str, y_label: str):
    import matplotlib.pyplot as plt

    rows = load_results(job.csv_path)
    names = select_estimators(rows, job.estimators)
    snrs = sorted({row["snr_db"] for row in rows})
    fig, ax = plt.subplots(figsize=(7, 5))
    linestyles = ["-", "--", ":", "-."]
    for name in names:
        for snr, ls in zip(snrs, linestyles * (len(snrs) // 4 + 1)):
            x, y = series(rows, name, "sweep_value", y_key, where={"snr_db": snr})
            if not x:
                continue
            label = f"{name} @ {snr:g} dB" if len(snrs) > 1 else name
            ax.plot(x, y, linestyle=ls, label=label, **style_for(job, name))
    ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def render(job: PlotJob):
    return render_param_sweep(
        job, "rmse_sin_aoa", "number of antennas", "RMSE of sin(AoA)"
    )


def main(argv=None) -> int:
    args = build_arg_parser(__doc__.splitlines()[0]).parse_args(argv)

    def do_render(ns):
        return render(
            PlotJob(
                csv_path=ns.csv,
                kind="n_sweep",
                out_path=ns.out,
                estimators=parse_estimators(ns.estimators),
            )
        )

    return run_script(do_render, args)


if __name__ == "__main__":
    sys.exit(main())
