"""Range RMSE versus the subcarrier count, one curve per estimator and SNR."""

from __future__ import annotations

import sys

from .common import PlotJob, build_arg_parser, parse_estimators, run_script
from .n_sweep import render_param_sweep


def render(job: PlotJob):
    return render_param_sweep(
        job, "rmse_range_lambda", "number of subcarriers", "Range RMSE (wavelengths)"
    )


def main(argv=None) -> int:
    args = build_arg_parser(__doc__.splitlines()[0]).parse_args(argv)

    def do_render(ns):
        return render(
            PlotJob(
                csv_path=ns.csv,
                kind="q_sweep",
                out_path=ns.out,
                estimators=parse_estimators(ns.estimators),
            )
        )

    return run_script(do_render, args)


if __name__ == "__main__":
    sys.exit(main())
