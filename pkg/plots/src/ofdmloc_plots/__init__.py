"""Figure rendering for ofdmloc Monte-Carlo result CSVs.

One script per figure kind (SNR curves, antenna sweep, subcarrier sweep,
metric-surface heatmap), each reading the simulator's stable CSV schema and
plotting the series exactly as stored.
"""

from .common import (
    ESTIMATOR_STYLES,
    FIGURE_KINDS,
    PlotJob,
    SchemaError,
    load_results,
    load_surface,
    select_estimators,
    series,
)

__all__ = [
    "ESTIMATOR_STYLES",
    "FIGURE_KINDS",
    "PlotJob",
    "SchemaError",
    "load_results",
    "load_surface",
    "select_estimators",
    "series",
    "render_figure",
]

__version__ = "0.1.0"


def render_figure(job: PlotJob):
    """Dispatch a PlotJob to its figure-kind renderer; returns the Figure."""
    from . import n_sweep, q_sweep, snr_curves, surface_heatmap

    renderers = {
        "snr_curves": snr_curves.render,
        "n_sweep": n_sweep.render,
        "q_sweep": q_sweep.render,
        "surface_heatmap": surface_heatmap.render,
    }
    return renderers[job.kind](job)
