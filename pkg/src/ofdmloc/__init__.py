"""Joint pilot/data range-and-AoA localization for OFDM opportunistic radar.

A receiver with a uniform linear array opportunistically captures OFDM uplink
frames and estimates the transmitter's range and angle of arrival. The library
provides the observation simulator, the joint pilot + unknown-data maximum
likelihood estimator with its FFT-accelerated grid search, three literature
baselines, and a reproducible Monte-Carlo harness with CSV output.
"""

from .constellation import ConstellationKind, alphabet, draw_symbols, hard_decide
from .estimators import (
    ESTIMATOR_NAMES,
    CombinedPilot,
    DataCovariance,
    Estimate,
    estimate_bound,
    estimate_dd,
    estimate_jpudl,
    estimate_pilot_only,
    jpudl_coarse,
    lmmse_channel,
    lmmse_decode,
    metric_direct,
    nuisance_gamma_hat,
    pilot_combine,
)
from .harness import (
    CSV_HEADER,
    ExperimentSpec,
    MetricsRecord,
    hit_rate,
    records_to_csv,
    rmse,
    run_experiment,
    sweep_points,
    write_csv,
)
from .model import (
    SceneTruth,
    SystemConfig,
    aoa_resolution,
    channel_matrix,
    fraunhofer_distance,
    lambda_to_meters,
    max_unambiguous_range,
    range_resolution,
    range_resolution_meters,
    steering_aoa,
    steering_aoa_from_sin,
    steering_range,
)
from .numerics import (
    GridSpec,
    MetricSurface,
    dft_forward_1d,
    dft_forward_2d,
    grid_axes,
    powell_minimize,
)
from .simulator import (
    Frame,
    NoiseSpec,
    Observations,
    draw_channel_coefficient,
    draw_frame,
    draw_scene,
    simulate,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
