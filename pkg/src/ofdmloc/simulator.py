"""Ground-truth scene, frame, and noisy observation generation.

The received tensors follow the post-FFT frequency-domain model: every
resource element (symbol slot, antenna, subcarrier) sees the rank-one channel
times the transmitted symbol plus independent circular complex Gaussian noise
of total variance ``noise_var`` (half per real/imaginary component).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constellation import ConstellationKind, alphabet, draw_symbols
from .model import (
    SceneTruth,
    SystemConfig,
    channel_matrix,
    fraunhofer_distance,
    max_unambiguous_range,
)

# Scene sampling stays away from the sin(theta) = +-1 grid edge and the range
# wrap-around, where main-lobe hit counting becomes ambiguous.
SIN_AOA_DRAW_LIMIT = 0.9
RANGE_DRAW_LOW_FRACTION = 0.05
RANGE_DRAW_HIGH_FRACTION = 0.9


@dataclass(frozen=True)
class Frame:
    """One transmitted frame: known pilot matrix and random data matrix."""

    pilots: np.ndarray  # (P, Q), unit-modulus entries
    data: np.ndarray  # (D, Q), entries from alphabet(data_kind)
    data_kind: ConstellationKind

    def __post_init__(self) -> None:
        if self.pilots.ndim != 2 or self.data.ndim != 2:
            raise ValueError("pilots and data must be 2-D matrices")
        if self.data.shape[0] and self.data.shape[1] != self.pilots.shape[1]:
            raise ValueError("pilots and data must share the subcarrier axis")
        if self.pilots.size and np.max(np.abs(np.abs(self.pilots) - 1.0)) > 1e-12:
            raise ValueError("pilot symbols must be unit modulus")
        if self.data.size:
            gap = np.min(np.abs(self.data[..., None] - alphabet(self.data_kind)), axis=-1)
            if np.max(gap) > 1e-12:
                raise ValueError(f"data entries must belong to the {self.data_kind.value} alphabet")


@dataclass(frozen=True)
class Observations:
    """Noisy received tensors for the pilot and data portions of a frame."""

    y_pilot: np.ndarray  # (P, N, Q)
    y_data: np.ndarray  # (D, N, Q)
    noise_var: float

    def __post_init__(self) -> None:
        if self.y_pilot.ndim != 3 or self.y_data.ndim != 3:
            raise ValueError("observation tensors must be 3-D")
        if self.y_data.shape[0] and self.y_pilot.shape[1:] != self.y_data.shape[1:]:
            raise ValueError("pilot and data tensors must share antenna/subcarrier axes")
        if not self.noise_var >= 0 or not math.isfinite(self.noise_var):
            raise ValueError(f"noise_var must be finite and >= 0, got {self.noise_var}")


@dataclass(frozen=True)
class NoiseSpec:
    """SNR in dB with unit symbol energy and unit channel gain: var = 10^(-snr/10)."""

    snr_db: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite, got {self.snr_db}")

    @property
    def noise_var(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0)


def draw_channel_coefficient(rng: np.random.Generator) -> complex:
    """Unit-modulus channel coefficient with uniformly random phase."""
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return complex(math.cos(phase), math.sin(phase))


def draw_scene(
    cfg: SystemConfig,
    rng: np.random.Generator,
    sin_aoa_limit: float = SIN_AOA_DRAW_LIMIT,
    range_low_fraction: float = RANGE_DRAW_LOW_FRACTION,
    range_high_fraction: float = RANGE_DRAW_HIGH_FRACTION,
) -> SceneTruth:
    """Draw a uniformly random scene inside the model's validity region.

    sin(theta) is uniform on [-sin_aoa_limit, sin_aoa_limit]; range is uniform
    between max(Fraunhofer distance, range_low_fraction of the unambiguous
    range) and range_high_fraction of the unambiguous range.
    """
    r_max = max_unambiguous_range(cfg)
    r_low = max(fraunhofer_distance(cfg), range_low_fraction * r_max)
    r_high = range_high_fraction * r_max
    if r_low >= r_high:
        raise ValueError(
            f"infeasible geometry: far-field boundary {r_low:.6g} lambda is not "
            f"below {range_high_fraction:.0%} of the unambiguous range "
            f"{r_max:.6g} lambda"
        )
    sin_theta = rng.uniform(-sin_aoa_limit, sin_aoa_limit)
    range_lambda = rng.uniform(r_low, r_high)
    gamma = draw_channel_coefficient(rng)
    return SceneTruth(range_lambda, math.asin(sin_theta), gamma, cfg)


def draw_frame(
    cfg: SystemConfig, data_kind: ConstellationKind, rng: np.random.Generator
) -> Frame:
    """Draw random BPSK pilots and random data symbols of the requested kind."""
    pilots = draw_symbols(
        ConstellationKind.BPSK, cfg.n_pilot_symbols, cfg.n_subcarriers, rng
    )
    data = draw_symbols(data_kind, cfg.n_data_symbols, cfg.n_subcarriers, rng)
    return Frame(pilots=pilots, data=data, data_kind=data_kind)


def _noise(shape: tuple[int, ...], noise_var: float, rng: np.random.Generator) -> np.ndarray:
    scale = math.sqrt(noise_var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def simulate(
    cfg: SystemConfig,
    scene: SceneTruth,
    frame: Frame,
    noise: NoiseSpec | None,
    rng: np.random.Generator,
) -> Observations:
    """Generate the received pilot and data tensors for one frame.

    ``noise=None`` produces exactly noiseless observations (the zero-variance
    limit), which is useful for oracle tests and refinement checks.
    """
    p, q = frame.pilots.shape
    d = frame.data.shape[0]
    if (p, q) != (cfg.n_pilot_symbols, cfg.n_subcarriers) or d != cfg.n_data_symbols:
        raise ValueError(
            f"frame of shape P={p}, D={d}, Q={q} does not match config "
            f"P={cfg.n_pilot_symbols}, D={cfg.n_data_symbols}, Q={cfg.n_subcarriers}"
        )
    h = channel_matrix(scene, cfg)  # (N, Q)
    y_pilot = h[None, :, :] * frame.pilots[:, None, :]
    y_data = h[None, :, :] * frame.data[:, None, :]
    noise_var = 0.0 if noise is None else noise.noise_var
    if noise_var > 0.0:
        y_pilot = y_pilot + _noise(y_pilot.shape, noise_var, rng)
        y_data = y_data + _noise(y_data.shape, noise_var, rng)
    return Observations(y_pilot=y_pilot, y_data=y_data, noise_var=noise_var)
