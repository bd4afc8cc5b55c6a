"""System geometry, ground-truth scenes, steering vectors, and radar resolution formulas.

All ranges are handled internally in units of the carrier wavelength; meters
are a presentation conversion through the carrier frequency. Angles are stored
in radians at the data-type level and as sin(theta) inside the estimation code,
where the search grid is uniform.
"""

from __future__ import annotations

import json
import math
from dataclasses import InitVar, dataclass, fields

import numpy as np

SPEED_OF_LIGHT = 3.0e8  # m/s

# Narrowband limit: total signal bandwidth must stay well below the carrier.
_MAX_FRACTIONAL_BANDWIDTH = 0.1


@dataclass(frozen=True)
class SystemConfig:
    """OFDM and uniform-linear-array parameters of the opportunistic receiver.

    Attributes:
        n_antennas: number of array elements N.
        n_subcarriers: number of OFDM subcarriers Q.
        subcarrier_spacing: subcarrier spacing in Hz.
        carrier_freq: frequency of the first subcarrier in Hz. Only the ratio
            subcarrier_spacing/carrier_freq enters the estimation math; the
            absolute value is used for wavelength/meter conversions.
        n_pilot_symbols: pilot OFDM symbols P per frame.
        n_data_symbols: data OFDM symbols D per frame.
        antenna_spacing: element spacing in carrier wavelengths (0.5 = half
            wavelength, the unambiguous design).
    """

    n_antennas: int
    n_subcarriers: int
    subcarrier_spacing: float
    carrier_freq: float = 3.5e9
    n_pilot_symbols: int = 1
    n_data_symbols: int = 0
    antenna_spacing: float = 0.5

    def __post_init__(self) -> None:
        if self.n_antennas < 1:
            raise ValueError(f"n_antennas must be >= 1, got {self.n_antennas}")
        if self.n_subcarriers < 1:
            raise ValueError(f"n_subcarriers must be >= 1, got {self.n_subcarriers}")
        if self.n_pilot_symbols < 1:
            raise ValueError(f"n_pilot_symbols must be >= 1, got {self.n_pilot_symbols}")
        if self.n_data_symbols < 0:
            raise ValueError(f"n_data_symbols must be >= 0, got {self.n_data_symbols}")
        if self.subcarrier_spacing <= 0:
            raise ValueError("subcarrier_spacing must be positive")
        if self.carrier_freq <= 0:
            raise ValueError("carrier_freq must be positive")
        if self.antenna_spacing <= 0:
            raise ValueError("antenna_spacing must be positive")
        if self.bandwidth / self.carrier_freq >= _MAX_FRACTIONAL_BANDWIDTH:
            raise ValueError(
                f"bandwidth {self.bandwidth:.3g} Hz is not small relative to the "
                f"carrier {self.carrier_freq:.3g} Hz (narrowband model violated)"
            )

    @property
    def wavelength(self) -> float:
        """Carrier wavelength in meters."""
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def wavenumber(self) -> float:
        """Carrier wavenumber 2*pi/wavelength in rad/m."""
        return 2.0 * math.pi / self.wavelength

    @property
    def bandwidth(self) -> float:
        """Occupied bandwidth n_subcarriers * subcarrier_spacing in Hz."""
        return self.n_subcarriers * self.subcarrier_spacing

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(
            {f.name: getattr(self, f.name) for f in fields(self)}, indent=indent
        )

    @classmethod
    def from_dict(cls, payload: dict) -> "SystemConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown SystemConfig keys: {sorted(unknown)}")
        return cls(**payload)

    @classmethod
    def from_json(cls, text: str) -> "SystemConfig":
        payload = json.loads(text)
        if not isinstance(payload, dict):
            raise ValueError("SystemConfig JSON must be an object")
        return cls.from_dict(payload)


@dataclass(frozen=True)
class SceneTruth:
    """Ground-truth transmitter position and channel coefficient.

    The construction config is required so that invalid scenes (inside the
    Fraunhofer region, or beyond the unambiguous range) fail hard instead of
    silently leaving the model's validity region.
    """

    range_lambda: float
    aoa_rad: float
    gamma: complex
    cfg: InitVar[SystemConfig]

    def __post_init__(self, cfg: SystemConfig) -> None:
        if not -math.pi / 2 < self.aoa_rad < math.pi / 2:
            raise ValueError(f"aoa_rad must lie in (-pi/2, pi/2), got {self.aoa_rad}")
        if abs(abs(self.gamma) - 1.0) > 1e-9:
            raise ValueError(f"|gamma| must be 1 (no fading), got {abs(self.gamma)}")
        r_f = fraunhofer_distance(cfg)
        r_max = max_unambiguous_range(cfg)
        if not self.range_lambda > r_f:
            raise ValueError(
                f"range {self.range_lambda:.6g} lambda is not beyond the "
                f"far-field boundary {r_f:.6g} lambda"
            )
        if not self.range_lambda < r_max:
            raise ValueError(
                f"range {self.range_lambda:.6g} lambda exceeds the unambiguous "
                f"range {r_max:.6g} lambda"
            )

    @property
    def sin_aoa(self) -> float:
        return math.sin(self.aoa_rad)


def steering_aoa(theta: float, cfg: SystemConfig) -> np.ndarray:
    """Spatial steering vector of a far-field plane wave from direction theta.

    Element n is exp(-j*2*pi*antenna_spacing*sin(theta)*n) with the spacing in
    wavelengths; element 0 is exactly 1.
    """
    if not -math.pi / 2 < theta < math.pi / 2:
        raise ValueError(f"theta must lie in the open interval (-pi/2, pi/2), got {theta}")
    return steering_aoa_from_sin(math.sin(theta), cfg)


def steering_aoa_from_sin(sin_theta: float, cfg: SystemConfig) -> np.ndarray:
    """Spatial steering vector parameterized directly by sin(theta)."""
    n = np.arange(cfg.n_antennas)
    return np.exp((-2j * math.pi * cfg.antenna_spacing * sin_theta) * n)


def steering_range(range_lambda: float, cfg: SystemConfig) -> np.ndarray:
    """Frequency-domain steering vector of a propagation delay.

    Element q is exp(-j*2*pi*(subcarrier_spacing/carrier_freq)*R*q) with R in
    carrier wavelengths; element 0 is exactly 1.
    """
    if range_lambda < 0:
        raise ValueError(f"range must be non-negative, got {range_lambda}")
    q = np.arange(cfg.n_subcarriers)
    ratio = cfg.subcarrier_spacing / cfg.carrier_freq
    return np.exp((-2j * math.pi * ratio * range_lambda) * q)


def channel_matrix(scene: SceneTruth, cfg: SystemConfig) -> np.ndarray:
    """Rank-one line-of-sight channel: outer product of the two steering vectors."""
    a = steering_aoa(scene.aoa_rad, cfg)
    b = steering_range(scene.range_lambda, cfg)
    return scene.gamma * np.outer(a, b)


def aoa_resolution(cfg: SystemConfig) -> float:
    """Angle resolution in sin(theta): 1 / (N * antenna_spacing_in_wavelengths)."""
    return 1.0 / (cfg.n_antennas * cfg.antenna_spacing)


def range_resolution(cfg: SystemConfig) -> float:
    """Range resolution in carrier wavelengths: carrier_freq / bandwidth."""
    return cfg.carrier_freq / cfg.bandwidth


def range_resolution_meters(cfg: SystemConfig) -> float:
    """Range resolution in meters: c / bandwidth."""
    return SPEED_OF_LIGHT / cfg.bandwidth


def max_unambiguous_range(cfg: SystemConfig) -> float:
    """Largest unaliased range in carrier wavelengths: (1/2) * fc / subcarrier_spacing."""
    return 0.5 * cfg.carrier_freq / cfg.subcarrier_spacing


def fraunhofer_distance(cfg: SystemConfig) -> float:
    """Far-field boundary 2 * aperture^2 in carrier wavelengths."""
    aperture = cfg.n_antennas * cfg.antenna_spacing
    return 2.0 * aperture * aperture


def lambda_to_meters(value_lambda: float, cfg: SystemConfig) -> float:
    """Convert a length from carrier wavelengths to meters."""
    return value_lambda * cfg.wavelength
