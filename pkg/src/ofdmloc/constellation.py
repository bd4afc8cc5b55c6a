"""Constellation alphabets, random symbol draws, and hard symbol decisions.

Every alphabet is normalized to unit average symbol energy. Alphabets are
stored sorted lexicographically by (real, imag) so that first-minimum argmin
decisions resolve exact distance ties toward the lexicographically smallest
point.
"""

from __future__ import annotations

from enum import Enum

import numpy as np


class ConstellationKind(Enum):
    BPSK = "bpsk"
    QPSK = "qpsk"
    QAM16 = "qam16"

    @classmethod
    def from_label(cls, label: str) -> "ConstellationKind":
        try:
            return cls(label.lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown constellation {label!r}; expected one of: {valid}")


def _qam16_points() -> np.ndarray:
    levels = (-3.0, -1.0, 1.0, 3.0)
    pts = np.array([a + 1j * b for a in levels for b in levels])
    return pts / np.sqrt(10.0)


_ALPHABETS: dict[ConstellationKind, np.ndarray] = {
    ConstellationKind.BPSK: np.array([-1.0 + 0.0j, 1.0 + 0.0j]),
    ConstellationKind.QPSK: np.array([-1.0 - 1.0j, -1.0 + 1.0j, 1.0 - 1.0j, 1.0 + 1.0j])
    / np.sqrt(2.0),
    ConstellationKind.QAM16: _qam16_points(),
}
for _pts in _ALPHABETS.values():
    _pts.setflags(write=False)


def alphabet(kind: ConstellationKind) -> np.ndarray:
    """Return the (read-only) unit-average-energy point set of a constellation."""
    return _ALPHABETS[kind]


def draw_symbols(
    kind: ConstellationKind, rows: int, cols: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw a rows x cols matrix of i.i.d. uniform constellation symbols."""
    points = alphabet(kind)
    idx = rng.integers(0, len(points), size=(rows, cols))
    return points[idx]


def hard_decide(point: complex, kind: ConstellationKind) -> complex:
    """Minimum-Euclidean-distance decision for a single received value.

    Exact distance ties break toward the lexicographically smallest alphabet
    point (real part first, then imaginary).
    """
    if not (np.isfinite(point.real) and np.isfinite(point.imag)):
        raise ValueError(f"cannot decide non-finite value {point!r}")
    points = alphabet(kind)
    d2 = np.abs(points - point) ** 2
    return complex(points[int(np.argmin(d2))])


def hard_decide_array(values: np.ndarray, kind: ConstellationKind) -> np.ndarray:
    """Vectorized minimum-distance decisions with the same tie-break rule."""
    values = np.asarray(values)
    if values.size and not np.all(np.isfinite(values)):
        raise ValueError("cannot decide non-finite values")
    points = alphabet(kind)
    d2 = np.abs(values[..., None] - points) ** 2
    return points[np.argmin(d2, axis=-1)]
