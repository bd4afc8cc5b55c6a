"""Zero-padded DFT evaluation and derivative-free refinement.

The coarse search evaluates the localization metric on a zero-padded DFT grid;
this module owns the transform wrappers, the bin-to-parameter maps of that
grid, and the classic direction-set (Powell) minimizer with golden-section
line searches used to polish the coarse peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .model import SystemConfig

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # 0.6180...
_BRACKET_GROWTH = 1.0 + _INV_GOLDEN
# Line-search interval tolerance, relative to the feasible segment length.
_LINE_XTOL_REL = 1e-7


@dataclass(frozen=True)
class GridSpec:
    """Zero-padding factors of the coarse search grid.

    A factor of 8 makes the coarse grid 8x finer than the resolution cell, so
    the refinement always starts inside the main lobe.
    """

    pad_range: int = 8
    pad_aoa: int = 8

    def __post_init__(self) -> None:
        if self.pad_range < 1 or self.pad_aoa < 1:
            raise ValueError("pad factors must be >= 1")

    def n_range_bins(self, cfg: SystemConfig) -> int:
        return self.pad_range * cfg.n_subcarriers

    def n_aoa_bins(self, cfg: SystemConfig) -> int:
        return self.pad_aoa * cfg.n_antennas


@dataclass(frozen=True)
class MetricSurface:
    """Coarse metric values over the (range, sin-AoA) grid.

    Rows are range bins restricted to below the unambiguous range; columns are
    all AoA bins in natural DFT order with the normalized frequency wrapped to
    (-1/2, 1/2]. The per-bin parameter values are carried alongside.
    """

    values: np.ndarray  # (n_range_bins, n_aoa_bins), all >= 0
    range_bins_lambda: np.ndarray
    sin_aoa_bins: np.ndarray
    range_cell_lambda: float
    sin_aoa_cell: float


def grid_axes(cfg: SystemConfig, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Bin-to-parameter maps of the coarse grid.

    Range bin k maps to R = k/M_r * (fc/spacing) wavelengths, keeping only bins
    below the unambiguous range (half of the axis). AoA bin k maps to the
    normalized spatial frequency k/M_a wrapped to (-1/2, 1/2], divided by the
    antenna spacing to give sin(theta).
    """
    m_r = grid.n_range_bins(cfg)
    m_a = grid.n_aoa_bins(cfg)
    if m_r < 2 or m_a < 2:
        raise ValueError(f"grid sizes must be >= 2, got {m_r} x {m_a}")
    range_span = cfg.carrier_freq / cfg.subcarrier_spacing  # twice the unambiguous range
    n_valid = (m_r + 1) // 2
    range_bins = np.arange(n_valid) * (range_span / m_r)
    freq = np.arange(m_a) / m_a
    freq = np.where(freq > 0.5, freq - 1.0, freq)
    sin_bins = freq / cfg.antenna_spacing
    return range_bins, sin_bins


def dft_forward_1d(x: np.ndarray, out_len: int) -> np.ndarray:
    """Unnormalized forward DFT of ``x`` zero-padded to ``out_len`` samples."""
    x = np.asarray(x)
    if out_len < x.shape[-1]:
        raise ValueError(f"out_len {out_len} is shorter than the input {x.shape[-1]}")
    return np.fft.fft(x, n=out_len)


def dft_forward_2d(x: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Separable unnormalized forward DFT with zero-padding along both axes."""
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError("input must be a 2-D matrix")
    if out_rows < x.shape[0] or out_cols < x.shape[1]:
        raise ValueError(
            f"output shape ({out_rows}, {out_cols}) is smaller than the input {x.shape}"
        )
    return np.fft.fft2(x, s=(out_rows, out_cols))


def _golden_section(
    phi: Callable[[float], float],
    a: float,
    b: float,
    best_t: float,
    best_f: float,
    xtol: float,
) -> tuple[float, float]:
    """Golden-section search on [a, b]; returns the best point ever evaluated."""
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc = phi(c)
    fd = phi(d)
    if fc < best_f:
        best_t, best_f = c, fc
    if fd < best_f:
        best_t, best_f = d, fd
    while (b - a) > xtol:
        if fc <= fd:
            b = d
            d, fd = c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = phi(c)
            if fc < best_f:
                best_t, best_f = c, fc
        else:
            a = c
            c, fc = d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = phi(d)
            if fd < best_f:
                best_t, best_f = d, fd
    return best_t, best_f


def _line_minimize(
    f: Callable[[np.ndarray], float],
    x: np.ndarray,
    fx: float,
    direction: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Minimize f along x + t*direction inside the box; never returns worse than (x, fx)."""
    # Feasible parameter interval [t_lo, t_hi] containing t = 0.
    t_lo, t_hi = -math.inf, math.inf
    for u_i, x_i, lo_i, hi_i in zip(direction, x, lo, hi):
        if u_i == 0.0:
            continue
        t_a = (lo_i - x_i) / u_i
        t_b = (hi_i - x_i) / u_i
        t_lo = max(t_lo, min(t_a, t_b))
        t_hi = min(t_hi, max(t_a, t_b))
    if not math.isfinite(t_lo) or not math.isfinite(t_hi) or t_hi - t_lo <= 0.0:
        return x, fx
    span = t_hi - t_lo

    def phi(t: float) -> float:
        return f(np.clip(x + t * direction, lo, hi))

    best_t, best_f = 0.0, fx

    # Bracket a local minimum around t = 0 with golden-ratio step expansion.
    step = 0.1 * span
    t_pos = min(step, t_hi)
    t_neg = max(-step, t_lo)
    f_pos = phi(t_pos) if t_pos > 0.0 else math.inf
    if f_pos < best_f:
        best_t, best_f = t_pos, f_pos
    if t_pos > 0.0 and f_pos <= fx:
        a, b = _expand_bracket(phi, 0.0, t_pos, f_pos, t_lo, t_hi)
    elif t_neg < 0.0:
        f_neg = phi(t_neg)
        if f_neg < best_f:
            best_t, best_f = t_neg, f_neg
        if f_neg <= fx:
            a, b = _expand_bracket(phi, 0.0, t_neg, f_neg, t_lo, t_hi)
        elif t_pos > 0.0:
            a, b = t_neg, t_pos  # fx below both neighbors: minimum in between
        else:
            a, b = t_neg, 0.0
    else:
        a, b = 0.0, t_pos

    best_t, best_f = _golden_section(phi, a, b, best_t, best_f, _LINE_XTOL_REL * span)
    if best_f >= fx:
        return x, fx
    return np.clip(x + best_t * direction, lo, hi), best_f


def _expand_bracket(
    phi: Callable[[float], float],
    t_prev: float,
    t_cur: float,
    f_cur: float,
    t_lo: float,
    t_hi: float,
) -> tuple[float, float]:
    """Walk downhill with growing steps until the function turns up or a bound is hit."""
    while True:
        t_next = t_cur + _BRACKET_GROWTH * (t_cur - t_prev)
        t_next = min(max(t_next, t_lo), t_hi)
        if t_next == t_cur:  # pinned at a bound while still descending
            lo_t, hi_t = sorted((t_prev, t_cur))
            return lo_t, hi_t
        f_next = phi(t_next)
        if f_next >= f_cur:
            lo_t, hi_t = sorted((t_prev, t_next))
            return lo_t, hi_t
        t_prev = t_cur
        t_cur, f_cur = t_next, f_next


def powell_minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    bounds: Sequence[tuple[float, float]],
    tol: float = 1e-9,
    max_iter: int = 100,
) -> tuple[np.ndarray, float]:
    """Direction-set minimization with golden-section line searches.

    Iterates line minimizations along an evolving direction set, replacing the
    direction of largest decrease with the net iteration displacement. Stops
    when one full iteration improves the objective by less than ``tol`` or
    after ``max_iter`` iterations. Coordinates stay clamped to ``bounds``, and
    the result is never worse than the starting point.
    """
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    if np.any(lo > hi):
        raise ValueError("invalid bounds: lower edge above upper edge")
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    fx = float(f(x))
    if not math.isfinite(fx):
        raise ValueError(f"objective is not finite at the start point: {fx}")

    n = len(x)
    directions = [np.eye(n)[i] for i in range(n)]
    for _ in range(max_iter):
        x_start, f_start = x.copy(), fx
        decreases = np.zeros(n)
        for i, u in enumerate(directions):
            f_before = fx
            x, fx = _line_minimize(f, x, fx, u, lo, hi)
            decreases[i] = f_before - fx
        extrapolated = x - x_start
        if np.any(extrapolated != 0.0):
            x, fx = _line_minimize(f, x, fx, extrapolated, lo, hi)
            directions[int(np.argmax(decreases))] = extrapolated
        if f_start - fx < tol:
            break
    return x, fx
