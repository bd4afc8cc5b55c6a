"""Tests for the DFT wrappers, grid maps, and the direction-set minimizer."""

import cmath
import math

import numpy as np
import pytest

from ofdmloc.model import SystemConfig, max_unambiguous_range
from ofdmloc.numerics import (
    GridSpec,
    dft_forward_1d,
    dft_forward_2d,
    grid_axes,
    powell_minimize,
)


def naive_dft(x, out_len):
    """O(n^2) reference transform of the zero-padded input."""
    x = np.asarray(x)
    out = np.zeros(out_len, dtype=complex)
    for k in range(out_len):
        for m, xm in enumerate(x):
            out[k] += xm * cmath.exp(-2j * math.pi * m * k / out_len)
    return out


def naive_dft_2d(x, out_rows, out_cols):
    x = np.asarray(x)
    out = np.zeros((out_rows, out_cols), dtype=complex)
    for k in range(out_rows):
        for l in range(out_cols):
            acc = 0.0 + 0.0j
            for r in range(x.shape[0]):
                for c in range(x.shape[1]):
                    acc += x[r, c] * cmath.exp(
                        -2j * math.pi * (r * k / out_rows + c * l / out_cols)
                    )
            out[k, l] = acc
    return out


class TestDft1d:
    def test_impulse_gives_flat_spectrum(self):
        x = np.zeros(8, dtype=complex)
        x[0] = 1.0
        np.testing.assert_allclose(dft_forward_1d(x, 32), np.ones(32), atol=1e-12)

    def test_matched_tone_peaks_at_bin(self):
        out_len, k0, m = 64, 13, 48
        x = np.exp(2j * math.pi * np.arange(m) * k0 / out_len)
        spectrum = dft_forward_1d(x, out_len)
        assert abs(spectrum[k0]) == pytest.approx(m, rel=1e-12)
        assert int(np.argmax(np.abs(spectrum))) == k0

    def test_matches_naive_dft(self):
        rng = np.random.default_rng(0)
        for out_len, n in [(16, 16), (32, 10), (64, 17)]:
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            got = dft_forward_1d(x, out_len)
            want = naive_dft(x, out_len)
            assert np.max(np.abs(got - want)) / np.max(np.abs(want)) < 1e-10

    def test_too_short_output_rejected(self):
        with pytest.raises(ValueError):
            dft_forward_1d(np.ones(8), 4)

    def test_linearity(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        y = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        lhs = dft_forward_1d(2.0 * x + 3j * y, 24)
        rhs = 2.0 * dft_forward_1d(x, 24) + 3j * dft_forward_1d(y, 24)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_parseval_with_padding(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(20) + 1j * rng.standard_normal(20)
        spectrum = dft_forward_1d(x, 128)
        energy_in = np.sum(np.abs(x) ** 2)
        energy_out = np.sum(np.abs(spectrum) ** 2) / 128
        assert energy_out == pytest.approx(energy_in, rel=1e-10)


class TestDft2d:
    def test_impulse(self):
        x = np.zeros((4, 4), dtype=complex)
        x[0, 0] = 1.0
        np.testing.assert_allclose(dft_forward_2d(x, 8, 8), np.ones((8, 8)), atol=1e-12)

    def test_matched_2d_tone(self):
        rows, cols, out_r, out_c = 6, 5, 16, 12
        k0, l0 = 3, 7
        r = np.arange(rows)[:, None]
        c = np.arange(cols)[None, :]
        x = np.exp(2j * math.pi * (r * k0 / out_r + c * l0 / out_c))
        spectrum = dft_forward_2d(x, out_r, out_c)
        assert abs(spectrum[k0, l0]) == pytest.approx(rows * cols, rel=1e-12)

    def test_matches_naive_dft(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((5, 7)) + 1j * rng.standard_normal((5, 7))
        got = dft_forward_2d(x, 11, 9)
        want = naive_dft_2d(x, 11, 9)
        assert np.max(np.abs(got - want)) / np.max(np.abs(want)) < 1e-10

    def test_bad_shapes_rejected(self):
        with pytest.raises(ValueError):
            dft_forward_2d(np.ones((4, 4)), 2, 8)
        with pytest.raises(ValueError):
            dft_forward_2d(np.ones(4), 8, 8)


class TestGridAxes:
    def make_cfg(self, **overrides):
        base = dict(n_antennas=8, n_subcarriers=32, subcarrier_spacing=15e3)
        base.update(overrides)
        return SystemConfig(**base)

    def test_range_bins_below_unambiguous_range(self):
        cfg = self.make_cfg()
        grid = GridSpec(pad_range=4, pad_aoa=4)
        range_bins, _ = grid_axes(cfg, grid)
        assert len(range_bins) == 4 * 32 // 2
        assert range_bins[0] == 0.0
        assert range_bins[-1] < max_unambiguous_range(cfg)

    def test_aoa_wrap_boundary(self):
        cfg = self.make_cfg()
        grid = GridSpec(pad_range=1, pad_aoa=4)
        _, sin_bins = grid_axes(cfg, grid)
        m_a = 32
        # bin M/2 maps to the +1/2 boundary frequency, not -1/2
        assert sin_bins[m_a // 2] == pytest.approx(0.5 / cfg.antenna_spacing)
        assert sin_bins[m_a // 2 + 1] < 0

    def test_bin_maps_are_injective(self):
        cfg = self.make_cfg()
        range_bins, sin_bins = grid_axes(cfg, GridSpec(2, 2))
        assert len(np.unique(range_bins)) == len(range_bins)
        assert len(np.unique(sin_bins)) == len(sin_bins)

    def test_bin_spacing(self):
        cfg = self.make_cfg()
        grid = GridSpec(pad_range=8, pad_aoa=8)
        range_bins, sin_bins = grid_axes(cfg, grid)
        np.testing.assert_allclose(
            np.diff(range_bins),
            (cfg.carrier_freq / cfg.subcarrier_spacing) / (8 * 32),
        )
        assert sin_bins[1] - sin_bins[0] == pytest.approx(1.0 / (0.5 * 8 * 8))

    def test_invalid_pads_rejected(self):
        with pytest.raises(ValueError):
            GridSpec(pad_range=0)


def quadratic_bowl(x):
    return (x[0] - 0.3) ** 2 + (x[1] + 0.1) ** 2


class TestPowell:
    def test_quadratic_bowl(self):
        x, fx = powell_minimize(
            quadratic_bowl, (0.0, 0.0), [(-1.0, 1.0), (-1.0, 1.0)], tol=1e-10
        )
        assert abs(x[0] - 0.3) < 1e-6
        assert abs(x[1] + 0.1) < 1e-6
        assert fx < 1e-12

    def test_constant_function_returns_start(self):
        x, fx = powell_minimize(lambda _: 5.0, (0.2, -0.4), [(-1, 1), (-1, 1)])
        assert tuple(x) == (0.2, -0.4)
        assert fx == 5.0

    def test_banana_valley_matches_grid_oracle(self):
        # Smooth curved-valley objective; global minimum at (1, 1).
        def banana(x):
            return (1.0 - x[0]) ** 2 + 5.0 * (x[1] - x[0] ** 2) ** 2

        bounds = [(0.0, 2.0), (0.0, 2.0)]
        x, fx = powell_minimize(banana, (0.4, 1.6), bounds, tol=1e-12, max_iter=200)

        # Dense-grid brute force over the same box.
        axis = np.linspace(0.0, 2.0, 1001)
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        values = (1.0 - xx) ** 2 + 5.0 * (yy - xx * xx) ** 2
        i, j = np.unravel_index(np.argmin(values), values.shape)
        grid_best = np.array([axis[i], axis[j]])

        assert np.all(np.abs(x - grid_best) < 2e-3 + 1e-4)
        assert fx <= values[i, j] + 1e-9
        assert np.all(np.abs(x - [1.0, 1.0]) < 1e-4)

    def test_never_worse_than_start(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a, b = rng.normal(size=2)
            c = rng.uniform(0.5, 3.0)

            def f(x, a=a, b=b, c=c):
                return c * math.sin(3 * x[0]) * math.cos(2 * x[1]) + a * x[0] + b * x[1]

            x0 = rng.uniform(-1, 1, size=2)
            _, fx = powell_minimize(f, x0, [(-2, 2), (-2, 2)], max_iter=5)
            assert fx <= f(x0) + 1e-15

    def test_respects_bounds(self):
        # Unconstrained minimum at (3, -3) sits outside the box.
        def f(x):
            return (x[0] - 3.0) ** 2 + (x[1] + 3.0) ** 2

        x, _ = powell_minimize(f, (0.0, 0.0), [(-1.0, 1.0), (-1.0, 1.0)], tol=1e-12)
        assert x[0] == pytest.approx(1.0, abs=1e-9)
        assert x[1] == pytest.approx(-1.0, abs=1e-9)

    def test_non_finite_start_rejected(self):
        with pytest.raises(ValueError):
            powell_minimize(lambda x: math.nan, (0.0, 0.0), [(-1, 1), (-1, 1)])
