"""Tests for scene/frame drawing and observation synthesis."""

import math

import numpy as np
import pytest
from scipy import stats

from ofdmloc.constellation import ConstellationKind
from ofdmloc.model import (
    SystemConfig,
    channel_matrix,
    fraunhofer_distance,
    max_unambiguous_range,
)
from ofdmloc.simulator import (
    Frame,
    NoiseSpec,
    Observations,
    draw_channel_coefficient,
    draw_frame,
    draw_scene,
    simulate,
)


def make_config(**overrides):
    base = dict(
        n_antennas=8,
        n_subcarriers=64,
        subcarrier_spacing=15e3,
        n_pilot_symbols=2,
        n_data_symbols=4,
    )
    base.update(overrides)
    return SystemConfig(**base)


class TestChannelCoefficient:
    def test_unit_modulus(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            assert abs(abs(draw_channel_coefficient(rng)) - 1.0) < 1e-15

    def test_deterministic(self):
        a = draw_channel_coefficient(np.random.default_rng(42))
        b = draw_channel_coefficient(np.random.default_rng(42))
        assert a == b

    def test_phase_uniformity_chi_square(self):
        rng = np.random.default_rng(7)
        phases = np.array(
            [math.atan2(g.imag, g.real) for g in (draw_channel_coefficient(rng) for _ in range(100_000))]
        )
        counts, _ = np.histogram(phases, bins=32, range=(-math.pi, math.pi))
        assert stats.chisquare(counts).pvalue > 0.01


class TestDrawScene:
    def test_invariants_hold_for_many_draws(self):
        cfg = make_config()
        rng = np.random.default_rng(1)
        r_f, r_max = fraunhofer_distance(cfg), max_unambiguous_range(cfg)
        for _ in range(500):
            scene = draw_scene(cfg, rng)
            assert r_f < scene.range_lambda < r_max
            assert abs(scene.sin_aoa) <= 0.9
            assert abs(abs(scene.gamma) - 1.0) < 1e-12

    def test_sin_aoa_uniformity_ks(self):
        cfg = make_config()
        rng = np.random.default_rng(3)
        sines = np.array([draw_scene(cfg, rng).sin_aoa for _ in range(10_000)])
        result = stats.kstest(sines, stats.uniform(loc=-0.9, scale=1.8).cdf)
        assert result.pvalue > 0.01

    def test_range_uniformity_ks(self):
        cfg = make_config()
        rng = np.random.default_rng(4)
        r_max = max_unambiguous_range(cfg)
        lo = max(fraunhofer_distance(cfg), 0.05 * r_max)
        ranges = np.array([draw_scene(cfg, rng).range_lambda for _ in range(10_000)])
        result = stats.kstest(ranges, stats.uniform(loc=lo, scale=0.9 * r_max - lo).cdf)
        assert result.pvalue > 0.01

    def test_infeasible_geometry_rejected(self):
        # A 512-element aperture pushes the far-field boundary past 90% of the
        # unambiguous range.
        cfg = make_config(n_antennas=512)
        with pytest.raises(ValueError, match="infeasible"):
            draw_scene(cfg, np.random.default_rng(0))


class TestFrame:
    def test_draw_frame_shapes_and_membership(self):
        cfg = make_config()
        frame = draw_frame(cfg, ConstellationKind.QAM16, np.random.default_rng(5))
        assert frame.pilots.shape == (2, 64)
        assert frame.data.shape == (4, 64)

    def test_non_unit_pilots_rejected(self):
        with pytest.raises(ValueError, match="unit modulus"):
            Frame(
                pilots=np.full((1, 4), 0.5 + 0j),
                data=np.zeros((0, 4), dtype=complex),
                data_kind=ConstellationKind.QPSK,
            )

    def test_foreign_data_symbols_rejected(self):
        with pytest.raises(ValueError, match="alphabet"):
            Frame(
                pilots=np.ones((1, 4), dtype=complex),
                data=np.full((1, 4), 0.3 + 0.9j),
                data_kind=ConstellationKind.QPSK,
            )


class TestNoiseSpec:
    def test_linear_conversion(self):
        assert NoiseSpec(10.0).noise_var == pytest.approx(0.1)
        assert NoiseSpec(0.0).noise_var == 1.0
        assert NoiseSpec(-20.0).noise_var == pytest.approx(100.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(math.inf)


class TestSimulate:
    def test_noiseless_is_exact(self):
        cfg = make_config()
        rng = np.random.default_rng(6)
        scene = draw_scene(cfg, rng)
        frame = draw_frame(cfg, ConstellationKind.QPSK, rng)
        obs = simulate(cfg, scene, frame, None, rng)
        h = channel_matrix(scene, cfg)
        np.testing.assert_array_equal(obs.y_pilot, h[None] * frame.pilots[:, None, :])
        np.testing.assert_array_equal(obs.y_data, h[None] * frame.data[:, None, :])
        assert obs.noise_var == 0.0

    def test_all_ones_pilot_exposes_channel(self):
        cfg = make_config(n_pilot_symbols=1, n_data_symbols=0)
        rng = np.random.default_rng(7)
        scene = draw_scene(cfg, rng)
        frame = Frame(
            pilots=np.ones((1, 64), dtype=complex),
            data=np.zeros((0, 64), dtype=complex),
            data_kind=ConstellationKind.QPSK,
        )
        obs = simulate(cfg, scene, frame, None, rng)
        np.testing.assert_array_equal(obs.y_pilot[0], channel_matrix(scene, cfg))

    def test_empirical_noise_power(self):
        # P*N*Q = 25*16*256 > 1e5 noise samples
        cfg = SystemConfig(
            n_antennas=16,
            n_subcarriers=256,
            subcarrier_spacing=15e3,
            n_pilot_symbols=25,
            n_data_symbols=0,
        )
        rng = np.random.default_rng(8)
        scene = draw_scene(cfg, rng)
        frame = draw_frame(cfg, ConstellationKind.QPSK, rng)
        noise = NoiseSpec(-3.0)
        obs = simulate(cfg, scene, frame, noise, rng)
        h = channel_matrix(scene, cfg)
        residual = obs.y_pilot - h[None] * frame.pilots[:, None, :]
        measured = np.mean(np.abs(residual) ** 2)
        assert measured == pytest.approx(noise.noise_var, rel=0.03)

    def test_pilot_and_data_noise_uncorrelated(self):
        cfg = SystemConfig(
            n_antennas=16,
            n_subcarriers=256,
            subcarrier_spacing=15e3,
            n_pilot_symbols=25,
            n_data_symbols=25,
        )
        rng = np.random.default_rng(9)
        scene = draw_scene(cfg, rng)
        frame = draw_frame(cfg, ConstellationKind.QPSK, rng)
        obs = simulate(cfg, scene, frame, NoiseSpec(0.0), rng)
        h = channel_matrix(scene, cfg)
        n_p = (obs.y_pilot - h[None] * frame.pilots[:, None, :]).ravel()
        n_d = (obs.y_data - h[None] * frame.data[:, None, :]).ravel()
        rho = np.vdot(n_p, n_d) / math.sqrt(
            np.sum(np.abs(n_p) ** 2) * np.sum(np.abs(n_d) ** 2)
        )
        assert abs(rho) < 0.01
        # adjacent-cell correlation within the pilot noise
        rho_shift = np.vdot(n_p[:-1], n_p[1:]) / np.sum(np.abs(n_p) ** 2)
        assert abs(rho_shift) < 0.01

    def test_deterministic_given_seed(self):
        cfg = make_config()
        scene = draw_scene(cfg, np.random.default_rng(10))
        frame = draw_frame(cfg, ConstellationKind.QAM16, np.random.default_rng(11))
        a = simulate(cfg, scene, frame, NoiseSpec(5.0), np.random.default_rng(12))
        b = simulate(cfg, scene, frame, NoiseSpec(5.0), np.random.default_rng(12))
        np.testing.assert_array_equal(a.y_pilot, b.y_pilot)
        np.testing.assert_array_equal(a.y_data, b.y_data)

    def test_dimension_mismatch_rejected(self):
        cfg = make_config()
        rng = np.random.default_rng(13)
        scene = draw_scene(cfg, rng)
        other = make_config(n_subcarriers=32)
        frame = draw_frame(other, ConstellationKind.QPSK, rng)
        with pytest.raises(ValueError, match="does not match"):
            simulate(cfg, scene, frame, NoiseSpec(0.0), rng)

    def test_noiseless_received_power_is_unit(self):
        cfg = make_config(n_data_symbols=0)
        rng = np.random.default_rng(14)
        scene = draw_scene(cfg, rng)
        frame = draw_frame(cfg, ConstellationKind.QPSK, rng)
        obs = simulate(cfg, scene, frame, None, rng)
        np.testing.assert_allclose(np.abs(obs.y_pilot) ** 2, 1.0, rtol=1e-12)

    def test_negative_noise_var_rejected(self):
        with pytest.raises(ValueError):
            Observations(
                y_pilot=np.zeros((1, 2, 3), dtype=complex),
                y_data=np.zeros((0, 2, 3), dtype=complex),
                noise_var=-1.0,
            )
