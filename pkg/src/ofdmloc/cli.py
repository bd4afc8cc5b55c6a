"""Command-line front end: presets, SNR/N/Q sweeps, single-shot runs, surface dumps.

Every sweep run prints the fully resolved experiment spec as JSON on stdout
before executing, so the exact run can be reproduced by feeding that JSON back
through ``--config``. Results go to CSV in the stable schema of the harness.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .constellation import ConstellationKind
from .estimators import _as_data_covariance, jpudl_coarse, pilot_combine
from .harness import (
    ExperimentSpec,
    print_progress,
    run_experiment,
    write_csv,
    write_trials_csv,
    _run_estimator_once,
)
from .model import SystemConfig
from .numerics import GridSpec
from .simulator import NoiseSpec, draw_frame, draw_scene, simulate

DEFAULT_SEED_ENV = "OFDMLOC_SEED"
_FALLBACK_SEED = 12345

DEFAULT_ESTIMATORS = ("jpudl", "pilot_only", "bound", "dd_lmmse")


def _default_seed() -> int:
    return int(os.environ.get(DEFAULT_SEED_ENV, _FALLBACK_SEED))


def _base_config() -> SystemConfig:
    """Reference system: 16-element half-wavelength array, 256 subcarriers at
    15 kHz, one BPSK pilot symbol and 32 data symbols of 16-QAM."""
    return SystemConfig(
        n_antennas=16,
        n_subcarriers=256,
        subcarrier_spacing=15e3,
        n_pilot_symbols=1,
        n_data_symbols=32,
        antenna_spacing=0.5,
    )


def preset_fig3() -> ExperimentSpec:
    """SNR sweep from -40 dB to +20 dB in 2 dB steps on the reference system."""
    return ExperimentSpec(
        name="fig3",
        config=_base_config(),
        sweep_param="snr_db",
        sweep_values=tuple(float(s) for s in range(-40, 22, 2)),
        n_trials=1000,
        master_seed=_default_seed(),
        estimators=DEFAULT_ESTIMATORS,
        grid=GridSpec(),
        data_kind=ConstellationKind.QAM16,
    )


def preset_fig5a() -> ExperimentSpec:
    """Antenna-count sweep {2,4,8,16,32} at -20 and -10 dB, 256 subcarriers."""
    return ExperimentSpec(
        name="fig5a",
        config=_base_config(),
        sweep_param="n_antennas",
        sweep_values=(2, 4, 8, 16, 32),
        fixed_snr_db=(-20.0, -10.0),
        n_trials=1000,
        master_seed=_default_seed(),
        estimators=DEFAULT_ESTIMATORS,
        grid=GridSpec(),
        data_kind=ConstellationKind.QAM16,
    )


def preset_fig5b() -> ExperimentSpec:
    """Subcarrier-count sweep (powers of two) at -20 and -10 dB, 16 antennas."""
    return ExperimentSpec(
        name="fig5b",
        config=_base_config(),
        sweep_param="n_subcarriers",
        sweep_values=(16, 32, 64, 128, 256, 512),
        fixed_snr_db=(-20.0, -10.0),
        n_trials=1000,
        master_seed=_default_seed(),
        estimators=DEFAULT_ESTIMATORS,
        grid=GridSpec(),
        data_kind=ConstellationKind.QAM16,
    )


_PRESETS = {"sweep-snr": preset_fig3, "sweep-n": preset_fig5a, "sweep-q": preset_fig5b}


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _apply_overrides(spec: ExperimentSpec, args: argparse.Namespace) -> ExperimentSpec:
    if getattr(args, "snr", None):
        values = _parse_float_list(args.snr)
        if spec.sweep_param == "snr_db":
            spec = replace(spec, sweep_values=values)
        else:
            spec = replace(spec, fixed_snr_db=values)
    if getattr(args, "trials", None) is not None:
        spec = replace(spec, n_trials=args.trials)
    if getattr(args, "seed", None) is not None:
        spec = replace(spec, master_seed=args.seed)
    if getattr(args, "estimators", None):
        spec = replace(spec, estimators=tuple(args.estimators.split(",")))
    if getattr(args, "pad", None) is not None:
        spec = replace(spec, grid=GridSpec(pad_range=args.pad, pad_aoa=args.pad))
    return spec


def _load_spec(args: argparse.Namespace, subcommand: str) -> ExperimentSpec:
    if args.config is not None:
        spec = ExperimentSpec.from_json(Path(args.config).read_text())
    else:
        spec = _PRESETS[subcommand]()
    return _apply_overrides(spec, args)


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="experiment spec JSON file (defaults to the preset)")
    parser.add_argument("--out", help="output CSV path (default: <experiment name>.csv)")
    parser.add_argument("--snr", help="comma-separated SNR values in dB (override)")
    parser.add_argument("--trials", type=int, help="Monte-Carlo trials per point (override)")
    parser.add_argument("--seed", type=int, help="master seed (override)")
    parser.add_argument("--estimators", help="comma-separated estimator names (override)")
    parser.add_argument("--pad", type=int, help="zero-padding factor for both grid axes")
    parser.add_argument("--workers", type=int, default=1, help="concurrent worker processes")
    parser.add_argument(
        "--dump-trials", help="also write raw per-trial results to this CSV path"
    )


def _run_sweep(args: argparse.Namespace, subcommand: str) -> int:
    spec = _load_spec(args, subcommand)
    out = Path(args.out) if args.out else Path(f"{spec.name}.csv")
    if not out.parent.exists():
        raise FileNotFoundError(f"output directory {out.parent} does not exist")
    print("resolved experiment spec:", file=sys.stderr)
    print(spec.to_json(indent=2))
    sys.stdout.flush()
    if args.dump_trials:
        records, trials = run_experiment(
            spec, n_workers=args.workers, return_trials=True, progress=print_progress
        )
        write_trials_csv(trials, args.dump_trials)
    else:
        records = run_experiment(spec, n_workers=args.workers, progress=print_progress)
    write_csv(records, out)
    print(f"wrote {len(records)} records to {out}", file=sys.stderr)
    return 0


def _run_single(args: argparse.Namespace) -> int:
    spec = _load_spec(args, "sweep-snr")
    snr = float(args.snr) if args.snr else -10.0
    cfg = spec.config
    root = np.random.SeedSequence(spec.master_seed, spawn_key=(0, 0))
    scene_seq, frame_seq, noise_seq = root.spawn(3)
    scene = draw_scene(cfg, np.random.default_rng(scene_seq))
    frame = draw_frame(cfg, spec.data_kind, np.random.default_rng(frame_seq))
    obs = simulate(cfg, scene, frame, NoiseSpec(snr), np.random.default_rng(noise_seq))
    print(f"snr_db={snr:g} seed={spec.master_seed}")
    print(f"truth: range={scene.range_lambda:.6g} lambda  sin_aoa={scene.sin_aoa:+.6f}")
    for name in spec.estimators:
        est, ser = _run_estimator_once(name, obs, frame, cfg, spec.grid)
        ser_txt = "" if math.isnan(ser) else f"  ser={ser:.4g}"
        print(
            f"{name:>10s}: range={est.range_hat:.6g} lambda "
            f"(err {est.range_hat - scene.range_lambda:+.4g})  "
            f"sin_aoa={est.sin_aoa_hat:+.6f} "
            f"(err {est.sin_aoa_hat - scene.sin_aoa:+.3e}){ser_txt}"
        )
    return 0


def _run_dump_surface(args: argparse.Namespace) -> int:
    if args.config is not None:
        cfg = SystemConfig.from_json(Path(args.config).read_text())
    else:
        cfg = _base_config()
    seed = args.seed if args.seed is not None else _default_seed()
    snr = float(args.snr) if args.snr else 0.0
    grid = GridSpec(args.pad, args.pad) if args.pad else GridSpec()
    root = np.random.SeedSequence(seed, spawn_key=(0, 0))
    scene_seq, frame_seq, noise_seq = root.spawn(3)
    scene = draw_scene(cfg, np.random.default_rng(scene_seq))
    frame = draw_frame(cfg, ConstellationKind.QAM16, np.random.default_rng(frame_seq))
    obs = simulate(cfg, scene, frame, NoiseSpec(snr), np.random.default_rng(noise_seq))
    pc = pilot_combine(obs.y_pilot, frame.pilots)
    surface, (k_r, k_a) = jpudl_coarse(pc, _as_data_covariance(obs.y_data), cfg, grid)
    out = Path(args.out) if args.out else Path("surface.csv")
    with open(out, "w", newline="") as handle:
        handle.write("k_r,k_a,range_lambda,sin_aoa,value\n")
        for i, r_val in enumerate(surface.range_bins_lambda):
            row = surface.values[i]
            for j, s_val in enumerate(surface.sin_aoa_bins):
                handle.write(f"{i},{j},{r_val:.9g},{s_val:.9g},{row[j]:.9g}\n")
    print(
        f"truth: range={scene.range_lambda:.6g} lambda sin_aoa={scene.sin_aoa:+.6f}; "
        f"argmax bins=({k_r}, {k_a}) -> range={surface.range_bins_lambda[k_r]:.6g} "
        f"sin_aoa={surface.sin_aoa_bins[k_a]:+.6f}",
        file=sys.stderr,
    )
    print(f"wrote {surface.values.size} bins to {out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ofdmloc",
        description="Range/AoA localization simulator for OFDM opportunistic radar",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (
        ("sweep-snr", "SNR sweep (default preset: reference system, -40..20 dB)"),
        ("sweep-n", "antenna-count sweep at fixed SNRs"),
        ("sweep-q", "subcarrier-count sweep at fixed SNRs"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common_options(p)
    p_single = sub.add_parser("single", help="run one trial and print all estimates")
    _add_common_options(p_single)
    p_dump = sub.add_parser("dump-surface", help="write one coarse metric surface as CSV")
    p_dump.add_argument("--config", help="SystemConfig JSON file")
    p_dump.add_argument("--out", help="output CSV path (default: surface.csv)")
    p_dump.add_argument("--snr", help="SNR in dB (default 0)")
    p_dump.add_argument("--seed", type=int, help="scene seed")
    p_dump.add_argument("--pad", type=int, help="zero-padding factor for both grid axes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.subcommand in _PRESETS:
        return _run_sweep(args, args.subcommand)
    if args.subcommand == "single":
        return _run_single(args)
    if args.subcommand == "dump-surface":
        return _run_dump_surface(args)
    raise AssertionError(f"unhandled subcommand {args.subcommand}")


if __name__ == "__main__":
    sys.exit(main())
