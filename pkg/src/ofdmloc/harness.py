"""Monte-Carlo experiment runner with deterministic seeding and CSV output.

Every (sweep point, trial) pair owns an independent random substream derived
from the master seed via ``SeedSequence(master_seed, spawn_key=(point, trial))``,
split further into scene / frame / noise children so that, e.g., changing the
data constellation never perturbs the noise draws. All requested estimators
run on the same observations of a trial, enabling low-variance paired
comparisons, and the reduction order is fixed so results are byte-identical
regardless of the number of workers.
"""

from __future__ import annotations

import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np

from .constellation import ConstellationKind
from .estimators import (
    ESTIMATOR_NAMES,
    estimate_bound,
    estimate_dd,
    estimate_jpudl,
    estimate_pilot_only,
)
from .model import SceneTruth, SystemConfig, aoa_resolution, range_resolution
from .numerics import GridSpec
from .simulator import (
    NoiseSpec,
    draw_channel_coefficient,
    draw_frame,
    draw_scene,
    simulate,
)

logger = logging.getLogger(__name__)

SWEEP_PARAMS = ("snr_db", "n_antennas", "n_subcarriers")

CSV_HEADER = (
    "experiment,sweep_param,sweep_value,snr_db,estimator,n_trials,"
    "hitrate_aoa,rmse_sin_aoa,hitrate_range,rmse_range_lambda,ser"
)

TRIALS_CSV_HEADER = (
    "experiment,sweep_param,sweep_value,snr_db,estimator,trial,"
    "true_range_lambda,true_sin_aoa,range_hat,sin_aoa_hat,"
    "err_range_lambda,err_sin_aoa,ser,failed"
)

_TRIAL_CHUNK = 25  # trials per worker task


@dataclass(frozen=True)
class ExperimentSpec:
    """A full experiment: base system, sweep axis, trial count, and seeding."""

    name: str
    config: SystemConfig
    sweep_param: str
    sweep_values: tuple
    n_trials: int
    master_seed: int
    estimators: tuple[str, ...]
    grid: GridSpec = GridSpec()
    fixed_snr_db: tuple[float, ...] = ()
    data_kind: ConstellationKind = ConstellationKind.QAM16
    # Debugging mode: pin (range in wavelengths, sin of the AoA) for every
    # trial instead of redrawing the scene; the channel phase stays random.
    fixed_scene: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.sweep_param not in SWEEP_PARAMS:
            raise ValueError(
                f"sweep_param must be one of {SWEEP_PARAMS}, got {self.sweep_param!r}"
            )
        if not self.sweep_values:
            raise ValueError("sweep_values must be non-empty")
        if self.sweep_param == "snr_db":
            if self.fixed_snr_db:
                raise ValueError("fixed_snr_db applies only to parameter sweeps")
        elif not self.fixed_snr_db:
            raise ValueError("parameter sweeps need at least one fixed snr_db value")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        unknown = set(self.estimators) - set(ESTIMATOR_NAMES)
        if not self.estimators or unknown:
            raise ValueError(
                f"estimators must be a non-empty subset of {ESTIMATOR_NAMES}, "
                f"got {self.estimators}"
            )
        # Fail early if any swept configuration (or the pinned scene under any
        # swept configuration) is invalid.
        for point in sweep_points(self):
            if self.fixed_scene is not None:
                r, s = self.fixed_scene
                SceneTruth(r, math.asin(s), 1.0 + 0.0j, point.cfg)

    def to_json(self, indent: int | None = None) -> str:
        payload = {
            "name": self.name,
            "config": json.loads(self.config.to_json()),
            "sweep_param": self.sweep_param,
            "sweep_values": list(self.sweep_values),
            "fixed_snr_db": list(self.fixed_snr_db),
            "n_trials": self.n_trials,
            "master_seed": self.master_seed,
            "estimators": list(self.estimators),
            "grid": {"pad_range": self.grid.pad_range, "pad_aoa": self.grid.pad_aoa},
            "data_constellation": self.data_kind.value,
            "fixed_scene": None if self.fixed_scene is None else list(self.fixed_scene),
        }
        return json.dumps(payload, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        payload = json.loads(text)
        known = {
            "name", "config", "sweep_param", "sweep_values", "fixed_snr_db",
            "n_trials", "master_seed", "estimators", "grid", "data_constellation",
            "fixed_scene",
        }
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown ExperimentSpec keys: {sorted(unknown)}")
        grid_payload = payload.get("grid", {})
        return cls(
            name=payload["name"],
            config=SystemConfig.from_dict(payload["config"]),
            sweep_param=payload["sweep_param"],
            sweep_values=tuple(payload["sweep_values"]),
            fixed_snr_db=tuple(payload.get("fixed_snr_db", ())),
            n_trials=payload["n_trials"],
            master_seed=payload["master_seed"],
            estimators=tuple(payload["estimators"]),
            grid=GridSpec(**grid_payload),
            data_kind=ConstellationKind.from_label(
                payload.get("data_constellation", "qam16")
            ),
            fixed_scene=(
                None
                if payload.get("fixed_scene") is None
                else tuple(payload["fixed_scene"])
            ),
        )


@dataclass(frozen=True)
class SweepPoint:
    """One resolved sweep point: its index, swept value, SNR, and system config."""

    index: int
    sweep_value: float
    snr_db: float
    cfg: SystemConfig


@dataclass(frozen=True)
class MetricsRecord:
    """Aggregated metrics of one estimator at one sweep point."""

    experiment: str
    sweep_param: str
    sweep_value: float
    snr_db: float
    estimator: str
    n_trials: int
    hitrate_aoa: float
    rmse_sin_aoa: float
    hitrate_range: float
    rmse_range_lambda: float
    ser: float | None
    # Diagnostics, not part of the CSV contract:
    rmse_sin_aoa_hits: float
    rmse_range_lambda_hits: float
    n_failures: int


def sweep_points(spec: ExperimentSpec) -> list[SweepPoint]:
    """Expand the sweep axis (x fixed SNRs for parameter sweeps) into points."""
    points: list[SweepPoint] = []
    if spec.sweep_param == "snr_db":
        for value in spec.sweep_values:
            points.append(
                SweepPoint(len(points), float(value), float(value), spec.config)
            )
        return points
    field = "n_antennas" if spec.sweep_param == "n_antennas" else "n_subcarriers"
    for value in spec.sweep_values:
        cfg = replace(spec.config, **{field: int(value)})
        for snr in spec.fixed_snr_db:
            points.append(SweepPoint(len(points), float(value), float(snr), cfg))
    return points


def hit_rate(errors, resolution: float) -> float:
    """Fraction of absolute errors inside half a resolution cell."""
    errors = np.asarray(errors, dtype=float)
    return float(np.mean(np.abs(errors) < resolution / 2.0))


def rmse(errors) -> float:
    """Root mean square over all entries (hits and misses alike)."""
    errors = np.asarray(errors, dtype=float)
    return float(np.sqrt(np.mean(errors * errors)))


def _run_estimator_once(name, obs, frame, cfg, grid):
    """Dispatch one estimator; returns (estimate, symbol_error_rate_or_nan)."""
    if name == "jpudl":
        return estimate_jpudl(obs, frame.pilots, cfg, grid), math.nan
    if name == "pilot_only":
        return estimate_pilot_only(obs, frame.pilots, cfg, grid), math.nan
    if name == "bound":
        return estimate_bound(obs, frame.pilots, frame.data, cfg, grid), math.nan
    if name in ("dd_lmmse", "dd_zf"):
        est, decided = estimate_dd(
            obs, frame.pilots, cfg, grid, frame.data_kind,
            variant=name.removeprefix("dd_"), return_decisions=True,
        )
        ser = float(np.mean(decided != frame.data)) if frame.data.size else math.nan
        return est, ser
    raise ValueError(f"unknown estimator {name!r}")


def _run_block(spec: ExperimentSpec, point: SweepPoint, lo: int, hi: int) -> dict:
    """Run trials [lo, hi) of one sweep point; used directly and by worker processes."""
    n = hi - lo
    n_est = len(spec.estimators)
    out = {
        "point": point.index,
        "lo": lo,
        "true_range": np.empty(n),
        "true_sin": np.empty(n),
        "range_hat": np.full((n_est, n), np.nan),
        "sin_hat": np.full((n_est, n), np.nan),
        "ser": np.full((n_est, n), np.nan),
        "failed": np.zeros((n_est, n), dtype=bool),
    }
    noise = NoiseSpec(point.snr_db)
    for k, trial in enumerate(range(lo, hi)):
        root = np.random.SeedSequence(spec.master_seed, spawn_key=(point.index, trial))
        scene_seq, frame_seq, noise_seq = root.spawn(3)
        scene_rng = np.random.default_rng(scene_seq)
        if spec.fixed_scene is None:
            scene = draw_scene(point.cfg, scene_rng)
        else:
            r, s = spec.fixed_scene
            gamma = draw_channel_coefficient(scene_rng)
            scene = SceneTruth(r, math.asin(s), gamma, point.cfg)
        frame = draw_frame(point.cfg, spec.data_kind, np.random.default_rng(frame_seq))
        obs = simulate(point.cfg, scene, frame, noise, np.random.default_rng(noise_seq))
        out["true_range"][k] = scene.range_lambda
        out["true_sin"][k] = scene.sin_aoa
        for e, name in enumerate(spec.estimators):
            try:
                est, ser = _run_estimator_once(name, obs, frame, point.cfg, spec.grid)
                out["range_hat"][e, k] = est.range_hat
                out["sin_hat"][e, k] = est.sin_aoa_hat
                out["ser"][e, k] = ser
            except Exception:
                logger.warning(
                    "estimator %s failed at point %d trial %d",
                    name, point.index, trial, exc_info=True,
                )
                out["failed"][e, k] = True
    return out


def _iter_blocks(
    spec: ExperimentSpec,
    points: list[SweepPoint],
    n_workers: int,
    progress: Callable[[int, int], None] | None,
) -> Iterable[dict]:
    tasks = [
        (point, lo, min(lo + _TRIAL_CHUNK, spec.n_trials))
        for point in points
        for lo in range(0, spec.n_trials, _TRIAL_CHUNK)
    ]
    done = 0
    if n_workers <= 1:
        for point, lo, hi in tasks:
            yield _run_block(spec, point, lo, hi)
            done += 1
            if progress is not None:
                progress(done, len(tasks))
        return
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(_run_block, spec, point, lo, hi) for point, lo, hi in tasks]
        for future in futures:
            yield future.result()
            done += 1
            if progress is not None:
                progress(done, len(tasks))


def run_experiment(
    spec: ExperimentSpec,
    n_workers: int = 1,
    return_trials: bool = False,
    progress: Callable[[int, int], None] | None = None,
):
    """Run the full sweep; returns MetricsRecord per (point, estimator).

    Results are deterministic in ``master_seed`` and independent of
    ``n_workers`` and task scheduling. With ``return_trials=True`` also
    returns the per-trial rows (one dict per point/estimator/trial).
    """
    points = sweep_points(spec)
    n_est = len(spec.estimators)
    shape = (len(points), spec.n_trials)
    true_range = np.empty(shape)
    true_sin = np.empty(shape)
    range_hat = np.empty((len(points), n_est, spec.n_trials))
    sin_hat = np.empty_like(range_hat)
    ser = np.empty_like(range_hat)
    failed = np.zeros(range_hat.shape, dtype=bool)

    for block in _iter_blocks(spec, points, n_workers, progress):
        p, lo = block["point"], block["lo"]
        n = block["true_range"].size
        true_range[p, lo : lo + n] = block["true_range"]
        true_sin[p, lo : lo + n] = block["true_sin"]
        range_hat[p, :, lo : lo + n] = block["range_hat"]
        sin_hat[p, :, lo : lo + n] = block["sin_hat"]
        ser[p, :, lo : lo + n] = block["ser"]
        failed[p, :, lo : lo + n] = block["failed"]

    records: list[MetricsRecord] = []
    trial_rows: list[dict] = []
    for point in points:
        res_sin = aoa_resolution(point.cfg)
        res_range = range_resolution(point.cfg)
        for e, name in enumerate(spec.estimators):
            fail = failed[point.index, e]
            # A failed trial counts as a miss with the error clamped to one
            # full resolution span.
            err_sin = np.where(
                fail, res_sin, sin_hat[point.index, e] - true_sin[point.index]
            )
            err_range = np.where(
                fail, res_range, range_hat[point.index, e] - true_range[point.index]
            )
            sin_hits = np.abs(err_sin) < res_sin / 2.0
            range_hits = np.abs(err_range) < res_range / 2.0
            ser_vals = ser[point.index, e]
            has_ser = name.startswith("dd_") and not np.all(np.isnan(ser_vals))
            records.append(
                MetricsRecord(
                    experiment=spec.name,
                    sweep_param=spec.sweep_param,
                    sweep_value=point.sweep_value,
                    snr_db=point.snr_db,
                    estimator=name,
                    n_trials=spec.n_trials,
                    hitrate_aoa=hit_rate(err_sin, res_sin),
                    rmse_sin_aoa=rmse(err_sin),
                    hitrate_range=hit_rate(err_range, res_range),
                    rmse_range_lambda=rmse(err_range),
                    ser=float(np.nanmean(ser_vals)) if has_ser else None,
                    rmse_sin_aoa_hits=rmse(err_sin[sin_hits]) if sin_hits.any() else math.nan,
                    rmse_range_lambda_hits=(
                        rmse(err_range[range_hits]) if range_hits.any() else math.nan
                    ),
                    n_failures=int(np.count_nonzero(fail)),
                )
            )
            if return_trials:
                for t in range(spec.n_trials):
                    trial_rows.append(
                        {
                            "experiment": spec.name,
                            "sweep_param": spec.sweep_param,
                            "sweep_value": point.sweep_value,
                            "snr_db": point.snr_db,
                            "estimator": name,
                            "trial": t,
                            "true_range_lambda": true_range[point.index, t],
                            "true_sin_aoa": true_sin[point.index, t],
                            "range_hat": range_hat[point.index, e, t],
                            "sin_aoa_hat": sin_hat[point.index, e, t],
                            "err_range_lambda": err_range[t],
                            "err_sin_aoa": err_sin[t],
                            "ser": ser_vals[t],
                            "failed": bool(fail[t]),
                        }
                    )
    if return_trials:
        return records, trial_rows
    return records


def _fmt(value: float) -> str:
    return "%.9g" % value


def records_to_csv(records: Iterable[MetricsRecord]) -> str:
    """Render records in the stable CSV schema (floats at 9 significant digits)."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                (
                    r.experiment,
                    r.sweep_param,
                    _fmt(r.sweep_value),
                    _fmt(r.snr_db),
                    r.estimator,
                    str(r.n_trials),
                    _fmt(r.hitrate_aoa),
                    _fmt(r.rmse_sin_aoa),
                    _fmt(r.hitrate_range),
                    _fmt(r.rmse_range_lambda),
                    "" if r.ser is None else _fmt(r.ser),
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_csv(records: Iterable[MetricsRecord], path) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(records_to_csv(records))


def trials_to_csv(rows: Iterable[dict]) -> str:
    lines = [TRIALS_CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                (
                    row["experiment"],
                    row["sweep_param"],
                    _fmt(row["sweep_value"]),
                    _fmt(row["snr_db"]),
                    row["estimator"],
                    str(row["trial"]),
                    _fmt(row["true_range_lambda"]),
                    _fmt(row["true_sin_aoa"]),
                    _fmt(row["range_hat"]),
                    _fmt(row["sin_aoa_hat"]),
                    _fmt(row["err_range_lambda"]),
                    _fmt(row["err_sin_aoa"]),
                    "" if math.isnan(row["ser"]) else _fmt(row["ser"]),
                    "1" if row["failed"] else "0",
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_trials_csv(rows: Iterable[dict], path) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(trials_to_csv(rows))


def print_progress(done: int, total: int, stream=sys.stderr) -> None:
    """Minimal textual counter for long sweeps."""
    stream.write(f"\r{done}/{total} blocks")
    stream.flush()
    if done == total:
        stream.write("\n")
