"""Range/AoA estimators built on pilot combining and projection metrics.

Four estimators share one pipeline (coarse FFT grid search, then bounded
direction-set refinement of the explicit metric):

* ``jpudl``      -- joint pilot + unknown-data estimator. The unknown data
  symbols and the channel coefficient are nuisance parameters eliminated in
  closed form, which concentrates the likelihood into the energy of the
  observations projected on candidate steering directions. The data part is
  constellation-agnostic and contributes AoA information only.
* ``pilot_only`` -- drops the data term everywhere.
* ``bound``      -- treats the true data symbols as extra pilots (an oracle
  upper bound on achievable performance).
* ``dd_lmmse`` / ``dd_zf`` -- decision-directed: estimate the channel from the
  pilots, decode the data symbols, then run ``bound`` with the decisions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .constellation import ConstellationKind, hard_decide_array
from .model import SystemConfig, max_unambiguous_range
from .numerics import GridSpec, MetricSurface, dft_forward_2d, grid_axes, powell_minimize
from .simulator import Observations

logger = logging.getLogger(__name__)

ESTIMATOR_NAMES = ("jpudl", "pilot_only", "bound", "dd_lmmse", "dd_zf")

# Keep refined sin(theta) strictly inside (-1, 1) and range strictly below the
# unambiguous span, as required of a valid estimate.
_EDGE_MARGIN = 1e-12


@dataclass(frozen=True)
class CombinedPilot:
    """Per-cell zero-forcing combine of the known symbols.

    ``y_comb[n, q]`` is the pilot observations of cell (n, q) projected on the
    known symbol vector of subcarrier q and normalized by its energy; for a
    noiseless input this is exactly the channel matrix. ``weight`` is the
    number of combined symbols, i.e. the coherent-integration weight of the
    pilot term in the metric.
    """

    y_comb: np.ndarray  # (N, Q)
    weight: float


@dataclass(frozen=True)
class DataCovariance:
    """Spatial covariance of the data observations, summed over symbols and subcarriers."""

    matrix: np.ndarray  # (N, N) Hermitian PSD

    @classmethod
    def from_tensor(cls, y_data: np.ndarray) -> "DataCovariance":
        d, n, q = y_data.shape
        z = y_data.transpose(1, 0, 2).reshape(n, d * q)
        c = z @ z.conj().T
        return cls(matrix=0.5 * (c + c.conj().T))  # kill round-off asymmetry


@dataclass(frozen=True)
class Estimate:
    """One estimator's output for a single frame."""

    range_hat: float  # carrier wavelengths
    sin_aoa_hat: float
    coarse_bins: tuple[int, int]  # (range bin, aoa bin) of the grid argmax
    metric_at_peak: float
    estimator_name: str

    @property
    def aoa_rad_hat(self) -> float:
        return math.asin(self.sin_aoa_hat)


def pilot_combine(y_pilot: np.ndarray, pilots: np.ndarray) -> CombinedPilot:
    """Zero-forcing combine of the known-symbol observations per (antenna, subcarrier)."""
    p, n, q = y_pilot.shape
    if pilots.shape != (p, q):
        raise ValueError(
            f"symbol matrix shape {pilots.shape} does not match observations "
            f"(expected {(p, q)})"
        )
    energy = np.sum(np.abs(pilots) ** 2, axis=0)  # (Q,)
    if np.any(energy == 0.0):
        bad = np.nonzero(energy == 0.0)[0]
        raise ValueError(f"zero pilot energy on subcarriers {bad.tolist()}")
    y_comb = np.einsum("pq,pnq->nq", pilots.conj(), y_pilot) / energy
    return CombinedPilot(y_comb=y_comb, weight=float(p))


def _as_data_covariance(data) -> DataCovariance | None:
    """Accept None, a DataCovariance, or a raw (D, N, Q) tensor."""
    if data is None:
        return None
    if isinstance(data, DataCovariance):
        return data
    data = np.asarray(data)
    if data.ndim != 3:
        raise ValueError("data observations must be a (D, N, Q) tensor")
    if data.shape[0] == 0:
        return None
    return DataCovariance.from_tensor(data)


def _make_metric(pc: CombinedPilot, data: DataCovariance | None, cfg: SystemConfig):
    """Closure evaluating the concentrated localization metric at (R, sin_theta).

    metric = weight * |v^H y|^2 / (N*Q) + a^H C a / N, where v is the Kronecker
    steering vector of (R, theta), y the vectorized combined pilots, and C the
    data covariance. Both terms are the energies of the observations after
    projection on the candidate steering direction.
    """
    n = cfg.n_antennas
    q = cfg.n_subcarriers
    n_idx = np.arange(n)
    q_idx = np.arange(q)
    coeff_r = 2j * math.pi * cfg.subcarrier_spacing / cfg.carrier_freq
    coeff_a = 2j * math.pi * cfg.antenna_spacing
    y = pc.y_comb
    w = pc.weight
    c_mat = None if data is None else data.matrix

    def metric(range_lambda: float, sin_aoa: float) -> float:
        # conj(a) and conj(b) folded into positive exponents
        a_conj = np.exp((coeff_a * sin_aoa) * n_idx)
        b_conj = np.exp((coeff_r * range_lambda) * q_idx)
        inner = a_conj @ (y @ b_conj)  # = v(R, theta)^H vec(y_comb)
        value = w * (inner.real * inner.real + inner.imag * inner.imag) / (n * q)
        if c_mat is not None:
            value += (a_conj @ (c_mat @ a_conj.conj())).real / n
        return value

    return metric


def nuisance_gamma_hat(
    pc: CombinedPilot, range_lambda: float, sin_aoa: float, cfg: SystemConfig
) -> complex:
    """Closed-form channel-coefficient estimate at a candidate (R, sin_theta).

    Least-squares fit of gamma in y = gamma * v: v^H y / ||v||^2 with
    ||v||^2 = N*Q.
    """
    n = cfg.n_antennas
    q = cfg.n_subcarriers
    a_conj = np.exp((2j * math.pi * cfg.antenna_spacing * sin_aoa) * np.arange(n))
    b_conj = np.exp(
        (2j * math.pi * cfg.subcarrier_spacing / cfg.carrier_freq * range_lambda)
        * np.arange(q)
    )
    return complex(a_conj @ (pc.y_comb @ b_conj) / (n * q))


def metric_direct(
    pc: CombinedPilot,
    data,
    range_lambda: float,
    sin_aoa: float,
    cfg: SystemConfig,
) -> float:
    """Concentrated metric at one candidate point (no grid).

    ``data`` may be None (pilot-only), a DataCovariance, or the raw (D, N, Q)
    data tensor.
    """
    return _make_metric(pc, _as_data_covariance(data), cfg)(range_lambda, sin_aoa)


def _data_spectrum(cov: DataCovariance, n_bins: int) -> np.ndarray:
    """AoA spectrum of the data term on the padded grid, via covariance lag sums.

    Summing |DFT of each conjugated antenna snapshot|^2 over all symbols and
    subcarriers equals the DFT of the circularly folded covariance diagonal
    sums r[tau] = sum_n C[n+tau, n]; one length-M FFT replaces D*Q of them.
    """
    n = cov.matrix.shape[0]
    lags = np.array([np.trace(cov.matrix, offset=-tau) for tau in range(n)])
    folded = np.zeros(n_bins, dtype=complex)
    folded[0] += lags[0].conj()
    for tau in range(1, n):
        folded[tau % n_bins] += lags[tau].conj()
        folded[-tau % n_bins] += lags[tau]
    return np.fft.fft(folded).real


def jpudl_coarse(
    pc: CombinedPilot, data, cfg: SystemConfig, grid: GridSpec
) -> tuple[MetricSurface, tuple[int, int]]:
    """Evaluate the metric on the zero-padded DFT grid and locate its argmax.

    The pilot term is one 2-D transform of the conjugate-transposed combined
    pilots (subcarrier axis padded to the range grid, antenna axis to the AoA
    grid); the data term is an AoA-only spectrum added to every range row.
    Argmax ties break toward the smallest (range bin, aoa bin) pair; bins whose
    |sin(theta)| exceeds 1 (possible for spacing below half a wavelength) are
    excluded from the argmax but kept in the surface.
    """
    cov = _as_data_covariance(data)
    n = cfg.n_antennas
    q = cfg.n_subcarriers
    m_r = grid.n_range_bins(cfg)
    m_a = grid.n_aoa_bins(cfg)
    range_bins, sin_bins = grid_axes(cfg, grid)

    spectrum = dft_forward_2d(pc.y_comb.conj().T, m_r, m_a)[: len(range_bins), :]
    values = (pc.weight / (n * q)) * np.abs(spectrum) ** 2
    if cov is not None:
        values = values + np.maximum(_data_spectrum(cov, m_a), 0.0)[None, :] / n

    surface = MetricSurface(
        values=values,
        range_bins_lambda=range_bins,
        sin_aoa_bins=sin_bins,
        range_cell_lambda=(cfg.carrier_freq / cfg.subcarrier_spacing) / m_r,
        sin_aoa_cell=1.0 / (cfg.antenna_spacing * m_a),
    )
    physical = np.abs(sin_bins) <= 1.0
    masked = np.where(physical[None, :], values, -1.0)
    k_r, k_a = np.unravel_index(int(np.argmax(masked)), values.shape)
    return surface, (int(k_r), int(k_a))


def _refine(
    pc: CombinedPilot,
    data: DataCovariance | None,
    cfg: SystemConfig,
    surface: MetricSurface,
    bins: tuple[int, int],
    name: str,
) -> Estimate:
    """Polish the coarse argmax inside +-1 grid cell with Powell's method."""
    k_r, k_a = bins
    r0 = float(surface.range_bins_lambda[k_r])
    s0 = float(surface.sin_aoa_bins[k_a])
    r_cell = surface.range_cell_lambda
    s_cell = surface.sin_aoa_cell
    r_max = max_unambiguous_range(cfg)
    bounds = [
        (max(0.0, r0 - r_cell), min(r_max * (1.0 - _EDGE_MARGIN), r0 + r_cell)),
        (max(-1.0 + _EDGE_MARGIN, s0 - s_cell), min(1.0 - _EDGE_MARGIN, s0 + s_cell)),
    ]
    metric = _make_metric(pc, data, cfg)
    peak0 = metric(r0, s0)

    def objective(point: np.ndarray) -> float:
        return -metric(point[0], point[1])

    # Absolute-decrease tolerance scaled to the metric's magnitude.
    tol = 1e-9 * max(peak0, 1.0)
    best, neg_value = powell_minimize(objective, (r0, s0), bounds, tol=tol)
    return Estimate(
        range_hat=float(best[0]),
        sin_aoa_hat=float(best[1]),
        coarse_bins=(k_r, k_a),
        metric_at_peak=-neg_value,
        estimator_name=name,
    )


def estimate_jpudl(
    obs: Observations,
    pilots: np.ndarray,
    cfg: SystemConfig,
    grid: GridSpec = GridSpec(),
) -> Estimate:
    """Joint pilot + unknown-data estimate. Never touches the data symbol values."""
    pc = pilot_combine(obs.y_pilot, pilots)
    data = _as_data_covariance(obs.y_data)
    surface, bins = jpudl_coarse(pc, data, cfg, grid)
    return _refine(pc, data, cfg, surface, bins, "jpudl")


def estimate_pilot_only(
    obs: Observations,
    pilots: np.ndarray,
    cfg: SystemConfig,
    grid: GridSpec = GridSpec(),
) -> Estimate:
    """Pilot-only baseline: the same pipeline with the data term dropped."""
    pc = pilot_combine(obs.y_pilot, pilots)
    surface, bins = jpudl_coarse(pc, None, cfg, grid)
    return _refine(pc, None, cfg, surface, bins, "pilot_only")


def estimate_bound(
    obs: Observations,
    pilots: np.ndarray,
    data_symbols: np.ndarray,
    cfg: SystemConfig,
    grid: GridSpec = GridSpec(),
    name: str = "bound",
) -> Estimate:
    """Known-data bound: combine all symbols as pilots, then pilot-only pipeline."""
    symbols = np.vstack([pilots, data_symbols])
    y_all = np.concatenate([obs.y_pilot, obs.y_data], axis=0)
    pc = pilot_combine(y_all, symbols)
    surface, bins = jpudl_coarse(pc, None, cfg, grid)
    return _refine(pc, None, cfg, surface, bins, name)


def lmmse_channel(
    y_pilot: np.ndarray, pilots: np.ndarray, noise_var: float, cfg: SystemConfig
) -> np.ndarray:
    """Per-cell Bayesian channel estimate with a unit-power channel prior.

    The zero-forcing combine of subcarrier q has noise variance
    noise_var / E_q, so the scalar estimator shrinks it by E_q / (E_q +
    noise_var); E_q = P for unit-energy pilots. noise_var = 0 reduces to the
    plain combine.
    """
    energy = np.sum(np.abs(pilots) ** 2, axis=0)  # (Q,)
    combined = pilot_combine(y_pilot, pilots).y_comb
    return combined * (energy / (energy + noise_var))


def lmmse_decode(
    y_data: np.ndarray,
    h_hat: np.ndarray,
    noise_var: float,
    cfg: SystemConfig,
    kind: ConstellationKind,
) -> tuple[np.ndarray, np.ndarray]:
    """Combine data observations across antennas and hard-decide each symbol.

    soft[d, q] = h_q^H y_{d,q} / (||h_q||^2 + noise_var), the regularized
    maximum-ratio combine through the estimated channel column; noise_var = 0
    gives the zero-forcing variant. Returns (decisions, soft values). All-zero
    channel columns yield soft 0 and the tie-break decision; they are logged,
    never fatal.
    """
    col_energy = np.sum(np.abs(h_hat) ** 2, axis=0)  # (Q,)
    denom = col_energy + noise_var
    degenerate = denom == 0.0
    if np.any(degenerate):
        logger.warning(
            "decision-directed decode: %d subcarriers have zero channel energy",
            int(np.count_nonzero(degenerate)),
        )
        denom = np.where(degenerate, 1.0, denom)
    soft = np.einsum("nq,dnq->dq", h_hat.conj(), y_data) / denom
    decided = hard_decide_array(soft, kind) if soft.size else soft.copy()
    return decided, soft


def estimate_dd(
    obs: Observations,
    pilots: np.ndarray,
    cfg: SystemConfig,
    grid: GridSpec = GridSpec(),
    kind: ConstellationKind = ConstellationKind.QAM16,
    variant: str = "lmmse",
    return_decisions: bool = False,
):
    """Decision-directed estimate: channel estimate, symbol decode, then bound.

    ``variant="lmmse"`` regularizes both stages with the true noise variance;
    ``variant="zf"`` uses the unregularized forms (plain combine and
    maximum-ratio divide). With ``return_decisions=True`` also returns the
    decided symbol matrix for error-rate accounting.
    """
    if variant not in ("lmmse", "zf"):
        raise ValueError(f"unknown decision-directed variant {variant!r}")
    noise_var = obs.noise_var if variant == "lmmse" else 0.0
    h_hat = lmmse_channel(obs.y_pilot, pilots, noise_var, cfg)
    decided, _ = lmmse_decode(obs.y_data, h_hat, noise_var, cfg, kind)
    estimate = estimate_bound(obs, pilots, decided, cfg, grid, name=f"dd_{variant}")
    if return_decisions:
        return estimate, decided
    return estimate
