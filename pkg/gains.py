# -*- coding: utf-8 -*-
"""
SIR Gains
- G0 = MISR_PPP / MISR from simulated ISR samples
- finite-threshold gains G_b(theta), defined by M_b(theta') = M_b^PPP(theta)
- effective gain of a multi-tier network with a common path-loss exponent
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import bisect

from analytic import HcnSpec, mb_ppp
from errors import ConfigError, GainRangeError
from monte_carlo import RealizationBatch, simulate_realizations
from point_processes import ProcessKind, Window
from sir_core import TierSpec, misr_ppp

logger = logging.getLogger(__name__)

DB_PER_NEPER = 10.0 / math.log(10.0)

GB_SPAN_DB = 6.0
GB_STEP_DB = 0.25
GB_XTOL_DB = 1e-3


@dataclass(frozen=True)
class GainEstimate:
    value_db: float
    value_linear: float
    std_error_db: float
    n_realizations: int

    def __post_init__(self):
        if not self.value_linear > 0:
            raise ConfigError("gain", f"linear gain must be > 0, got {self.value_linear}")
        if self.std_error_db < 0:
            raise ConfigError("std_error_db", f"must be >= 0, got {self.std_error_db}")

    @classmethod
    def from_linear(cls, value: float, std_error_db: float = 0.0, n_realizations: int = 0) -> "GainEstimate":
        return cls(10.0 * math.log10(value), value, std_error_db, n_realizations)

    @classmethod
    def from_db(cls, value_db: float, std_error_db: float = 0.0, n_realizations: int = 0) -> "GainEstimate":
        return cls(value_db, 10.0 ** (value_db / 10.0), std_error_db, n_realizations)


@dataclass(frozen=True)
class MisrEstimate:
    mean: float
    std_error: float
    n: int
    resampled: int


def _single_tier(kind: ProcessKind, alpha: float, density: Optional[float]) -> TierSpec:
    intrinsic = kind.intrinsic_density
    if intrinsic is None:
        intrinsic = 0.1 if density is None else density
    return TierSpec(kind, intrinsic, 1.0, alpha)


def _check_n(n: int):
    if n < 1:
        raise ConfigError("n", f"realization count must be >= 1, got {n}")


# ==================== ASYMPTOTIC GAIN ====================

def estimate_misr(kind: ProcessKind, alpha: float, window: Window, n: int, seed: int,
                  density: Optional[float] = None, workers: Optional[int] = None) -> MisrEstimate:
    """Sample-mean ISR of a single tier; `density` only matters for the PPP."""
    _check_n(n)
    tier = _single_tier(kind, alpha, density)
    batch = simulate_realizations([tier], window, n, seed, workers=workers)
    mean = float(batch.isr.mean())
    std_error = float(batch.isr.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    logger.info("MISR(%s, alpha=%g) = %.5f +- %.5f over %d realizations", kind.name, alpha, mean, std_error, n)
    return MisrEstimate(mean, std_error, n, batch.resampled)


def estimate_g0(kind: ProcessKind, alpha: float, window: Window, n: int, seed: int,
                density: Optional[float] = None, workers: Optional[int] = None) -> GainEstimate:
    """G0 = (2 / (alpha - 2)) / MISR, standard error by the delta method."""
    misr = estimate_misr(kind, alpha, window, n, seed, density, workers)
    if not misr.mean > 0:
        raise ConfigError("n", "MISR estimate is zero; use more realizations or a larger window")
    g0 = misr_ppp(alpha) / misr.mean
    se_db = DB_PER_NEPER * misr.std_error / misr.mean
    return GainEstimate.from_linear(g0, se_db, n)


# ==================== FINITE-THRESHOLD GAIN ====================

def _empirical_moments(batch: RealizationBatch) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of P_s^b, shape (n_b, n_theta)."""
    mean = batch.moment_sums / batch.n
    ps = batch.success.astype(np.float64)
    se = np.array([(ps ** b).std(axis=0, ddof=1) for b in batch.b_values]) / math.sqrt(batch.n)
    return mean, se


def _solve_gain(grid_db: np.ndarray, moments: np.ndarray, stderr: np.ndarray,
                theta_db: float, b: float, delta: float, n: int) -> GainEstimate:
    target = mb_ppp(b, delta, 10.0 ** (theta_db / 10.0)).real
    # M_b decreases in theta; remove Monte Carlo wiggles before interpolating
    regular = np.minimum.accumulate(moments)
    low, high = float(regular[-1]), float(regular[0])
    if not low <= target <= high:
        raise GainRangeError(
            f"M_{b:g}^PPP({theta_db:g} dB) = {target:.6g} not reached on "
            f"[{grid_db[0]:g}, {grid_db[-1]:g}] dB", (low, high))

    curve = PchipInterpolator(grid_db, regular)
    if target == high:
        root = float(grid_db[0])
    elif target == low:
        root = float(grid_db[-1])
    else:
        root = bisect(lambda t: float(curve(t)) - target, grid_db[0], grid_db[-1], xtol=GB_XTOL_DB)

    slope = abs(float(curve.derivative()(root)))
    se_m = float(np.interp(root, grid_db, stderr))
    se_db = se_m / slope if slope > 0 else math.inf
    return GainEstimate.from_db(root - theta_db, se_db, n)


def _local_grid(theta_dbs: Sequence[float], span_db: float) -> np.ndarray:
    lo = min(theta_dbs) - span_db
    hi = max(theta_dbs) + span_db
    steps = int(round((hi - lo) / GB_STEP_DB))
    return lo + GB_STEP_DB * np.arange(steps + 1)


def estimate_gb_curve(theta_dbs: Sequence[float], b_values: Sequence[float], kind: ProcessKind,
                      alpha: float, window: Window, n: int, seed: int, density: Optional[float] = None,
                      span_db: float = GB_SPAN_DB,
                      workers: Optional[int] = None) -> List[Tuple[float, float, GainEstimate]]:
    """G_b(theta) for every (theta, b) pair from one shared simulation."""
    _check_n(n)
    if not len(theta_dbs) or not len(b_values):
        raise ConfigError("theta_grid", "need at least one threshold and one b")
    if any(b <= 0 for b in b_values):
        raise ConfigError("b", "moment orders must be > 0")

    tier = _single_tier(kind, alpha, density)
    grid_db = _local_grid(theta_dbs, span_db)
    batch = simulate_realizations([tier], window, n, seed, thetas=10.0 ** (grid_db / 10.0),
                                  b_values=b_values, workers=workers)
    mean, se = _empirical_moments(batch)

    rows = []
    for j, b in enumerate(b_values):
        for theta_db in theta_dbs:
            gain = _solve_gain(grid_db, mean[j], se[j], theta_db, b, tier.delta, n)
            logger.debug("G_%g(%g dB) = %.4f dB", b, theta_db, gain.value_db)
            rows.append((float(theta_db), float(b), gain))
    return rows


def estimate_gb(theta: float, b: float, kind: ProcessKind, alpha: float, window: Window, n: int,
                seed: int, density: Optional[float] = None, span_db: float = GB_SPAN_DB,
                workers: Optional[int] = None) -> GainEstimate:
    """G_b(theta) = theta' / theta; theta is linear."""
    if not theta > 0:
        raise ConfigError("theta", f"must be > 0, got {theta}")
    rows = estimate_gb_curve([10.0 * math.log10(theta)], [b], kind, alpha, window, n, seed,
                             density, span_db, workers)
    return rows[0][2]


# ==================== EFFECTIVE GAIN ====================

def tier_weights(tiers: Sequence[TierSpec]) -> np.ndarray:
    """w_k = lambda_k P_k^delta / sum_i lambda_i P_i^delta; gains not needed."""
    if not tiers:
        raise ConfigError("tiers", "at least one tier is required")
    if any(not math.isclose(t.alpha, tiers[0].alpha, rel_tol=1e-12) for t in tiers):
        raise ConfigError("alpha", "tier weights need a common path-loss exponent")
    raw = np.array([t.density * t.power ** t.delta for t in tiers])
    return raw / raw.sum()


def effective_gain(tiers: Sequence[TierSpec]) -> GainEstimate:
    """G_eff = 1 + sum_k w_k^2 (G_k - 1)."""
    w = tier_weights(tiers)
    spec = HcnSpec.from_tiers(tiers)
    gains = np.array([t.gain for t in spec.tiers])
    return GainEstimate.from_linear(float(1.0 + np.sum(w * w * (gains - 1.0))))
