# -*- coding: utf-8 -*-
"""
Meta Distribution Simulation
- empirical meta distribution and moments of P_s for any tier mix
- worst-case success probability of the triangular lattice (user at a
  Voronoi vertex) and the critical threshold below which every user meets
  a reliability target
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from analytic import MetaCurve
from errors import ConfigError, TruncationError, UnsupportedProcessError
from monte_carlo import simulate_realizations
from point_processes import SQRT3, PerturbedTriangularLattice, TriangularLattice, Window
from sir_core import TierSpec

logger = logging.getLogger(__name__)

DEFAULT_N = 500_000
TAIL_TOL = 1e-8
MAX_RADIUS_FACTOR = 5000.0
CRITICAL_XTOL_DB = 1e-3


# ==================== EMPIRICAL META DISTRIBUTION ====================

@dataclass
class EmpiricalMeta:
    """
    P_s samples per realization (float32, columns follow theta_db) and the
    float64 sums of P_s^b they were drawn with.
    """

    theta_db: np.ndarray
    xs: np.ndarray
    samples: np.ndarray
    b_values: np.ndarray
    moment_sums: np.ndarray
    n_realizations: int
    seed: int
    resampled: int = 0

    def ccdf(self) -> np.ndarray:
        """Fraction of realizations with P_s > x, shape (n_theta, n_x)."""
        out = np.empty((self.samples.shape[1], len(self.xs)))
        for i in range(self.samples.shape[1]):
            column = np.sort(self.samples[:, i].astype(np.float64))
            out[i] = 1.0 - np.searchsorted(column, self.xs, side="right") / self.n_realizations
        return out

    def ccdf_stderr(self) -> np.ndarray:
        p = self.ccdf()
        return np.sqrt(p * (1.0 - p) / self.n_realizations)

    def confidence_halfwidth(self, z: float = 1.96) -> np.ndarray:
        return z * self.ccdf_stderr()

    def moment(self, b: float) -> np.ndarray:
        """Empirical M_b over the theta grid."""
        hit = np.flatnonzero(np.isclose(self.b_values, b))
        if hit.size:
            return self.moment_sums[hit[0]] / self.n_realizations
        return np.mean(self.samples.astype(np.float64) ** b, axis=0)

    def moment_stderr(self, b: float) -> np.ndarray:
        if self.n_realizations < 2:
            return np.zeros(self.samples.shape[1])
        powers = self.samples.astype(np.float64) ** b
        return powers.std(axis=0, ddof=1) / np.sqrt(self.n_realizations)

    @property
    def m1(self) -> np.ndarray:
        return self.moment(1.0)

    @property
    def m2(self) -> np.ndarray:
        return self.moment(2.0)

    def to_meta_curve(self) -> MetaCurve:
        return MetaCurve(np.asarray(self.theta_db, dtype=float), np.asarray(self.xs, dtype=float),
                         self.ccdf(), "empirical")


def simulate_meta(tiers: Sequence[TierSpec], window: Window, theta_db: Sequence[float],
                  xs: Sequence[float], n: int = DEFAULT_N, seed: int = 0,
                  b_values: Sequence[float] = (), workers: Optional[int] = None) -> EmpiricalMeta:
    """theta_db may hold -inf for theta = 0."""
    theta_db = np.asarray(theta_db, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if theta_db.size == 0:
        raise ConfigError("theta_grid", "empty threshold grid")
    if xs.size == 0:
        raise ConfigError("x_grid", "empty reliability grid")
    if np.any((xs < 0) | (xs > 1)):
        raise ConfigError("x_grid", "reliability thresholds must lie in [0, 1]")

    orders = np.unique(np.concatenate(([1.0, 2.0], np.asarray(b_values, dtype=float))))
    batch = simulate_realizations(tiers, window, n, seed, thetas=10.0 ** (theta_db / 10.0),
                                  b_values=orders, workers=workers)
    return EmpiricalMeta(theta_db, xs, batch.success, orders, batch.moment_sums, batch.n, seed,
                         batch.resampled)


# ==================== LATTICE WORST CASE ====================

@dataclass(frozen=True)
class CriticalThreshold:
    x: float
    theta_c_db: float
    eta: float
    alpha: float

    @property
    def theta_c(self) -> float:
        return 10.0 ** (self.theta_c_db / 10.0)


def _check_lattice(lattice) -> float:
    if isinstance(lattice, PerturbedTriangularLattice):
        raise UnsupportedProcessError("worst-case analysis is only defined for the unperturbed lattice")
    if not isinstance(lattice, TriangularLattice):
        raise UnsupportedProcessError(f"worst-case analysis needs a triangular lattice, got {lattice.name!r}")
    return lattice.eta


def _tail_scale(eta: float, alpha: float, theta: float) -> float:
    """theta d^alpha lambda 2 pi for the vertex distance d and the lattice density."""
    d = eta / SQRT3
    density = 2.0 / (SQRT3 * eta ** 2)
    return theta * d ** alpha * density * 2.0 * math.pi


def continuum_tail(eta: float, alpha: float, theta: float, radius: float) -> float:
    """Lattice points beyond `radius` replaced by their mean density, log1p(u) by u."""
    return _tail_scale(eta, alpha, theta) * radius ** (2.0 - alpha) / (alpha - 2.0)


def tail_bound(eta: float, alpha: float, theta: float, radius: float) -> float:
    """
    Bound on |true tail - continuum_tail| in log P_s. The Voronoi cells of
    the points beyond `radius` cover an annulus no wider than eta on either
    side of it; the second term is the u^2 / 2 left out by log1p(u) <= u.
    """
    if radius <= eta:
        return math.inf
    scale = _tail_scale(eta, alpha, theta)
    inner = radius - eta
    boundary = scale * eta * inner ** (1.0 - alpha)
    curvature = scale * theta * (eta / SQRT3) ** alpha * inner ** (2.0 - 2.0 * alpha) / (4.0 * (alpha - 1.0))
    return boundary + curvature


def truncation_radius(eta: float, alpha: float, theta: float, tol: float = TAIL_TOL) -> float:
    """Smallest radius (at least 10 eta) whose tail bound is below tol, each term below tol / 2."""
    scale = _tail_scale(eta, alpha, theta)
    curvature_scale = scale * theta * (eta / SQRT3) ** alpha / (4.0 * (alpha - 1.0))
    half = 0.5 * tol
    log_inner = max(math.log(scale * eta / half) / (alpha - 1.0),
                    math.log(curvature_scale / half) / (2.0 * alpha - 2.0)) + math.log(1.001)
    cap = MAX_RADIUS_FACTOR * eta
    if log_inner > math.log(cap - eta):
        raise TruncationError(f"lattice sum needs radius above {MAX_RADIUS_FACTOR:g} eta",
                              tail_bound(eta, alpha, theta, cap))
    return max(10.0 * eta, eta + math.exp(log_inner))


def _vertex_log_sum(eta: float, alpha: float, theta: float, radius: float) -> float:
    """sum over non-serving lattice points of log(1 + theta (d / |x|)^alpha), row by row."""
    vx, vy = eta / 2.0, eta / (2.0 * SQRT3)
    d2 = eta * eta / 3.0
    row = eta * SQRT3 / 2.0
    total = 0.0
    for j in range(math.floor((-radius + vy) / row), math.ceil((radius + vy) / row) + 1):
        y = row * j - vy
        if abs(y) > radius:
            continue
        half = math.sqrt(radius * radius - y * y)
        base = eta * j / 2.0 - vx
        i = np.arange(math.ceil((-half - base) / eta), math.floor((half - base) / eta) + 1)
        if j == 0:
            i = i[i != 0]  # serving point at lattice index (0, 0)
        x = eta * i + base
        ratio = (d2 / (x * x + y * y)) ** (alpha / 2.0)
        total += float(np.log1p(theta * ratio).sum())
    return total


def _vertex_log_ps(eta: float, alpha: float, theta: float, radius: float) -> float:
    return _vertex_log_sum(eta, alpha, theta, radius) + continuum_tail(eta, alpha, theta, radius)


def worst_case_ps(lattice: TriangularLattice, alpha: float, theta: float,
                  truncation: Optional[float] = None) -> float:
    """
    P_s(theta) of a user at a Voronoi vertex, equidistant (eta / sqrt 3) from
    three lattice points, one of which serves. Points beyond `truncation`
    enter through their continuum limit; the radius defaults to the smallest
    one that keeps the error of that limit below 1e-8 in log P_s.
    """
    eta = _check_lattice(lattice)
    if not alpha > 2:
        raise ConfigError("alpha", f"path-loss exponent must be > 2, got {alpha}")
    if theta < 0:
        raise ConfigError("theta", f"must be >= 0, got {theta}")
    if theta == 0:
        return 1.0

    if truncation is None:
        truncation = truncation_radius(eta, alpha, theta)
    else:
        bound = tail_bound(eta, alpha, theta, truncation)
        if bound > TAIL_TOL:
            raise TruncationError(f"truncation radius {truncation:g} too small", bound)
    return math.exp(-_vertex_log_ps(eta, alpha, theta, truncation))


def critical_theta(lattice: TriangularLattice, alpha: float, x: float) -> CriticalThreshold:
    """theta_c(x): worst-case P_s(theta_c) = x, bisected in dB."""
    eta = _check_lattice(lattice)
    if not 0.0 < x < 1.0:
        raise ConfigError("x", f"reliability must lie in (0, 1), got {x}")
    if not alpha > 2:
        raise ConfigError("alpha", f"path-loss exponent must be > 2, got {alpha}")

    # the two other nearest points alone give P_s <= (1 + theta)^-2
    hi = 1.0 / math.sqrt(x) - 1.0
    # d(-log P_s) / d(log theta) >= -log(x) / (1 + theta) near the root, so an error
    # tol in log P_s moves theta_c by at most a tenth of the bisection tolerance
    tol = 0.1 * CRITICAL_XTOL_DB * math.log(10.0) / 10.0 * -math.log(x) / (1.0 + hi)
    radius = truncation_radius(eta, alpha, hi, tol=tol)
    log_x = math.log(x)

    def excess(theta_db: float) -> float:
        return -_vertex_log_ps(eta, alpha, 10.0 ** (theta_db / 10.0), radius) - log_x

    hi_db = 10.0 * math.log10(hi)
    lo_db = hi_db - 10.0
    for _ in range(30):
        if excess(lo_db) > 0:
            break
        lo_db -= 10.0
    else:
        raise ConfigError("x", f"no threshold reaches reliability {x}")

    root = bisect(excess, lo_db, hi_db, xtol=CRITICAL_XTOL_DB)
    logger.info("theta_c(%g) = %.4f dB (alpha=%g, radius %.0f eta)", x, root, alpha, radius / eta)
    return CriticalThreshold(float(x), float(root), eta, float(alpha))


def critical_curve(lattice: TriangularLattice, alpha: float, xs: Sequence[float]) -> List[CriticalThreshold]:
    return [critical_theta(lattice, alpha, float(x)) for x in xs]
