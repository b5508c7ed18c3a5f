# -*- coding: utf-8 -*-
"""
Analytic Moments and Meta Distributions
- F(b, delta, theta) = 2F1(b, -delta; 1 - delta; -theta) for complex b
- b-th moments for the PPP / HIP model and the per-tier approximation for
  general multi-tier networks
- meta distribution by Gil-Pelaez inversion or by a beta fit of two moments
- horizontal shifting of meta distribution curves on the dB axis

F is computed from the integral identity
    F(b, delta, theta) - 1 = int_1^inf (1 - (1 + theta t^(-1/delta))^(-b)) dt,
rewritten with y = theta t^(-1/delta), one integration by parts and
u = log(1 + y) as
    F = (1 + theta)^(-b) + b theta^delta int_0^log(1+theta) (e^u - 1)^(-delta) e^(-b u) du.
The principal branch is used throughout: (1 + y)^(-b) = exp(-b log(1 + y)).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.integrate import quad, quad_vec

from errors import ConfigError, GilPelaezError, QuadratureError
from sir_core import TierSpec

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 500
QUAD_FAIL_TOL = 1e-8

# above this phase range the u-integral switches to a Fourier-weighted rule
OSCILLATION_SPLIT = 20.0

# per-tier integrals are truncated where the integrand modulus drops below this
HCN_TRUNCATION = 1e-12

GP_EPSREL = 1e-6
GP_EPSABS = 1e-9
GP_TAIL_TOL = 1e-8
GP_MAX_T = 5000.0
GP_SMALL_T = 1e-6
GP_MAX_PANELS = 20000
CLAMP_TOL = 1e-6

PROVENANCES = ("analytic-gp", "beta", "empirical", "shifted")

MomentFn = Callable[[complex], complex]


def _check_delta(delta: float):
    if not 0.0 < delta < 1.0:
        raise ConfigError("delta", f"must lie in (0, 1), got {delta}")


def _quad(func, a: float, b: float, **kwargs) -> float:
    out = quad(func, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT,
               full_output=1, **kwargs)
    value, abserr = out[0], out[1]
    if len(out) > 3:
        if abserr > QUAD_FAIL_TOL * max(1.0, abs(value)):
            raise QuadratureError(f"integral over [{a:.6g}, {b:.6g}] did not converge: {out[3]}",
                                  residual=abserr)
        logger.debug("quad on [%g, %g] flagged (%s), error %.2e accepted", a, b, out[3], abserr)
    return value


# ==================== HYPERGEOMETRIC F ====================

def _kernel_integral(b: complex, delta: float, upper: float) -> complex:
    """int_0^upper u^-delta phi(u) e^(-j t u) du with phi(u) = (u / expm1(u))^delta e^(-beta u)."""
    beta, t = b.real, b.imag

    def phi(u: float) -> float:
        if u == 0.0:
            return 1.0
        return (u / math.expm1(u)) ** delta * math.exp(-beta * u)

    split = upper
    if abs(t) * upper > OSCILLATION_SPLIT:
        split = min(upper, math.pi / abs(t))

    alg = {"weight": "alg", "wvar": (-delta, 0.0)}
    re = _quad(lambda u: phi(u) * math.cos(t * u), 0.0, split, **alg)
    im = -_quad(lambda u: phi(u) * math.sin(t * u), 0.0, split, **alg) if t else 0.0

    if split < upper:
        omega = abs(t)
        sign = math.copysign(1.0, t)

        def amplitude(u: float) -> float:
            return u ** -delta * phi(u)

        re += _quad(amplitude, split, upper, weight="cos", wvar=omega, maxp1=200)
        im -= sign * _quad(amplitude, split, upper, weight="sin", wvar=omega, maxp1=200)
    return complex(re, im)


def hyp_f(b: complex, delta: float, theta: float) -> complex:
    """F(b, delta, theta) = 2F1(b, -delta; 1 - delta; -theta), any complex b, theta >= 0."""
    _check_delta(delta)
    if theta < 0:
        raise ConfigError("theta", f"must be >= 0, got {theta}")
    b = complex(b)
    if theta == 0.0 or b == 0:
        return 1.0 + 0.0j
    upper = math.log1p(theta)
    return cmath.exp(-b * upper) + b * theta ** delta * _kernel_integral(b, delta, upper)


def hyp_f_series(b: float, delta: float, theta: float, tol: float = 1e-17, max_terms: int = 200000) -> float:
    """Gauss power series of 2F1(b, -delta; 1 - delta; -theta) for real b and 0 <= theta < 1."""
    _check_delta(delta)
    if not 0.0 <= theta < 1.0:
        raise ConfigError("theta", f"series needs 0 <= theta < 1, got {theta}")
    term, total = 1.0, 1.0
    for n in range(max_terms):
        term *= (b + n) * (n - delta) / ((1.0 - delta + n) * (n + 1.0)) * (-theta)
        total += term
        if abs(term) <= tol * abs(total):
            return total
    raise QuadratureError(f"series did not converge in {max_terms} terms", residual=abs(term))


def mb_ppp(b: complex, delta: float, theta: float) -> complex:
    """
    b-th moment of P_s for the Poisson network: 1 / F(b, delta, theta).
    A K-tier network of independent PPPs with a common exponent has the same moments.
    """
    return 1.0 / hyp_f(b, delta, theta)


# ==================== MOMENT GRIDS ====================

@dataclass
class MomentGrid:
    """M_b(theta) for each b (rows) and theta (columns, linear)."""

    b_values: np.ndarray
    thetas: np.ndarray
    values: np.ndarray

    def row(self, b: complex) -> np.ndarray:
        idx = np.flatnonzero(np.isclose(self.b_values, b))
        if idx.size == 0:
            raise KeyError(f"b = {b} not in grid")
        return self.values[idx[0]]


def moment_grid(moment_at: Callable[[complex, float], complex],
                b_values: Sequence[complex], thetas: Sequence[float]) -> MomentGrid:
    b_arr = np.asarray(b_values, dtype=complex)
    th = np.asarray(thetas, dtype=float)
    values = np.array([[moment_at(b, t) for t in th] for b in b_arr], dtype=complex)
    return MomentGrid(b_arr, th, values)


def mb_ppp_grid(b_values: Sequence[complex], delta: float, thetas: Sequence[float]) -> MomentGrid:
    return moment_grid(lambda b, t: mb_ppp(b, delta, t), b_values, thetas)


# ==================== MULTI-TIER NETWORKS ====================

@dataclass(frozen=True)
class HcnSpec:
    """Tiers of a general heterogeneous network, each carrying its gain G_k."""

    tiers: Tuple[TierSpec, ...]

    def __post_init__(self):
        if not self.tiers:
            raise ConfigError("tiers", "at least one tier is required")
        for k, tier in enumerate(self.tiers):
            if tier.gain is None:
                raise ConfigError(f"tiers[{k}].gain_db", "per-tier gain required for analytic HCN modes")

    @classmethod
    def from_tiers(cls, tiers: Sequence[TierSpec]) -> "HcnSpec":
        return cls(tuple(tiers))

    @property
    def same_alpha(self) -> bool:
        return all(math.isclose(t.alpha, self.tiers[0].alpha, rel_tol=1e-12) for t in self.tiers)

    def rho(self, i: int, k: int) -> float:
        """lambda_i pi P_ik^delta_i / (lambda_k pi)^(alpha_k / alpha_i)."""
        ti, tk = self.tiers[i], self.tiers[k]
        p_ik = ti.power / tk.power
        return ti.density * math.pi * p_ik ** ti.delta / (tk.density * math.pi) ** (tk.alpha / ti.alpha)


def _plain_f(spec: HcnSpec, b: complex, theta: float) -> Dict[float, complex]:
    return {d: hyp_f(b, d, theta) for d in {t.delta for t in spec.tiers}}


def _equal_exponent_integral(c: complex, tier: int) -> complex:
    """int_0^inf exp(-c s) ds = 1 / c, finite only for Re c > 0."""
    if c.real <= 0:
        raise QuadratureError(f"tier {tier}: moment diverges (Re c = {c.real:.4g} <= 0)")
    return 1.0 / c


def _truncated_integral(own: complex, terms, tier: int) -> complex:
    """int_0^inf exp(-own s - sum rho s^p F) ds, cut where the modulus falls below HCN_TRUNCATION."""
    def exponent(s: float) -> complex:
        return own * s + sum(rho * s ** p * f for rho, p, f in terms)

    target = -math.log(HCN_TRUNCATION)
    upper = 1.0
    for _ in range(200):
        if exponent(upper).real > target:
            break
        upper *= 2.0
    else:
        raise QuadratureError(f"tier {tier}: integrand does not decay")

    re = _quad(lambda s: cmath.exp(-exponent(s)).real, 0.0, upper)
    im = _quad(lambda s: cmath.exp(-exponent(s)).imag, 0.0, upper)
    return complex(re, im)


def mb_hcn_hat(spec: HcnSpec, b: complex, theta: float, quadrature: bool = False) -> complex:
    """
    Per-tier approximation of the b-th moment:
    sum_k int_0^inf exp(-s F(b, d_k, theta/G_k) - sum_{i != k} rho_ik s^(a_k/a_i) F(b, d_i, theta)) ds.
    With a common exponent each integral is 1 / c; quadrature=True integrates numerically anyway.
    """
    b = complex(b)
    plain = _plain_f(spec, b, theta)
    total = 0.0 + 0.0j
    for k, tier in enumerate(spec.tiers):
        own = hyp_f(b, tier.delta, theta / tier.gain)
        terms = [(spec.rho(i, k), tier.alpha / other.alpha, plain[other.delta])
                 for i, other in enumerate(spec.tiers) if i != k]
        try:
            if not quadrature and all(abs(p - 1.0) < 1e-12 for _, p, _ in terms):
                total += _equal_exponent_integral(own + sum(rho * f for rho, _, f in terms), k)
            else:
                total += _truncated_integral(own, terms, k)
        except QuadratureError as e:
            raise QuadratureError(f"tier {k} ({tier.kind.name}): {e}", residual=e.residual)
    return total


def mb_hcn_same_alpha(spec: HcnSpec, b: complex, theta: float) -> complex:
    """Closed form for a common path-loss exponent."""
    if not spec.same_alpha:
        raise ConfigError("alpha", "closed form needs a common path-loss exponent")
    delta = spec.tiers[0].delta
    plain = hyp_f(b, delta, theta)
    total = 0.0 + 0.0j
    for k, tk in enumerate(spec.tiers):
        others = sum((ti.density / tk.density) * (ti.power / tk.power) ** delta
                     for i, ti in enumerate(spec.tiers) if i != k)
        total += 1.0 / (hyp_f(b, delta, theta / tk.gain) + others * plain)
    return total


# ==================== GIL-PELAEZ ====================

def _truncation_point(moment_fn: MomentFn, tail_tol: float, max_t: float) -> Tuple[float, float]:
    t = 16.0
    while t < max_t:
        bound = abs(moment_fn(1j * t)) / t
        if bound < tail_tol:
            return t, bound
        t *= 2.0
    bound = abs(moment_fn(1j * max_t)) / max_t
    logger.warning("Gil-Pelaez range capped at t = %g, tail bound %.2e", max_t, bound)
    return max_t, bound


def gil_pelaez(moment_fn: MomentFn, x, epsrel: float = GP_EPSREL, max_t: float = GP_MAX_T,
               tail_tol: float = GP_TAIL_TOL, full_output: bool = False):
    """
    ccdf of P_s at reliability x from its moments:
    1/2 + (1/pi) int_0^inf Im(e^(-j t log x) M_jt) / t dt.

    All x are integrated together; the t-range starts in panels one
    oscillation period wide. Returns the clamped value(s), plus the achieved
    error when full_output is set.
    """
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs).ravel()
    if np.any((flat < 0) | (flat > 1)):
        raise ConfigError("x", "reliability thresholds must lie in [0, 1]")

    values = np.where(flat <= 0.0, 1.0, 0.0)
    achieved = 0.0
    interior = (flat > 0.0) & (flat < 1.0)
    if interior.any():
        log_x = np.log(flat[interior])
        upper, tail = _truncation_point(moment_fn, tail_tol, max_t)

        def integrand(t: float) -> np.ndarray:
            tau = max(t, GP_SMALL_T)  # first-order limit near t = 0
            m = moment_fn(1j * tau)
            return np.imag(np.exp(-1j * tau * log_x) * m) / tau

        period = 2.0 * math.pi / np.max(np.abs(log_x))
        n_panels = int(min(GP_MAX_PANELS, max(1, math.ceil(upper / period))))
        points = np.linspace(0.0, upper, n_panels + 1)[1:-1] if n_panels > 1 else None
        res, err, info = quad_vec(integrand, 0.0, upper, epsabs=GP_EPSABS, epsrel=epsrel, norm="max",
                                  points=points, limit=max(10000, 4 * n_panels), full_output=True)
        if not info.success:
            raise GilPelaezError(f"Gil-Pelaez integral did not converge: {info.message}", achieved=err)
        achieved = err / math.pi + tail
        values[interior] = 0.5 + res / math.pi

    low, high = values.min(), values.max()
    if low < -CLAMP_TOL or high > 1.0 + CLAMP_TOL:
        logger.warning("Gil-Pelaez output [%.3e, %.3e] clamped to [0, 1]", low, high)
    elif low < 0.0 or high > 1.0:
        logger.debug("clamping round-off [%.3e, %.3e]", low, high)
    values = np.clip(values, 0.0, 1.0)

    result = float(values[0]) if xs.ndim == 0 else values.reshape(xs.shape)
    return (result, achieved) if full_output else result


# ==================== BETA APPROXIMATION ====================

def beta_approx(m1: float, m2: float, x):
    """ccdf at x of the beta distribution matching mean m1 and second moment m2."""
    if not 0.0 < m1 <= 1.0:
        raise ConfigError("m1", f"first moment must lie in (0, 1], got {m1}")
    var = m2 - m1 * m1
    if var < -1e-12 or m2 > m1 + 1e-12:
        raise ConfigError("m2", f"({m1}, {m2}) is not a valid moment pair of a [0, 1] variable")
    xs = np.asarray(x, dtype=float)

    if var <= 1e-14:
        out = (xs < m1).astype(float)
    else:
        kappa = (m1 - m2) / var
        if kappa <= 1e-12:
            # all mass on {0, 1}
            out = np.where(xs < 1.0, m1, 0.0)
        else:
            out = stats.beta.sf(xs, m1 * kappa, (1.0 - m1) * kappa)
    return float(out) if xs.ndim == 0 else out


# ==================== META CURVES ====================

@dataclass
class MetaCurve:
    """F(theta, x) on a theta grid (dB) by an x grid."""

    theta_db: np.ndarray
    xs: np.ndarray
    values: np.ndarray
    provenance: str
    errors: Optional[np.ndarray] = None  # achieved error per theta row

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ConfigError("provenance", f"expected one of {PROVENANCES}, got {self.provenance!r}")

    @property
    def thetas(self) -> np.ndarray:
        return 10.0 ** (np.asarray(self.theta_db) / 10.0)

    def column(self, x: float) -> np.ndarray:
        idx = np.flatnonzero(np.isclose(self.xs, x))
        if idx.size == 0:
            raise KeyError(f"x = {x} not in grid")
        return self.values[:, idx[0]]


def meta_gil_pelaez(moment_at: Callable[[complex, float], complex], theta_db: Sequence[float],
                    xs: Sequence[float], **gp_options) -> MetaCurve:
    theta_db = np.asarray(theta_db, dtype=float)
    xs = np.asarray(xs, dtype=float)
    rows, errors = [], []
    for th in 10.0 ** (theta_db / 10.0):
        row, achieved = gil_pelaez(lambda b, th=th: moment_at(b, th), xs, full_output=True, **gp_options)
        rows.append(row)
        errors.append(achieved)
    values = np.array(rows).reshape(len(theta_db), len(xs))
    return MetaCurve(theta_db, xs, values, "analytic-gp", np.array(errors))


def meta_ppp(delta: float, theta_db: Sequence[float], xs: Sequence[float], **gp_options) -> MetaCurve:
    return meta_gil_pelaez(lambda b, th: mb_ppp(b, delta, th), theta_db, xs, **gp_options)


def meta_hcn(spec: HcnSpec, theta_db: Sequence[float], xs: Sequence[float], **gp_options) -> MetaCurve:
    """Per-tier approximation inverted with Gil-Pelaez."""
    return meta_gil_pelaez(lambda b, th: mb_hcn_hat(spec, b, th), theta_db, xs, **gp_options)


def meta_beta(moment_at: Callable[[complex, float], complex], theta_db: Sequence[float],
              xs: Sequence[float]) -> MetaCurve:
    """Beta fit from M_1 and M_2; with mb_hcn_hat this is the approximate beta approximation."""
    theta_db = np.asarray(theta_db, dtype=float)
    xs = np.asarray(xs, dtype=float)
    rows = []
    for th in 10.0 ** (theta_db / 10.0):
        m1 = min(1.0, moment_at(1.0, th).real)
        m2 = min(m1, max(m1 * m1, moment_at(2.0, th).real))
        rows.append(beta_approx(m1, m2, xs))
    return MetaCurve(theta_db, xs, np.array(rows).reshape(len(theta_db), len(xs)), "beta")


def shifted_meta(base: MetaCurve, gain_db: float, theta_db: Optional[Sequence[float]] = None) -> MetaCurve:
    """
    F(theta, x) ~ F_base(theta / G, x): move the base curve right by gain_db.
    With theta_db given, the shifted curve is interpolated onto that grid.
    """
    moved = np.asarray(base.theta_db, dtype=float) + gain_db
    if theta_db is None:
        return MetaCurve(moved, base.xs.copy(), base.values.copy(), "shifted")

    target = np.asarray(theta_db, dtype=float)
    lo, hi = moved.min(), moved.max()
    if target.min() < lo - 1e-9 or target.max() > hi + 1e-9:
        raise ConfigError("theta_grid",
                          f"requested [{target.min():.3f}, {target.max():.3f}] dB outside "
                          f"shifted coverage [{lo:.3f}, {hi:.3f}] dB")
    order = np.argsort(moved)
    values = np.column_stack([np.interp(target, moved[order], base.values[order, j])
                              for j in range(len(base.xs))])
    return MetaCurve(target, base.xs.copy(), values, "shifted")
