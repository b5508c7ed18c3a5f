# -*- coding: utf-8 -*-
"""
SIR Core
Strongest-average-power association and fading-averaged link statistics for
the typical user at the origin of a multi-tier realization.

Rayleigh fading is integrated out exactly: given the pattern, the success
probability is the product over all non-serving points y of
1 / (1 + theta * P_i |y|^-a_i / (P_k |x0|^-a_k)).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from errors import ConfigError, DegenerateRealizationError, EmptyRealizationError
from point_processes import (PointSet, Poisson, ProcessKind, Window, kind_from_dict,
                             reference_process)

logger = logging.getLogger(__name__)

ThetaLike = Union[float, Sequence[float], np.ndarray]


def parse_number(field_name: str, value, cast=float):
    """Config value as float / int; a malformed one becomes a ConfigError naming the field."""
    if isinstance(value, bool):
        raise ConfigError(field_name, f"expected a number, got {value!r}")
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigError(field_name, f"expected a number, got {value!r}")


# ==================== TIER SPEC ====================

@dataclass(frozen=True)
class TierSpec:
    """
    One network tier: process kind, density, transmit power, path-loss
    exponent and an optional asymptotic gain G_k (stored in dB, exposed linear).
    """

    kind: ProcessKind
    density: float
    power: float = 1.0
    alpha: float = 4.0
    gain_db: Optional[float] = None

    def __post_init__(self):
        if not self.density > 0:
            raise ConfigError("density", f"must be > 0, got {self.density}")
        if not self.power > 0:
            raise ConfigError("power", f"must be > 0, got {self.power}")
        if not self.alpha > 2:
            raise ConfigError("alpha", f"path-loss exponent must be > 2, got {self.alpha}")
        intrinsic = self.kind.intrinsic_density
        if intrinsic is not None and not math.isclose(intrinsic, self.density, rel_tol=1e-6):
            raise ConfigError(
                "density",
                f"declared {self.density} but {self.kind.name} parameters give {intrinsic:.6g}")

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    @property
    def gain(self) -> Optional[float]:
        """Linear G_k, or None when no gain is attached."""
        if self.gain_db is None:
            return None
        return 10.0 ** (self.gain_db / 10.0)

    @classmethod
    def preset(cls, name: str, density: float = 0.1, power: float = 1.0,
               alpha: float = 4.0, gain_db: Optional[float] = None) -> "TierSpec":
        return cls(reference_process(name, density), density, power, alpha, gain_db)

    def to_dict(self) -> Dict:
        data = self.kind.to_dict()
        data.update({"density": self.density, "power": self.power, "alpha": self.alpha})
        if self.gain_db is not None:
            data["gain_db"] = self.gain_db
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "TierSpec":
        data = dict(data)
        try:
            density = parse_number("tiers.density", data.pop("density"))
        except KeyError:
            raise ConfigError("tiers.density", "missing")
        power = parse_number("tiers.power", data.pop("power", 1.0))
        alpha = parse_number("tiers.alpha", data.pop("alpha", 4.0))
        gain_db = data.pop("gain_db", None)
        gain_db = None if gain_db is None else parse_number("tiers.gain_db", gain_db)
        # a bare process name selects the reference parameterization
        if set(data) == {"process"} and data["process"] != Poisson.name:
            kind = reference_process(data["process"], density)
        else:
            kind = kind_from_dict(data)
        return cls(kind, density, power, alpha, gain_db)


# ==================== REALIZATION / ASSOCIATION ====================

@dataclass(frozen=True, eq=False)
class NetworkRealization:
    window: Window
    point_sets: Tuple[PointSet, ...]
    tiers: Tuple[TierSpec, ...]

    @property
    def total_points(self) -> int:
        return sum(len(ps) for ps in self.point_sets)

    @property
    def is_empty(self) -> bool:
        return self.total_points == 0


@dataclass(frozen=True, eq=False)
class Association:
    """Serving tier, index into its point set, location and mean received power."""

    tier: int
    index: int
    point: np.ndarray = field(repr=False)
    power: float

    @property
    def distance(self) -> float:
        return float(np.hypot(*self.point))


def _received_power(points: PointSet, spec: TierSpec) -> np.ndarray:
    d2 = np.einsum("ij,ij->i", points.points, points.points)
    if np.any(d2 == 0.0):
        raise DegenerateRealizationError(f"tier {points.tier} has a point at the origin")
    return spec.power * d2 ** (-spec.alpha / 2.0)


def associate(realization: NetworkRealization) -> Association:
    """
    Serving BS = argmax of P_k |x|^-a_k over all tiers.
    Ties go to the lowest tier index, then the lexicographically smallest point.
    """
    best = None
    for k, (points, spec) in enumerate(zip(realization.point_sets, realization.tiers)):
        if len(points) == 0:
            continue
        rx = _received_power(points, spec)
        top = rx.max()
        if best is not None and top <= best[0]:
            continue
        idx = np.flatnonzero(rx == top)
        pts = points.points[idx]
        winner = idx[np.lexsort((pts[:, 1], pts[:, 0]))[0]]
        best = (top, k, int(winner))

    if best is None:
        raise EmptyRealizationError("realization has no base station in any tier")
    power, k, i = best
    return Association(tier=k, index=i, point=realization.point_sets[k].points[i].copy(), power=float(power))


# ==================== LINK STATISTICS ====================

def relative_interference(realization: NetworkRealization, assoc: Association) -> np.ndarray:
    """P_i |y|^-a_i / (P_k |x0|^-a_k) for every non-serving point y of every tier."""
    parts = []
    for k, (points, spec) in enumerate(zip(realization.point_sets, realization.tiers)):
        if len(points) == 0:
            continue
        ratios = _received_power(points, spec) / assoc.power
        if k == assoc.tier:
            ratios = np.delete(ratios, assoc.index)
        parts.append(ratios)
    return np.concatenate(parts) if parts else np.empty(0)


def success_probability(ratios: np.ndarray, theta: ThetaLike):
    """Product of 1 / (1 + theta * r) over the ratios, for a scalar or an array of theta."""
    thetas = np.asarray(theta, dtype=float)
    if np.any(thetas < 0):
        raise ConfigError("theta", "SIR threshold must be >= 0")
    flat = thetas.ravel()
    log_ps = np.empty(flat.shape)
    for j, t in enumerate(flat):
        log_ps[j] = -np.log1p(t * ratios).sum()
    ps = np.exp(log_ps).reshape(thetas.shape)
    return float(ps) if ps.ndim == 0 else ps


def conditional_success_probability(realization: NetworkRealization, assoc: Association, theta: ThetaLike):
    return success_probability(relative_interference(realization, assoc), theta)


def isr_sample(realization: NetworkRealization, assoc: Association) -> float:
    """Interference-to-(mean-)signal ratio of one realization."""
    return float(relative_interference(realization, assoc).sum())


def misr_ppp(alpha: float) -> float:
    """MISR of the Poisson network, 2 / (alpha - 2)."""
    if not alpha > 2:
        raise ConfigError("alpha", f"path-loss exponent must be > 2, got {alpha}")
    return 2.0 / (alpha - 2.0)
