# -*- coding: utf-8 -*-
"""
Point Process Samplers
Draws stationary base-station patterns inside a square window:
- Poisson point process (PPP)
- stationary triangular lattice (TL) and perturbed triangular lattice (PTL)
- Gauss-Poisson process (GaPPP) and Matern cluster process (MCP)

Every sampler is a pure function of (parameters, seed). Cluster processes draw
their parents in a window enlarged by the largest offspring displacement and
lattices are enumerated a little beyond the window, so the pattern seen inside
the observation window carries no edge thinning.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import ClassVar, Dict, Optional, Union

import numpy as np

from errors import ConfigError

logger = logging.getLogger(__name__)

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]

SQRT3 = math.sqrt(3.0)


# ==================== WINDOW / POINT SET ====================

@dataclass(frozen=True)
class Window:
    """The square [-L, L]^2; the typical user sits at its centre."""

    half_extent: float = 500.0

    def __post_init__(self):
        if not self.half_extent > 0:
            raise ConfigError("window.half_extent", f"must be > 0, got {self.half_extent}")

    @property
    def area(self) -> float:
        return 4.0 * self.half_extent ** 2

    def enlarged(self, margin: float) -> "Window":
        return Window(self.half_extent + margin)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of the rows of `points` inside the window."""
        return np.all(np.abs(points) <= self.half_extent, axis=1)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Sampled points of one tier (shape (n, 2))."""

    points: np.ndarray
    tier: int = 0

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def distances(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    def same_as(self, other: "PointSet") -> bool:
        return self.tier == other.tier and np.array_equal(self.points, other.points)


# ==================== PROCESS KINDS ====================

@dataclass(frozen=True)
class ProcessKind:
    """Base of the tagged union of supported point processes."""

    name: ClassVar[str] = ""

    @property
    def intrinsic_density(self) -> Optional[float]:
        """Density fixed by the process parameters (None when free)."""
        return None

    @property
    def max_displacement(self) -> float:
        """Largest offset of a point from its generating location."""
        return 0.0

    def to_dict(self) -> Dict:
        data = {"process": self.name}
        data.update(asdict(self))
        return data


@dataclass(frozen=True)
class Poisson(ProcessKind):
    name: ClassVar[str] = "ppp"


@dataclass(frozen=True)
class TriangularLattice(ProcessKind):
    eta: float = 1.0

    name: ClassVar[str] = "tl"

    def __post_init__(self):
        if not self.eta > 0:
            raise ConfigError("eta", f"neighbor spacing must be > 0, got {self.eta}")

    @property
    def intrinsic_density(self) -> float:
        return 2.0 / (SQRT3 * self.eta ** 2)

    @property
    def max_displacement(self) -> float:
        return self.eta

    @staticmethod
    def spacing_for_density(density: float) -> float:
        return math.sqrt(2.0 / (SQRT3 * density))


@dataclass(frozen=True)
class PerturbedTriangularLattice(TriangularLattice):
    r_pert: float = 0.0

    name: ClassVar[str] = "ptl"

    def __post_init__(self):
        super().__post_init__()
        if self.r_pert < 0:
            raise ConfigError("r_pert", f"perturbation radius must be >= 0, got {self.r_pert}")

    @property
    def max_displacement(self) -> float:
        return self.eta + self.r_pert


@dataclass(frozen=True)
class GaussPoisson(ProcessKind):
    lambda_p: float = 1.0 / 15.0
    p: float = 0.5
    u: float = 1.0

    name: ClassVar[str] = "gappp"

    def __post_init__(self):
        if not self.lambda_p > 0:
            raise ConfigError("lambda_p", f"parent density must be > 0, got {self.lambda_p}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("p", f"one-point probability must be in [0, 1], got {self.p}")
        if not self.u > 0:
            raise ConfigError("u", f"two-point separation must be > 0, got {self.u}")

    @property
    def intrinsic_density(self) -> float:
        return self.lambda_p * (2.0 - self.p)

    @property
    def max_displacement(self) -> float:
        return self.u


@dataclass(frozen=True)
class MaternCluster(ProcessKind):
    lambda_p: float = 0.01
    c_bar: float = 10.0
    r_c: float = 4.0

    name: ClassVar[str] = "mcp"

    def __post_init__(self):
        if not self.lambda_p > 0:
            raise ConfigError("lambda_p", f"parent density must be > 0, got {self.lambda_p}")
        if not self.c_bar > 0:
            raise ConfigError("c_bar", f"mean cluster size must be > 0, got {self.c_bar}")
        if not self.r_c > 0:
            raise ConfigError("r_c", f"cluster radius must be > 0, got {self.r_c}")

    @property
    def intrinsic_density(self) -> float:
        return self.lambda_p * self.c_bar

    @property
    def max_displacement(self) -> float:
        return self.r_c


PROCESS_KINDS = {cls.name: cls for cls in
                 (Poisson, TriangularLattice, PerturbedTriangularLattice, GaussPoisson, MaternCluster)}


def kind_from_dict(data: Dict) -> ProcessKind:
    """Inverse of ProcessKind.to_dict."""
    fields = dict(data)
    name = fields.pop("process", None)
    if name not in PROCESS_KINDS:
        raise ConfigError("process", f"unknown process {name!r}; expected one of {sorted(PROCESS_KINDS)}")
    try:
        return PROCESS_KINDS[name](**fields)
    except TypeError as e:
        raise ConfigError("process", f"bad parameters for {name}: {e}")


def reference_process(name: str, density: float = 0.1) -> ProcessKind:
    """
    Standard parameterization of each process at a given density:
    PTL perturbed by half the spacing, GaPPP with p = 0.5 and u = 1,
    MCP with 10 points per cluster of radius 4.
    """
    if not density > 0:
        raise ConfigError("density", f"must be > 0, got {density}")
    if name == "ppp":
        return Poisson()
    if name == "tl":
        return TriangularLattice(TriangularLattice.spacing_for_density(density))
    if name == "ptl":
        eta = TriangularLattice.spacing_for_density(density)
        return PerturbedTriangularLattice(eta=eta, r_pert=0.5 * eta)
    if name == "gappp":
        return GaussPoisson(lambda_p=density / 1.5, p=0.5, u=1.0)
    if name == "mcp":
        return MaternCluster(lambda_p=density / 10.0, c_bar=10.0, r_c=4.0)
    raise ConfigError("process", f"unknown process {name!r}; expected one of {sorted(PROCESS_KINDS)}")


# ==================== SAMPLERS ====================

def _uniform_points(rng: np.random.Generator, density: float, half_extent: float) -> np.ndarray:
    count = rng.poisson(density * 4.0 * half_extent ** 2)
    return rng.uniform(-half_extent, half_extent, size=(count, 2))


def _uniform_in_disk(rng: np.random.Generator, count: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(count))
    phi = rng.uniform(0.0, 2.0 * np.pi, count)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


def _clip(points: np.ndarray, half_extent: float) -> np.ndarray:
    return points[np.all(np.abs(points) <= half_extent, axis=1)]


def sample_ppp(density: float, window: Window, seed: SeedLike = None, tier: int = 0) -> PointSet:
    """Homogeneous PPP: Poisson count with mean density * area, uniform positions."""
    if not density > 0:
        raise ConfigError("density", f"must be > 0, got {density}")
    rng = np.random.default_rng(seed)
    return PointSet(_uniform_points(rng, density, window.half_extent), tier)


def lattice_points(eta: float, offset, half_extent: float) -> np.ndarray:
    """All points G v + offset, v in Z^2, inside [-half_extent, half_extent]^2."""
    row = eta * SQRT3 / 2.0
    ox, oy = float(offset[0]), float(offset[1])
    j = np.arange(math.ceil((-half_extent - oy) / row), math.floor((half_extent - oy) / row) + 1)
    if j.size == 0:
        return np.empty((0, 2))
    i_lo = math.ceil((-half_extent - ox) / eta - j[-1] / 2.0)
    i_hi = math.floor((half_extent - ox) / eta - j[0] / 2.0)
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi + 1), j)
    x = eta * (ii + jj / 2.0) + ox
    y = row * jj + oy
    pts = np.column_stack((x.ravel(), y.ravel()))
    return _clip(pts, half_extent)


def sample_lattice(kind: TriangularLattice, window: Window, seed: SeedLike = None, tier: int = 0) -> PointSet:
    """
    Stationary (optionally perturbed) triangular lattice.

    The random shift is G U with U uniform on [0, 1)^2, i.e. uniform over the
    fundamental parallelogram. Points are kept within L + eta of the centre;
    PTL points are perturbed uniformly in b(o, R_pert) before clipping.
    """
    rng = np.random.default_rng(seed)
    u = rng.random(2)
    shift = kind.eta * np.array([u[0] + u[1] / 2.0, u[1] * SQRT3 / 2.0])
    keep = window.half_extent + kind.eta
    r_pert = getattr(kind, "r_pert", 0.0)

    pts = lattice_points(kind.eta, shift, keep + r_pert)
    if isinstance(kind, PerturbedTriangularLattice):
        pts = _clip(pts + _uniform_in_disk(rng, len(pts), r_pert), keep)
    return PointSet(pts, tier)


def sample_gauss_poisson(params: GaussPoisson, window: Window, seed: SeedLike = None, tier: int = 0) -> PointSet:
    """Each Poisson parent keeps one point w.p. p, else gains a partner at distance u."""
    rng = np.random.default_rng(seed)
    keep = window.half_extent + params.u
    parents = _uniform_points(rng, params.lambda_p, keep)
    pairs = rng.random(len(parents)) >= params.p
    phi = rng.uniform(0.0, 2.0 * np.pi, int(pairs.sum()))
    partners = parents[pairs] + params.u * np.column_stack((np.cos(phi), np.sin(phi)))
    pts = _clip(np.vstack((parents, partners)), keep)
    return PointSet(pts, tier)


def sample_matern_cluster(params: MaternCluster, window: Window, seed: SeedLike = None, tier: int = 0) -> PointSet:
    """Poisson(c_bar) daughters per parent, uniform in the disk of radius r_c."""
    rng = np.random.default_rng(seed)
    keep = window.half_extent + params.r_c
    parents = _uniform_points(rng, params.lambda_p, keep)
    sizes = rng.poisson(params.c_bar, len(parents))
    centres = np.repeat(parents, sizes, axis=0)
    pts = _clip(centres + _uniform_in_disk(rng, len(centres), params.r_c), keep)
    return PointSet(pts, tier)


def sample_process(kind: ProcessKind, density: float, window: Window,
                   seed: SeedLike = None, tier: int = 0) -> PointSet:
    """Dispatch on the process kind; `density` is only used by the PPP."""
    if isinstance(kind, Poisson):
        return sample_ppp(density, window, seed, tier)
    if isinstance(kind, TriangularLattice):
        return sample_lattice(kind, window, seed, tier)
    if isinstance(kind, GaussPoisson):
        return sample_gauss_poisson(kind, window, seed, tier)
    if isinstance(kind, MaternCluster):
        return sample_matern_cluster(kind, window, seed, tier)
    raise ConfigError("process", f"no sampler for {type(kind).__name__}")
