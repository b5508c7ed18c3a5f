# -*- coding: utf-8 -*-
"""
Figure Data
Regenerates the curve data behind the standard gain / meta distribution
figures at a reduced realization count and prints the reference values next
to the computed ones.

    g0*.csv              asymptotic gains (per process, across alpha, denser GaPPP)
    gb_<process>.csv     G_1, G_2, G_3 against theta
    critical_theta.csv   theta_c(x) of the triangular lattice
    meta_single_*.csv    single-tier curves at x = 0.95 beside the shifted PPP
    meta_gappp_alpha*.csv, meta_ptl_x.csv
    moments_*_ppp.csv    two-tier moments: simulation, per-tier, effective gain
    hcn_*_alpha*.csv     two- and three-tier meta distributions at alpha = 3, 4
    contour_*_ppp.csv    (theta, x) grids for contour plots
"""

import logging
import os
from typing import Dict, List, Optional, Tuple

import numpy as np

from errors import MetaDistError
from experiment_config import ExperimentConfig, ThetaGrid
from experiments import ExperimentResult, run_experiment
from gains import effective_gain
from point_processes import Window
from sir_core import TierSpec

logger = logging.getLogger(__name__)

FIGURE_N = 20_000

PROCESSES = ("tl", "ptl", "gappp", "mcp")

# reference values from the literature, dB
REFERENCE_VALUES: Dict[str, float] = {
    "g0.tl": 3.6099,
    "g0.ptl": 1.8343,
    "g0.gappp": -1.3768,
    "g0.mcp": -5.1702,
    "g0.gappp.alpha3.5": -1.3423,
    "g0.gappp.alpha3": -1.2558,
    "g0.gappp.alpha2.5": -0.8661,
    "geff.tl+ppp": 1.2190,
    "geff.ptl+ppp": 0.5361,
    "geff.gappp+ppp": -0.3064,
    "geff.mcp+ppp": -0.8301,
    "geff.gappp+mcp+ppp": -0.4959,
    "geff.tl+ppp.alpha3": 1.1951,
    "geff.ptl+ppp.alpha3": 0.5491,
    "geff.gappp+ppp.alpha3": -0.2819,
    "geff.mcp+ppp.alpha3": -0.8511,
    "geff.gappp+mcp+ppp.alpha3": -0.4910,
    "geff.gappp0.2+ppp": -0.2287,
    "geff.gappp0.2+ppp.alpha3": -0.2226,
    "theta_c.0.95": -16.68,
}

SINGLE_TIER_GRID = ThetaGrid(-40.0, 10.0, 1.0)
HCN_GRID = ThetaGrid(-20.0, 10.0, 1.0)
CONTOUR_GRID = ThetaGrid(-20.0, 10.0, 0.5)
CONTOUR_XS = [round(x, 2) for x in np.arange(0.05, 0.96, 0.05)]
CRITICAL_XS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]
PTL_XS = [0.6, 0.7, 0.8, 0.9, 0.95]
DENSE_GAPPP = 0.2
MIXES = [[name, "ppp"] for name in PROCESSES] + [["gappp", "mcp", "ppp"]]

GainTable = Dict[Tuple[str, float, float], float]


def _config(mode: str, tiers: List[TierSpec], out_dir: str, name: str, n: int, seed: int,
            workers: Optional[int], **fields) -> ExperimentConfig:
    return ExperimentConfig(mode=mode, tiers=tiers, n=n, seed=seed, workers=workers,
                            out=os.path.join(out_dir, f"{name}.csv"), **fields)


def _key(prefix: str, name: str, alpha: float = 4.0, density: float = 0.1) -> str:
    key = f"{prefix}.{name}"
    if density != 0.1:
        key = f"{prefix}.{name}{density:g}"
    if alpha != 4.0:
        key += f".alpha{alpha:g}"
    return key


def effective_gain_table() -> List[Tuple[str, float]]:
    """G_eff of equal-density, equal-power mixes (alpha = 4) from the reference G0 inputs."""
    rows = []
    for name in PROCESSES:
        tiers = [TierSpec.preset(name, gain_db=REFERENCE_VALUES[f"g0.{name}"]), TierSpec.preset("ppp", gain_db=0.0)]
        rows.append((f"geff.{name}+ppp", effective_gain(tiers).value_db))
    tiers = [TierSpec.preset("gappp", gain_db=REFERENCE_VALUES["g0.gappp"]),
             TierSpec.preset("mcp", gain_db=REFERENCE_VALUES["g0.mcp"]),
             TierSpec.preset("ppp", gain_db=0.0)]
    rows.append(("geff.gappp+mcp+ppp", effective_gain(tiers).value_db))
    return rows


def _report(name: str, computed: float):
    reference = REFERENCE_VALUES.get(name)
    if reference is None:
        print(f"  {name:<26} computed {computed:+.4f} dB")
    else:
        mark = "✓" if abs(reference - computed) <= 0.15 else "✗"
        print(f"  {mark} {name:<24} reference {reference:+.4f} dB | computed {computed:+.4f} dB")


class FigureRun:
    """Runs the numbered steps; a failing experiment is reported and the rest go on."""

    def __init__(self, out_dir: str, n: int, seed: int, workers: Optional[int], window: Window):
        self.out_dir = out_dir
        self.n = n
        self.seed = seed
        self.workers = workers
        self.window = window
        self.results: Dict[str, ExperimentResult] = {}
        self.failures: List[str] = []
        # measured G0 by (process, alpha, density)
        self.g0: GainTable = {}

    def run(self, mode: str, tiers: List[TierSpec], name: str, **fields) -> Optional[ExperimentResult]:
        if mode != "critical-theta":
            fields.setdefault("window", self.window)
        config = _config(mode, tiers, self.out_dir, name, self.n, self.seed, self.workers, **fields)
        try:
            result = run_experiment(config)
        except MetaDistError as e:
            print(f"  ✗ {name}: {type(e).__name__}: {e}")
            logger.warning("figure data %s failed: %s", name, e)
            self.failures.append(name)
            return None
        self.results[name] = result
        return result

    def measured_gain(self, name: str, alpha: float, density: float = 0.1) -> float:
        if name == "ppp":
            return 0.0
        if alpha == 4.0 and density == 0.1:
            return REFERENCE_VALUES[f"g0.{name}"]
        return self.g0[(name, alpha, density)]

    def tier(self, name: str, alpha: float, density: float = 0.1) -> TierSpec:
        return TierSpec.preset(name, density=density, alpha=alpha,
                               gain_db=self.measured_gain(name, alpha, density))

    # ---------- steps ----------

    def asymptotic_gains(self):
        result = self.run("g0", [TierSpec.preset(name) for name in PROCESSES], "g0")
        tiers = [TierSpec.preset("gappp", alpha=a) for a in (3.5, 3.0, 2.5)]
        tiers += [TierSpec.preset(name, alpha=3.0) for name in ("tl", "ptl", "mcp")]
        tiers += [TierSpec.preset("gappp", density=DENSE_GAPPP, alpha=a) for a in (4.0, 3.0)]
        variants = self.run("g0", tiers, "g0_variants")
        for res in (result, variants):
            for row in res.rows if res else []:
                _, name, alpha, density, value_db = row[:5]
                self.g0[(name, alpha, density)] = value_db
                _report(_key("g0", name, alpha, density), value_db)

    def finite_threshold_gains(self):
        for name in PROCESSES:
            result = self.run("gb", [TierSpec.preset(name)], f"gb_{name}", b_values=[1.0, 2.0, 3.0],
                              theta_grid=ThetaGrid(-20.0, 10.0, 2.5))
            if result is None:
                continue
            low = [row for row in result.rows if row[0] == -20.0]
            for _, b, value_db, _ in low:
                print(f"  G_{b:g}(-20 dB) {name:<6} reference G0 {REFERENCE_VALUES[f'g0.{name}']:+.4f} dB | "
                      f"computed {value_db:+.4f} dB")

    def effective_gains(self):
        for name, value in effective_gain_table():
            _report(name, value)
        for names in MIXES:
            tiers = self._mix(names, 3.0)
            if tiers:
                _report(f"geff.{'+'.join(names)}.alpha3", effective_gain(tiers).value_db)
        for alpha in (4.0, 3.0):
            tiers = self._dense_mix(alpha)
            if tiers:
                _report(_key("geff", f"gappp{DENSE_GAPPP:g}+ppp", alpha), effective_gain(tiers).value_db)

    def _mix(self, names: List[str], alpha: float) -> Optional[List[TierSpec]]:
        try:
            return [self.tier(name, alpha) for name in names]
        except KeyError:
            return None

    def _dense_mix(self, alpha: float) -> Optional[List[TierSpec]]:
        try:
            return [self.tier("gappp", alpha, DENSE_GAPPP), self.tier("ppp", alpha)]
        except KeyError:
            return None

    def critical_threshold(self):
        result = self.run("critical-theta", [TierSpec.preset("tl")], "critical_theta", xs=CRITICAL_XS)
        for row in result.rows if result else []:
            if row[0] == 0.95:
                _report("theta_c.0.95", row[1])

    def single_tier_curves(self):
        for name in ("ppp",) + PROCESSES:
            self.run("compare", [self.tier(name, 4.0)], f"meta_single_{name}", xs=[0.95],
                     theta_grid=SINGLE_TIER_GRID)
        for alpha in (3.5, 3.0, 2.5):
            tiers = [TierSpec.preset("gappp", alpha=alpha, gain_db=REFERENCE_VALUES[_key("g0", "gappp", alpha)])]
            self.run("compare", tiers, f"meta_gappp_alpha{alpha:g}", xs=[0.95], theta_grid=HCN_GRID)
        self.run("compare", [self.tier("ptl", 4.0)], "meta_ptl_x", xs=PTL_XS, theta_grid=HCN_GRID)

    def two_tier_moments(self):
        for name in PROCESSES:
            self.run("moments", [self.tier(name, 4.0), self.tier("ppp", 4.0)], f"moments_{name}_ppp",
                     xs=[0.95], b_values=[1.0, 2.0], theta_grid=HCN_GRID)

    def hcn_curves(self):
        for alpha in (4.0, 3.0):
            for names in MIXES:
                tiers = self._mix(names, alpha)
                if tiers is None:
                    print(f"  ✗ {'+'.join(names)} alpha={alpha:g}: G0 not measured")
                    continue
                self.run("compare", tiers, f"hcn_{'_'.join(names)}_alpha{alpha:g}", xs=[0.95],
                         theta_grid=HCN_GRID)
            tiers = self._dense_mix(alpha)
            if tiers is not None:
                self.run("compare", tiers, f"hcn_gappp{DENSE_GAPPP:g}_ppp_alpha{alpha:g}", xs=[0.95],
                         theta_grid=HCN_GRID)

    def contours(self):
        for name in ("gappp", "ptl"):
            self.run("compare", [self.tier(name, 4.0), self.tier("ppp", 4.0)], f"contour_{name}_ppp",
                     xs=CONTOUR_XS, theta_grid=CONTOUR_GRID)


def run_figures(out_dir: str, n: int = FIGURE_N, seed: int = 0, workers: Optional[int] = None,
                window: Optional[Window] = None) -> Dict[str, ExperimentResult]:
    os.makedirs(out_dir, exist_ok=True)
    figures = FigureRun(out_dir, n, seed, workers, window or Window())

    print("\n" + "=" * 80)
    print(f"FIGURE DATA (n = {n}, seed = {seed}) -> {out_dir}")
    print("=" * 80)

    steps = [
        ("Asymptotic gains (per process, across alpha, denser GaPPP)", figures.asymptotic_gains),
        ("Finite-threshold gains G_1, G_2, G_3", figures.finite_threshold_gains),
        ("Effective gains", figures.effective_gains),
        ("Critical threshold of the TL", figures.critical_threshold),
        ("Single-tier meta distributions", figures.single_tier_curves),
        ("Two-tier moments", figures.two_tier_moments),
        ("Multi-tier meta distributions (alpha = 3, 4)", figures.hcn_curves),
        ("Contour grids", figures.contours),
    ]
    for i, (title, step) in enumerate(steps, 1):
        print(f"\n[{i}/{len(steps)}] {title}...")
        step()

    print("\n" + "=" * 80)
    if figures.failures:
        print(f"✗ {len(figures.failures)} DATASET(S) FAILED: {', '.join(figures.failures)}")
    print(f"✓ {len(figures.results)} DATASETS WRITTEN TO {out_dir}")
    print("=" * 80 + "\n")
    return figures.results
