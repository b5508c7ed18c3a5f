# -*- coding: utf-8 -*-
"""
Experiment Runner
Dispatches an ExperimentConfig to the gains / analytic / metasim modules and
returns a table (header + rows). Shared by the CLI, the figures script and
the API server.
"""

import csv
import io
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, TextIO

import numpy as np

from analytic import (HcnSpec, MetaCurve, mb_hcn_hat, mb_ppp, meta_beta, meta_hcn, meta_ppp,
                      shifted_meta)
from errors import ConfigError
from experiment_config import ExperimentConfig
from gains import effective_gain, estimate_g0, estimate_gb_curve
from metasim import critical_curve, simulate_meta
from point_processes import Poisson

logger = logging.getLogger(__name__)

META_HEADER = ["theta_db", "x", "fbar", "stderr", "method"]


@dataclass
class ExperimentResult:
    mode: str
    header: List[str]
    rows: List[list]

    def to_dict(self) -> Dict:
        return {"mode": self.mode, "header": self.header,
                "rows": [[_json_cell(v) for v in row] for row in self.rows]}


def _json_cell(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def format_cell(value) -> str:
    """Locale-independent text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".10g")
    return str(value)


def write_csv(result: ExperimentResult, stream: TextIO):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(result.header)
    for row in result.rows:
        writer.writerow([format_cell(v) for v in row])


def to_csv_text(result: ExperimentResult) -> str:
    buffer = io.StringIO()
    write_csv(result, buffer)
    return buffer.getvalue()


# ==================== HELPERS ====================

def hcn_spec(config: ExperimentConfig) -> HcnSpec:
    """Poisson tiers without an explicit gain get G = 1."""
    tiers = [replace(t, gain_db=0.0) if t.gain_db is None and isinstance(t.kind, Poisson) else t
             for t in config.tiers]
    return HcnSpec.from_tiers(tiers)


def network_gain_db(spec: HcnSpec) -> float:
    """G of a single tier, G_eff of several."""
    if len(spec.tiers) == 1:
        return spec.tiers[0].gain_db
    return effective_gain(spec.tiers).value_db


def _curve_rows(curve: MetaCurve, method: str, stderr: Optional[np.ndarray] = None) -> List[list]:
    rows = []
    for i, theta_db in enumerate(curve.theta_db):
        for j, x in enumerate(curve.xs):
            err = None
            if stderr is not None:
                err = float(stderr[i, j] if stderr.ndim == 2 else stderr[i])
            rows.append([float(theta_db), float(x), float(curve.values[i, j]), err, method])
    return rows


def _shifted_hip(spec: HcnSpec, theta_db: np.ndarray, xs: np.ndarray) -> MetaCurve:
    gain_db = network_gain_db(spec)
    base = meta_ppp(spec.tiers[0].delta, theta_db - gain_db, xs)
    return shifted_meta(base, gain_db, theta_db)


# ==================== MODES ====================

def run_g0(config: ExperimentConfig) -> ExperimentResult:
    rows = []
    for k, tier in enumerate(config.tiers):
        g0 = estimate_g0(tier.kind, tier.alpha, config.window, config.n, config.seed,
                         density=tier.density, workers=config.workers)
        rows.append([k, tier.kind.name, tier.alpha, tier.density, g0.value_db, g0.std_error_db, g0.n_realizations])
    return ExperimentResult(config.mode, ["tier", "process", "alpha", "density", "g0_db", "stderr_db", "n"], rows)


def run_gb(config: ExperimentConfig) -> ExperimentResult:
    tier = config.tiers[0]
    theta_db = config.theta_grid.values_db()
    curve = estimate_gb_curve(theta_db, config.b_values, tier.kind, tier.alpha, config.window, config.n,
                              config.seed, density=tier.density, workers=config.workers)
    rows = [[t, b, g.value_db, g.std_error_db] for t, b, g in curve]
    return ExperimentResult(config.mode, ["theta_db", "b", "gb_db", "stderr_db"], rows)


def run_moments(config: ExperimentConfig) -> ExperimentResult:
    theta_db = config.theta_grid.values_db()
    meta = simulate_meta(config.tiers, config.window, theta_db, config.xs, config.n, config.seed,
                         b_values=config.b_values, workers=config.workers)
    rows = []
    for b in config.b_values:
        values, errs = meta.moment(b), meta.moment_stderr(b)
        rows.extend([float(t), b, float(v), float(e), "empirical"] for t, v, e in zip(theta_db, values, errs))

    if all(t.gain_db is not None or isinstance(t.kind, Poisson) for t in config.tiers):
        spec = hcn_spec(config)
        for b in config.b_values:
            rows.extend([float(t), b, mb_hcn_hat(spec, b, 10.0 ** (t / 10.0)).real, None, "analytic"]
                        for t in theta_db)
        if spec.same_alpha:
            # HIP network at theta / G_eff
            gain = 10.0 ** (network_gain_db(spec) / 10.0)
            delta = spec.tiers[0].delta
            for b in config.b_values:
                rows.extend([float(t), b, mb_ppp(b, delta, 10.0 ** (t / 10.0) / gain).real, None, "effective-gain"]
                            for t in theta_db)
    return ExperimentResult(config.mode, ["theta_db", "b", "moment", "stderr", "method"], rows)


def run_meta_analytic(config: ExperimentConfig) -> ExperimentResult:
    curve = meta_hcn(hcn_spec(config), config.theta_grid.values_db(), config.xs)
    return ExperimentResult(config.mode, META_HEADER, _curve_rows(curve, curve.provenance, curve.errors))


def run_meta_beta(config: ExperimentConfig) -> ExperimentResult:
    spec = hcn_spec(config)
    curve = meta_beta(lambda b, th: mb_hcn_hat(spec, b, th), config.theta_grid.values_db(), config.xs)
    return ExperimentResult(config.mode, META_HEADER, _curve_rows(curve, curve.provenance))


def run_meta_sim(config: ExperimentConfig) -> ExperimentResult:
    meta = simulate_meta(config.tiers, config.window, config.theta_grid.values_db(), config.xs,
                         config.n, config.seed, workers=config.workers)
    curve = meta.to_meta_curve()
    return ExperimentResult(config.mode, META_HEADER, _curve_rows(curve, curve.provenance, meta.ccdf_stderr()))


def run_hcn(config: ExperimentConfig) -> ExperimentResult:
    spec = hcn_spec(config)
    theta_db = config.theta_grid.values_db()
    xs = np.asarray(config.xs, dtype=float)
    curve = meta_hcn(spec, theta_db, xs)
    rows = _curve_rows(curve, curve.provenance, curve.errors)
    if spec.same_alpha:
        rows.extend(_curve_rows(_shifted_hip(spec, theta_db, xs), "shifted"))
    else:
        logger.info("tiers differ in alpha; effective-gain curve skipped")
    return ExperimentResult(config.mode, META_HEADER, rows)


def run_critical_theta(config: ExperimentConfig) -> ExperimentResult:
    tier = config.tiers[0]
    rows = [[c.x, c.theta_c_db, c.eta, c.alpha] for c in critical_curve(tier.kind, tier.alpha, config.xs)]
    return ExperimentResult(config.mode, ["x", "theta_c_db", "eta", "alpha"], rows)


def run_compare(config: ExperimentConfig) -> ExperimentResult:
    """Simulation next to the shifted-PPP, Gil-Pelaez and approximate-beta curves."""
    spec = hcn_spec(config)
    if not spec.same_alpha and len(spec.tiers) > 1:
        raise ConfigError("tiers.alpha", "compare mode needs a common path-loss exponent")
    theta_db = config.theta_grid.values_db()
    xs = np.asarray(config.xs, dtype=float)

    sim = simulate_meta(config.tiers, config.window, theta_db, xs, config.n, config.seed,
                        workers=config.workers)
    sim_values, sim_err = sim.ccdf(), sim.ccdf_stderr()
    shifted = _shifted_hip(spec, theta_db, xs).values
    gp = meta_hcn(spec, theta_db, xs).values
    aba = meta_beta(lambda b, th: mb_hcn_hat(spec, b, th), theta_db, xs).values

    rows = []
    for i, t in enumerate(theta_db):
        for j, x in enumerate(xs):
            rows.append([float(t), float(x), float(sim_values[i, j]), float(sim_err[i, j]),
                         float(shifted[i, j]), float(gp[i, j]), float(aba[i, j])])
    header = ["theta_db", "x", "simulation", "sim_stderr", "shifted", "gil_pelaez", "aba"]
    return ExperimentResult(config.mode, header, rows)


RUNNERS: Dict[str, Callable[[ExperimentConfig], ExperimentResult]] = {
    "g0": run_g0,
    "gb": run_gb,
    "moments": run_moments,
    "meta-analytic": run_meta_analytic,
    "meta-beta": run_meta_beta,
    "meta-sim": run_meta_sim,
    "hcn": run_hcn,
    "critical-theta": run_critical_theta,
    "compare": run_compare,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    logger.info("running mode %s with %d tier(s)", config.mode, len(config.tiers))
    result = RUNNERS[config.mode](config)
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as f:
            write_csv(result, f)
        logger.info("wrote %d rows to %s", len(result.rows), config.out)
    return result
