# -*- coding: utf-8 -*-
"""
Full-window Monte Carlo checks against the published reference values.
Run with `pytest -m slow`; set METADIST_WORKERS to spread the realizations.
"""
import numpy as np
import pytest
from scipy.integrate import quad

from analytic import gil_pelaez, mb_ppp, meta_ppp
from gains import estimate_g0
from metasim import critical_theta, simulate_meta
from monte_carlo import simulate_realizations
from point_processes import Window, reference_process
from sir_core import TierSpec

pytestmark = pytest.mark.slow

N = 100_000
WINDOW = Window(500.0)
SEED = 2024


@pytest.mark.parametrize("name, expected_db", [
    ("tl", 3.6099), ("ptl", 1.8343), ("gappp", -1.3768), ("mcp", -5.1702),
])
def test_asymptotic_gain_per_process(name, expected_db):
    g0 = estimate_g0(reference_process(name, 0.1), 4.0, WINDOW, N, SEED)
    assert abs(g0.value_db - expected_db) <= 0.15


@pytest.mark.parametrize("alpha, expected_db", [(3.5, -1.3423), (3.0, -1.2558), (2.5, -0.8661)])
def test_gauss_poisson_gain_across_alpha(alpha, expected_db):
    g0 = estimate_g0(reference_process("gappp", 0.1), alpha, WINDOW, N, SEED)
    assert abs(g0.value_db - expected_db) <= 0.15


@pytest.mark.parametrize("theta_db", [-10.0, 0.0, 10.0])
def test_gil_pelaez_integrates_to_first_moment(theta_db):
    theta = 10.0 ** (theta_db / 10.0)
    area, _ = quad(lambda x: gil_pelaez(lambda b: mb_ppp(b, 0.5, theta), x), 0.0, 1.0,
                   epsabs=1e-6, limit=200)
    assert abs(area - mb_ppp(1.0, 0.5, theta).real) <= 1e-3


def test_empirical_ppp_meta_matches_gil_pelaez():
    theta_db = np.arange(-20.0, 11.0)
    sim = simulate_meta([TierSpec.preset("ppp")], WINDOW, theta_db, [0.95], n=N, seed=SEED)
    analytic = meta_ppp(0.5, theta_db, [0.95])
    assert np.max(np.abs(sim.ccdf()[:, 0] - analytic.values[:, 0])) <= 0.02


def test_gauss_poisson_meta_is_shifted_ppp():
    theta_db = np.arange(-20.0, 1.0)
    gappp = reference_process("gappp", 0.1)
    g0_db = estimate_g0(gappp, 4.0, WINDOW, N, SEED).value_db
    sim = simulate_meta([TierSpec.preset("gappp")], WINDOW, theta_db, [0.95], n=N, seed=SEED + 1)
    shifted = meta_ppp(0.5, theta_db - g0_db, [0.95])
    assert np.max(np.abs(sim.ccdf()[:, 0] - shifted.values[:, 0])) <= 0.03


def test_lattice_meta_is_shifted_ppp_with_collapse():
    theta_db = np.arange(-20.0, 1.0)
    tl = reference_process("tl", 0.1)
    g0_db = estimate_g0(tl, 4.0, WINDOW, N, SEED).value_db
    sim = simulate_meta([TierSpec.preset("tl")], WINDOW, theta_db, [0.95], n=N, seed=SEED + 1)
    empirical = sim.ccdf()[:, 0]

    upper = theta_db >= -10.0
    shifted = meta_ppp(0.5, theta_db[upper] - g0_db, [0.95]).values[:, 0]
    assert np.max(np.abs(empirical[upper] - shifted)) <= 0.03

    below = theta_db < critical_theta(tl, 4.0, 0.95).theta_c_db
    assert below.any()
    assert np.all(empirical[below] == 1.0)


@pytest.mark.parametrize("name", ["tl", "ptl", "gappp", "mcp"])
def test_moments_follow_asymptotic_gain(name):
    tier = TierSpec.preset(name)
    theta = 1e-3
    batch = simulate_realizations([tier], WINDOW, N, SEED, thetas=[theta], b_values=[1.0, 2.0])
    misr = batch.isr.mean()
    for j, b in enumerate((1.0, 2.0)):
        m_b = batch.moment_sums[j, 0] / batch.n
        assert abs((1.0 - m_b) - b * theta * misr) <= 0.05 * b * theta * misr
