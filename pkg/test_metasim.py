# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from errors import ConfigError, TruncationError, UnsupportedProcessError
from metasim import (EmpiricalMeta, continuum_tail, critical_curve, critical_theta, simulate_meta,
                     tail_bound, truncation_radius, worst_case_ps)
from point_processes import Poisson, TriangularLattice, Window, reference_process
from sir_core import TierSpec

PPP = [TierSpec.preset("ppp")]
TL = reference_process("tl", 0.1)


# ==================== EMPIRICAL META DISTRIBUTION ====================

@pytest.fixture(scope="module")
def ppp_meta():
    return simulate_meta(PPP, Window(20.0), [-np.inf, -10.0, 0.0, 10.0], np.linspace(0.0, 1.0, 1001),
                         n=600, seed=3, b_values=[0.5])


def test_zero_threshold_always_succeeds(ppp_meta):
    ccdf = ppp_meta.ccdf()
    assert np.all(ccdf[0, :-1] == 1.0)
    assert ccdf[0, -1] == 0.0  # strict inequality at x = 1


def test_ccdf_is_bounded_and_monotone(ppp_meta):
    ccdf = ppp_meta.ccdf()
    assert np.all((ccdf >= 0.0) & (ccdf <= 1.0))
    assert np.all(np.diff(ccdf, axis=0) <= 0)
    assert np.all(np.diff(ccdf, axis=1) <= 0)


def test_first_moment_is_area_under_ccdf(ppp_meta):
    ccdf = ppp_meta.ccdf()
    for i in range(1, ccdf.shape[0]):
        area = trapezoid(ccdf[i], ppp_meta.xs)
        assert abs(area - ppp_meta.m1[i]) <= 2e-3


def test_moment_ordering_and_extra_orders(ppp_meta):
    assert np.all(ppp_meta.m2 <= ppp_meta.m1 + 1e-12)
    half = ppp_meta.moment(0.5)
    assert np.all(half >= ppp_meta.m1 - 1e-12)
    # orders outside the tracked list come from the stored samples
    third = ppp_meta.moment(3.0)
    assert np.all(third <= ppp_meta.m2 + 1e-6)


def test_confidence_halfwidth_scales_with_sqrt_n(ppp_meta):
    doubled = EmpiricalMeta(ppp_meta.theta_db, ppp_meta.xs, np.vstack([ppp_meta.samples] * 2),
                            ppp_meta.b_values, ppp_meta.moment_sums * 2, ppp_meta.n_realizations * 2,
                            ppp_meta.seed)
    a = ppp_meta.confidence_halfwidth()
    b = doubled.confidence_halfwidth()
    mask = b > 0
    assert mask.any()
    assert np.allclose(a[mask] / b[mask], math.sqrt(2.0))


def test_to_meta_curve_keeps_grid(ppp_meta):
    curve = ppp_meta.to_meta_curve()
    assert curve.provenance == "empirical"
    assert curve.values.shape == (4, 1001)


def test_simulation_is_deterministic():
    a = simulate_meta(PPP, Window(10.0), [0.0], [0.5], n=200, seed=11)
    b = simulate_meta(PPP, Window(10.0), [0.0], [0.5], n=200, seed=11)
    c = simulate_meta(PPP, Window(10.0), [0.0], [0.5], n=200, seed=12)
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.moment_sums, b.moment_sums)
    assert not np.array_equal(a.samples, c.samples)


def test_result_does_not_depend_on_worker_count():
    serial = simulate_meta(PPP, Window(8.0), [-5.0, 5.0], [0.5], n=2500, seed=4, workers=1)
    parallel = simulate_meta(PPP, Window(8.0), [-5.0, 5.0], [0.5], n=2500, seed=4, workers=2)
    assert np.array_equal(serial.samples, parallel.samples)
    assert np.array_equal(serial.moment_sums, parallel.moment_sums)


def test_lattice_collapse_below_critical_threshold():
    meta = simulate_meta([TierSpec.preset("tl")], Window(20.0), [-18.0, -17.5], [0.95], n=300, seed=5)
    assert np.all(meta.ccdf() == 1.0)


@pytest.mark.parametrize("theta_db, xs", [([], [0.5]), ([0.0], []), ([0.0], [1.5])])
def test_simulate_meta_rejects_bad_grids(theta_db, xs):
    with pytest.raises(ConfigError):
        simulate_meta(PPP, Window(5.0), theta_db, xs, n=10)


# ==================== LATTICE WORST CASE ====================

def test_worst_case_at_zero_threshold():
    assert worst_case_ps(TL, 4.0, 0.0) == 1.0


def test_worst_case_is_monotone_and_bounded():
    thetas = [0.001, 0.01, 0.03, 0.1]
    values = [worst_case_ps(TL, 4.0, t) for t in thetas]
    assert all(a > b for a, b in zip(values, values[1:]))
    for t, v in zip(thetas, values):
        assert 0.0 < v <= (1.0 + t) ** -2


def test_worst_case_is_scale_invariant():
    a = worst_case_ps(TriangularLattice(1.0), 4.0, 0.05)
    b = worst_case_ps(TriangularLattice(7.0), 4.0, 0.05)
    assert math.isclose(a, b, rel_tol=1e-7)


def test_critical_threshold_value():
    result = critical_theta(TL, 4.0, 0.95)
    assert abs(result.theta_c_db - (-16.68)) <= 0.05
    assert math.isclose(worst_case_ps(TL, 4.0, result.theta_c), 0.95, abs_tol=1e-3)


def test_critical_threshold_at_low_reliability():
    result = critical_theta(TL, 4.0, 0.3)
    upper_db = 10.0 * math.log10(1.0 / math.sqrt(0.3) - 1.0)
    assert critical_theta(TL, 4.0, 0.95).theta_c_db < result.theta_c_db < upper_db
    assert math.isclose(worst_case_ps(TL, 4.0, result.theta_c), 0.3, abs_tol=1e-3)


def test_critical_threshold_at_smaller_exponent():
    result = critical_theta(TL, 3.0, 0.95)
    assert result.theta_c_db < critical_theta(TL, 4.0, 0.95).theta_c_db
    assert math.isclose(worst_case_ps(TL, 3.0, result.theta_c), 0.95, abs_tol=1e-3)


def test_continuum_tail_makes_sum_independent_of_radius():
    radius = truncation_radius(TL.eta, 4.0, 0.01)
    near = worst_case_ps(TL, 4.0, 0.01, truncation=radius)
    far = worst_case_ps(TL, 4.0, 0.01, truncation=2.0 * radius)
    assert continuum_tail(TL.eta, 4.0, 0.01, radius) > 1e-7
    assert abs(math.log(near) - math.log(far)) <= 2e-8


def test_critical_threshold_decreases_with_reliability():
    curve = critical_curve(TL, 4.0, [0.9, 0.95, 0.99, 0.999])
    values = [c.theta_c_db for c in curve]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_worst_case_rejects_other_processes():
    with pytest.raises(UnsupportedProcessError):
        worst_case_ps(reference_process("ptl", 0.1), 4.0, 0.1)
    with pytest.raises(UnsupportedProcessError):
        critical_theta(Poisson(), 4.0, 0.95)


def test_short_truncation_raises():
    with pytest.raises(TruncationError) as info:
        worst_case_ps(TL, 4.0, 1.0, truncation=2.0 * TL.eta)
    assert info.value.tail_bound > 1e-8


def test_truncation_radius_cap():
    with pytest.raises(TruncationError):
        truncation_radius(1.0, 2.01, 1.0)


def test_tail_bound_shrinks_with_radius():
    assert tail_bound(1.0, 4.0, 0.1, 1.0) == math.inf
    assert tail_bound(1.0, 4.0, 0.1, 100.0) < tail_bound(1.0, 4.0, 0.1, 10.0)
    radius = truncation_radius(1.0, 4.0, 0.1)
    assert tail_bound(1.0, 4.0, 0.1, radius) <= 1e-8


def test_critical_threshold_rejects_bad_reliability():
    for x in (0.0, 1.0, 1.2):
        with pytest.raises(ConfigError):
            critical_theta(TL, 4.0, x)
