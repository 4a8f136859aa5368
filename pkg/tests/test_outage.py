from __future__ import annotations

import math

import numpy as np
import pytest

from coopnet.errors import InsufficientDataError
from coopnet.network import sample_coefficients
from coopnet.outage import (
    OutageCurve,
    OutagePoint,
    build_schedule,
    effective_snr,
    estimate_diversity,
    path_channel,
    simulate_outage,
)
from coopnet.topologies import chain, diamond, parallel_relays, point_to_point, single_edge

from oracles import af_two_hop_snr, parallel_rayleigh_outage_2, rayleigh_outage


def _edge_pairs(net, schedule):
    return [(net.edges[i].tail, net.edges[i].head) for i in schedule.order]


def test_schedules():
    assert build_schedule(single_edge(), "S", "D").total_slots == 1
    net = diamond()
    sched = build_schedule(net, "S", "D")
    assert _edge_pairs(net, sched) == [("S", "R1"), ("R1", "D"), ("S", "R2"), ("R2", "D")]
    sched = build_schedule(chain(3), "S", "D")
    assert (sched.total_slots, sched.num_paths) == (3, 1)


def test_path_channel_single_hop():
    gain, noise = path_channel([0.5 + 0.5j], 10.0)
    assert gain == 0.5 + 0.5j and noise == 1.0


def test_path_channel_high_snr_limit():
    gain, noise = path_channel([1.0, 1.0], 1e12)
    assert abs(abs(gain) ** 2 - 1.0) < 1e-9
    assert effective_snr([1.0, 1.0], 1e12) == pytest.approx(1e12 / 2, rel=1e-6)


def test_two_hop_snr_matches_closed_form():
    rng = np.random.default_rng(1)
    for _ in range(200):
        h1, h2 = (rng.standard_normal(2) + 1j * rng.standard_normal(2)) / math.sqrt(2)
        for rho in (0.1, 1.0, 10.0, 1e4):
            assert effective_snr([h1, h2], rho) == pytest.approx(af_two_hop_snr(h1, h2, rho), rel=1e-12)


def test_zero_rate_never_outage():
    curve = simulate_outage(point_to_point(2, 1), "S", "D", rate=0.0, snr_grid_db=(0, 10), trials=1000)
    assert all(pt.p_out == 0.0 for pt in curve.points)


def test_low_snr_is_almost_always_outage():
    curve = simulate_outage(chain(2), "S", "D", rate=1.0, snr_grid_db=(-60,), trials=5000)
    assert curve.points[0].p_out > 0.999


@pytest.mark.parametrize("estimator", ["plain", "importance"])
def test_single_hop_matches_closed_form(estimator):
    curve = simulate_outage(single_edge(), "S", "D", 1.0, (20.0,), 10**6, seed=3, estimator=estimator)
    pt = curve.points[0]
    exact = rayleigh_outage(1.0, 100.0)
    assert exact == pytest.approx(0.00995, abs=1e-5)
    assert abs(pt.p_out - exact) <= 3 * pt.stderr


@pytest.mark.parametrize("estimator", ["plain", "importance"])
def test_two_parallel_paths_match_integral(estimator):
    curve = simulate_outage(point_to_point(2, 1), "S", "D", 1.0, (5.0, 10.0), 4 * 10**5, seed=8, estimator=estimator)
    for pt in curve.points:
        exact = parallel_rayleigh_outage_2(1.0, 10 ** (pt.snr_db / 10))
        assert abs(pt.p_out - exact) <= 3 * pt.stderr


def test_outage_monotone_in_snr_and_rate():
    net = sample_coefficients(diamond(), 0)
    grid = (0, 5, 10, 15, 20)
    low = simulate_outage(net, "S", "D", 0.5, grid, 2 * 10**5, seed=1, estimator="importance")
    high = simulate_outage(net, "S", "D", 2.0, grid, 2 * 10**5, seed=1, estimator="importance")
    for a, b in zip(low.points, low.points[1:]):
        assert b.p_out <= a.p_out + 3 * (a.stderr + b.stderr)
    for a, b in zip(low.points, high.points):
        assert a.p_out <= b.p_out + 3 * (a.stderr + b.stderr)


def test_same_seed_same_curve_any_workers():
    args = (parallel_relays(2, 2), "S", "D", 1.0, (0, 10, 20), 150_000)
    a = simulate_outage(*args, seed=5, workers=1, estimator="importance")
    b = simulate_outage(*args, seed=5, workers=4, estimator="importance")
    assert a == b
    assert a.to_csv() == b.to_csv()


def test_csv_layout():
    curve = simulate_outage(single_edge(), "S", "D", 1.0, (0, 10, 20), 20_000, seed=0)
    est = estimate_diversity(curve, (0, 20))
    lines = curve.to_csv(est).splitlines()
    assert lines[0] == "snr_db,p_out,trials,stderr"
    assert len(lines) == 5
    assert lines[-1].startswith("# diversity_estimate slope=")


def _synthetic(fn, grid, events=10**4):
    pts = tuple(OutagePoint(float(db), fn(10 ** (db / 10)), 10**6, 0.0, events) for db in grid)
    return OutageCurve(pts, 1.0, 0)


def test_exact_power_law_slope():
    est = estimate_diversity(_synthetic(lambda r: r**-2, range(0, 45, 5)), (10, 40))
    assert est.slope == pytest.approx(2.0, abs=1e-12)
    assert est.residual < 1e-12


def test_zero_point_in_window_is_an_error():
    curve = _synthetic(lambda r: 0.0 if r > 500 else 1 / r, range(0, 45, 5))
    with pytest.raises(InsufficientDataError):
        estimate_diversity(curve, (10, 40))


def test_auto_window_needs_enough_events():
    curve = _synthetic(lambda r: r**-1, range(0, 45, 5), events=10)
    with pytest.raises(InsufficientDataError):
        estimate_diversity(curve)
    pts = list(_synthetic(lambda r: r**-3, range(0, 45, 5)).points)
    pts[-1] = OutagePoint(40.0, pts[-1].p_out, 10**6, 0.0, 5)
    est = estimate_diversity(OutageCurve(tuple(pts), 1.0, 0))
    assert est.window_db == (20.0, 35.0)


def test_importance_sampling_agrees_with_plain_at_moderate_snr():
    net = parallel_relays(2, 2)
    grid = (5.0, 10.0)
    plain = simulate_outage(net, "S", "D", 1.0, grid, 4 * 10**5, seed=2, estimator="plain")
    imp = simulate_outage(net, "S", "D", 1.0, grid, 4 * 10**5, seed=2, estimator="importance")
    for a, b in zip(plain.points, imp.points):
        assert abs(a.p_out - b.p_out) <= 3 * math.hypot(a.stderr, b.stderr)


def test_multi_hop_slope_lower_bound():
    net = parallel_relays(2, 2)
    curve = simulate_outage(net, "S", "D", 1.0, (20, 25, 30, 35, 40), 2 * 10**5, seed=4, estimator="importance")
    low = estimate_diversity(curve, (20, 35))
    high = estimate_diversity(curve, (25, 40))
    assert low.slope >= 1.5 and high.slope >= 1.5
    assert high.slope >= low.slope - 0.1


def test_invalid_arguments():
    with pytest.raises(ValueError):
        simulate_outage(single_edge(), "S", "D", trials=0)
    with pytest.raises(ValueError):
        simulate_outage(single_edge(), "S", "D", estimator="other")
