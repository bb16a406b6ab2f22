import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlqwalk.bounds import (
    critical_g_upper_bound,
    eval_f,
    inequality_slack,
    minimize_f,
    required_g,
    trap_roots,
)
from nlqwalk.errors import DomainError

# argmin / min of f on a 1e7-point grid over [1e-6, 1 - 1e-6]
GRID_ORACLE = {
    1: (0.6983041732213173, 7.221437226552126),
    2: (0.6666666333327633, 9.000000000000028),
    4: (0.6370074896852489, 11.458063075961869),
    9: (0.6059314487298448, 15.579438084535013),
}


def grid_min(deg, points=10**6):
    x = np.linspace(1e-6, 1 - 1e-6, points)
    f = 2 * np.sqrt(deg) / np.sqrt(x * (1 - x)) + 2 / x
    k = np.argmin(f)
    return x[k], f[k]


# ---- eval_f --------------------------------------------------------------

def test_f_deg2_at_two_thirds():
    assert eval_f(2, 2 / 3) == pytest.approx(9.0, abs=1e-12)


def test_f_deg1_at_half():
    assert eval_f(1, 0.5) == pytest.approx(8.0, abs=1e-12)


def test_f_deg1_near_known_minimum():
    assert eval_f(1, 0.698) == pytest.approx(7.22, abs=0.005)


@pytest.mark.parametrize("x", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_f_domain(x):
    with pytest.raises(DomainError):
        eval_f(1, x)


def test_f_bad_degree():
    with pytest.raises(DomainError):
        eval_f(0, 0.5)
    with pytest.raises(DomainError):
        eval_f(1.5, 0.5)


@pytest.mark.parametrize("deg", [1, 2, 3, 7])
def test_f_convex_and_divergent(deg):
    x = np.linspace(1e-4, 1 - 1e-4, 20001)
    h = x[1] - x[0]
    f = eval_f(deg, x)
    assert np.all(f > 0) and np.all(np.isfinite(f))
    second = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    assert np.all(second > 0)
    assert eval_f(deg, 1e-9) > 1e4 and eval_f(deg, 1 - 1e-12) > 1e4


# ---- minimize_f ----------------------------------------------------------

def test_minimum_deg2_closed_form():
    p_star, f_min = minimize_f(2)
    assert p_star == pytest.approx(2 / 3, abs=1e-9)
    assert f_min == pytest.approx(9.0, abs=1e-9)


def test_minimum_deg1_reference_values():
    p_star, f_min = minimize_f(1)
    assert p_star == pytest.approx(0.698, abs=0.005)
    assert f_min == pytest.approx(7.22, abs=0.005)


@pytest.mark.parametrize("deg", sorted(GRID_ORACLE))
def test_minimum_matches_frozen_grid_oracle(deg):
    p_star, f_min = minimize_f(deg)
    p_ref, f_ref = GRID_ORACLE[deg]
    assert p_star == pytest.approx(p_ref, abs=1e-5)
    assert f_min == pytest.approx(f_ref, abs=1e-5)


@pytest.mark.parametrize("deg", [3, 5, 16])
def test_minimum_matches_live_grid_scan(deg):
    p_star, f_min = minimize_f(deg)
    p_ref, f_ref = grid_min(deg)
    assert p_star == pytest.approx(p_ref, abs=1e-5)
    assert f_min == pytest.approx(f_ref, abs=1e-5)


def test_critical_upper_bounds():
    assert critical_g_upper_bound(1) == pytest.approx(7.22, abs=0.005)
    assert critical_g_upper_bound(2) == pytest.approx(9.0, abs=1e-9)
    assert critical_g_upper_bound(9) == pytest.approx(GRID_ORACLE[9][1], abs=1e-5)


# ---- trap_roots / required_g ---------------------------------------------

def test_roots_deg1_g20():
    res = trap_roots(1, 20)
    assert res.p_plus == pytest.approx(0.987, abs=0.005)
    assert res.guarantee and not res.extrapolated


def test_roots_deg1_g40():
    assert trap_roots(1, 40).p_plus >= 0.997


def test_roots_at_minimum_give_no_guarantee():
    res = trap_roots(2, 9.0)
    assert res.p_plus is None and res.p_minus is None
    assert not res.guarantee


def test_roots_below_minimum():
    res = trap_roots(2, 8.0)
    assert not res.guarantee
    assert res.to_dict()["guarantee"] is False


@pytest.mark.parametrize("g", [0.0, -1.0, math.inf])
def test_roots_domain(g):
    with pytest.raises(DomainError):
        trap_roots(1, g)


def test_large_degree_flagged():
    assert trap_roots(4, 30).extrapolated


def test_required_g_examples():
    assert required_g(2, 0.95) == pytest.approx(15.1, abs=0.05)
    # 0.987 is p_plus(|g| = 20) rounded; f is steep there, so the rounded
    # value lands ~2% low while the unrounded root maps back exactly
    assert required_g(1, 0.987) == pytest.approx(20.0, rel=0.02)
    assert required_g(1, trap_roots(1, 20).p_plus) == pytest.approx(20.0, abs=1e-6)
    assert required_g(2, 2 / 3 + 1e-9) == pytest.approx(9.0, abs=1e-6)


@pytest.mark.parametrize("p", [0.5, 2 / 3, 1.0, 1.2])
def test_required_g_domain(p):
    with pytest.raises(DomainError):
        required_g(2, p)


def test_report_schema():
    d = trap_roots(1, 20).to_dict()
    assert set(d) >= {"deg_r", "g_abs", "p_star", "f_min", "p_minus", "p_plus", "guarantee"}


# ---- properties ----------------------------------------------------------

degrees = st.sampled_from([1, 2])


@settings(max_examples=200, deadline=None)
@given(deg=degrees, excess=st.floats(0.01, 500.0))
def test_round_trip(deg, excess):
    g = minimize_f(deg)[1] + excess
    res = trap_roots(deg, g)
    assert res.p_minus < res.p_star < res.p_plus
    assert eval_f(deg, res.p_minus) == pytest.approx(g, abs=1e-6)
    assert required_g(deg, res.p_plus) == pytest.approx(g, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(deg=degrees, excess=st.floats(0.05, 100.0))
def test_sign_structure_around_roots(deg, excess):
    g = minimize_f(deg)[1] + excess
    res = trap_roots(deg, g)
    inside = np.linspace(res.p_minus, res.p_plus, 102)[1:-1]
    assert np.all(eval_f(deg, inside) < g)
    left = np.linspace(1e-6, res.p_minus, 50)[:-1]
    right = np.linspace(res.p_plus, 1 - 1e-9, 50)[1:]
    assert np.all(eval_f(deg, left) > g)
    assert np.all(eval_f(deg, right) > g)


@pytest.mark.parametrize("deg", [1, 2])
def test_monotone(deg):
    f_min = minimize_f(deg)[1]
    gs = f_min + np.linspace(0.01, 200, 60)
    p_plus = [trap_roots(deg, g).p_plus for g in gs]
    assert np.all(np.diff(p_plus) > 0)
    p_star = minimize_f(deg)[0]
    targets = np.linspace(p_star + 1e-3, 1 - 1e-4, 60)
    assert np.all(np.diff([required_g(deg, p) for p in targets]) > 0)


def test_random_round_trips_50_per_degree():
    rng = np.random.default_rng(7)
    for deg in (1, 2):
        f_min = minimize_f(deg)[1]
        for g in f_min + 0.01 + rng.uniform(0, 100, 50):
            assert required_g(deg, trap_roots(deg, g).p_plus) == pytest.approx(g, abs=1e-6)


def test_inequality_slack_masks_edges():
    slack = inequality_slack(1, 5.0, [0.0, 0.5, 1.0])
    assert math.isnan(slack[0]) and math.isnan(slack[2])
    assert slack[1] == pytest.approx(8.0 - 5.0)
