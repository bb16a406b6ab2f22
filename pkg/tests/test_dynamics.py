import math

import numpy as np
import pytest
from scipy.linalg import expm

from nlqwalk.bounds import inequality_slack
from nlqwalk.dynamics import (
    IntegratorConfig,
    Method,
    WalkParams,
    WalkState,
    evolve,
    gp_energy,
    hamiltonian_expectation,
    rhs,
    sample_grid,
)
from nlqwalk.errors import DimensionError, IntegrationError, NonFiniteError, PreconditionError
from nlqwalk.graph import degree, make_cycle, make_path


def linear_oracle(lat, psi0, times):
    """Exact g = 0 evolution: psi(t) = exp(i A t) psi0."""
    A = lat.adjacency_matrix()
    return np.array([expm(1j * A * t) @ psi0 for t in times])


# ---- rhs -----------------------------------------------------------------

def test_rhs_linear_hop():
    np.testing.assert_allclose(rhs(make_path(2), WalkParams(0.0), np.array([1, 0])), [0, 1j])


def test_rhs_nonlinear_term():
    np.testing.assert_allclose(rhs(make_path(2), WalkParams(5.0), np.array([1, 0])), [5j, 1j])


def test_rhs_eigenvector():
    psi = np.ones(3, dtype=complex) / np.sqrt(3)
    np.testing.assert_allclose(rhs(make_cycle(3), WalkParams(0.0), psi), 2j * psi, atol=1e-15)


def test_rhs_rejects_nonfinite():
    with pytest.raises(NonFiniteError):
        rhs(make_path(3), WalkParams(1.0), np.array([np.nan, 0, 0]))


def test_rhs_dimension():
    with pytest.raises(DimensionError):
        rhs(make_path(3), WalkParams(1.0), np.zeros(4))


def test_rhs_gamma_scales_hopping():
    out = rhs(make_path(2), WalkParams(0.0, gamma=2.5), np.array([1, 0]))
    np.testing.assert_allclose(out, [0, 2.5j])


# ---- energy --------------------------------------------------------------

@pytest.mark.parametrize("lat", [make_path(5), make_cycle(7)])
@pytest.mark.parametrize("g", [-3.0, 0.0, 7.5])
def test_localized_energy(lat, g):
    assert gp_energy(lat, WalkParams(g), WalkState.localized(lat.n, 2).psi) == pytest.approx(-g / 2)


def test_energy_uniform_c3():
    psi = np.ones(3) / np.sqrt(3)
    assert gp_energy(make_cycle(3), WalkParams(0.0), psi) == pytest.approx(-2.0)


def test_energy_uniform_c4():
    psi = np.full(4, 0.5)
    assert gp_energy(make_cycle(4), WalkParams(4.0), psi) == pytest.approx(-2.5)


def test_hamiltonian_expectation_examples():
    assert hamiltonian_expectation(make_path(4), WalkState.localized(4, 1).psi) == 0.0
    assert hamiltonian_expectation(make_path(2), np.ones(2) / np.sqrt(2)) == pytest.approx(-1.0)


def test_hamiltonian_expectation_within_spectrum():
    lat = make_path(10)
    evals = np.linalg.eigvalsh(-lat.adjacency_matrix())
    rng = np.random.default_rng(5)
    for _ in range(50):
        psi = rng.normal(size=10) + 1j * rng.normal(size=10)
        psi /= np.linalg.norm(psi)
        val = hamiltonian_expectation(lat, psi)
        assert evals[0] - 1e-12 <= val <= evals[-1] + 1e-12
        assert -2 <= val <= 2


# ---- evolve --------------------------------------------------------------

def test_sample_grid_includes_endpoints():
    assert np.allclose(sample_grid(0.0, 1.0, 0.25), [0, 0.25, 0.5, 0.75, 1.0])
    g = sample_grid(0.0, 1.0, 0.3)
    assert g[0] == 0.0 and g[-1] == 1.0
    assert np.all(np.diff(g) > 0)
    g = sample_grid(5.0, 7.22, 0.01)
    assert g[-1] == 7.22 and len(g) == 223


def test_two_site_cos_squared():
    lat = make_path(2)
    series = evolve(lat, WalkParams(0.0), WalkState.localized(2, 0), 6.0, IntegratorConfig(sample_dt=0.05))
    np.testing.assert_allclose(series.prob(0), np.cos(series.times) ** 2, atol=1e-9)
    exact = linear_oracle(lat, np.array([1, 0], dtype=complex), series.times)
    np.testing.assert_allclose(series.probs, np.abs(exact) ** 2, atol=1e-9)


@pytest.mark.parametrize("method", list(Method))
@pytest.mark.parametrize("lat, r", [(make_path(20), 4), (make_cycle(16), 0)])
def test_linear_limit_matches_expm(method, lat, r):
    psi0 = WalkState.localized(lat.n, r)
    series = evolve(lat, WalkParams(0.0), psi0, 8.0, IntegratorConfig(method=method, sample_dt=0.5))
    exact = linear_oracle(lat, psi0.psi, series.times)
    assert np.abs(series.probs - np.abs(exact) ** 2).max() < 1e-6


def test_series_invariants():
    lat = make_path(15)
    series = evolve(lat, WalkParams(3.0), WalkState.localized(15, 7), 5.0)
    assert np.all(np.diff(series.times) > 0)
    assert series.times[0] == 0.0 and series.times[-1] == 5.0
    np.testing.assert_allclose(series.probs.sum(axis=1), series.norm, atol=1e-12)
    assert series.final_state.t == 5.0


@pytest.mark.parametrize("lat, r", [(make_path(21), 10), (make_path(21), 0), (make_cycle(12), 3)])
@pytest.mark.parametrize("g", [-6.0, 2.5, 12.0])
def test_norm_and_energy_conserved(lat, r, g):
    cfg = IntegratorConfig()
    series = evolve(lat, WalkParams(g), WalkState.localized(lat.n, r), 20.0, cfg)
    assert np.abs(series.norm - 1).max() < 1e-8
    assert np.abs(series.norm - 1).max() < 100 * cfg.rel_tol
    e0 = series.energy[0]
    assert e0 == pytest.approx(-g / 2)
    assert (np.abs(series.energy - e0) / max(1, abs(e0))).max() < 1e-7


@pytest.mark.parametrize("lat, r", [(make_path(21), 10), (make_path(21), 0), (make_cycle(12), 3)])
@pytest.mark.parametrize("g", [-15.0, 4.0, 9.5, 20.0])
def test_trapping_inequality_along_trajectory(lat, r, g):
    series = evolve(lat, WalkParams(g), WalkState.localized(lat.n, r), 15.0, IntegratorConfig(sample_dt=0.02))
    slack = inequality_slack(degree(lat, r), g, series.prob(r))
    assert np.nanmin(slack, initial=np.inf) >= -1e-6


def test_time_reversal_recovers_start():
    # psi(t) solves the flow iff conj(psi(-t)) does, so integrating the
    # conjugated final state forward undoes the run.
    lat = make_path(11)
    params = WalkParams(4.5)
    psi0 = WalkState.localized(11, 5)
    fwd = evolve(lat, params, psi0, 10.0)
    back = evolve(lat, params, WalkState(np.conj(fwd.final_psi)), 10.0, check_norm=False)
    np.testing.assert_allclose(np.conj(back.final_psi), psi0.psi, atol=1e-6)


def test_explicit_times_from_dense_output():
    lat = make_path(2)
    times = np.linspace(0.123, 2.9, 17)
    series = evolve(lat, WalkParams(0.0), WalkState.localized(2, 0), 3.0, times=times)
    assert series.times[0] == 0.0 and series.times[-1] == 3.0
    assert set(np.round(times, 12)) <= set(np.round(series.times, 12))
    np.testing.assert_allclose(series.prob(0), np.cos(series.times) ** 2, atol=1e-9)


def test_rk4_and_adaptive_agree():
    lat = make_cycle(9)
    params = WalkParams(6.0)
    psi0 = WalkState.localized(9, 0)
    a = evolve(lat, params, psi0, 5.0)
    b = evolve(lat, params, psi0, 5.0, IntegratorConfig(method="rk4", max_step=0.002))
    np.testing.assert_allclose(a.probs, b.probs, atol=1e-8)


def test_evolve_starts_from_state_time():
    lat = make_path(4)
    s = evolve(lat, WalkParams(1.0), WalkState.localized(4, 0, t=2.0), 3.0)
    assert s.times[0] == 2.0 and s.times[-1] == 3.0


def test_unnormalised_start_rejected():
    with pytest.raises(PreconditionError):
        evolve(make_path(3), WalkParams(0.0), WalkState(np.array([1, 1, 0])), 1.0)


def test_end_before_start_rejected():
    with pytest.raises(PreconditionError):
        evolve(make_path(3), WalkParams(0.0), WalkState.localized(3, 0), 0.0)


def test_step_underflow_reports_time():
    # at t ~ 1e10 the float spacing (~2e-6) exceeds any step that resolves
    # phase rotation at rate 1e6, so the integrator must give up immediately
    psi0 = WalkState.localized(2, 0, t=1e10)
    with pytest.raises(IntegrationError) as info:
        evolve(make_path(2), WalkParams(1e6), psi0, 1e10 + 1.0)
    assert info.value.t == pytest.approx(1e10)
    assert "t=" in str(info.value)


def test_linear_spreading_p61():
    lat = make_path(61)
    series = evolve(lat, WalkParams(0.0), WalkState.localized(61, 30), 10.0)
    assert series.prob(30)[-1] < 0.1
    # spreads symmetrically about the start
    np.testing.assert_allclose(series.probs[-1], series.probs[-1][::-1], atol=1e-9)


def test_strong_nonlinearity_traps_p61():
    lat = make_path(61)
    series = evolve(lat, WalkParams(7.5), WalkState.localized(61, 30), 10.0, IntegratorConfig(sample_dt=0.01))
    assert series.prob(30).min() > 0.8


def test_bad_config():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0)
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        WalkParams(1.0, gamma=0)
    with pytest.raises(ValueError):
        WalkParams(math.inf)
