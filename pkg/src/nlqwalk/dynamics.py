"""Time evolution of the cubic nonlinear Schrödinger walk.

With ``H = -gamma * A`` and ``hbar = 1`` each amplitude obeys

    i dpsi_j/dt = -gamma * sum_k A_jk psi_k - g |psi_j|^2 psi_j

so positive ``g`` is the self-focusing (trapping) sign. The flow conserves
the norm and the Gross-Pitaevskii energy

    E(psi) = <psi|H|psi> - (g/2) sum_j |psi_j|^4,

and neither is ever enforced by renormalising: both are reported per sample
so that their drift can be used as an accuracy diagnostic.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853, RK45

from .errors import DimensionError, IntegrationError, NonFiniteError, PreconditionError
from .graph import apply_adjacency

NORM_TOL = 1e-12


class Method(enum.Enum):
    ADAPTIVE_RK45 = "rk45"
    ADAPTIVE_DOP853 = "dop853"
    FIXED_RK4 = "rk4"


@dataclass(frozen=True)
class WalkParams:
    g: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.g):
            raise ValueError(f"g must be finite, got {self.g}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass
class WalkState:
    psi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)

    @classmethod
    def localized(cls, n, r, t=0.0):
        """The basis state ``|r>``."""
        if not (0 <= r < n):
            raise IndexError(f"vertex {r} out of range for n={n}")
        psi = np.zeros(n, dtype=complex)
        psi[r] = 1.0
        return cls(psi, t)

    @property
    def norm(self):
        return float(np.sum(np.abs(self.psi) ** 2))


@dataclass(frozen=True)
class IntegratorConfig:
    method: Method = Method.ADAPTIVE_DOP853
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.01
    sample_dt: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        for name in ("rel_tol", "abs_tol", "max_step", "sample_dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def to_dict(self):
        return {
            "method": self.method.value,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_step": self.max_step,
            "sample_dt": self.sample_dt,
        }


@dataclass
class ObservableSeries:
    """Sampled trajectory.

    ``states`` holds the raw amplitudes per sample; it is ``None`` for a
    series read back from a file.
    """

    times: np.ndarray
    probs: np.ndarray
    norm: np.ndarray
    energy: np.ndarray
    states: np.ndarray | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_states(cls, lat, params, times, states, meta=None):
        states = np.asarray(states, dtype=complex)
        probs = np.abs(states) ** 2
        return cls(
            times=np.asarray(times, dtype=float),
            probs=probs,
            norm=probs.sum(axis=1),
            energy=gp_energy_batch(lat, params, states),
            states=states,
            meta=dict(meta or {}),
        )

    @property
    def n(self):
        return self.probs.shape[1]

    @property
    def final_psi(self):
        return self.states[-1].copy()

    @property
    def final_state(self):
        return WalkState(self.final_psi, float(self.times[-1]))

    def prob(self, v):
        return self.probs[:, v]

    def concat(self, other):
        """Append ``other``, dropping its first sample if it repeats our last time."""
        start = 1 if np.isclose(other.times[0], self.times[-1], rtol=0, atol=1e-12) else 0
        return ObservableSeries(
            times=np.concatenate([self.times, other.times[start:]]),
            probs=np.vstack([self.probs, other.probs[start:]]),
            norm=np.concatenate([self.norm, other.norm[start:]]),
            energy=np.concatenate([self.energy, other.energy[start:]]),
            states=np.vstack([self.states, other.states[start:]]),
            meta=dict(self.meta),
        )


def _check_vector(lat, psi):
    psi = np.asarray(psi)
    if psi.shape != (lat.n,):
        raise DimensionError(f"expected vector of length {lat.n}, got shape {psi.shape}")
    return psi


def _make_rhs(lat, params):
    g, gamma = params.g, params.gamma

    def f(t, psi):
        return 1j * (gamma * apply_adjacency(lat, psi) + g * (psi.real**2 + psi.imag**2) * psi)

    return f


def rhs(lat, params, psi):
    """Time derivative ``i (gamma A psi + g |psi|^2 psi)``."""
    psi = _check_vector(lat, psi).astype(complex)
    if not np.all(np.isfinite(psi)):
        raise NonFiniteError("non-finite amplitude in state")
    return _make_rhs(lat, params)(0.0, psi)


def hamiltonian_expectation(lat, psi, gamma=1.0):
    """``<psi|H|psi>`` with ``H = -gamma A``."""
    psi = _check_vector(lat, psi)
    val = np.vdot(psi, apply_adjacency(lat, psi))
    if abs(val.imag) > 1e-12 * max(1.0, abs(val)):
        raise ArithmeticError(f"<psi|A|psi> has imaginary part {val.imag}")
    return float(-gamma * val.real)


def gp_energy(lat, params, psi):
    psi = _check_vector(lat, psi)
    p = np.abs(psi) ** 2
    return hamiltonian_expectation(lat, psi, params.gamma) - 0.5 * params.g * float(np.sum(p * p))


def gp_energy_batch(lat, params, states):
    """Row-wise :func:`gp_energy` for a ``(samples, n)`` array."""
    states = np.asarray(states, dtype=complex)
    if states.ndim == 1:
        states = states[None, :]
    out = np.empty(states.shape[0])
    for k, psi in enumerate(states):
        out[k] = gp_energy(lat, params, psi)
    return out


def sample_grid(t0, t_end, dt):
    """Uniform times ``t0, t0+dt, ...`` always ending exactly at ``t_end``."""
    span = t_end - t0
    n = int(round(span / dt))
    if n >= 1 and abs(n * dt - span) <= 1e-9 * max(1.0, abs(t_end)):
        return np.linspace(t0, t_end, n + 1)
    k = int(math.floor(span / dt))
    grid = t0 + dt * np.arange(k + 1)
    if t_end - grid[-1] <= 1e-9 * max(1.0, abs(t_end)):
        grid = grid[:-1]
    return np.append(grid, t_end)


def _rk4_run(f, t0, y0, times, max_step):
    out = np.empty((len(times), len(y0)), dtype=complex)
    out[0] = y0
    y, t = y0.copy(), t0
    for i in range(1, len(times)):
        span = times[i] - t
        m = max(1, int(math.ceil(span / max_step - 1e-12)))
        h = span / m
        for _ in range(m):
            k1 = f(t, y)
            k2 = f(t + h / 2, y + h / 2 * k1)
            k3 = f(t + h / 2, y + h / 2 * k2)
            k4 = f(t + h, y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        if not np.all(np.isfinite(y)):
            raise NonFiniteError(f"state became non-finite near t={t}")
        t = times[i]
        out[i] = y
    return out


_ADAPTIVE = {Method.ADAPTIVE_RK45: RK45, Method.ADAPTIVE_DOP853: DOP853}


def _adaptive_run(f, t0, y0, times, cfg):
    solver = _ADAPTIVE[cfg.method](
        f, t0, y0, times[-1],
        rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step,
    )
    out = np.empty((len(times), len(y0)), dtype=complex)
    out[0] = y0
    i = 1
    while i < len(times):
        # rejected trial steps may overflow; accepted states are checked below
        with np.errstate(over="ignore", invalid="ignore"):
            msg = solver.step()
        if solver.status == "failed":
            raise IntegrationError(
                f"integrator failed at t={solver.t!r}: {msg}", t=float(solver.t)
            )
        if not np.all(np.isfinite(solver.y)):
            raise NonFiniteError(f"state became non-finite near t={solver.t}")
        if solver.status == "finished":
            upto = len(times)
        else:
            upto = int(np.searchsorted(times, solver.t, side="right"))
        if upto > i:
            dense = solver.dense_output()
            out[i:upto] = dense(times[i:upto]).T
            if solver.status == "finished":
                # land exactly on the integrator's own final state
                out[-1] = solver.y
            i = upto
    return out


def evolve(lat, params, psi0, t_end, cfg=None, times=None, check_norm=True):
    """Integrate from ``psi0.t`` to ``t_end`` and sample observables.

    Samples are taken every ``cfg.sample_dt`` (plus ``t_end``) unless
    explicit ``times`` are given; in both cases ``psi0.t`` and ``t_end`` are
    included. Off-step samples come from the integrator's dense output.
    ``check_norm=False`` skips the normalisation precondition, for
    continuing a run whose state already carries integration drift.
    """
    cfg = cfg or IntegratorConfig()
    if not isinstance(psi0, WalkState):
        psi0 = WalkState(psi0)
    y0 = _check_vector(lat, psi0.psi).astype(complex)
    if not np.all(np.isfinite(y0)):
        raise NonFiniteError("non-finite amplitude in initial state")
    norm0 = float(np.sum(np.abs(y0) ** 2))
    if check_norm and abs(norm0 - 1.0) > NORM_TOL:
        raise PreconditionError(f"initial state must be normalised, |psi|^2 = {norm0!r}")
    t0 = float(psi0.t)
    t_end = float(t_end)
    if not t_end > t0:
        raise PreconditionError(f"t_end={t_end} must exceed start time {t0}")

    if times is None:
        grid = sample_grid(t0, t_end, cfg.sample_dt)
    else:
        grid = np.asarray(times, dtype=float)
        if grid.size and (grid.min() < t0 - 1e-12 or grid.max() > t_end + 1e-12):
            raise ValueError("requested sample times fall outside [t0, t_end]")
        grid = np.unique(np.concatenate([[t0], np.clip(grid, t0, t_end), [t_end]]))

    f = _make_rhs(lat, params)
    if cfg.method is Method.FIXED_RK4:
        states = _rk4_run(f, t0, y0, grid, cfg.max_step)
    else:
        states = _adaptive_run(f, t0, y0, grid, cfg)

    meta = {"graph": lat.label(), "g": params.g, "gamma": params.gamma, **cfg.to_dict()}
    return ObservableSeries.from_states(lat, params, grid, states, meta)
