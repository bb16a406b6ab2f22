"""Time-averaged trapping probability and sweeps over the nonlinearity.

The estimator averages ``|psi_r(t)|^2`` over ``M`` uniformly spaced times in
the second half ``[T/2, T]`` of the run, both endpoints included, so the
initial transient does not bias the result.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dynamics import IntegratorConfig, WalkParams, WalkState, evolve
from .errors import CoverageError, NLQWalkError
from .graph import Lattice


@dataclass(frozen=True)
class AverageConfig:
    total_time: float = 300.0
    samples: int = 400

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if self.samples < 2:
            raise ValueError("need at least 2 samples")

    def times(self):
        """``t_j = T/2 + (j-1) (T/2) / (M-1)`` for ``j = 1..M``."""
        T = self.total_time
        return np.linspace(T / 2, T, self.samples)

    def to_dict(self):
        return {
            "total_time": self.total_time,
            "samples": self.samples,
            "window": [self.total_time / 2, self.total_time],
            "sample_times": "uniform, endpoint-inclusive",
        }


@dataclass(frozen=True)
class SweepSpec:
    g_values: tuple
    lattice: Lattice
    start_vertex: int
    avg: AverageConfig = field(default_factory=AverageConfig)

    def __post_init__(self):
        g = tuple(float(x) for x in self.g_values)
        if not g:
            raise ValueError("g_values must not be empty")
        if not all(math.isfinite(x) for x in g):
            raise ValueError("g_values must be finite")
        if not (0 <= self.start_vertex < self.lattice.n):
            raise IndexError(f"start vertex {self.start_vertex} out of range")
        object.__setattr__(self, "g_values", g)


class SweepPoint(NamedTuple):
    g: float
    p_bar: float
    error: str | None = None


def time_averaged_prob(series, r, avg):
    """Mean of ``p_r`` over the averaging grid of ``avg``.

    ``series`` must contain every grid time (run :func:`evolve` with
    ``times=avg.times()``, which samples them from the dense output).
    """
    if not (0 <= r < series.n):
        raise IndexError(f"vertex {r} out of range")
    T = avg.total_time
    if series.times[-1] < T - 1e-9 * max(1.0, T):
        raise CoverageError(f"series ends at t={series.times[-1]}, needs to reach T={T}")
    grid = avg.times()
    idx = np.searchsorted(series.times, grid - 1e-9)
    idx = np.clip(idx, 0, len(series.times) - 1)
    missing = ~np.isclose(series.times[idx], grid, rtol=0, atol=1e-9)
    if np.any(missing):
        t_bad = grid[np.argmax(missing)]
        raise CoverageError(
            f"series has no sample at t={t_bad}; evolve with times=avg.times()"
        )
    return float(np.mean(series.probs[idx, r]))


def averaged_probability(lat, g, r, avg=None, cfg=None, gamma=1.0):
    """Run one walk from ``|r>`` and return its time-averaged ``p_r``."""
    avg = avg or AverageConfig()
    series = evolve(
        lat, WalkParams(g, gamma), WalkState.localized(lat.n, r),
        avg.total_time, cfg, times=avg.times(),
    )
    return time_averaged_prob(series, r, avg)


def _sweep_point(args):
    lat, g, r, avg, cfg = args
    try:
        return SweepPoint(g, averaged_probability(lat, g, r, avg, cfg))
    except (NLQWalkError, FloatingPointError, ArithmeticError) as exc:
        return SweepPoint(g, math.nan, f"g={g}: {exc}")


def default_jobs():
    env = os.environ.get("NLQWALK_JOBS")
    if env:
        return max(1, int(env))
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def sweep_g(spec, cfg=None, jobs=1):
    """Time-averaged trapping probability for each ``g`` in ``spec``.

    Results keep the input order. A failed point yields ``p_bar = nan`` and
    an error message naming its ``g``; the remaining points still run.
    """
    cfg = cfg or IntegratorConfig()
    tasks = [(spec.lattice, g, spec.start_vertex, spec.avg, cfg) for g in spec.g_values]
    jobs = max(1, min(int(jobs), len(tasks)))
    if jobs == 1:
        return [_sweep_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_point, tasks))


def estimate_transition(sweep, threshold=0.5):
    """Linearly interpolate the first upward crossing of ``threshold``.

    ``sweep`` is a sequence of ``(g, p_bar)`` pairs (``SweepPoint`` works).
    Returns ``None`` when there is no crossing. This is a convenience
    locator, not a definition of the critical nonlinearity.
    """
    pts = sorted((float(p[0]), float(p[1])) for p in sweep if math.isfinite(p[1]))
    for (g0, p0), (g1, p1) in zip(pts, pts[1:]):
        if p0 < threshold <= p1:
            return g0 + (threshold - p0) * (g1 - g0) / (p1 - p0)
    return None
