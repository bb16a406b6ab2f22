"""Analytic self-trapping bound.

Starting from a localized state at a vertex of degree ``d``, the trapping
probability ``p(t) = |psi_r(t)|^2`` always satisfies ``f(p) >= |g|`` with

    f(x) = 2 sqrt(d) / sqrt(x (1 - x)) + 2 / x,    0 < x < 1.

``f`` is strictly convex with a single minimum ``(p_star, f_min)``. When
``|g| > f_min`` the equation ``f(x) = |g|`` has two roots ``p_minus <
p_plus``; since ``p(0) = 1`` and ``p`` is continuous, ``p(t) >= p_plus`` for
all time. Conversely, a walk that must keep ``p >= p_target`` needs ``|g| >=
f(p_target)``.

The inequality uses the operator-norm estimate ``||B|| <= 2`` for the graph
with the start vertex removed, which holds for paths and cycles. For other
degrees the formula is still evaluated but results are flagged as
extrapolations.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError

EPS = 1e-12
# bisect to float resolution: f is steep near 1, so x errors of 1e-10 would
# show up as ~1e-5 errors in |g| for large |g|
X_TOL = 1e-15
VALIDATED_DEGREES = (1, 2)


def _check_deg(deg_r):
    if int(deg_r) != deg_r or deg_r < 1:
        raise DomainError(f"deg_r must be a positive integer, got {deg_r}")
    return int(deg_r)


def eval_f(deg_r, x):
    """Bound function; accepts scalars or arrays with entries in (0, 1)."""
    deg_r = _check_deg(deg_r)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)) or np.any(~(x_arr < 1)):
        raise DomainError("f(x) is defined only for 0 < x < 1")
    val = 2.0 * math.sqrt(deg_r) / np.sqrt(x_arr * (1.0 - x_arr)) + 2.0 / x_arr
    return float(val) if val.ndim == 0 else val


def _df(deg_r, x):
    # d/dx of eval_f
    s = x * (1.0 - x)
    return -math.sqrt(deg_r) * (1.0 - 2.0 * x) / s**1.5 - 2.0 / x**2


def _bisect(fun, lo, hi, tol=X_TOL):
    """Sign-change bisection; ``fun(lo)`` and ``fun(hi)`` must differ in sign."""
    f_lo = fun(lo)
    if f_lo == 0:
        return lo
    if fun(hi) == 0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = fun(mid)
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def minimize_f(deg_r):
    """Return ``(p_star, f_min)`` by bisecting on the sign of ``f'``."""
    deg_r = _check_deg(deg_r)
    # f' < 0 near 0 and > 0 near 1
    p_star = _bisect(lambda x: _df(deg_r, x), EPS, 1.0 - EPS)
    return p_star, eval_f(deg_r, p_star)


def critical_g_upper_bound(deg_r):
    """Upper bound on the critical nonlinearity: ``|g_c| <= f_min``."""
    return minimize_f(deg_r)[1]


@dataclass(frozen=True)
class TrapBoundResult:
    deg_r: int
    g_abs: float
    p_star: float
    f_min: float
    p_minus: float | None
    p_plus: float | None

    @property
    def guarantee(self):
        return self.p_plus is not None

    @property
    def extrapolated(self):
        return self.deg_r not in VALIDATED_DEGREES

    def to_dict(self):
        d = asdict(self)
        d["guarantee"] = self.guarantee
        d["extrapolated"] = self.extrapolated
        return d


def trap_roots(deg_r, g_abs):
    """Solve ``f(x) = |g|`` on both sides of the minimum.

    Roots are ``None`` when ``g_abs <= f_min``; equality gives no guarantee
    because the argument needs ``|g| > f_min`` strictly.
    """
    deg_r = _check_deg(deg_r)
    g_abs = float(g_abs)
    if not (g_abs > 0 and math.isfinite(g_abs)):
        raise DomainError(f"g_abs must be positive and finite, got {g_abs}")
    p_star, f_min = minimize_f(deg_r)
    if g_abs <= f_min:
        return TrapBoundResult(deg_r, g_abs, p_star, f_min, None, None)

    def h(x):
        return eval_f(deg_r, x) - g_abs

    p_minus = _bisect(h, EPS, p_star)
    p_plus = _bisect(h, p_star, 1.0 - EPS)
    return TrapBoundResult(deg_r, g_abs, p_star, f_min, p_minus, p_plus)


def required_g(deg_r, p_target):
    """Smallest ``|g|`` for which the bound guarantees ``p(t) >= p_target``."""
    deg_r = _check_deg(deg_r)
    p_target = float(p_target)
    if not p_target < 1.0:
        raise DomainError(f"p_target must be below 1, got {p_target}")
    p_star, _ = minimize_f(deg_r)
    # p_star itself is only resolved to a few ulps
    if not p_target > p_star + 1e-12:
        raise DomainError(
            f"p_target={p_target} must exceed the minimiser p_star={p_star:.6f}; "
            "smaller targets cannot be the upper root"
        )
    return eval_f(deg_r, p_target)


def inequality_slack(deg_r, g, p, p_range=(0.001, 0.999)):
    """``f(p) - |g|`` for each sample with ``p`` inside ``p_range``.

    Every entry should be non-negative for a trajectory started at the
    vertex of degree ``deg_r``. Samples outside the range return ``nan``.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    lo, hi = p_range
    inside = (p > lo) & (p < hi)
    out = np.full(p.shape, np.nan)
    if np.any(inside):
        out[inside] = eval_f(deg_r, p[inside]) - abs(g)
    return out
