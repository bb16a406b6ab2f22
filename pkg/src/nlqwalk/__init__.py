"""Nonlinear continuous-time quantum walks on paths and cycles.

Simulation of the cubic nonlinear Schrödinger walk, the analytic
self-trapping bound, time-averaged trapping probabilities and timed
state transfer.
"""
from .analysis import (
    AverageConfig,
    SweepPoint,
    SweepSpec,
    averaged_probability,
    estimate_transition,
    sweep_g,
    time_averaged_prob,
)
from .bounds import (
    TrapBoundResult,
    critical_g_upper_bound,
    eval_f,
    inequality_slack,
    minimize_f,
    required_g,
    trap_roots,
)
from .dynamics import (
    IntegratorConfig,
    Method,
    ObservableSeries,
    WalkParams,
    WalkState,
    evolve,
    gp_energy,
    hamiltonian_expectation,
    rhs,
)
from .errors import *  # noqa: F401,F403
from .graph import (
    Lattice,
    LatticeKind,
    apply_adjacency,
    degree,
    from_edges,
    make_cycle,
    make_path,
    parse_lattice,
)
from .transfer import GSchedule, Segment, TransferReport, run_schedule, timed_transfer

__version__ = "0.1.0"
