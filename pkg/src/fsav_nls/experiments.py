"""Batch experiments: single runs, convergence ladders and cost comparison.

Each ``cmd_*`` function takes a validated :class:`~.config.ExperimentConfig`,
writes its CSV output into ``out_dir`` (created if missing) and returns the
in-memory result so callers can check thresholds without re-reading files.
"""

import csv
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .cnf import CnfConfig, run_cnf
from .config import validate_space_ladder, validate_time_ladder
from .diagnostics import (
    ConservationRecorder,
    ConvergenceTable,
    TimingRecord,
    error_between_runs,
    fmt,
)
from .errors import NoConvergence
from .grid import build_grid, build_symbol
from .presets import initial_condition, potential
from .sav import ModelParams, initial_state
from .stepper import SchemeConfig, run, step_count

log = logging.getLogger(__name__)

__all__ = [
    "Problem",
    "build_problem",
    "simulate",
    "cmd_run",
    "cmd_converge_time",
    "cmd_converge_space",
    "cmd_compare_cost",
]


@dataclass
class Problem:
    grid: object
    params: ModelParams
    symbol: object
    u0: np.ndarray


def build_problem(cfg, n=None):
    """Grid, parameters, symbol and initial data for ``cfg`` (optionally at another ``n``)."""
    n = cfg.n if n is None else n
    x_l, x_r = cfg.domain
    grid = build_grid(cfg.dim, x_l, x_r, n)
    params = ModelParams(
        alpha=cfg.alpha,
        gamma=cfg.gamma,
        beta=cfg.beta,
        potential=potential(cfg.potential, grid),
        c0=cfg.c0,
    )
    symbol = build_symbol(grid, cfg.alpha, cfg.gamma, allow_any_alpha=cfg.allow_any_alpha)
    return Problem(grid, params, symbol, initial_condition(cfg.initial_condition, grid))


def simulate(cfg, tau=None, n=None, scheme=None, observers=(), stride=1):
    """Run one simulation to ``cfg.t_final``.

    Returns ``(P, Q, problem, info)`` where ``info`` carries the wall time,
    step count and (for the implicit comparator) inner iterations.
    """
    tau = cfg.tau if tau is None else tau
    scheme = cfg.scheme if scheme is None else scheme
    prob = build_problem(cfg, n)
    if scheme == "fsav":
        state0 = initial_state(prob.u0, prob.params, prob.grid)
        res = run(
            state0, prob.params, prob.symbol,
            SchemeConfig(tau, denominator_guard=cfg.denominator_guard),
            cfg.t_final, observers=observers, stride=stride,
        )
        info = {"wall_seconds": res.wall_seconds, "steps": res.steps, "inner_iterations": 0}
        return res.state.P, res.state.Q, prob, info
    ccfg = CnfConfig(tau, tol=cfg.cnf_tol, max_iter=cfg.cnf_max_iter)
    res = run_cnf(
        prob.u0.real, prob.u0.imag, prob.params, prob.symbol, ccfg, cfg.t_final,
        observers=observers, stride=stride,
    )
    info = {"wall_seconds": res.wall_seconds, "steps": res.steps, "inner_iterations": res.iterations}
    return res.P, res.Q, prob, info


def _prepare(out_dir):
    out_dir = out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def _snapshot_name(t):
    return f"snapshot_{t:.10g}.csv"


def write_snapshot(path, grid, P, Q, raw=False):
    """CSV of ``|u|`` at the collocation points (x fastest in 2D)."""
    mesh = [m.ravel() for m in grid.mesh()]
    cols = ["x"] if grid.dim == 1 else ["x", "y"]
    cols.append("abs_u")
    data = mesh + [np.sqrt(P * P + Q * Q).ravel()]
    if raw:
        cols += ["P", "Q"]
        data += [np.asarray(P).ravel(), np.asarray(Q).ravel()]
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(cols)
        for row in zip(*data):
            wr.writerow([fmt(v) for v in row])


@dataclass
class RunOutput:
    record: object
    files: list = field(default_factory=list)
    P: np.ndarray = None
    Q: np.ndarray = None
    info: dict = field(default_factory=dict)


def cmd_run(cfg, out_dir=None):
    """Single run writing ``conservation.csv`` and requested snapshots."""
    out_dir = _prepare(out_dir or cfg.output_dir)
    prob = build_problem(cfg)
    M = step_count(cfg.t_final, cfg.tau)
    snap_steps = {int(round(t / cfg.tau)): t for t in cfg.snapshot_times}
    recorder = ConservationRecorder(prob.params, prob.symbol)
    files = []

    def observe(state):
        m = state.step_index
        if m % cfg.stride == 0 or m == M:
            recorder(state)
        if m in snap_steps:
            path = os.path.join(out_dir, _snapshot_name(snap_steps[m]))
            write_snapshot(path, prob.grid, state.P, state.Q, raw=cfg.raw_fields)
            files.append(path)

    P, Q, _, info = simulate(cfg, observers=(observe,), stride=1)
    path = os.path.join(out_dir, "conservation.csv")
    recorder.record.to_csv(path)
    files.insert(0, path)
    log.info("run finished: %d steps, max RH %.3e", info["steps"], recorder.record.max_rh())
    return RunOutput(recorder.record, files, P, Q, info)


def cmd_converge_time(cfg, out_dir=None):
    """Temporal ladder: ``E(tau) = ||run(tau) - run(tau/2)||``.

    Every listed ``tau`` gets a row; the ladder is extended by one extra
    halving so the last row also has a partner run. Raises
    :class:`~.errors.ConstraintViolation` unless ``taus`` halves successively.
    """
    validate_time_ladder(cfg)
    out_dir = _prepare(out_dir or cfg.output_dir)
    taus = list(cfg.taus) or [cfg.tau]
    sols = []
    for tau in taus + [taus[-1] / 2]:
        P, Q, _, _ = simulate(cfg, tau=tau)
        sols.append((P, Q))
        log.info("converge-time: tau=%g done", tau)
    errors = [error_between_runs(*a, *b) for a, b in zip(sols, sols[1:])]
    table = ConvergenceTable("tau", taus, errors)
    table.to_csv(os.path.join(out_dir, "orders_time.csv"))
    return table


def cmd_converge_space(cfg, out_dir=None):
    """Spatial ladder: ``E(N) = ||run(N) - run(2N)||`` on the coarse points.

    The ladder is extended by one doubling so the last listed ``N`` has a
    partner run. Raises :class:`~.errors.ConstraintViolation` unless ``ns``
    doubles successively.
    """
    validate_space_ladder(cfg)
    out_dir = _prepare(out_dir or cfg.output_dir)
    ns = list(cfg.ns) or [cfg.n]
    sols = []
    for n in ns + [2 * ns[-1]]:
        P, Q, prob, _ = simulate(cfg, n=n)
        sols.append((P, Q, prob.grid))
        log.info("converge-space: N=%d done", n)
    errors = [
        error_between_runs(a[0], a[1], b[0], b[1], grid_a=a[2], grid_b=b[2])
        for a, b in zip(sols, sols[1:])
    ]
    table = ConvergenceTable("N", ns, errors)
    table.to_csv(os.path.join(out_dir, "orders_space.csv"))
    return table


def cmd_compare_cost(cfg, out_dir=None):
    """Wall-clock of the SAV scheme against the implicit comparator.

    Times cover the step loop only. A comparator run that fails to converge
    is recorded with ``status=no_convergence`` and the sweep continues.
    """
    out_dir = _prepare(out_dir or cfg.output_dir)
    taus = list(cfg.taus) or [cfg.tau]
    rows = []
    for tau in taus:
        for scheme in ("fsav", "cnf"):
            try:
                _, _, prob, info = simulate(cfg, tau=tau, scheme=scheme)
                rows.append(
                    TimingRecord(scheme, tau, prob.grid.n, info["wall_seconds"], info["steps"],
                                 info["inner_iterations"])
                )
            except NoConvergence as exc:
                log.warning("cnf failed at tau=%g: %s", tau, exc)
                rows.append(TimingRecord(scheme, tau, (cfg.n,) * cfg.dim, 0.0, 0, exc.iterations,
                                         status="no_convergence"))
    with open(os.path.join(out_dir, "cost.csv"), "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["scheme", "tau", "wall_s", "steps", "inner_iters", "status"])
        for r in rows:
            wr.writerow([r.scheme, fmt(r.tau), fmt(r.wall_seconds), r.steps, r.inner_iterations, r.status])
    return rows
