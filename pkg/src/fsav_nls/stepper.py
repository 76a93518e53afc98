"""Linearly implicit SAV Crank-Nicolson time stepping.

Each step solves

    A Z + (tau/4) (B, Z) B_r = C,    A = [[I, tau/2 D], [-tau/2 D, I]],

for ``Z = (P^{m+1}, Q^{m+1})`` where ``D`` is the discrete operator
``gamma * D^alpha``, ``B = (B1, B2)`` is evaluated at the extrapolated
midpoint and ``B_r = (B2, -B1)``. ``A`` is diagonal in Fourier space. Writing
the pair as the complex field ``P + iQ``, ``A`` acts on mode ``k`` as
multiplication by ``1 - i tau lambda_k / 2``; both real blocks are then
handled by a single complex transform pair. The rank-one term costs one
extra inner product (Sherman-Morrison), so a step needs two solves with
``A`` that share the same diagonal. :func:`step_fsav` fuses the whole step
into two forward and one inverse transform (see :class:`FsavKernel`); the
separate functions are the building blocks it is checked against.
"""

import time
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import NonIntegerStepCount, SingularDenominator
from .grid import forward, inverse, inner_product
from .sav import compute_B, extrapolate

__all__ = [
    "PairField",
    "SchemeConfig",
    "SolveReport",
    "RunResult",
    "FsavKernel",
    "apply_A",
    "apply_A_inverse",
    "apply_operator_pair",
    "assemble_rhs",
    "rank_one_solve",
    "step_fsav",
    "run",
    "step_count",
]


class PairField(NamedTuple):
    """Stacked real pair ``(p, q)`` treated as one vector."""

    p: np.ndarray
    q: np.ndarray

    def dot(self, other, grid):
        return inner_product(self.p, other.p, grid) + inner_product(self.q, other.q, grid)

    def __add__(self, other):
        return PairField(self.p + other.p, self.q + other.q)

    def __sub__(self, other):
        return PairField(self.p - other.p, self.q - other.q)

    def scale(self, c):
        return PairField(c * self.p, c * self.q)

    def max_abs(self):
        return max(float(np.max(np.abs(self.p))), float(np.max(np.abs(self.q))))


@dataclass(frozen=True)
class SchemeConfig:
    """Time step and solver guards.

    ``compute_residual`` evaluates the residual of the coupled system after
    every step (one extra transform pair); off by default because it is a
    verification aid, not part of the scheme.
    """

    tau: float
    denominator_guard: float = 1e-12
    compute_residual: bool = False

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class SolveReport:
    chi: float
    denominator: float
    s: float
    residual: float | None
    b_seconds: float
    solve_seconds: float

    @property
    def wall_seconds(self):
        return self.b_seconds + self.solve_seconds


def _pair_multiply(P, Q, multiplier):
    uh = forward(P + 1j * Q)
    u = inverse(multiplier * uh)
    return u.real, u.imag


def apply_operator_pair(Z, symbol):
    """``(D p, D q)`` with one complex transform pair."""
    p, q = _pair_multiply(Z[0], Z[1], symbol.values)
    return PairField(p, q)


def apply_A(Z, tau, symbol):
    """Forward map ``A Z = (p + tau/2 D q, q - tau/2 D p)``."""
    Dp, Dq = apply_operator_pair(Z, symbol)
    return PairField(Z[0] + 0.5 * tau * Dq, Z[1] - 0.5 * tau * Dp)


def _inverse_multiplier(tau, symbol):
    return 1.0 / (1.0 - 0.5j * tau * symbol.values)


def apply_A_inverse(Z, tau, symbol):
    """Solve ``A X = Z`` mode by mode.

    Per mode the 2x2 block ``[[1, tau*lam/2], [-tau*lam/2, 1]]`` is inverted
    as ``[[1, -tau*lam/2], [tau*lam/2, 1]] / (1 + tau^2 lam^2 / 4)``, which is
    the complex division by ``1 - i tau lam / 2``.
    """
    grid = symbol.grid
    p = grid.check_field(Z[0], "Z.p")
    q = grid.check_field(Z[1], "Z.q")
    return PairField(*_pair_multiply(p, q, _inverse_multiplier(tau, symbol)))


def assemble_rhs(state, B1, B2, tau, symbol):
    """Right-hand side ``C = (C1, C2)`` of the coupled step system.

    ``(B, Z^m)`` and the operator applications use the current level.
    """
    grid = symbol.grid
    P, Q, w = state.P, state.Q, state.w
    grid.check_field(B1, "B1")
    grid.check_field(B2, "B2")
    DP, DQ = apply_operator_pair((P, Q), symbol)
    s0 = inner_product(B1, P, grid) + inner_product(B2, Q, grid)
    c = tau * w - 0.25 * tau * s0
    C1 = P - 0.5 * tau * DQ - c * B2
    C2 = Q + 0.5 * tau * DP + c * B1
    return PairField(C1, C2)


def rank_one_solve(C, B, B_r, tau, symbol, guard=1e-12):
    """Solve ``A Z + (tau/4) (B, Z) B_r = C``.

    Returns ``(Z, chi, s)`` with ``chi = (B, A^-1 B_r)`` and ``s = (B, Z)``.
    Raises :class:`SingularDenominator` if ``|1 + tau*chi/4| < guard``.
    """
    grid = symbol.grid
    C, B, B_r = PairField(*C), PairField(*B), PairField(*B_r)
    Y = apply_A_inverse(B_r, tau, symbol)
    X = apply_A_inverse(C, tau, symbol)
    chi = B.dot(Y, grid)
    denom = 1.0 + 0.25 * tau * chi
    if not abs(denom) >= guard:
        raise SingularDenominator(denom, guard)
    s = B.dot(X, grid) / denom
    Z = X - Y.scale(0.25 * tau * s)
    return Z, chi, s


def _residual(Z, C, B, B_r, tau, symbol):
    AZ = apply_A(Z, tau, symbol)
    s = B.dot(Z, symbol.grid)
    r = AZ + B_r.scale(0.25 * tau * s) - C
    return r.max_abs() / max(C.max_abs(), np.finfo(float).tiny)


class FsavKernel:
    """Per-run constants of the step: the Fourier multipliers of ``A^{-1}``
    and of the linear Crank-Nicolson propagator, and the Parseval weight.

    With ``u = P + iQ`` and ``b = B1 + iB2`` the step system reads
    ``C = (1 + i tau D/2) u + i c b`` and ``B_r = -i b``, so ``A^{-1} C`` and
    ``A^{-1} B_r`` are per-mode products, and every pair inner product
    ``(F, G) = cell/N * Re sum conj(F_k) G_k`` can be taken on the transforms.
    A step then costs two forward and one inverse transform.
    """

    def __init__(self, tau, symbol):
        half = 0.5j * tau * symbol.values
        self.tau = tau
        self.symbol = symbol
        self.a_inv = 1.0 / (1.0 - half)
        self.propagator = (1.0 + half) * self.a_inv
        self.weight = symbol.grid.cell / symbol.grid.size

    def dot(self, fh, gh):
        return self.weight * float(np.vdot(fh, gh).real)

    def matches(self, tau, symbol):
        return self.tau == tau and self.symbol is symbol


def step_fsav(state, params, symbol, cfg, kernel=None):
    """Advance one step; returns ``(new_state, SolveReport)``.

    Implements: extrapolate, ``B`` at the extrapolated midpoint, right-hand
    side, rank-one solve, scalar update. The arithmetic is the one of
    :func:`assemble_rhs` and :func:`rank_one_solve` carried out in Fourier
    space (see :class:`FsavKernel`); pass a kernel to reuse it across steps.
    """
    grid = symbol.grid
    tau = cfg.tau
    k = kernel if kernel is not None and kernel.matches(tau, symbol) else FsavKernel(tau, symbol)
    t0 = time.perf_counter()
    Pbar = extrapolate(state.P, state.P_prev)
    Qbar = extrapolate(state.Q, state.Q_prev)
    B1, B2 = compute_B(Pbar, Qbar, params, grid)
    t1 = time.perf_counter()

    uh = forward(state.P + 1j * state.Q)
    bh = forward(B1 + 1j * B2)
    ab = k.a_inv * bh
    yh = -1j * ab  # A^{-1} B_r
    c = tau * state.w - 0.25 * tau * k.dot(bh, uh)
    xh = k.propagator * uh + 1j * c * ab  # A^{-1} C
    chi = k.dot(bh, yh)
    denom = 1.0 + 0.25 * tau * chi
    if not abs(denom) >= cfg.denominator_guard:
        raise SingularDenominator(denom, cfg.denominator_guard)
    s = k.dot(bh, xh) / denom
    zh = xh - (0.25 * tau * s) * yh
    w1 = state.w + 0.5 * k.dot(bh, zh - uh)
    z = inverse(zh)
    P1, Q1 = z.real.copy(), z.imag.copy()
    t2 = time.perf_counter()

    residual = None
    if cfg.compute_residual:
        C = assemble_rhs(state, B1, B2, tau, symbol)
        residual = _residual(PairField(P1, Q1), C, PairField(B1, B2), PairField(B2, -B1), tau, symbol)
    report = SolveReport(
        chi=chi,
        denominator=denom,
        s=s,
        residual=residual,
        b_seconds=t1 - t0,
        solve_seconds=t2 - t1,
    )
    return state.evolve(P1, Q1, w1, tau), report


def step_count(T, tau, rtol=1e-9):
    """Number of steps ``M = T / tau``; raises if it is not an integer."""
    if not tau > 0 or T < 0:
        raise ValueError(f"need tau > 0 and T >= 0, got tau={tau}, T={T}")
    ratio = T / tau
    M = int(round(ratio))
    if abs(ratio - M) > rtol * max(1.0, abs(ratio)):
        raise NonIntegerStepCount(f"T/tau = {ratio!r} is not an integer")
    return M


@dataclass
class RunResult:
    state: object
    steps: int
    wall_seconds: float
    b_seconds: float = 0.0
    solve_seconds: float = 0.0
    min_abs_denominator: float = np.inf


Observer = Callable[[object], None]


def run(state0, params, symbol, cfg, T, observers: Sequence[Observer] = (), stride=1):
    """March ``T / tau`` steps from ``state0``.

    Each observer is called with the state at step 0, at every multiple of
    ``stride`` and at the final step. ``wall_seconds`` covers the step loop
    only (observer time excluded).
    """
    M = step_count(T, cfg.tau)
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    kernel = FsavKernel(cfg.tau, symbol)
    state = state0
    t_start = state0.t
    for obs in observers:
        obs(state)
    result = RunResult(state=state, steps=M, wall_seconds=0.0)
    for m in range(1, M + 1):
        t0 = time.perf_counter()
        state, report = step_fsav(state, params, symbol, cfg, kernel)
        result.wall_seconds += time.perf_counter() - t0
        result.b_seconds += report.b_seconds
        result.solve_seconds += report.solve_seconds
        result.min_abs_denominator = min(result.min_abs_denominator, abs(report.denominator))
        if m % stride == 0 or m == M:
            state = _snap_time(state, t_start + m * cfg.tau)
            for obs in observers:
                obs(state)
    result.state = _snap_time(state, t_start + M * cfg.tau)
    return result


def _snap_time(state, t):
    return replace(state, t=t)
