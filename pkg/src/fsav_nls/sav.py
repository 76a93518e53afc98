"""Model parameters, solver state and the scalar-auxiliary-variable pieces.

The complex field ``u = P + iQ`` is carried as two real arrays. The
nonlinear and potential part of the energy

    E(P, Q) = cell/4 * sum(beta*(P^2+Q^2)^2 + 2*V*(P^2+Q^2))

is replaced by the scalar ``w = sqrt(E + c0)``; ``c0 >= 0`` is a constant
shift that keeps the square root well defined when ``E`` can vanish or go
negative (defocusing ``beta < 0``, negative potentials).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonpositiveSavEnergy

__all__ = [
    "ModelParams",
    "SavState",
    "split_initial",
    "compute_E",
    "init_w",
    "compute_B",
    "extrapolate",
    "initial_state",
]


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of ``i u_t - gamma(-Delta)^(alpha/2) u + (V + beta|u|^2) u = 0``.

    ``potential`` is sampled at the collocation points (field shape) or is a
    scalar, broadcast over the grid.
    """

    alpha: float
    gamma: float = 1.0
    beta: float = 1.0
    potential: np.ndarray | float = 0.0
    c0: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.c0 < 0:
            raise ValueError(f"c0 must be non-negative, got {self.c0}")

    def V(self, grid):
        V = np.asarray(self.potential, dtype=float)
        if V.ndim == 0:
            return np.full(grid.shape, float(V))
        return grid.check_field(V, "potential")


@dataclass(frozen=True)
class SavState:
    """Solver state at time level ``m``.

    ``P_prev``/``Q_prev`` hold level ``m-1`` for the extrapolation; at
    ``m = 0`` they equal ``P``/``Q``.
    """

    P: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    w: float
    P_prev: np.ndarray = field(repr=False)
    Q_prev: np.ndarray = field(repr=False)
    t: float = 0.0
    step_index: int = 0

    def evolve(self, P, Q, w, dt):
        return replace(
            self,
            P=P,
            Q=Q,
            w=w,
            P_prev=self.P,
            Q_prev=self.Q,
            t=self.t + dt,
            step_index=self.step_index + 1,
        )

    @property
    def u(self):
        return self.P + 1j * self.Q


def split_initial(re, im):
    """Copy the real and imaginary samples of ``u0`` into ``(P, Q)``."""
    P = np.array(re, dtype=float, copy=True)
    Q = np.array(im, dtype=float, copy=True)
    if P.shape != Q.shape:
        raise ValueError(f"real part shape {P.shape} != imaginary part shape {Q.shape}")
    return P, Q


def compute_E(P, Q, params, grid):
    grid.check_field(P, "P")
    grid.check_field(Q, "Q")
    rho = P * P + Q * Q
    V = params.V(grid)
    return 0.25 * grid.cell * float(np.sum(params.beta * rho * rho + 2.0 * V * rho))


def _positivity_floor(P, Q):
    scale = max(1.0, float(np.max(np.abs(P), initial=0.0)), float(np.max(np.abs(Q), initial=0.0)))
    return 1e-14 * scale


def _sqrt_energy(P, Q, params, grid):
    e = compute_E(P, Q, params, grid) + params.c0
    if e <= _positivity_floor(P, Q):
        raise NonpositiveSavEnergy(
            f"E(P,Q) + c0 = {e:.3e} is not positive; increase c0 (currently {params.c0:g})"
        )
    return np.sqrt(e)


def init_w(P, Q, params, grid):
    """Initial auxiliary variable ``sqrt(E(P, Q) + c0)``."""
    return float(_sqrt_energy(P, Q, params, grid))


def compute_B(P, Q, params, grid):
    """Pointwise coefficients of the auxiliary-variable coupling.

    Returns ``(B1, B2)`` with ``B1 = (beta|u|^2 + V) P / sqrt(E + c0)`` and
    ``B2`` likewise with ``Q``.
    """
    s = _sqrt_energy(P, Q, params, grid)
    g = (params.beta * (P * P + Q * Q) + params.V(grid)) / s
    return g * P, g * Q


def extrapolate(v_curr, v_prev):
    """Second-order predictor ``(3 v^m - v^{m-1}) / 2`` of ``v^{m+1/2}``."""
    v_curr = np.asarray(v_curr)
    v_prev = np.asarray(v_prev)
    if v_curr.shape != v_prev.shape:
        raise ValueError(f"shape mismatch: {v_curr.shape} vs {v_prev.shape}")
    return 1.5 * v_curr - 0.5 * v_prev


def initial_state(u0, params, grid, t0=0.0):
    """Build the level-0 state from complex samples ``u0``.

    The previous level is bootstrapped as ``(P^0, Q^0)``.
    """
    u0 = np.asarray(u0)
    P, Q = split_initial(u0.real, u0.imag)
    grid.check_field(P, "u0")
    w = init_w(P, Q, params, grid)
    return SavState(P=P, Q=Q, w=w, P_prev=P, Q_prev=Q, t=float(t0), step_index=0)
