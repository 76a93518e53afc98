"""Discrete invariants, drift series, run-to-run errors and order tables.

All energies are reported with the quadrature weight (``h`` in 1D,
``h_x h_y`` in 2D) so that values are comparable across grids. The
conserved quantity of the SAV scheme is

    H = 1/2 [(P, D P) + (Q, D Q)] + w^2,

where ``(v, D v) = cell/N * sum_k lambda_k |fft(v)_k|^2 <= 0``. It equals
``-1/2 * cell * sum |(-Delta)^(alpha/4) v|^2 + w^2``, the discrete form of the
modified energy. Dividing by ``cell`` gives the unweighted variant built
from plain matrix quadratic forms.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateReference
from .grid import forward, inner_product
from .sav import compute_E

__all__ = [
    "quadratic_form",
    "modified_energy",
    "original_energy",
    "discrete_mass",
    "ConservationRecord",
    "ConservationRecorder",
    "relative_drifts",
    "error_between_runs",
    "convergence_order",
    "ConvergenceTable",
    "TimingRecord",
]


def quadratic_form(v, symbol):
    """``(v, D v)`` with the quadrature weight, evaluated in Fourier space."""
    grid = symbol.grid
    v = grid.check_field(v)
    vh = forward(v)
    return grid.cell / grid.size * float(np.sum(symbol.values * (vh.real**2 + vh.imag**2)))


def dispersive_energy(P, Q, symbol):
    return 0.5 * (quadratic_form(P, symbol) + quadratic_form(Q, symbol))


def modified_energy(state, symbol, weighted=True):
    """Energy conserved exactly by the SAV scheme.

    With ``weighted=False`` the result is divided by the quadrature weight,
    i.e. built from ``P^T D P`` and ``w^2 / cell``.
    """
    H = dispersive_energy(state.P, state.Q, symbol) + state.w**2
    return H if weighted else H / symbol.grid.cell


def original_energy(P, Q, params, symbol):
    """Discrete Hamiltonian (dispersive part plus ``E(P, Q)``).

    Exactly conserved by the implicit comparator; only approximately (to
    second order in ``tau``) by the SAV scheme.
    """
    return dispersive_energy(P, Q, symbol) + compute_E(P, Q, params, symbol.grid)


def discrete_mass(state, grid):
    return inner_product(state.P, state.P, grid) + inner_product(state.Q, state.Q, grid)


@dataclass
class ConservationRecord:
    """Time series of invariants; ``w`` is NaN for schemes without one."""

    step: list = field(default_factory=list)
    t: list = field(default_factory=list)
    H: list = field(default_factory=list)
    M: list = field(default_factory=list)
    w: list = field(default_factory=list)
    E: list = field(default_factory=list)
    original: list = field(default_factory=list)

    def __len__(self):
        return len(self.t)

    def drifts(self):
        return relative_drifts(self.H, self.M)

    def max_rh(self):
        return float(np.max(self.drifts()[0]))

    def max_rm(self):
        return float(np.max(self.drifts()[1]))

    def rows(self):
        RH, RM = self.drifts()
        for i in range(len(self)):
            yield (self.step[i], self.t[i], self.H[i], self.M[i], RH[i], RM[i], self.w[i], self.E[i])

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["step", "t", "H", "M", "RH", "RM", "w", "E"])
            for row in self.rows():
                wr.writerow([row[0]] + [fmt(v) for v in row[1:]])


def fmt(v):
    """Round-trippable float text (17 significant digits)."""
    return format(float(v), ".17g")


class ConservationRecorder:
    """Observer collecting invariants along a run.

    For SAV states ``H`` is the modified energy; for states without an
    auxiliary variable (the implicit comparator) ``H`` is the original
    discrete energy.
    """

    def __init__(self, params, symbol):
        self.params = params
        self.symbol = symbol
        self.record = ConservationRecord()

    def __call__(self, state):
        grid = self.symbol.grid
        rec = self.record
        E = compute_E(state.P, state.Q, self.params, grid)
        disp = dispersive_energy(state.P, state.Q, self.symbol)
        w = getattr(state, "w", None)
        rec.step.append(int(state.step_index))
        rec.t.append(float(state.t))
        rec.M.append(discrete_mass(state, grid))
        rec.E.append(E)
        rec.original.append(disp + E)
        if w is None:
            rec.H.append(disp + E)
            rec.w.append(math.nan)
        else:
            rec.H.append(disp + w * w)
            rec.w.append(float(w))


def relative_drifts(H, M):
    """``RH^m = |(H^m - H^0)/H^0|`` and ``RM^m`` likewise."""
    H = np.asarray(H, dtype=float)
    M = np.asarray(M, dtype=float)
    if abs(H[0]) < 1e-14:
        raise DegenerateReference(f"|H^0| = {abs(H[0]):.3e} too small for a relative drift")
    if abs(M[0]) < 1e-14:
        raise DegenerateReference(f"|M^0| = {abs(M[0]):.3e} too small for a relative drift")
    return np.abs((H - H[0]) / H[0]), np.abs((M - M[0]) / M[0])


def _embed(coarse, fine):
    if coarse.shape == fine.shape:
        return fine
    if coarse.ndim != fine.ndim or any(f != 2 * c for c, f in zip(coarse.shape, fine.shape)):
        raise ValueError(
            f"cannot compare shapes {coarse.shape} and {fine.shape}: "
            "need equal grids or a doubling per axis"
        )
    return fine[tuple(slice(None, None, 2) for _ in fine.shape)]


def error_between_runs(Pa, Qa, Pb, Qb, grid_a=None, grid_b=None):
    """``||P_a - P_b||_inf + ||Q_a - Q_b||_inf``.

    If run ``b`` lives on a grid with twice the points per axis (same
    domain), it is restricted to the coarse collocation points (every other
    point) before comparing. Passing the grids enables the domain check.
    """
    Pa, Qa, Pb, Qb = (np.asarray(v, dtype=float) for v in (Pa, Qa, Pb, Qb))
    if grid_a is not None and grid_b is not None:
        if not (np.allclose(grid_a.lower, grid_b.lower) and np.allclose(grid_a.upper, grid_b.upper)):
            raise ValueError("runs use different domains")
    if Pa.size > Pb.size:
        return error_between_runs(Pb, Qb, Pa, Qa)
    Pb = _embed(Pa, Pb)
    Qb = _embed(Qa, Qb)
    return float(np.max(np.abs(Pa - Pb)) + np.max(np.abs(Qa - Qb)))


def convergence_order(e_coarse, e_fine):
    """``log2(e_coarse / e_fine)`` for a halving of ``tau`` or doubling of ``N``."""
    if not (e_coarse > 0 and e_fine > 0):
        raise ValueError(f"errors must be positive to form an order, got {e_coarse}, {e_fine}")
    return math.log2(e_coarse / e_fine)


@dataclass
class ConvergenceTable:
    """Rows of ``(parameter, error, order)``; order is None on the first row.

    An order is flagged ``"floor"`` when both errors sit at roundoff level
    (below ``floor``), where a ratio carries no information.
    """

    parameter: str
    values: list
    errors: list
    floor: float = 1e-13
    orders: list = field(init=False)

    def __post_init__(self):
        self.orders = [None]
        for a, b in zip(self.errors, self.errors[1:]):
            if a <= self.floor and b <= self.floor:
                self.orders.append("floor")
            else:
                self.orders.append(convergence_order(a, b))

    def numeric_orders(self):
        return [o for o in self.orders if isinstance(o, float)]

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow([self.parameter, "error", "order"])
            for v, e, o in zip(self.values, self.errors, self.orders):
                if o is None:
                    o_txt = ""
                elif o == "floor":
                    o_txt = "floor"
                else:
                    o_txt = fmt(o)
                wr.writerow([fmt(v) if isinstance(v, float) else v, fmt(e), o_txt])


@dataclass
class TimingRecord:
    scheme: str
    tau: float
    n: tuple
    wall_seconds: float
    steps: int
    inner_iterations: int
    status: str = "ok"

    def __post_init__(self):
        if self.wall_seconds < 0 or self.steps < 0 or self.inner_iterations < 0:
            raise ValueError("timing fields must be non-negative")

    @property
    def per_step(self):
        return self.wall_seconds / self.steps if self.steps else 0.0
