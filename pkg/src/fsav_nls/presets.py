"""Named experiment presets, potentials and initial conditions.

``ex4_1``: 1D, ``beta = 2``, no potential, ``u0 = exp(-x^2) exp(-ix)`` on
``[-16, 16]`` with ``N = 256`` (accuracy runs). ``ex4_1_cons`` is the same
problem on ``[-40, 40]`` with ``h = 0.5`` for long conservation runs.

``ex4_2``: 2D, ``gamma = beta = 1``, no potential,
``u0 = 2/sqrt(pi) exp(-x^2-y^2)`` on ``[-8, 8]^2`` with ``N = 128``.
``ex4_2_cons`` uses ``[-10, 10]^2`` with ``h = 0.5``.

``ex4_3_V1`` / ``ex4_3_V2``: the 2D Gaussian on ``[-5, 5]^2`` in the
harmonic trap ``(x^2+y^2)/2`` and the optical lattice
``10 (sin^2(pi x) + sin^2(pi y))``.

Conservation presets run to ``T = 10`` (1D) and ``T = 2`` (2D).
"""

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

__all__ = ["Preset", "PRESETS", "POTENTIALS", "INITIAL_CONDITIONS", "potential", "initial_condition"]


@dataclass(frozen=True)
class Preset:
    name: str
    dim: int
    domain: tuple
    n: int
    gamma: float
    beta: float
    potential: str
    initial_condition: str
    alphas: tuple
    tau: float
    t_final: float
    taus: tuple = ()
    ns: tuple = ()


PRESETS = MappingProxyType(
    {
        p.name: p
        for p in (
            Preset(
                "ex4_1", 1, (-16.0, 16.0), 256, 1.0, 2.0, "zero", "gauss_chirp",
                (1.4, 1.7, 1.9, 2.0), 0.01, 1.0,
                taus=(0.01, 0.005, 0.0025, 0.00125), ns=(32, 64, 128, 256),
            ),
            Preset(
                "ex4_1_cons", 1, (-40.0, 40.0), 160, 1.0, 2.0, "zero", "gauss_chirp",
                (1.4, 1.7, 1.9, 2.0), 0.01, 10.0,
            ),
            Preset(
                "ex4_2", 2, (-8.0, 8.0), 128, 1.0, 1.0, "zero", "gauss2d",
                (1.3, 1.6, 1.9, 2.0), 0.02, 1.0,
                taus=(0.02, 0.01, 0.005, 0.0025), ns=(16, 32, 64),
            ),
            Preset(
                "ex4_2_cons", 2, (-10.0, 10.0), 40, 1.0, 1.0, "zero", "gauss2d",
                (1.3, 1.6, 1.9, 2.0), 0.02, 2.0,
            ),
            Preset(
                "ex4_3_V1", 2, (-5.0, 5.0), 64, 1.0, 1.0, "harmonic", "gauss2d",
                (1.3,), 0.01, 2.0,
            ),
            Preset(
                "ex4_3_V2", 2, (-5.0, 5.0), 64, 1.0, 1.0, "optical_lattice", "gauss2d",
                (1.9,), 0.01, 2.0,
            ),
        )
    }
)


def _zero(*xs):
    return np.zeros_like(xs[0])


def _harmonic(*xs):
    return 0.5 * sum(x * x for x in xs)


def _optical_lattice(*xs):
    return 10.0 * sum(np.sin(np.pi * x) ** 2 for x in xs)


POTENTIALS = MappingProxyType(
    {"zero": _zero, "harmonic": _harmonic, "optical_lattice": _optical_lattice}
)


def _gauss_chirp(x):
    return np.exp(-x * x) * np.exp(-1j * x)


def _gauss2d(x, y):
    return 2.0 / np.sqrt(np.pi) * np.exp(-x * x - y * y) + 0j


def _constant(*xs):
    return np.ones_like(xs[0]) + 0j


# name -> (function of mesh arrays, supported dimensions)
INITIAL_CONDITIONS = MappingProxyType(
    {
        "gauss_chirp": (_gauss_chirp, (1,)),
        "gauss2d": (_gauss2d, (2,)),
        "constant": (_constant, (1, 2)),
    }
)


def potential(name, grid):
    return POTENTIALS[name](*grid.mesh())


def initial_condition(name, grid):
    fn, dims = INITIAL_CONDITIONS[name]
    if grid.dim not in dims:
        raise ValueError(f"initial condition {name!r} is defined for dim {dims}, grid has dim {grid.dim}")
    return fn(*grid.mesh())
