"""Linearly implicit energy-preserving SAV Fourier pseudo-spectral solver
for the space-fractional nonlinear Schrodinger equation

    i u_t - gamma (-Delta)^(alpha/2) u + (V + beta |u|^2) u = 0

on periodic 1D/2D domains, with a fully implicit Crank-Nicolson comparator
and the diagnostics needed for convergence and conservation studies.
"""

from .cnf import CnfConfig, run_cnf, step_cnf
from .config import ExperimentConfig, load_config, parse_config
from .diagnostics import (
    ConservationRecord,
    ConservationRecorder,
    ConvergenceTable,
    TimingRecord,
    convergence_order,
    discrete_mass,
    error_between_runs,
    modified_energy,
    original_energy,
    relative_drifts,
)
from .errors import (
    ConfigError,
    ConstraintViolation,
    DegenerateReference,
    FsavError,
    NoConvergence,
    NonIntegerStepCount,
    NonpositiveSavEnergy,
    SingularDenominator,
    UnknownKey,
)
from .grid import GridSpec, SpectralSymbol, apply_operator, build_grid, build_symbol, inner_product
from .presets import PRESETS
from .sav import (
    ModelParams,
    SavState,
    compute_B,
    compute_E,
    extrapolate,
    init_w,
    initial_state,
    split_initial,
)
from .stepper import (
    PairField,
    SchemeConfig,
    SolveReport,
    apply_A_inverse,
    assemble_rhs,
    rank_one_solve,
    run,
    step_fsav,
)

__version__ = "0.1.0"
