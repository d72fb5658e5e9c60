"""Exponential wave integrator / Fourier pseudospectral solver for the
nonlinear space-fractional Klein-Gordon equation."""

from .ewi_solver import (
    EwiStepper,
    SolveConfig,
    StepFailure,
    Trajectory,
    eval_nonlinearity,
    ewi_step_coupled,
    ewi_step_real,
    initial_nls,
    solve,
    solve_oscillatory,
)
from .fractional_ops import (
    ModelParams,
    Regime,
    Symbol,
    apply_multiplier,
    half_laplacian_quarter,
    make_symbol,
    nabla_alpha,
    nabla_alpha_inv,
    propagator,
)
from .observables import (
    EnergyRecord,
    ErrorRecord,
    convergence_order,
    energy,
    energy_series,
    h_alpha_half_error,
    running_max,
)
from .spectral_grid import (
    GridError,
    SpectralField,
    SpectralGrid,
    forward_transform,
    inverse_transform,
    resample,
    sobolev_norm,
)
from .state_transform import KgeState, NlsState, from_nls, to_nls

__version__ = "0.1.0"
