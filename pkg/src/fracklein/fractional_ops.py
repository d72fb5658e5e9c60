"""Fourier-multiplier operators built from the fractional Laplacian.

All operators act coefficient-wise.  The relativistic symbol is

    delta_l = sqrt(beta + |mu_l|^alpha)

and the isotropic 2D symbol uses ``|mu_l| = sqrt(mu_{l1}^2 + mu_{l2}^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .spectral_grid import GridError, SpectralField, SpectralGrid


class Regime(str, Enum):
    REAL_CUBIC = "real-cubic"
    COMPLEX_POWER = "complex-power"
    OSCILLATORY = "oscillatory"


@dataclass(frozen=True)
class ModelParams:
    """Equation parameters.

    ``p`` is the power in ``eps^(2p) |psi|^(2p) psi``; the real cubic equation
    is ``p = 1`` on real states.
    """

    alpha: float = 2.0
    beta: float = 1.0
    eps: float = 1.0
    p: int = 1
    regime: Regime = Regime.COMPLEX_POWER

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if not 1.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (1, 2], got {self.alpha}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        # eps = 0 is accepted: it switches the nonlinearity off (linear flow checks)
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps must lie in [0, 1], got {self.eps}")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p}")
        object.__setattr__(self, "p", int(self.p))
        if self.regime is Regime.REAL_CUBIC and self.p != 1:
            raise ValueError("the real-cubic regime requires p = 1")

    @property
    def strength(self) -> float:
        """Nonlinear coupling ``eps^(2p)``."""
        return self.eps ** (2 * self.p)

    @property
    def is_real(self) -> bool:
        return self.regime is Regime.REAL_CUBIC


@dataclass(frozen=True, eq=False)
class Symbol:
    """Per-mode values of ``delta_l`` on a grid, with the parameters used."""

    grid: SpectralGrid
    params: ModelParams
    delta: np.ndarray = field(repr=False)

    @property
    def inv_delta(self) -> np.ndarray:
        return 1.0 / self.delta

    def phase(self, t: float, sign: int = 1) -> np.ndarray:
        """``exp(i sign t delta_l)``."""
        return np.exp(1j * sign * t * self.delta)


def frac_laplacian_symbol(grid: SpectralGrid, alpha: float) -> np.ndarray:
    """``|mu_l|^alpha``."""
    return grid.freq_abs ** alpha


def make_symbol(grid: SpectralGrid, params: ModelParams) -> Symbol:
    delta = np.sqrt(params.beta + frac_laplacian_symbol(grid, params.alpha))
    delta.setflags(write=False)
    return Symbol(grid, params, delta)


def apply_multiplier(f: SpectralField, weights, real_valued: bool | None = None) -> SpectralField:
    """Coefficient-wise product with ``weights`` (scalar or array over the modes).

    The result stays flagged real only when the weights are real and even in
    ``l``, which callers assert through ``real_valued``.
    """
    w = np.asarray(weights)
    if w.ndim and w.shape != f.grid.shape:
        raise GridError(f"weights of shape {w.shape} do not match grid {f.grid.shape}")
    if real_valued is None:
        real_valued = f.real_valued and not np.iscomplexobj(w)
    return SpectralField(f.grid, f.coeffs * w, real_valued)


def _check(f: SpectralField, sym: Symbol):
    if f.grid != sym.grid:
        raise GridError("field and symbol were built on different grids")


def nabla_alpha(f: SpectralField, sym: Symbol) -> SpectralField:
    _check(f, sym)
    return apply_multiplier(f, sym.delta)


def nabla_alpha_inv(f: SpectralField, sym: Symbol) -> SpectralField:
    _check(f, sym)
    return apply_multiplier(f, sym.inv_delta)


def half_laplacian_quarter(f: SpectralField, params: ModelParams) -> SpectralField:
    """``(-Delta)^(alpha/4)``: multiply by ``|mu_l|^(alpha/2)``."""
    return apply_multiplier(f, frac_laplacian_symbol(f.grid, params.alpha / 2))


def propagator(f: SpectralField, sym: Symbol, t: float, sign: int = 1) -> SpectralField:
    """``exp(i sign t <nabla>_alpha) f``; unitary in every Sobolev norm."""
    _check(f, sym)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    # the phase is even in l, so a real-valued f stays real only for t = 0
    return apply_multiplier(f, sym.phase(t, sign), real_valued=f.real_valued and t == 0)
