"""Klein-Gordon states ``(psi, eta)`` and their first-order (Schrodinger-type) forms.

Real case:     phi = psi - i <nabla>^-1 eta,     psi = (phi + conj phi)/2,
               eta = (i/2) <nabla> (phi - conj phi).
Complex case:  phi_pm = psi -+ i <nabla>^-1 eta, psi = (phi_+ + phi_-)/2,
               eta = (i/2) <nabla> (phi_+ - phi_-).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fractional_ops import Regime, Symbol
from .spectral_grid import GridError, SpectralField, conj_coeffs


@dataclass(frozen=True)
class KgeState:
    psi: SpectralField
    eta: SpectralField
    time: float = 0.0

    def __post_init__(self):
        if self.psi.grid != self.eta.grid:
            raise GridError("psi and eta must share one grid")

    @property
    def grid(self):
        return self.psi.grid

    @property
    def is_real(self) -> bool:
        return self.psi.real_valued and self.eta.real_valued


@dataclass(frozen=True)
class NlsState:
    """``phi`` for the real regime; ``phi_plus``/``phi_minus`` otherwise."""

    regime: Regime
    phi: SpectralField | None = None
    phi_plus: SpectralField | None = None
    phi_minus: SpectralField | None = None
    time: float = 0.0

    def __post_init__(self):
        if self.regime is Regime.REAL_CUBIC:
            if self.phi is None:
                raise ValueError("real regime needs phi")
        else:
            if self.phi_plus is None or self.phi_minus is None:
                raise ValueError("complex regimes need phi_plus and phi_minus")
            if self.phi_plus.grid != self.phi_minus.grid:
                raise GridError("phi_plus and phi_minus must share one grid")

    @property
    def grid(self):
        return self.phi.grid if self.phi is not None else self.phi_plus.grid


def to_nls(state: KgeState, sym: Symbol, regime: Regime | str) -> NlsState:
    regime = Regime(regime)
    if state.grid != sym.grid:
        raise GridError("state and symbol were built on different grids")
    w = 1j * state.eta.coeffs * sym.inv_delta
    psi = state.psi.coeffs
    g = state.grid
    if regime is Regime.REAL_CUBIC:
        return NlsState(regime, phi=SpectralField(g, psi - w), time=state.time)
    return NlsState(regime, phi_plus=SpectralField(g, psi - w),
                    phi_minus=SpectralField(g, psi + w), time=state.time)


def from_nls(state: NlsState, sym: Symbol) -> KgeState:
    g = state.grid
    if g != sym.grid:
        raise GridError("state and symbol were built on different grids")
    if state.regime is Regime.REAL_CUBIC:
        c = state.phi.coeffs
        cbar = conj_coeffs(c)
        psi = SpectralField(g, 0.5 * (c + cbar), real_valued=True)
        # (i/2)(c - cbar) is Hermitian, delta is even: eta is real
        eta = SpectralField(g, 0.5j * sym.delta * (c - cbar), real_valued=True)
        return KgeState(psi, eta, state.time)
    cp, cm = state.phi_plus.coeffs, state.phi_minus.coeffs
    psi = SpectralField(g, 0.5 * (cp + cm))
    eta = SpectralField(g, 0.5j * sym.delta * (cp - cm))
    return KgeState(psi, eta, state.time)


def max_imag(field: SpectralField) -> float:
    """Largest imaginary part of the node values, ignoring the real flag."""
    v = np.fft.ifftn(field.coeffs) * field.grid.size
    return float(np.max(np.abs(v.imag)))
