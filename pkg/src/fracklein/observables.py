"""Energy, Sobolev-norm errors and convergence orders.

Two normalisations coexist here on purpose:

* error norms use the coefficient-space Sobolev norm of ``spectral_grid``
  (no domain-volume factor);
* the energy is a physical integral over the domain, i.e. node averages
  multiplied by the domain volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral_grid import GridError, SpectralField, resample, sobolev_norm


@dataclass(frozen=True)
class EnergyRecord:
    time: float
    energy: float
    relative_deviation: float


@dataclass(frozen=True)
class ErrorRecord:
    eps: float
    tau: float
    alpha: float
    p: int
    e1: float
    e1_max: float
    order: float | None = None
    beta: float = 1.0
    N: int | None = None
    t_final: float | None = None
    energy_dev: float | None = None
    iters_max: int | None = None


def energy(state, params) -> float:
    """Conserved energy of ``psi_tt + (-Delta)^(alpha/2) psi + beta psi + eps^(2p)|psi|^(2p) psi = 0``.

        E = int |eta|^2 + |(-Delta)^(alpha/4) psi|^2 + beta |psi|^2
                + eps^(2p)/(p+1) |psi|^(2p+2) dx
    """
    grid = state.psi.grid
    vol = grid.volume
    c_psi = state.psi.coeffs
    c_eta = state.eta.coeffs
    lap = grid.freq_abs ** params.alpha
    # Parseval on the node average: (1/N) sum_j |v_j|^2 = sum_l |c_l|^2
    quad = np.sum(np.abs(c_eta) ** 2 + (lap + params.beta) * np.abs(c_psi) ** 2)
    e = vol * float(quad)
    if params.eps > 0:
        v = np.fft.ifftn(c_psi) * grid.size
        p = params.p
        pot = np.mean((v.real**2 + v.imag**2) ** (p + 1))
        e += vol * params.strength / (p + 1) * float(pot)
    return e


def energy_series(times, energies) -> list[EnergyRecord]:
    if not len(energies):
        return []
    e0 = energies[0]
    scale = abs(e0) if e0 != 0 else 1.0
    return [EnergyRecord(float(t), float(e), abs(e - e0) / scale)
            for t, e in zip(times, energies)]


def h_alpha_half_error(numeric: SpectralField, reference: SpectralField, alpha: float) -> float:
    """``|| reference - numeric ||_{alpha/2}``.

    The coarser field is zero-padded to the finer grid, so modes carried only
    by the finer field count in full.
    """
    if not numeric.grid.compatible(reference.grid):
        raise GridError("numeric and reference solutions live on different domains")
    a, b = numeric, reference
    if a.grid != b.grid:
        if a.grid.size <= b.grid.size:
            a = resample(a, b.grid)
        else:
            b = resample(b, a.grid)
    return sobolev_norm(b - a, alpha / 2)


def running_max(errors):
    """Prefix maximum of a sequence of ``(t, e)`` pairs."""
    out = []
    m = -math.inf
    for t, e in errors:
        m = max(m, e)
        out.append((t, m))
    return out


def convergence_order(e_coarse: float, e_fine: float, refinement: float = 4.0) -> float:
    """``log(e_coarse / e_fine) / log(refinement)``; NaN when undefined."""
    if refinement <= 1:
        raise ValueError("refinement factor must exceed 1")
    if not (e_coarse > 0 and e_fine > 0) or not (math.isfinite(e_coarse) and math.isfinite(e_fine)):
        return math.nan
    return math.log(e_coarse / e_fine) / math.log(refinement)
