"""Independent reference integrators used to cross-check the EWI solver.

Nothing here goes through the first-order ``phi`` formulation: the
classical RK4 method is applied directly to

    psi_t = eta,
    eta_t = -(|mu|^alpha + beta) psi - eps^(2p) |psi|^(2p) psi

in coefficient space, with frequencies computed locally.
"""

from __future__ import annotations

import numpy as np


def _freq_sq(bounds, shape):
    mus = [2 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / (b - a) for (a, b), n in zip(bounds, shape)]
    grids = np.meshgrid(*mus, indexing="ij")
    return sum(m * m for m in grids)


def rk4_kge(psi0, psi1, bounds, alpha, beta, eps, p, tau, t_final):
    """RK4 solution of the fractional Klein-Gordon equation from node values.

    ``psi0``/``psi1`` are node arrays; returns node arrays ``(psi, eta)`` at
    ``t_final``.  ``t_final / tau`` must be an integer.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    shape = psi0.shape
    size = psi0.size
    lin = np.sqrt(_freq_sq(bounds, shape)) ** alpha + beta
    strength = eps ** (2 * p)
    n = int(round(t_final / tau))
    if abs(n * tau - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError("t_final must be an integer multiple of tau")

    def rhs(u, v):
        acc = -lin * u
        if strength:
            x = np.fft.ifftn(u) * size
            acc = acc - strength * np.fft.fftn(np.abs(x) ** (2 * p) * x) / size
        return v, acc

    u = np.fft.fftn(psi0) / size
    v = np.fft.fftn(np.asarray(psi1, dtype=complex)) / size
    for _ in range(n):
        k1u, k1v = rhs(u, v)
        k2u, k2v = rhs(u + 0.5 * tau * k1u, v + 0.5 * tau * k1v)
        k3u, k3v = rhs(u + 0.5 * tau * k2u, v + 0.5 * tau * k2v)
        k4u, k4v = rhs(u + tau * k3u, v + tau * k3v)
        u = u + tau / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v = v + tau / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return np.fft.ifftn(u) * size, np.fft.ifftn(v) * size


def linear_flow(psi0, psi1, bounds, alpha, beta, t):
    """Exact solution of the linear equation (eps = 0) at time ``t``, node values."""
    psi0 = np.asarray(psi0, dtype=complex)
    size = psi0.size
    w = np.sqrt(np.sqrt(_freq_sq(bounds, psi0.shape)) ** alpha + beta)
    a = np.fft.fftn(psi0) / size
    b = np.fft.fftn(np.asarray(psi1, dtype=complex)) / size
    u = a * np.cos(w * t) + b * np.sin(w * t) / w
    v = -a * w * np.sin(w * t) + b * np.cos(w * t)
    return np.fft.ifftn(u) * size, np.fft.ifftn(v) * size
