"""Second-order exponential wave integrator with trapezoidal (Deuflhard) quadrature.

The Klein-Gordon problem is advanced in its first-order form.  For the real
cubic equation the unknown ``phi`` obeys

    phi^{n+1} = E phi^n + (eps^2 tau / 2) [G(phi^{n+1}) + E G(phi^n)],
    E = exp(i tau <nabla>_alpha),  G(phi) = i <nabla>_alpha^-1 ((phi + conj phi)^3 / 8),

and for the power nonlinearity ``f(u) = |u|^(2p) u`` the pair ``phi_pm`` obeys

    phi_pm^{n+1} = E_pm phi_pm^n
                   +- (eps^(2p) tau / 2) [F(psi^{n+1}) + E_pm F(psi^n)],
    E_pm = exp(+-i tau <nabla>_alpha),  F(u) = i <nabla>_alpha^-1 f(u),
    psi^k = (phi_+^k + phi_-^k) / 2.

The implicit relation is solved by Picard iteration.  Nonlinearities are
evaluated pointwise on the grid nodes (pseudospectral, no dealiasing).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .fractional_ops import ModelParams, Regime, Symbol, make_symbol
from .observables import energy
from .spectral_grid import GridError, SpectralField, SpectralGrid
from .state_transform import KgeState, NlsState, from_nls, to_nls

log = logging.getLogger(__name__)


class StepFailure(RuntimeError):
    """Fixed-point iteration did not converge; usually tau is too large for eps."""

    def __init__(self, message, step_index=None, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.step_index = step_index
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SolveConfig:
    params: ModelParams
    grid: SpectralGrid
    tau: float
    t_final: float
    snapshot_stride: int = 1
    snapshot_times: tuple[float, ...] | None = None
    tol: float = 1e-13
    max_iter: int = 50
    record_energy: bool = True
    max_steps: int = 10**7

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.t_final > 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be a positive integer")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")

    def snapshot_steps(self) -> set[int]:
        """Step indices of ``snapshot_times``; each time must be a multiple of tau."""
        steps = set()
        for t in self.snapshot_times or ():
            k = int(round(t / self.tau))
            if abs(k * self.tau - t) > 1e-9 * max(1.0, abs(t)):
                raise ValueError(f"snapshot time {t} is not a multiple of tau={self.tau}")
            steps.add(k)
        return steps

    def step_sizes(self) -> tuple[int, float]:
        """Number of full steps and the length of a trailing partial step (0 if none)."""
        n = int(math.floor(self.t_final / self.tau + 1e-9))
        rest = self.t_final - n * self.tau
        if rest <= 1e-12 * max(1.0, self.t_final):
            rest = 0.0
        if n + (rest > 0) > self.max_steps:
            raise ValueError(f"{n} steps exceed the configured cap of {self.max_steps}")
        return n, rest


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[KgeState] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    iterations: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def final(self) -> KgeState:
        return self.states[-1]

    @property
    def iters_max(self) -> int:
        return int(self.iterations.max()) if self.iterations.size else 0


def eval_nonlinearity(values: np.ndarray, regime: Regime | str, p: int = 1) -> np.ndarray:
    """Pointwise nonlinearity on node values.

    Real regime: ``g(phi) = (phi + conj phi)^3 / 8`` with ``values = phi``.
    Otherwise:   ``f(psi) = |psi|^(2p) psi`` with ``values = psi``.
    """
    v = np.asarray(values)
    if Regime(regime) is Regime.REAL_CUBIC:
        return (0.5 * (v + np.conj(v))) ** 3
    if p == 1:
        return (v.real**2 + v.imag**2) * v
    return (v.real**2 + v.imag**2) ** p * v


class EwiStepper:
    """Array-level stepper with phase tables precomputed for one step size."""

    def __init__(self, sym: Symbol, tau: float, tol: float = 1e-13, max_iter: int = 50):
        self.sym = sym
        self.params = sym.params
        self.tau = float(tau)
        self.tol = tol
        self.max_iter = max_iter
        self.size = sym.grid.size
        self.inv_delta = sym.inv_delta
        self.e_plus = sym.phase(self.tau, 1)
        self.e_minus = np.conj(self.e_plus)
        self.c = 0.5 * self.params.strength * self.tau

    def G(self, phi: np.ndarray) -> np.ndarray:
        """``i <nabla>^-1 g(phi)`` in coefficient space (real regime)."""
        v = np.fft.ifftn(phi) * self.size
        g = eval_nonlinearity(v, Regime.REAL_CUBIC)
        return 1j * self.inv_delta * (np.fft.fftn(g) / self.size)

    def F(self, phi_plus: np.ndarray, phi_minus: np.ndarray) -> np.ndarray:
        """``i <nabla>^-1 f((phi_+ + phi_-)/2)`` in coefficient space."""
        v = np.fft.ifftn(0.5 * (phi_plus + phi_minus)) * self.size
        f = eval_nonlinearity(v, Regime.COMPLEX_POWER, self.params.p)
        return 1j * self.inv_delta * (np.fft.fftn(f) / self.size)

    def _converged(self, new, old) -> tuple[bool, float]:
        res = float(np.max(np.abs(new - old)))
        return res <= self.tol * max(1.0, float(np.max(np.abs(new)))), res

    def step_real(self, phi: np.ndarray, g_n: np.ndarray | None = None):
        """Advance ``phi`` one step.

        Returns ``(phi_new, g_new, iterations)`` where ``g_new`` approximates
        ``G(phi_new)`` and may be passed back as ``g_n`` on the next call.
        """
        if self.c == 0.0:
            return self.e_plus * phi, np.zeros_like(phi), 1
        if g_n is None:
            g_n = self.G(phi)
        lin = self.e_plus * (phi + self.c * g_n)
        it = self.e_plus * (phi + 2.0 * self.c * g_n)
        res = float("inf")
        for k in range(1, self.max_iter + 1):
            g_it = self.G(it)
            new = lin + self.c * g_it
            ok, res = self._converged(new, it)
            it = new
            if ok:
                return it, g_it, k
        raise StepFailure(f"fixed-point iteration stalled at residual {res:.3e}",
                          residual=res, iterations=self.max_iter)

    def step_coupled(self, phi_plus: np.ndarray, phi_minus: np.ndarray,
                     f_n: np.ndarray | None = None):
        """Advance ``(phi_+, phi_-)`` one step; returns ``(p, m, f_new, iterations)``."""
        if self.c == 0.0:
            return self.e_plus * phi_plus, self.e_minus * phi_minus, np.zeros_like(phi_plus), 1
        if f_n is None:
            f_n = self.F(phi_plus, phi_minus)
        lin_p = self.e_plus * (phi_plus + self.c * f_n)
        lin_m = self.e_minus * (phi_minus - self.c * f_n)
        it_p = self.e_plus * (phi_plus + 2.0 * self.c * f_n)
        it_m = self.e_minus * (phi_minus - 2.0 * self.c * f_n)
        res = float("inf")
        for k in range(1, self.max_iter + 1):
            f_it = self.F(it_p, it_m)
            new_p = lin_p + self.c * f_it
            new_m = lin_m - self.c * f_it
            ok_p, res_p = self._converged(new_p, it_p)
            ok_m, res_m = self._converged(new_m, it_m)
            res = max(res_p, res_m)
            it_p, it_m = new_p, new_m
            if ok_p and ok_m:
                return it_p, it_m, f_it, k
        raise StepFailure(f"fixed-point iteration stalled at residual {res:.3e}",
                          residual=res, iterations=self.max_iter)


def _symbol_for(cfg: SolveConfig, sym: Symbol | None) -> Symbol:
    if sym is None:
        return make_symbol(cfg.grid, cfg.params)
    if sym.grid != cfg.grid or sym.params != cfg.params:
        raise GridError("symbol does not match the configured grid/parameters")
    return sym


def initial_nls(psi0: SpectralField, psi1: SpectralField, sym: Symbol,
                regime: Regime | str) -> NlsState:
    if psi0.grid != psi1.grid:
        raise GridError("psi0 and psi1 must share one grid")
    return to_nls(KgeState(psi0, psi1, 0.0), sym, regime)


def ewi_step_real(phi_n: SpectralField, cfg: SolveConfig, sym: Symbol | None = None) -> SpectralField:
    sym = _symbol_for(cfg, sym)
    stepper = EwiStepper(sym, cfg.tau, cfg.tol, cfg.max_iter)
    phi, _, _ = stepper.step_real(phi_n.coeffs)
    return SpectralField(phi_n.grid, phi)


def ewi_step_coupled(phi_plus: SpectralField, phi_minus: SpectralField, cfg: SolveConfig,
                     sym: Symbol | None = None) -> tuple[SpectralField, SpectralField]:
    sym = _symbol_for(cfg, sym)
    stepper = EwiStepper(sym, cfg.tau, cfg.tol, cfg.max_iter)
    p, m, _, _ = stepper.step_coupled(phi_plus.coeffs, phi_minus.coeffs)
    return SpectralField(phi_plus.grid, p), SpectralField(phi_plus.grid, m)


def solve(cfg: SolveConfig, initial: KgeState, sym: Symbol | None = None) -> Trajectory:
    """Integrate from ``initial`` (taken at t = 0) up to ``cfg.t_final``.

    Snapshots are kept at t = 0, at ``t_final`` and either at
    ``snapshot_times`` (when given) or every ``snapshot_stride`` full steps.  A non-integer ``t_final / tau`` is finished with one
    shortened step.
    """
    if initial.grid != cfg.grid:
        raise GridError("initial state is not on the configured grid")
    sym = _symbol_for(cfg, sym)
    params = cfg.params
    real = params.is_real
    n_full, rest = cfg.step_sizes()

    nls = to_nls(initial, sym, params.regime)
    if real:
        state = [nls.phi.coeffs.copy()]
    else:
        state = [nls.phi_plus.coeffs.copy(), nls.phi_minus.coeffs.copy()]

    traj = Trajectory()
    iters = []

    def record(t):
        if real:
            ns = NlsState(params.regime, phi=SpectralField(cfg.grid, state[0]), time=t)
        else:
            ns = NlsState(params.regime, phi_plus=SpectralField(cfg.grid, state[0]),
                          phi_minus=SpectralField(cfg.grid, state[1]), time=t)
        kge = from_nls(ns, sym)
        traj.times.append(t)
        traj.states.append(kge)
        if cfg.record_energy:
            traj.energies.append(energy(kge, params))

    record(0.0)
    steppers = [(EwiStepper(sym, cfg.tau, cfg.tol, cfg.max_iter), n_full)]
    if rest > 0:
        steppers.append((EwiStepper(sym, rest, cfg.tol, cfg.max_iter), 1))

    explicit = cfg.snapshot_times is not None
    wanted = cfg.snapshot_steps()
    cache = None
    step_index = 0
    for stepper, count in steppers:
        for _ in range(count):
            try:
                if real:
                    phi, cache, k = stepper.step_real(state[0], cache)
                    state = [phi]
                else:
                    p, m, cache, k = stepper.step_coupled(state[0], state[1], cache)
                    state = [p, m]
            except StepFailure as exc:
                raise StepFailure(f"step {step_index}: {exc}", step_index,
                                  exc.residual, exc.iterations) from exc
            iters.append(k)
            step_index += 1
            if step_index == n_full + (rest > 0):
                record(cfg.t_final)
            elif (step_index in wanted) if explicit else step_index % cfg.snapshot_stride == 0:
                record(step_index * cfg.tau)

    traj.iterations = np.asarray(iters, dtype=int)
    log.debug("solve finished: %d steps, max %d iterations", step_index, traj.iters_max)
    return traj


def solve_oscillatory(cfg: SolveConfig, initial: KgeState, sym: Symbol | None = None) -> Trajectory:
    """Solve the time-rescaled equation on ``r in [0, cfg.t_final]`` with step ``cfg.tau``.

    ``initial`` holds ``(Phi(0), d_r Phi(0))``.  With ``r = eps^(2p) t`` the
    problem is the unscaled one with ``tau = lambda / eps^(2p)``, run to
    ``t_final / eps^(2p)``; returned times are in ``r`` and the velocity is
    ``d_r Phi = eta / eps^(2p)``.
    """
    s = cfg.params.strength
    if s == 0:
        raise ValueError("the oscillatory rescaling needs eps > 0")
    inner_params = replace(cfg.params, regime=Regime.COMPLEX_POWER)
    times = None if cfg.snapshot_times is None else tuple(r / s for r in cfg.snapshot_times)
    inner = replace(cfg, params=inner_params, tau=cfg.tau / s, t_final=cfg.t_final / s,
                    snapshot_times=times)
    if sym is not None:
        sym = Symbol(sym.grid, inner_params, sym.delta)
    start = KgeState(initial.psi, initial.eta * s, 0.0)
    traj = solve(inner, start, sym)
    out = Trajectory(energies=traj.energies, iterations=traj.iterations)
    for t, st in zip(traj.times, traj.states):
        r = cfg.t_final if t == inner.t_final else t * s
        out.times.append(r)
        out.states.append(KgeState(st.psi, st.eta * (1.0 / s), r))
    return out
