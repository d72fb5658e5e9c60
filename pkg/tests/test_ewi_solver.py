import math

import numpy as np
import pytest

from fracklein import oracle
from fracklein.ewi_solver import (
    EwiStepper,
    SolveConfig,
    StepFailure,
    eval_nonlinearity,
    ewi_step_coupled,
    ewi_step_real,
    initial_nls,
    solve,
    solve_oscillatory,
)
from fracklein.fractional_ops import ModelParams, Regime, make_symbol
from fracklein.harness import builtin_initial_data, default_grid
from fracklein.observables import h_alpha_half_error
from fracklein.spectral_grid import SpectralField, SpectralGrid, forward_transform
from fracklein.state_transform import KgeState

TWO_PI = 2 * np.pi


def test_eval_nonlinearity_examples():
    assert eval_nonlinearity(np.array([2.0 + 0j]), Regime.REAL_CUBIC)[0] == pytest.approx(8.0)
    assert eval_nonlinearity(np.array([3.7j]), Regime.REAL_CUBIC)[0] == pytest.approx(0.0)
    assert eval_nonlinearity(np.array([2j]), Regime.COMPLEX_POWER, p=2)[0] == pytest.approx(32j)
    assert eval_nonlinearity(np.array([1 + 1j]), "complex-power", p=1)[0] == pytest.approx(2 + 2j)


def test_initial_nls_examples(smooth_1d):
    grid, init = smooth_1d
    sym = make_symbol(grid, ModelParams(alpha=1.5))
    zero = SpectralField.zeros(grid)
    ns = initial_nls(init.psi, zero, sym, Regime.REAL_CUBIC)
    assert np.max(np.abs(ns.phi.coeffs - init.psi.coeffs)) == 0
    from fracklein.state_transform import from_nls

    ns = initial_nls(init.psi, init.eta, sym, Regime.REAL_CUBIC)
    back = from_nls(ns, sym)
    assert np.max(np.abs(back.psi.coeffs - init.psi.coeffs)) <= 1e-13
    assert np.max(np.abs(back.eta.coeffs - init.eta.coeffs)) <= 1e-13

    g = default_grid("sec-5.3-complex", 64)
    data = builtin_initial_data("sec-5.3-complex", g)
    sym = make_symbol(g, ModelParams(alpha=1.2))
    ns = initial_nls(data.psi, data.eta, sym, Regime.COMPLEX_POWER)
    ivd = 1 / sym.delta
    assert np.allclose(ns.phi_plus.coeffs, data.psi.coeffs - 1j * ivd * data.eta.coeffs, rtol=0, atol=1e-15)
    assert np.allclose(ns.phi_minus.coeffs, data.psi.coeffs + 1j * ivd * data.eta.coeffs, rtol=0, atol=1e-15)


def _single_mode(grid, l, c):
    a = np.zeros(grid.shape, complex)
    a[grid.index_of(l)] = c
    return SpectralField(grid, a)


def test_linear_step_is_exact_phase():
    grid = SpectralGrid.interval(0, TWO_PI, 16)
    params = ModelParams(alpha=1.7, eps=0.0, regime=Regime.REAL_CUBIC)
    sym = make_symbol(grid, params)
    cfg = SolveConfig(params, grid, 0.3, 0.3)
    phi = _single_mode(grid, 3, 0.4 - 0.2j)
    out = ewi_step_real(phi, cfg, sym)
    d = sym.delta[grid.index_of(3)]
    assert abs(out.mode(3) - (0.4 - 0.2j) * np.exp(0.3j * d)) <= 1e-13
    p, m = ewi_step_coupled(phi, phi, SolveConfig(ModelParams(alpha=1.7, eps=0.0), grid, 0.3, 0.3))
    assert abs(p.mode(3) - (0.4 - 0.2j) * np.exp(0.3j * d)) <= 1e-13
    assert abs(m.mode(3) - (0.4 - 0.2j) * np.exp(-0.3j * d)) <= 1e-13


def test_zero_data_stays_zero():
    grid = SpectralGrid.interval(0, 1, 16)
    z = KgeState(SpectralField.zeros(grid), SpectralField.zeros(grid))
    for params in (ModelParams(eps=1.0, p=2), ModelParams(regime="real-cubic")):
        traj = solve(SolveConfig(params, grid, 0.1, 1.0), z)
        assert all(not np.any(s.psi.coeffs) and not np.any(s.eta.coeffs) for s in traj.states)


def test_single_mode_plane_wave():
    grid = SpectralGrid.interval(0, TWO_PI, 16)
    params = ModelParams(alpha=1.4, beta=2.0, eps=0.0)
    d = math.sqrt(2.0 + 2**1.4)
    x = grid.axis_nodes(0)
    a, b = 0.8, -0.3
    init = KgeState(forward_transform(a * np.cos(2 * x), grid), forward_transform(b * np.cos(2 * x), grid))
    traj = solve(SolveConfig(params, grid, 0.05, 10.0, snapshot_stride=20), init)
    for t, st in zip(traj.times, traj.states):
        exact = (a * math.cos(d * t) + b / d * math.sin(d * t)) * np.cos(2 * x)
        assert np.max(np.abs(st.psi.values() - exact)) <= 1e-12


def _rk4_reference(init, grid, alpha, eps, p, T, tau):
    u, _ = oracle.rk4_kge(init.psi.values(), init.eta.values(), grid.bounds, alpha, 1.0, eps, p, tau, T)
    return forward_transform(u if p > 1 else u.real, grid)


@pytest.mark.parametrize("regime, p, eps", [(Regime.REAL_CUBIC, 1, 1.0), (Regime.COMPLEX_POWER, 2, 0.5)])
def test_one_step_matches_rk4(smooth_1d, regime, p, eps):
    grid, init = smooth_1d
    for alpha in (2.0, 1.3):
        params = ModelParams(alpha=alpha, eps=eps, p=p, regime=regime)
        traj = solve(SolveConfig(params, grid, 1e-3, 1e-3), init)
        ref = _rk4_reference(init, grid, alpha, eps, p, 1e-3, 1e-5)
        assert h_alpha_half_error(traj.final.psi, ref, alpha) <= 1e-8


def test_temporal_order_richardson(smooth_1d):
    grid, init = smooth_1d
    params = ModelParams(alpha=2.0, beta=1.0, eps=0.5, regime=Regime.REAL_CUBIC)
    ref = solve(SolveConfig(params, grid, 1e-4, 1.0, snapshot_stride=10**9), init).final.psi
    errs = []
    for k in range(4, 9):
        run = solve(SolveConfig(params, grid, 2.0**-k, 1.0, snapshot_stride=10**9), init)
        errs.append(h_alpha_half_error(run.final.psi, ref, 2.0))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert all(1.8 <= o <= 2.2 for o in orders), orders


def test_real_and_coupled_formulations_agree(smooth_1d):
    grid, init = smooth_1d
    for alpha in (2.0, 1.5):
        real = solve(SolveConfig(ModelParams(alpha=alpha, eps=1.0, regime="real-cubic"), grid, 0.01, 2.0,
                                 snapshot_stride=50), init)
        cpl = solve(SolveConfig(ModelParams(alpha=alpha, eps=1.0, p=1), grid, 0.01, 2.0,
                                snapshot_stride=50), init)
        assert real.times == cpl.times
        for a, b in zip(real.states, cpl.states):
            assert np.max(np.abs(a.psi.coeffs - b.psi.coeffs)) <= 1e-10
            assert np.max(np.abs(b.psi.values().imag)) <= 1e-10


def test_fixed_point_iterations_bounded(smooth_1d):
    grid, init = smooth_1d
    for params in (ModelParams(alpha=1.2, eps=1.0, p=2), ModelParams(regime="real-cubic")):
        traj = solve(SolveConfig(params, grid, 0.01, 1.0, record_energy=False), init)
        assert 1 <= traj.iters_max <= 10


def test_step_failure_reports_step(smooth_1d):
    grid, init = smooth_1d
    params = ModelParams(alpha=2.0, eps=1.0, p=3)
    with pytest.raises(StepFailure) as info:
        solve(SolveConfig(params, grid, 0.5, 1.0, max_iter=2), init)
    assert info.value.step_index == 0
    assert info.value.residual > 0


def test_snapshots_and_partial_step(smooth_1d):
    grid, init = smooth_1d
    params = ModelParams(alpha=1.5, eps=0.5, p=2)
    traj = solve(SolveConfig(params, grid, 0.1, 1.05, snapshot_times=(0.3, 0.5)), init)
    assert traj.times == pytest.approx([0.0, 0.3, 0.5, 1.05])
    assert len(traj.energies) == 4
    with pytest.raises(ValueError):
        SolveConfig(params, grid, 0.1, 1.0, snapshot_times=(0.25,)).snapshot_steps()
    with pytest.raises(ValueError):
        SolveConfig(params, grid, 1e-3, 10.0, max_steps=100).step_sizes()
    with pytest.raises(ValueError):
        SolveConfig(params, grid, -1.0, 1.0)


def test_oscillatory_with_unit_eps_matches_plain_solve():
    grid = default_grid("sec-5.3-complex", 64)
    init = builtin_initial_data("sec-5.3-complex", grid)
    for alpha in (2.0, 1.2):
        plain = solve(SolveConfig(ModelParams(alpha=alpha, eps=1.0), grid, 0.01, 1.0, snapshot_stride=25), init)
        osc = solve_oscillatory(SolveConfig(ModelParams(alpha=alpha, eps=1.0, regime="oscillatory"), grid, 0.01,
                                            1.0, snapshot_stride=25), init)
        assert plain.times == osc.times
        for a, b in zip(plain.states, osc.states):
            assert np.array_equal(a.psi.coeffs, b.psi.coeffs)
            assert np.array_equal(a.eta.coeffs, b.eta.coeffs)


def test_oscillatory_rescaling():
    grid = default_grid("sec-5.3-complex", 32)
    init = builtin_initial_data("sec-5.3-complex", grid)
    eps = 0.5
    s = eps**2
    osc = solve_oscillatory(SolveConfig(ModelParams(alpha=1.5, eps=eps, regime="oscillatory"), grid, 0.01, 0.2,
                                        snapshot_times=(0.1,)), init)
    plain = solve(SolveConfig(ModelParams(alpha=1.5, eps=eps), grid, 0.01 / s, 0.2 / s, snapshot_times=(0.1 / s,)),
                  KgeState(init.psi, init.eta * s))
    assert osc.times == pytest.approx([0.0, 0.1, 0.2])
    assert np.allclose(osc.final.psi.coeffs, plain.final.psi.coeffs, rtol=0, atol=1e-15)
    assert np.allclose(osc.final.eta.coeffs, plain.final.eta.coeffs / s, rtol=0, atol=1e-14)


def test_two_dimensional_reality():
    grid = default_grid("eq-5.2.1", (16, 16))
    init = builtin_initial_data("eq-5.2.1", grid)
    traj = solve(SolveConfig(ModelParams(alpha=1.4, eps=1.0), grid, 0.02, 1.0, snapshot_stride=10), init)
    assert max(np.max(np.abs(s.psi.values().imag)) for s in traj.states) <= 1e-10


def test_stepper_cache_reuse(smooth_1d):
    grid, init = smooth_1d
    sym = make_symbol(grid, ModelParams(regime="real-cubic"))
    st = EwiStepper(sym, 0.01)
    phi = init.psi.coeffs.astype(complex)
    a, g, k = st.step_real(phi)
    b, _, _ = st.step_real(phi, st.G(phi))
    assert np.array_equal(a, b) and k >= 1 and g.shape == phi.shape
