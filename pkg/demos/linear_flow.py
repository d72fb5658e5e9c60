"""
Linear flow is reproduced exactly
=================================

With eps = 0 the integrator reduces to multiplying every Fourier
coefficient by a phase, so after a thousand steps it still agrees with the
closed-form cos/sin solution to rounding error.
"""

import numpy as np

from fracklein import ModelParams, SolveConfig, forward_transform, h_alpha_half_error, solve
from fracklein.harness import builtin_initial_data, default_grid
from fracklein.oracle import linear_flow

grid = default_grid("eq-5.1.1", 128)
init = builtin_initial_data("eq-5.1.1", grid)

tau, steps = 0.01, 1000
for alpha in (2.0, 1.5, 1.2):
    params = ModelParams(alpha=alpha, eps=0.0)
    traj = solve(SolveConfig(params, grid, tau, tau * steps, snapshot_stride=steps), init)

    # closed-form reference, computed from node values
    u, _ = linear_flow(init.psi.values(), init.eta.values(), grid.bounds, alpha, 1.0, tau * steps)
    err = h_alpha_half_error(traj.final.psi, forward_transform(u.real, grid), alpha)
    print(f"alpha={alpha}: error after {steps} steps = {err:.2e}")
