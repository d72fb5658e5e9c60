"""
Second order in time, with an eps^(2p) prefactor
================================================

Halving tau cuts the error by four.  Shrinking eps reduces the error
further, because the nonlinear part of each step is scaled by eps^(2p).
"""

from fracklein.harness import StudySpec, run_temporal_study

spec = StudySpec(kind="temporal", alphas=(1.5,), eps_list=(1.0, 0.5), steps=(0.04, 0.02, 0.01, 0.005),
                 Ns=(128,), p=2, t_final=1.0, tau_ref=2e-4)

print(f"{'eps':>5} {'tau':>8} {'e1':>10} {'order':>6}")
for r in run_temporal_study(spec):
    order = "" if r.order is None else f"{r.order:.2f}"
    print(f"{r.eps:5.2f} {r.tau:8.4f} {r.e1:10.3e} {order:>6}")
