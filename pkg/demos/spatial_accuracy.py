"""
Spectral accuracy in space
==========================

For smooth periodic data the error drops faster than any power of N.
From 16 nodes on, each doubling gains two or more orders of magnitude,
until the rounding floor is reached.
"""

from fracklein.harness import StudySpec, run_spatial_study

spec = StudySpec(kind="spatial", alphas=(2.0, 1.2), eps_list=(0.5,), steps=(1e-3,), Ns=(8, 16, 32, 64),
                 p=2, t_final=1.0, N_ref=128)

for r in run_spatial_study(spec):
    print(f"alpha={r.alpha:.1f}  N={r.N:3d}  e1={r.e1:.2e}")
