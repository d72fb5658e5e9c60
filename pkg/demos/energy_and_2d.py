"""
Energy behaviour and a 2D run
=============================

The scheme does not conserve the energy exactly.  The drift stays small
and shrinks like tau^2.  The second half evolves real 2D data and checks
that the solution stays real.  If matplotlib is installed, the final
fields are also plotted.
"""

from fracklein.harness import StudySpec, run_energy_study, run_field_dump_2d

spec = StudySpec(kind="energy", alphas=(1.5,), eps_list=(0.5,), steps=(1e-2, 5e-3), p=2, n_samples=32)
for s in run_energy_study(spec):
    print(f"tau={s.tau:g}: max relative energy deviation up to t={s.series[-1].time:g} is {s.max_deviation:.2e}")

spec2d = StudySpec(kind="field-dump-2d", alphas=(2.0, 1.4), eps_list=(1.0,), steps=(1e-2,), p=1,
                   data="eq-5.2.1", shape_2d=(32, 64), t_final=2.0, dump_times=(0.0, 1.0, 2.0))
dumps = run_field_dump_2d(spec2d)
for d in dumps:
    print(f"alpha={d.alpha}: max |Im psi| = {d.max_imag:.1e}, energy deviation = {d.energy_dev:.1e}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(1, len(dumps), figsize=(5 * len(dumps), 4))
    for ax, d in zip(axes, dumps):
        im = ax.pcolormesh(d.y, d.x, d.values[-1], shading="auto")
        ax.set_title(f"alpha = {d.alpha}, t = {d.times[-1]:g}")
        ax.set_xlabel("y")
        ax.set_ylabel("x")
        fig.colorbar(im, ax=ax)
    fig.savefig("field_2d.png", dpi=120)
    print("saved field_2d.png")
