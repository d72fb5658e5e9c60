import math

import numpy as np
import pytest

from fracklein.harness import (
    ReferenceCache,
    StudySpec,
    builtin_initial_data,
    default_grid,
    energy_records,
    long_time_ratios,
    long_time_records,
    oscillatory_table_spec,
    run_energy_study,
    run_field_dump_2d,
    run_long_time_study,
    run_oscillatory_table,
    run_spatial_study,
    run_temporal_study,
)
from fracklein.spectral_grid import GridError, SpectralGrid
from fracklein.state_transform import KgeState


def test_builtin_data_values_at_origin():
    st = builtin_initial_data("eq-5.1.1", default_grid("eq-5.1.1", 16))
    assert st.psi.values()[0] == pytest.approx(1.0)
    assert st.eta.values()[0] == pytest.approx(0.6)
    st = builtin_initial_data("eq-5.2.1", default_grid("eq-5.2.1", (8, 16)))
    assert st.psi.values()[0, 0] == pytest.approx(1.0)
    st = builtin_initial_data("sec-5.3-complex", default_grid("sec-5.3-complex", 16))
    assert st.psi.values()[0] == pytest.approx(3.0)
    assert st.eta.values()[0] == pytest.approx(3j)
    with pytest.raises(KeyError):
        builtin_initial_data("nope", default_grid("eq-5.1.1", 16))
    with pytest.raises(GridError):
        builtin_initial_data("eq-5.1.1", SpectralGrid.interval(0, 1, 16))


def test_spec_validation():
    with pytest.raises(ValueError, match="kind"):
        StudySpec(kind="bogus")
    with pytest.raises(ValueError, match="tau_ref"):
        StudySpec(kind="temporal", steps=(1e-2,), tau_ref=5e-3)
    with pytest.raises(ValueError, match="N_ref"):
        StudySpec(kind="spatial", Ns=(16, 32), N_ref=48)
    with pytest.raises(ValueError, match="alpha"):
        StudySpec(kind="temporal", alphas=(2.5,))
    with pytest.raises(ValueError, match="custom"):
        StudySpec(kind="temporal", data="custom")
    assert StudySpec(kind="temporal", steps=(0.1, 0.02)).reference_step == pytest.approx(2e-3)
    assert StudySpec(kind="long-time", p=2).horizon(0.5) == pytest.approx(16.0)
    with pytest.raises(ValueError):
        StudySpec(kind="long-time").horizon(0.0)


def test_temporal_study_orders():
    spec = StudySpec(kind="temporal", alphas=(1.5,), eps_list=(1.0,), steps=(0.1, 0.05, 0.025), Ns=(32,),
                     p=1, t_final=1.0, tau_ref=1e-3)
    recs = run_temporal_study(spec)
    assert [r.tau for r in recs] == [0.1, 0.05, 0.025]
    assert recs[0].order is None
    assert all(1.8 <= r.order <= 2.2 for r in recs[1:])
    assert all(r.iters_max <= 10 for r in recs)


def test_spatial_study_decay():
    # horizon t = 1/eps^4; N = 8 is pre-asymptotic, so the 10^2 factor is checked from N = 16 on
    spec = StudySpec(kind="spatial", alphas=(1.2,), eps_list=(0.5,), steps=(1e-2,), Ns=(8, 16, 32, 64), p=2)
    recs = run_spatial_study(spec)
    es = [r.e1 for r in recs]
    assert recs[-1].t_final == pytest.approx(16.0)
    assert es[0] / es[1] > 10
    assert es[1] / es[2] > 1e2 and es[2] / es[3] > 1e2
    assert es[3] <= 1e-12


def test_long_time_eps_trend_and_dominance():
    spec = StudySpec(kind="long-time", alphas=(2.0,), eps_list=(1.0, 0.5), steps=(1e-2,), p=2,
                     tau_ref=1e-3, n_samples=16)
    curves = run_long_time_study(spec)
    c1, c2 = curves
    assert c1.times[-1] == pytest.approx(1.0) and c2.times[-1] == pytest.approx(16.0)
    assert np.all(np.diff(c2.e1_max) >= 0)
    # the eps=1 curve sits above the eps=1/2 curve over the common time span
    common = c2.times <= 1.0 + 1e-12
    assert np.all(np.interp(c2.times[common], c1.times, c1.e1_max) >= c2.e1_max[common])
    assert c2.e1_max[-1] < c1.e1_max[-1]
    (ratio,) = long_time_ratios(curves)[(2.0, 1e-2)]
    assert ratio > 1
    recs = long_time_records(curves, spec)
    assert recs[1].t_final == pytest.approx(16.0)


def test_long_time_linear_is_exact():
    spec = StudySpec(kind="long-time", alphas=(1.5,), eps_list=(0.0,), steps=(1e-2,), p=1, t_final=10.0,
                     n_samples=10)
    (c,) = run_long_time_study(spec)
    assert c.e1_max[-1] <= 1e-12


def test_energy_study():
    spec = StudySpec(kind="energy", alphas=(1.5,), eps_list=(1.0,), steps=(0.02, 0.01), p=2, n_samples=10)
    studies = run_energy_study(spec)
    assert studies[0].series[0].relative_deviation == 0
    assert studies[0].max_deviation > studies[1].max_deviation
    recs = energy_records(studies, spec)
    assert recs[0].order is None
    assert recs[1].order == pytest.approx(2.0, abs=0.3)


def test_small_oscillatory_table():
    spec = oscillatory_table_spec(2.0, rows=3, cols=3, N=32)
    (tab,) = run_oscillatory_table(spec)
    assert tab.e1.shape == (3, 3)
    assert tab.eps == [1.0, 0.5, 0.25]
    assert tab.steps == pytest.approx([0.05, 0.0125, 0.003125])
    assert math.isnan(tab.order[0, 0])
    assert 1.85 <= tab.order[0, 1] <= 2.25
    rows = tab.layout_rows()
    assert len(rows) == 1 + 2 * 3
    assert rows[1][0].startswith("eps=") and rows[2][0] == "order"
    assert len(tab.records) == 9


def test_reference_cache(tmp_path):
    cache = ReferenceCache(tmp_path)
    key = ReferenceCache.key(alpha=2.0, N=16)
    assert key != ReferenceCache.key(alpha=2.0, N=32)
    assert cache.get(key) is None
    cache.put(key, [0.0, 1.0], [np.zeros(4), np.ones(4)])
    fresh = ReferenceCache(tmp_path)
    times, psis = fresh.get(key)
    assert times == [0.0, 1.0] and np.array_equal(psis[1], np.ones(4))
    assert fresh.checksums[key] == cache.checksums[key]


def test_cache_dir_and_parallel_determinism(tmp_path):
    base = dict(kind="temporal", alphas=(1.5,), eps_list=(1.0, 0.5), steps=(0.1, 0.05), Ns=(16,), p=1,
                t_final=0.5)
    serial = run_temporal_study(StudySpec(**base, cache_dir=str(tmp_path)))
    assert list(tmp_path.glob("ref_*.npz"))
    parallel = run_temporal_study(StudySpec(**base, workers=2))
    assert [r.e1 for r in serial] == [r.e1 for r in parallel]


def test_custom_initial_data():
    grid = default_grid("eq-5.1.1", 32)
    st = builtin_initial_data("eq-5.1.1", grid)
    custom = KgeState(st.psi * 0.5, st.eta * 0.5)
    spec = StudySpec(kind="temporal", steps=(0.1, 0.05), Ns=(32,), data="custom", custom_initial=custom,
                     t_final=0.5)
    recs = run_temporal_study(spec)
    assert all(r.e1 > 0 for r in recs)


def test_field_dump_2d(tmp_path):
    spec = StudySpec(kind="field-dump-2d", alphas=(2.0, 1.7, 1.1), eps_list=(1.0,), steps=(1e-2,), p=1,
                     data="eq-5.2.1", shape_2d=(32, 64), t_final=8.0, dump_times=(0.0, 2.0, 8.0))
    dumps = run_field_dump_2d(spec, output=tmp_path)
    assert [d.times for d in dumps] == [[0.0, 2.0, 8.0]] * 3
    grid = default_grid("eq-5.2.1", (32, 64))
    x, y = grid.nodes()
    sampled = 2 / (1 + np.cos(2 * np.pi * x + y) ** 2)
    for d in dumps:
        assert np.max(np.abs(d.values[0] - sampled)) <= 1e-14
        assert d.max_imag <= 1e-10
    far = np.max(np.abs(dumps[0].values[-1] - dumps[2].values[-1]))
    near = np.max(np.abs(dumps[0].values[-1] - dumps[1].values[-1]))
    assert far > near
    with np.load(tmp_path / "dump2d_alpha1.7.npz") as z:
        assert z["psi"].shape == (3, 32, 64)
