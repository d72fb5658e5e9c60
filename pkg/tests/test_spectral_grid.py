import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracklein.harness import builtin_initial_data, default_grid
from fracklein.spectral_grid import (
    GridError,
    SpectralField,
    SpectralGrid,
    conj_coeffs,
    forward_transform,
    hermitian_part,
    inverse_transform,
    resample,
    sobolev_norm,
)

TWO_PI = 2 * np.pi


def test_grid_validation():
    with pytest.raises(GridError):
        SpectralGrid.interval(0, TWO_PI, 7)
    with pytest.raises(GridError):
        SpectralGrid.interval(0, TWO_PI, 2)
    with pytest.raises(GridError):
        SpectralGrid.interval(1.0, 1.0, 8)
    with pytest.raises(GridError):
        SpectralGrid(((0, 1), (0, 1), (0, 1)), (4, 4, 4))


def test_grid_geometry():
    g = SpectralGrid.rectangle((0, 1), (0, TWO_PI), 8, 16)
    assert g.dims == 2 and g.size == 128
    assert g.volume == pytest.approx(TWO_PI)
    assert g.axis_nodes(0)[1] == pytest.approx(1 / 8)
    assert list(g.axis_modes(1)[:3]) == [0, 1, 2]
    assert g.axis_modes(1)[8] == -8
    assert g.axis_frequencies(0)[1] == pytest.approx(TWO_PI)
    x, y = g.nodes()
    assert x.shape == y.shape == (8, 16)
    assert g.index_of(-1, 3) == (7, 3)
    with pytest.raises(GridError):
        g.index_of(5, 0)


def test_constant_has_only_zero_mode():
    g = SpectralGrid.interval(0, 3.0, 16)
    f = forward_transform(np.full(16, 2.5), g)
    assert f.mode(0) == pytest.approx(2.5)
    rest = f.coeffs.copy()
    rest[0] = 0
    assert np.max(np.abs(rest)) < 1e-15


def test_single_mode_exactness():
    g = SpectralGrid.interval(0, TWO_PI, 16)
    x = g.axis_nodes(0)
    f = forward_transform(np.exp(1j * (x - 0.0)), g)
    assert f.mode(1) == pytest.approx(1.0, abs=1e-15)
    rest = f.coeffs.copy()
    rest[1] = 0
    assert np.max(np.abs(rest)) < 1e-15


def test_roundtrip_smooth_samples():
    g = SpectralGrid.interval(0, TWO_PI, 32)
    x = g.axis_nodes(0)
    v = 3 / (2 + np.cos(x) ** 2)
    f = forward_transform(v, g)
    assert f.real_valued
    back = inverse_transform(f)
    assert np.isrealobj(back)
    assert np.max(np.abs(back - v)) <= 1e-13


def test_inverse_of_zero_mode_and_single_mode():
    g = SpectralGrid.interval(0, TWO_PI, 16)
    c = np.zeros(16, complex)
    c[0] = 5
    assert np.allclose(inverse_transform(SpectralField(g, c)), 5, atol=1e-15, rtol=0)
    c = np.zeros(16, complex)
    c[2] = 1
    x = g.axis_nodes(0)
    assert np.max(np.abs(inverse_transform(SpectralField(g, c)) - np.exp(2j * x))) < 1e-14


def test_roundtrip_random_hermitian(rng):
    for g in (SpectralGrid.interval(0, 1, 32), SpectralGrid.rectangle((0, 1), (0, 2), 8, 12)):
        c = hermitian_part(rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
        f = SpectralField(g, c, real_valued=True)
        v = inverse_transform(f)
        assert np.isrealobj(v)
        assert np.max(np.abs(forward_transform(v, g).coeffs - c)) <= 1e-12


def test_conj_coeffs_matches_pointwise_conjugate(rng):
    g = SpectralGrid.rectangle((0, 1), (0, 1), 8, 6)
    v = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    c = forward_transform(v, g).coeffs
    assert np.max(np.abs(conj_coeffs(c) - forward_transform(np.conj(v), g).coeffs)) < 1e-15


def test_sobolev_norm_examples():
    g = SpectralGrid.interval(0, TWO_PI, 16)
    for m in (0.0, 0.5, 3.0):
        assert sobolev_norm(forward_transform(np.full(16, -1.5), g), m) == pytest.approx(1.5)
    c = np.zeros(16, complex)
    c[1] = 1
    assert sobolev_norm(SpectralField(g, c), 1) == pytest.approx(np.sqrt(2))
    with pytest.raises(ValueError):
        sobolev_norm(SpectralField(g, c), -1)


def _direct_dft_norm(values, length, m):
    # explicit O(N^2) DFT, independent of numpy.fft
    n = len(values)
    j = np.arange(n)
    ls = np.concatenate([np.arange(0, n // 2), np.arange(-n // 2, 0)])
    c = np.exp(-2j * np.pi * np.outer(ls, j) / n) @ values / n
    mu = 2 * np.pi * ls / length
    return np.sqrt(np.sum((1 + mu**2) ** m * np.abs(c) ** 2))


def test_sobolev_norm_against_dense_direct_sum():
    alpha = 1.5
    grid = default_grid("eq-5.1.1", 128)
    psi0 = builtin_initial_data("eq-5.1.1", grid).psi
    x = np.linspace(0, TWO_PI, 512, endpoint=False)
    ref = _direct_dft_norm(3 / (2 + np.cos(x) ** 2), TWO_PI, alpha / 2)
    assert abs(sobolev_norm(psi0, alpha / 2) - ref) / ref <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_plancherel(k, seed):
    r = np.random.default_rng(seed)
    n = 2 * k
    g = SpectralGrid.interval(-1.0, 2.0, n)
    v = r.standard_normal(n) + 1j * r.standard_normal(n)
    f = forward_transform(v, g)
    assert sobolev_norm(f, 0) ** 2 == pytest.approx(np.mean(np.abs(v) ** 2), rel=1e-12)


def test_resample_pad_and_truncate():
    g = SpectralGrid.interval(0, TWO_PI, 16)
    x = g.axis_nodes(0)
    f = forward_transform(np.cos(3 * x) + 0.2 * np.sin(x), g)
    big = resample(f, SpectralGrid.interval(0, TWO_PI, 64))
    xb = big.grid.axis_nodes(0)
    assert np.max(np.abs(big.values() - (np.cos(3 * xb) + 0.2 * np.sin(xb)))) < 1e-14
    small = resample(big, g)
    assert np.max(np.abs(small.coeffs - f.coeffs)) < 1e-15
    with pytest.raises(GridError):
        resample(f, SpectralGrid.interval(0, 1, 16))


def test_field_is_read_only_and_arithmetic():
    g = SpectralGrid.interval(0, 1, 8)
    f = SpectralField.from_function(g, lambda x: np.sin(TWO_PI * x))
    with pytest.raises(ValueError):
        f.coeffs[0] = 1
    h = f + f * 2.0 - f
    assert np.allclose(h.coeffs, 2 * f.coeffs)
    with pytest.raises(GridError):
        f + SpectralField.zeros(SpectralGrid.interval(0, 1, 16))
