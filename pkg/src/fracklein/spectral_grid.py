"""Periodic tensor grids, trigonometric interpolation and discrete Sobolev norms.

Coefficients are stored in FFT order along every axis, i.e. for an axis with
``N`` nodes the array position ``k`` holds the mode ``l = k`` for
``k < N/2`` and ``l = k - N`` otherwise.  This is the mode set
``{-N/2, ..., N/2 - 1}`` with the unmatched mode ``-N/2`` at position ``N/2``.

With ``x_j = a + j h`` the transform pair is

    c_l   = (1/N) sum_j v_j exp(-i mu_l (x_j - a)),    mu_l = 2 pi l / (b - a)
    v_j   = sum_l c_l exp(i mu_l (x_j - a))

which is ``numpy.fft.fftn(v) / prod(N)`` and its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class GridError(ValueError):
    """Raised for malformed grids or arrays that do not match a grid."""


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on a box ``prod_i (a_i, b_i)`` in 1 or 2 dimensions.

    Parameters
    ----------
    bounds : sequence of (a, b) pairs, one per axis.
    shape : number of nodes per axis; every entry even and at least 4.
    """

    bounds: tuple[tuple[float, float], ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        shape = tuple(int(n) for n in self.shape)
        if len(bounds) != len(shape):
            raise GridError("bounds and shape must have the same length")
        if len(shape) not in (1, 2):
            raise GridError(f"only 1D and 2D grids are supported, got {len(shape)}D")
        for (a, b), n in zip(bounds, shape):
            if not b > a:
                raise GridError(f"domain endpoints must satisfy b > a, got ({a}, {b})")
            if n < 4 or n % 2:
                raise GridError(f"mode count must be even and >= 4, got {n}")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def interval(cls, a: float, b: float, n: int) -> "SpectralGrid":
        return cls(((a, b),), (n,))

    @classmethod
    def rectangle(cls, xb: tuple[float, float], yb: tuple[float, float],
                  nx: int, ny: int) -> "SpectralGrid":
        return cls((xb, yb), (nx, ny))

    @property
    def dims(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in self.bounds)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.shape))

    def axis_nodes(self, axis: int) -> np.ndarray:
        a, _ = self.bounds[axis]
        return a + np.arange(self.shape[axis]) * self.spacing[axis]

    def axis_modes(self, axis: int) -> np.ndarray:
        """Integer mode indices of ``axis`` in FFT order."""
        n = self.shape[axis]
        return np.fft.fftfreq(n, d=1.0 / n).round().astype(int)

    def axis_frequencies(self, axis: int) -> np.ndarray:
        return 2.0 * np.pi * self.axis_modes(axis) / self.lengths[axis]

    def nodes(self) -> tuple[np.ndarray, ...]:
        """Node coordinates as broadcast-ready ``meshgrid(indexing='ij')`` arrays."""
        return tuple(np.meshgrid(*(self.axis_nodes(k) for k in range(self.dims)),
                                 indexing="ij"))

    @cached_property
    def freq_sq(self) -> np.ndarray:
        """``|mu_l|^2`` over the full coefficient array."""
        mus = np.meshgrid(*(self.axis_frequencies(k) for k in range(self.dims)),
                          indexing="ij")
        return sum(m**2 for m in mus)

    @cached_property
    def freq_abs(self) -> np.ndarray:
        return np.sqrt(self.freq_sq)

    def index_of(self, *modes: int) -> tuple[int, ...]:
        """Array position of the mode ``(l_1, ..., l_d)``; raises if unrepresentable."""
        if len(modes) != self.dims:
            raise GridError(f"expected {self.dims} mode indices, got {len(modes)}")
        idx = []
        for l, n in zip(modes, self.shape):
            if not -n // 2 <= l < n // 2:
                raise GridError(f"mode {l} outside T_N for N={n}")
            idx.append(l % n)
        return tuple(idx)

    def compatible(self, other: "SpectralGrid") -> bool:
        """Same domain (possibly different resolution)."""
        return self.dims == other.dims and np.allclose(self.bounds, other.bounds,
                                                       rtol=0, atol=1e-14)

    # cached_property needs a writable __dict__; hash/eq only on the defining fields
    def __hash__(self):
        return hash((self.bounds, self.shape))

    def __eq__(self, other):
        if not isinstance(other, SpectralGrid):
            return NotImplemented
        return self.bounds == other.bounds and self.shape == other.shape


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Trigonometric interpolant on ``grid`` given by its coefficients (FFT order)."""

    grid: SpectralGrid
    coeffs: np.ndarray = field(repr=False)
    real_valued: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.grid.shape:
            raise GridError(f"coefficient array shape {c.shape} does not match "
                            f"grid shape {self.grid.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def mode(self, *l: int) -> complex:
        return complex(self.coeffs[self.grid.index_of(*l)])

    def centered(self) -> np.ndarray:
        """Coefficients reordered so that index 0 holds ``l = -N/2``."""
        return np.fft.fftshift(self.coeffs)

    def values(self) -> np.ndarray:
        return inverse_transform(self)

    def with_coeffs(self, coeffs: np.ndarray, real_valued: bool | None = None) -> "SpectralField":
        rv = self.real_valued if real_valued is None else real_valued
        return SpectralField(self.grid, coeffs, rv)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs,
                                self.real_valued and other.real_valued)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs,
                                self.real_valued and other.real_valued)

    def __mul__(self, scalar):
        s = complex(scalar)
        return self.with_coeffs(self.coeffs * s, self.real_valued and s.imag == 0)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid: SpectralGrid, real_valued: bool = True) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=complex), real_valued)

    @classmethod
    def from_function(cls, grid: SpectralGrid, func, real_valued: bool | None = None) -> "SpectralField":
        """Sample ``func(*node_arrays)`` on the grid and transform."""
        vals = np.asarray(func(*grid.nodes()))
        vals = np.broadcast_to(vals, grid.shape)
        return forward_transform(vals, grid, real_valued=real_valued)


def _check_same_grid(f: SpectralField, g: SpectralField):
    if f.grid != g.grid:
        raise GridError("fields live on different grids")


def hermitian_part(coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of ``Re(u)`` given those of ``u``: ``(c_l + conj(c_{-l})) / 2``."""
    return 0.5 * (coeffs + conj_coeffs(coeffs))


def conj_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of the complex conjugate function: ``c_l -> conj(c_{-l})``.

    The ``-N/2`` mode maps to itself, which is what the conjugate of the
    sampled grid values produces.
    """
    out = np.conj(coeffs)
    for ax in range(coeffs.ndim):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def forward_transform(values, grid: SpectralGrid, real_valued: bool | None = None) -> SpectralField:
    """Discrete coefficients ``c_l`` of the node values ``values``.

    ``real_valued`` defaults to whether the input is real; when set, the
    coefficients are made exactly Hermitian (the unmatched ``-N/2`` mode is
    then forced real).
    """
    v = np.asarray(values)
    if v.shape != grid.shape:
        raise GridError(f"value array shape {v.shape} does not match grid shape {grid.shape}")
    if real_valued is None:
        real_valued = not np.iscomplexobj(v) or not np.any(v.imag)
    c = np.fft.fftn(v) / grid.size
    if real_valued:
        c = hermitian_part(c)
    return SpectralField(grid, c, bool(real_valued))


def inverse_transform(field: SpectralField) -> np.ndarray:
    """Node values ``sum_l c_l exp(i mu_l (x_j - a))``; real array for real fields."""
    v = np.fft.ifftn(field.coeffs) * field.grid.size
    return v.real.copy() if field.real_valued else v


def sobolev_weights(grid: SpectralGrid, m: float) -> np.ndarray:
    if m < 0:
        raise ValueError(f"Sobolev index must be nonnegative, got m={m}")
    return (1.0 + grid.freq_sq) ** m


def sobolev_norm(field: SpectralField, m: float) -> float:
    """``(sum_l (1 + |mu_l|^2)^m |c_l|^2)^(1/2)`` over the grid's modes."""
    w = sobolev_weights(field.grid, m)
    return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2)))


def resample(field: SpectralField, grid: SpectralGrid) -> SpectralField:
    """Zero-pad or truncate ``field`` onto ``grid`` (same domain) by mode index.

    Modes present on both grids are copied; the rest are zero.  For real
    fields the ``-N/2`` mode of the target is taken as the Hermitian average,
    which keeps the result exactly real.
    """
    if not field.grid.compatible(grid):
        raise GridError("cannot resample between different domains")
    src = field.grid.shape
    out = np.zeros(grid.shape, dtype=complex)
    sl_src, sl_dst = [], []
    for ns, nd in zip(src, grid.shape):
        k = min(ns, nd) // 2
        # modes -k+1 .. k-1 exist on both grids; the -k mode only if it is not the
        # unmatched mode of the smaller one
        sl_src.append(np.r_[0:k, ns - k + 1:ns] if ns > nd else np.r_[0:k, ns - k:ns])
        sl_dst.append(np.r_[0:k, nd - k + 1:nd] if ns > nd else np.r_[0:k, nd - k:nd])
    out[np.ix_(*sl_dst)] = field.coeffs[np.ix_(*sl_src)]
    if field.real_valued:
        out = hermitian_part(out)
    return SpectralField(grid, out, field.real_valued)
