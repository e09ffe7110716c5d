"""Centered grids, sampled fields, and discrete Fourier transforms.

Conventions
-----------
Forward transform:  F(xi) = integral f(x) exp(-2*pi*i x.xi) dx,
approximated by the Riemann sum with weight h**dim on the centered grid
x_m = (m - N/2) * h, m = 0..N-1, h = L/N.  The dual grid carries
frequencies xi_k = (k - N/2) / L, so ``fft_forward`` maps a Field on a
grid to a Field on its dual grid and ``fft_inverse`` maps back exactly
(the composition is the identity up to round-off).

Periodization is the discretization model: functions are treated as
L-periodic, and test inputs are expected to decay below ~1e-12 at the
domain boundary (see :func:`boundary_decay`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidGridError, InvalidParameterError, ResolutionError


@dataclass(frozen=True)
class Grid:
    """Uniform centered grid on the cube [-L/2, L/2)^dim.

    Index 0 corresponds to the coordinate -L/2; the center of the domain
    sits at index N/2.  N must be even so that both the spatial and the
    frequency grid contain the origin as a node.
    """

    dim: int
    points_per_axis: int
    extent: float

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidGridError(f"dim must be positive, got {self.dim}")
        n = self.points_per_axis
        if n < 2 or n % 2 != 0:
            raise InvalidGridError(f"points_per_axis must be even and >= 2, got {n}")
        if not self.extent > 0:
            raise InvalidGridError(f"extent must be positive, got {self.extent}")

    @property
    def spacing(self) -> float:
        return self.extent / self.points_per_axis

    @property
    def freq_spacing(self) -> float:
        return 1.0 / self.extent

    @property
    def nyquist(self) -> float:
        return self.points_per_axis / (2.0 * self.extent)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dim

    def axis(self) -> np.ndarray:
        """Grid coordinates along one axis, length N, centered."""
        n = self.points_per_axis
        return (np.arange(n) - n // 2) * self.spacing

    def dual(self) -> "Grid":
        """Grid of the dual (frequency) variable: spacing 1/L, N points."""
        return Grid(self.dim, self.points_per_axis,
                    self.points_per_axis / self.extent)

    def radius(self) -> np.ndarray:
        """|x| on the full grid, shape ``self.shape``."""
        ax = self.axis()
        r2 = np.zeros(self.shape)
        for d in range(self.dim):
            shape = [1] * self.dim
            shape[d] = self.points_per_axis
            r2 = r2 + (ax.reshape(shape)) ** 2
        return np.sqrt(r2)

    def points(self) -> np.ndarray:
        """All grid points, shape (size, dim)."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


class Field:
    """Complex samples of a function on a :class:`Grid`.

    Values are immutable after construction; all operations return new
    Fields, which keeps parameter sweeps safe to parallelize.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray):
        values = np.asarray(values)
        if values.shape != grid.shape:
            if values.size == grid.size:
                values = values.reshape(grid.shape)
            else:
                raise InvalidGridError(
                    f"value shape {values.shape} does not match grid shape {grid.shape}")
        values = np.ascontiguousarray(values, dtype=np.complex128)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        """Sample ``fn`` (vectorized over a (..., dim) point array)."""
        pts = grid.points()
        vals = np.asarray(fn(pts), dtype=np.complex128).reshape(grid.shape)
        return cls(grid, vals)

    def __add__(self, other):
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return Field(self.grid, self.values * other.values)
        return Field(self.grid, self.values * other)

    __rmul__ = __mul__

    def abs(self) -> "Field":
        return Field(self.grid, np.abs(self.values))


def _check_same_grid(a: Field, b: Field):
    if a.grid != b.grid:
        raise InvalidGridError(f"grids differ: {a.grid} vs {b.grid}")


def fft_forward(f: Field) -> Field:
    """Discrete approximation of the continuous Fourier transform.

    Returns a Field on ``f.grid.dual()``.  Exact identity on the grid:
    output[k] = h^dim * sum_m f(x_m) exp(-2 pi i x_m . xi_k).
    """
    g = f.grid
    v = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values)))
    return Field(g.dual(), v * g.spacing**g.dim)


def fft_inverse(F: Field) -> Field:
    """Inverse of :func:`fft_forward`; returns a Field on ``F.grid.dual()``."""
    g = F.grid
    v = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(F.values)))
    # ifftn includes 1/N^dim; the Riemann weight is spacing^dim, so the
    # net factor is (N * spacing)^dim = extent^dim.
    return Field(g.dual(), v * g.extent**g.dim)


def lp_norm(f: Field, p: float) -> float:
    """L^p norm with the grid quadrature weight; p = inf gives max modulus."""
    if p == np.inf or p == float("inf"):
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    h = f.grid.spacing
    return float((np.sum(np.abs(f.values) ** p) * h**f.grid.dim) ** (1.0 / p))


def boundary_decay(f: Field) -> float:
    """Largest modulus of f on the boundary faces of the domain."""
    v = np.abs(f.values)
    worst = 0.0
    for d in range(f.grid.dim):
        worst = max(worst, float(np.max(np.take(v, 0, axis=d))))
        worst = max(worst, float(np.max(np.take(v, -1, axis=d))))
    return worst


def require_boundary_decay(f: Field, tol: float = 1e-12):
    """Raise if f does not decay below ``tol`` at the domain boundary."""
    worst = boundary_decay(f)
    if worst > tol:
        raise InvalidParameterError(
            f"field does not decay at the boundary: max modulus {worst:.3e} > {tol:.3e}")


def apply_freq_multiplier(f: Field, w) -> Field:
    """(w * fhat)^vee for a multiplier w on the dual grid.

    ``w`` may be a Symbol of matching dimension, a callable over a
    (..., dim) point array, or an ndarray of dual-grid samples.
    """
    F = fft_forward(f)
    dual = F.grid
    if isinstance(w, np.ndarray):
        if w.shape != dual.shape:
            raise InvalidGridError(f"multiplier shape {w.shape} != {dual.shape}")
        wv = w
    elif hasattr(w, "sample_tensor"):
        if w.dim != f.grid.dim:
            raise InvalidGridError(f"multiplier dim {w.dim} != field dim {f.grid.dim}")
        wv = w.sample_tensor([dual.axis()] * dual.dim)
    else:
        wv = np.asarray(w(dual.points())).reshape(dual.shape)
    return fft_inverse(Field(dual, F.values * wv))


def sobolev_norm(m, freq_grid: Grid, r: float, s: float) -> float:
    """Sobolev norm: L^r norm of ((1 + 4 pi^2 |zeta|^2)^(s/2) mhat)^vee.

    ``m`` is a Symbol (sampled on ``freq_grid``) or a Field already living
    on it.  The nested transform uses the dual grid of ``freq_grid`` for
    the zeta variable.  Annulus-supported symbols are rejected when fewer
    than 8 grid cells span their radial width.
    """
    if not (1.0 < r):
        raise InvalidParameterError(f"r must exceed 1, got {r}")
    if s < 0:
        raise InvalidParameterError(f"s must be >= 0, got {s}")
    if isinstance(m, Field):
        if m.grid != freq_grid:
            raise InvalidGridError("field lives on a different grid")
        samples = m
    else:
        ann = getattr(m, "annulus", None)
        if ann is not None:
            width = ann[1] - ann[0]
            if width / freq_grid.spacing < 8:
                raise ResolutionError(
                    f"annulus width {width:.4g} spans fewer than 8 cells "
                    f"(spacing {freq_grid.spacing:.4g})")
        samples = Field(freq_grid, m.sample_tensor([freq_grid.axis()] * freq_grid.dim))
    if s == 0:
        return lp_norm(samples, r)
    spec = fft_forward(samples)
    zeta2 = spec.grid.radius() ** 2
    mult = (1.0 + 4.0 * np.pi**2 * zeta2) ** (s / 2.0)
    smoothed = fft_inverse(Field(spec.grid, spec.values * mult))
    return lp_norm(smoothed, r)
