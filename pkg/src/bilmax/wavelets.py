"""Daubechies wavelet systems and the tensor-product basis.

The 1D pair (psi_F, psi_M) is built by the cascade algorithm on a
dyadic grid of resolution 2^-R: exact values at the integers come from
the eigenvector of the refinement matrix, successive dyadic refinement
fills in the grid, and a final fixed-point sweep certifies convergence.

The tensor basis on R^dim at dilation gamma and translation mu is

    2^(gamma*dim/2) * prod_i psi_{G_i}(2^gamma x_i - mu_i),

with G_i in {F, M}, all-F allowed only at gamma = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .daubechies import DB_FILTERS
from .errors import InvalidParameterError, NumericError, TableError


@dataclass(frozen=True)
class WaveletIndex:
    """Index (gamma, G, mu) of one tensor wavelet."""

    gamma: int
    G: tuple[str, ...]
    mu: tuple[int, ...]

    def __post_init__(self):
        if self.gamma < 0:
            raise InvalidParameterError("gamma must be >= 0")
        if len(self.G) != len(self.mu):
            raise InvalidParameterError("G and mu must have equal length")
        if any(g not in ("F", "M") for g in self.G):
            raise InvalidParameterError(f"G entries must be 'F' or 'M', got {self.G}")
        if self.gamma > 0 and all(g == "F" for g in self.G):
            raise InvalidParameterError("pure-F tensors exist only at gamma = 0")

    @property
    def dim(self) -> int:
        return len(self.G)


def _refine_once(vals: np.ndarray, h: np.ndarray, r: int) -> np.ndarray:
    """Values on the 2^-(r+1) grid from values on the 2^-r grid."""
    sup = (len(h) - 1)  # support is [0, 2K-1]
    n_new = sup * 2 ** (r + 1) + 1
    new = np.zeros(n_new)
    idx = np.arange(n_new)
    for n, hn in enumerate(h):
        src = idx - n * 2**r  # phi(2x - n) at x = idx * 2^-(r+1)
        ok = (src >= 0) & (src < len(vals))
        new[idx[ok]] += math.sqrt(2.0) * hn * vals[src[ok]]
    return new


def _cascade_sweep(vals: np.ndarray, h: np.ndarray, R: int) -> np.ndarray:
    """One fixed-point iteration of the refinement operator at resolution R."""
    out = np.zeros_like(vals)
    idx = np.arange(len(vals))
    for n, hn in enumerate(h):
        src = 2 * idx - n * 2**R
        ok = (src >= 0) & (src < len(vals))
        out[idx[ok]] += math.sqrt(2.0) * hn * vals[src[ok]]
    return out


class WaveletSystem:
    """Daubechies pair of a given order with sampled 1D functions.

    order k: the filter has 2k taps and psi_M has k vanishing moments
    (integrals of x^a psi_M vanish for a = 0..k-1).  Both functions are
    supported in [0, 2k-1] and sampled at spacing 2^-R.
    """

    def __init__(self, order: int, resolution: int, psi_f: np.ndarray, psi_m: np.ndarray):
        self.order = order
        self.resolution = resolution
        self.filter = np.array(DB_FILTERS[order])
        self.psi_f = psi_f
        self.psi_m = psi_m
        self.support = (0.0, 2.0 * order - 1.0)
        self._cell_cache: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = {}

    @property
    def support_width(self) -> float:
        return self.support[1]

    def support_diameter(self, dim: int) -> float:
        """Euclidean diameter of the level-0 tensor support cube."""
        return self.support_width * math.sqrt(dim)

    def _samples(self, which: str) -> np.ndarray:
        if which == "F":
            return self.psi_f
        if which == "M":
            return self.psi_m
        raise InvalidParameterError(f"unknown factor {which!r}")

    def evaluate_1d(self, which: str, x) -> np.ndarray:
        """psi_F or psi_M at arbitrary points by linear interpolation."""
        x = np.asarray(x, dtype=np.float64)
        tab = self._samples(which)
        pos = x * 2.0**self.resolution
        out = np.interp(pos, np.arange(len(tab)), tab, left=0.0, right=0.0)
        out[(x < 0) | (x > self.support_width)] = 0.0
        return out

    def l2_norm_1d(self, which: str) -> float:
        tab = self._samples(which)
        return float(math.sqrt(np.trapezoid(tab**2, dx=2.0**-self.resolution)))

    def moment_1d(self, which: str, a: int) -> float:
        tab = self._samples(which)
        x = np.arange(len(tab)) * 2.0**-self.resolution
        return float(np.trapezoid(x**a * tab, dx=2.0**-self.resolution))

    def cell_weights(self, which: str, quad_level: int):
        """Exact per-cell moments of psi at spacing 2^-quad_level.

        Returns (I0, I1, I2) of length (2k-1) * 2^quad_level: integrals
        over each cell of psi, (x - x_center) psi, and (x - x_center)^2
        psi.  Used by quadrature rules that pair pointwise-smooth symbols
        against the rough wavelet factor.
        """
        key = (which, quad_level)
        if key in self._cell_cache:
            return self._cell_cache[key]
        if quad_level > self.resolution:
            raise InvalidParameterError("quad_level exceeds table resolution")
        tab = self._samples(which)
        per = 2 ** (self.resolution - quad_level)
        n_cells = int(self.support_width) * 2**quad_level
        dx = 2.0**-self.resolution
        # composite trapezoid within each cell
        blocks = tab[:-1].reshape(n_cells, per)
        nxt = tab[1:].reshape(n_cells, per)
        i0 = (blocks + nxt).sum(axis=1) * dx / 2.0
        # moments about the cell center
        off = np.arange(per) * dx - (2.0**-quad_level) / 2.0
        offn = off + dx
        i1 = (blocks * off + nxt * offn).sum(axis=1) * dx / 2.0
        i2 = (blocks * off**2 + nxt * offn**2).sum(axis=1) * dx / 2.0
        self._cell_cache[key] = (i0, i1, i2)
        return i0, i1, i2


def build_wavelet_system(order: int, resolution: int = 14) -> WaveletSystem:
    """Construct the db-`order` pair on a dyadic grid of spacing 2^-resolution.

    Raises TableError for orders outside 2..10 and NumericError if the
    certifying fixed-point sweep fails to settle below 1e-9 within 40
    iterations.
    """
    if order not in DB_FILTERS:
        raise TableError(f"no embedded filter for order {order}; supported: 2..10")
    if resolution < 10:
        raise InvalidParameterError("resolution must be at least 10")
    h = np.array(DB_FILTERS[order])
    k2 = len(h)  # 2k taps, support [0, 2k-1]
    # Exact values at the integers: eigenvector of A[a,b] = sqrt(2) h[2a-b]
    # for eigenvalue 1, normalized so the integer samples sum to 1.
    interior = k2 - 2
    A = np.zeros((interior, interior))
    for a in range(1, k2 - 1):
        for b in range(1, k2 - 1):
            idx = 2 * a - b
            if 0 <= idx < k2:
                A[a - 1, b - 1] = math.sqrt(2.0) * h[idx]
    w, v = np.linalg.eig(A)
    pick = int(np.argmin(np.abs(w - 1.0)))
    if abs(w[pick] - 1.0) > 1e-8:
        raise NumericError(f"refinement matrix has no eigenvalue 1 (closest {w[pick]})")
    phi_int = np.real(v[:, pick])
    phi_int /= phi_int.sum()
    vals = np.zeros(k2 - 1 + 1)
    vals[1:-1] = phi_int
    # dyadic refinement to the requested resolution (exact at each step)
    for r in range(resolution):
        vals = _refine_once(vals, h, r)
    # certifying fixed-point sweeps
    for _ in range(40):
        nxt = _cascade_sweep(vals, h, resolution)
        diff = float(np.max(np.abs(nxt - vals)))
        vals = nxt
        if diff < 1e-9:
            break
    else:
        raise NumericError(f"cascade did not settle below 1e-9 in 40 sweeps (last {diff:.2e})")
    # quadrature-mirror wavelet: psi(x) = sqrt(2) sum_n g_n phi(2x - n),
    # g_n = (-1)^n h[2k-1-n], keeping the support in [0, 2k-1].
    g = np.array([(-1) ** n * h[k2 - 1 - n] for n in range(k2)])
    idx = np.arange(len(vals))
    psi = np.zeros_like(vals)
    for n, gn in enumerate(g):
        src = 2 * idx - n * 2**resolution
        ok = (src >= 0) & (src < len(vals))
        psi[idx[ok]] += math.sqrt(2.0) * gn * vals[src[ok]]
    return WaveletSystem(order, resolution, vals, psi)


@lru_cache(maxsize=8)
def cached_wavelet_system(order: int, resolution: int = 14) -> WaveletSystem:
    return build_wavelet_system(order, resolution)


def tensor_wavelet_eval(system: WaveletSystem, idx: WaveletIndex, points) -> np.ndarray:
    """Evaluate the tensor wavelet at points of shape (..., dim)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[-1] != idx.dim:
        raise InvalidParameterError(f"points dim {pts.shape[-1]} != index dim {idx.dim}")
    scale = 2.0**idx.gamma
    out = np.full(pts.shape[:-1], 2.0 ** (idx.gamma * idx.dim / 2.0))
    for d in range(idx.dim):
        out = out * system.evaluate_1d(idx.G[d], scale * pts[..., d] - idx.mu[d])
    return out


def tensor_support_cube(system: WaveletSystem, idx: WaveletIndex):
    """Axis-aligned support cube [lo_i, hi_i] of a tensor wavelet."""
    width = system.support_width * 2.0**-idx.gamma
    lo = np.array(idx.mu, dtype=np.float64) * 2.0**-idx.gamma
    return lo, lo + width
