"""FFT evaluation of dilated bilinear multiplier operators.

The core operation computes, on the grid of the inputs,

    S_t(f,g)(x) = sum_{xi,eta} m(t xi, t eta) fhat(xi) ghat(eta)
                  exp(2 pi i x.(xi+eta)) dxi deta,

by an inverse transform over eta for every xi slice followed by a
phase-weighted sum over xi (the diagonal restriction never materializes
the full 2n-dimensional spatial tensor).  On top of it sit the maximal
operator over a dilation grid, the radial-derivative (tilde) operators,
the square functions, the convolution kernel, and the Hardy-Littlewood
maximal function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGridError, InvalidParameterError
from .grids import Field, Grid, fft_forward, fft_inverse, lp_norm
from .parallel import parallel_map
from .symbols import AnnularPiece, Symbol, radial_derivative_symbol


@dataclass(frozen=True)
class DilationGrid:
    """Log-spaced dilation parameters with an optional validity window.

    ``valid`` records the t-range for which the dilated symbol support
    stays within the resolvable frequency band of the inputs; values
    outside it produce an aliasing warning on the result.
    """

    t_values: tuple[float, ...]
    valid: tuple[float, float] | None = None

    def __post_init__(self):
        t = np.asarray(self.t_values)
        if t.size == 0:
            raise InvalidParameterError("empty t-grid")
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise InvalidParameterError("t values must be positive and increasing")
        if t.size >= 3:
            logs = np.diff(np.log(t))
            if np.max(np.abs(logs - logs[0])) > 1e-12 * max(1.0, abs(logs[0])):
                raise InvalidParameterError("t values must be uniformly log-spaced")

    @classmethod
    def geometric(cls, t_min: float, t_max: float, per_octave: int = 16,
                  valid=None) -> "DilationGrid":
        if not 0 < t_min < t_max:
            raise InvalidParameterError("need 0 < t_min < t_max")
        count = max(2, int(math.ceil(math.log2(t_max / t_min) * per_octave)) + 1)
        ts = np.exp(np.linspace(math.log(t_min), math.log(t_max), count))
        return cls(tuple(float(x) for x in ts), valid)

    @classmethod
    def covering(cls, annulus: tuple[float, float], band: tuple[float, float],
                 per_octave: int = 16) -> "DilationGrid":
        """Grid spanning every t at which the dilated annulus meets the band.

        band is the radial support [b_lo, b_hi] of |(xi, eta)| over the
        spectra of the inputs; the dilated symbol support t^-1 [r_in,
        r_out] intersects it exactly for t in [r_in/b_hi, r_out/b_lo].
        """
        r_in, r_out = annulus
        b_lo, b_hi = band
        if b_lo <= 0 or b_hi <= b_lo or r_out <= 0:
            raise InvalidParameterError("degenerate band or annulus")
        # ball-supported symbols (r_in = 0) stay active down to t = 0,
        # where the operator approaches the pointwise product; six octaves
        # below the top of the activation range covers that regime
        t_min = r_in / b_hi if r_in > 0 else (r_out / b_hi) * 2.0**-6
        t_max = r_out / b_lo
        return cls.geometric(t_min, t_max, per_octave, valid=(t_min, t_max))

    def __len__(self):
        return len(self.t_values)

    def __iter__(self):
        return iter(self.t_values)

    def log_weights(self) -> np.ndarray:
        """Midpoint weights for integrals against dt/t on this grid."""
        t = np.asarray(self.t_values)
        if t.size == 1:
            return np.ones(1)
        dlog = math.log(t[1] / t[0])
        return np.full(t.size, dlog)


@dataclass
class BilinearResult:
    """Output of a dilation sweep: the maximal field plus per-t records."""

    maximal: Field
    t_values: list[float]
    per_t_norms: list[dict]
    fields: list[Field] | None = None
    symbol_label: str = ""
    warnings: list[str] = field(default_factory=list)


def _symbol_tensor(symbol, axes: list[np.ndarray], t: float) -> np.ndarray:
    scaled = [np.asarray(a) * t for a in axes]
    if hasattr(symbol, "sample_tensor"):
        return symbol.sample_tensor(scaled)
    mesh = np.meshgrid(*scaled, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    return np.asarray(symbol(pts)).reshape([len(a) for a in axes])


def apply_bilinear(symbol, f: Field, g: Field, t: float = 1.0) -> Field:
    """S_t(f, g) on the common grid of f and g.

    The symbol must live on R^(2n) when the inputs live on R^n.  Cost is
    O(N^(2n) log N); n in {1, 2} is the supported regime.
    """
    if f.grid != g.grid:
        raise InvalidGridError("f and g must share a grid")
    n = f.grid.dim
    sdim = getattr(symbol, "dim", 2 * n)
    if sdim != 2 * n:
        raise InvalidGridError(f"symbol dim {sdim} != 2n = {2 * n}")
    if t <= 0:
        raise InvalidParameterError("t must be positive")
    if n == 1:
        return _apply_bilinear_1d(symbol, f, g, t)
    if n == 2:
        return _apply_bilinear_2d(symbol, f, g, t)
    raise InvalidParameterError(f"apply_bilinear supports n in {{1, 2}}, got n = {n}")


def _phase_matrix(grid: Grid) -> np.ndarray:
    """exp(2 pi i x_m xi_k) as a (k, m) matrix for one axis."""
    x = grid.axis()
    xi = grid.dual().axis()
    return np.exp(2j * math.pi * np.outer(xi, x))


def _apply_bilinear_1d(symbol, f: Field, g: Field, t: float) -> Field:
    grid = f.grid
    dual = grid.dual()
    F = fft_forward(f).values
    G = fft_forward(g).values
    xi = dual.axis()
    M = _symbol_tensor(symbol, [xi, xi], t)
    # inverse transform over eta for every xi row: U[k, m] = sum_l M[k,l] G[l] e(x_m eta_l) / L
    inner = M * G[None, :]
    U = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(inner, axes=1), axis=1), axes=1)
    U *= grid.points_per_axis * dual.spacing
    phase = _phase_matrix(grid)
    vals = np.einsum("k,km,km->m", F, phase, U, optimize=True) * dual.spacing
    return Field(grid, vals)


def _apply_bilinear_2d(symbol, f: Field, g: Field, t: float) -> Field:
    grid = f.grid
    dual = grid.dual()
    N = grid.points_per_axis
    F = fft_forward(f).values
    G = fft_forward(g).values
    xi = dual.axis()
    phase = _phase_matrix(grid)  # (k, m)
    out = np.zeros((N, N), dtype=np.complex128)
    weight = dual.spacing**2
    for k1 in range(N):
        M = _symbol_tensor(symbol, [xi[k1:k1 + 1], xi, xi, xi], t)[0]
        inner = M * G[None, :, :]
        U = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(inner, axes=(1, 2)), axes=(1, 2)), axes=(1, 2))
        U *= (N * dual.spacing) ** 2
        # sum over the second component of the first input frequency;
        # its phase rides on the second output axis
        V = np.einsum("b,bmn,bn->mn", F[k1], U, phase, optimize=True)
        out += weight * phase[k1][:, None] * V
    return Field(grid, out)


def apply_bilinear_direct(symbol, f: Field, g: Field, t: float, points_idx) -> np.ndarray:
    """O(N^2)-per-point Riemann sum oracle at selected grid indices (n = 1)."""
    grid = f.grid
    if grid.dim != 1:
        raise InvalidParameterError("direct oracle implemented for n = 1")
    dual = grid.dual()
    F = fft_forward(f).values
    G = fft_forward(g).values
    xi = dual.axis()
    M = _symbol_tensor(symbol, [xi, xi], t)
    x = grid.axis()
    out = []
    for m in points_idx:
        ph = np.exp(2j * math.pi * x[m] * (xi[:, None] + xi[None, :]))
        out.append(np.sum(M * np.outer(F, G) * ph) * dual.spacing**2)
    return np.array(out)


def maximal_operator(symbol, f: Field, g: Field, tg: DilationGrid,
                     keep_fields: bool = False, threads: int = 1) -> BilinearResult:
    """Pointwise sup over the dilation grid of |S_t(f, g)|.

    The sup over a finite grid is a lower bound for the true maximal
    function; refining the grid never decreases any pointwise value.
    """
    warnings = []
    if tg.valid is not None:
        lo, hi = tg.valid
        bad = [t for t in tg if t < lo * (1 - 1e-12) or t > hi * (1 + 1e-12)]
        if bad:
            warnings.append(
                f"{len(bad)} dilation values outside validity window ({lo:.3g}, {hi:.3g})")

    def one(t):
        out = apply_bilinear(symbol, f, g, t)
        absval = np.abs(out.values)
        norms = {"t": t,
                 "l1": lp_norm(out, 1.0),
                 "l2": lp_norm(out, 2.0),
                 "linf": float(absval.max())}
        return out if keep_fields else None, absval, norms

    results = parallel_map(one, list(tg), threads)
    sup = np.zeros(f.grid.shape)
    fields = [] if keep_fields else None
    norms = []
    for fld, absval, nrm in results:
        np.maximum(sup, absval, out=sup)
        norms.append(nrm)
        if keep_fields:
            fields.append(fld)
    return BilinearResult(maximal=Field(f.grid, sup), t_values=list(tg),
                          per_t_norms=norms, fields=fields,
                          symbol_label=getattr(symbol, "label", ""),
                          warnings=warnings)


def tilde_operator(piece, f: Field, g: Field, t: float) -> Field:
    """Bilinear operator of the radial-derivative symbol (zeta.grad) m."""
    return apply_bilinear(radial_derivative_symbol(piece), f, g, t)


def field_band(f: Field, rel_tol: float = 1e-12) -> tuple[float, float]:
    """Radial support [lo, hi] of the spectrum of f (modulus above tol)."""
    F = fft_forward(f)
    r = F.grid.radius()
    mag = np.abs(F.values)
    mask = mag > rel_tol * mag.max()
    if not np.any(mask):
        return (0.0, 0.0)
    return float(r[mask].min()), float(r[mask].max())


def pair_band(f: Field, g: Field) -> tuple[float, float]:
    """Support of |(xi, eta)| over the tensor spectrum of a pair."""
    f_lo, f_hi = field_band(f)
    g_lo, g_hi = field_band(g)
    return math.hypot(f_lo, g_lo), math.hypot(f_hi, g_hi)


def dilation_window(piece, f: Field, g: Field) -> tuple[float, float]:
    """t-range over which the dilated piece meets the pair's spectrum."""
    annulus = piece.annulus if isinstance(piece, AnnularPiece) else piece.annulus
    lo, hi = pair_band(f, g)
    if hi <= 0:
        raise InvalidParameterError("inputs have empty spectrum")
    r_in, r_out = annulus
    t_lo = r_in / hi if r_in > 0 else (r_out / hi) * 2.0**-6
    return t_lo, r_out / max(lo, 1e-12)


def g_function(piece, f: Field, g: Field, sg: DilationGrid | None = None,
               per_octave: int = 16, tilde: bool = False,
               threads: int = 1):
    """Square function (integral of |B_s(f,g)|^2 ds/s)^(1/2), pointwise.

    The s-grid defaults to the full effective window computed from the
    supports of the piece and of the input spectra; a truncation warning
    is attached when the boundary contributions are not negligible.
    Returns (Field, warnings list).
    """
    sym = radial_derivative_symbol(piece) if tilde else (
        piece.symbol if isinstance(piece, AnnularPiece) else piece)
    if sg is None:
        lo, hi = dilation_window(piece, f, g)
        if hi <= lo:
            return Field.zeros(f.grid), ["empty dilation window"]
        sg = DilationGrid.geometric(lo, hi, per_octave)
    w = sg.log_weights()

    def one(args):
        t, wt = args
        out = apply_bilinear(sym, f, g, t)
        return np.abs(out.values) ** 2 * wt

    parts = parallel_map(one, list(zip(sg, w)), threads)
    acc = np.zeros(f.grid.shape)
    for p in parts:
        acc += p
    warnings = []
    total = float(acc.sum())
    if total > 0:
        for side, idx in (("lower", 0), ("upper", -1)):
            boundary = float(parts[idx].sum())
            if boundary > 1e-6 * total:
                warnings.append(
                    f"{side} s-boundary carries {boundary / total:.2e} of the integral")
    return Field(f.grid, np.sqrt(acc)), warnings


def kernel(symbol, freq_grid: Grid) -> Field:
    """Inverse transform of the sampled symbol: the convolution kernel."""
    samples = symbol.sample(freq_grid) if hasattr(symbol, "sample") else Field(freq_grid, symbol)
    return fft_inverse(samples)


def hl_maximal(f: Field) -> Field:
    """Discrete Hardy-Littlewood maximal function on the periodic grid.

    Supremum over ball radii rho in {h, 2h, ..., L/2} of the average of
    |f| over the grid points at torus distance strictly less than rho
    (so the radius-h ball is the point itself, and M(f) >= |f|
    pointwise).
    """
    grid = f.grid
    n = grid.points_per_axis
    absf = np.abs(f.values)
    spec = np.fft.fftn(absf)
    # torus distances from the origin node
    ax = np.minimum(np.arange(n), n - np.arange(n)) * grid.spacing
    d2 = np.zeros(grid.shape)
    for d in range(grid.dim):
        shape = [1] * grid.dim
        shape[d] = n
        d2 = d2 + ax.reshape(shape) ** 2
    dist = np.sqrt(d2)
    out = np.zeros(grid.shape)
    for m in range(1, n // 2 + 1):
        mask = (dist < m * grid.spacing - 1e-12).astype(np.float64)
        count = mask.sum()
        avg = np.real(np.fft.ifftn(spec * np.fft.fftn(mask))) / count
        np.maximum(out, avg, out=out)
    return Field(grid, out)


def hl_maximal_direct(f: Field) -> Field:
    """Brute-force oracle for :func:`hl_maximal` (small 1D grids)."""
    grid = f.grid
    if grid.dim != 1:
        raise InvalidParameterError("direct oracle implemented for n = 1")
    n = grid.points_per_axis
    absf = np.abs(f.values)
    out = np.zeros(n)
    offsets = np.arange(-(n // 2), n // 2)
    dist = np.abs(offsets) * grid.spacing
    for m in range(1, n // 2 + 1):
        sel = offsets[dist < m * grid.spacing - 1e-12]
        for i in range(n):
            vals = absf[(i + sel) % n]
            out[i] = max(out[i], vals.mean())
    return Field(grid, out)
