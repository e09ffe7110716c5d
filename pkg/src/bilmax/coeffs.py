"""Wavelet coefficient trees: analysis, reconstruction, and the
coefficient partitions used by the diagonal/off-diagonal and
heavy-column arguments.

Analysis quadrature
-------------------
Inner products <m, omega> pair a pointwise-smooth symbol against a rough
wavelet, so the quadrature uses exact per-cell integrals and first
moments of the wavelet tables (cells of width 2^-quad_level in wavelet
coordinates) against a first-order Taylor expansion of the symbol at the
cell centers.  The error is then governed by the symbol's second
derivatives only, which keeps deep dilation levels above the noise
floor.  Work is organized in unit-height horizontal bands intersected
with the support annulus, so the cost scales with the annulus area and
adjacent translates share all symbol evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, InvalidParameterError, InvalidSplitError
from .fits import DecayFitReport, fit_log2_slope
from .grids import Field, Grid
from .parallel import parallel_map
from .symbols import AnnularPiece, RadialSymbol, SeparableSymbol, Symbol
from .wavelets import WaveletIndex, WaveletSystem

_PRUNE = 1e-15


class CoeffTree:
    """Sparse map (gamma, G, mu) -> real coefficient.

    Entries are stored per level as integer translation arrays plus a
    value vector; coefficients below 1e-15 are dropped.
    """

    def __init__(self, dim: int, j: int | None = None, meta: dict | None = None):
        self.dim = dim
        self.j = j
        self.meta = dict(meta or {})
        # (gamma, G-string) -> [mu array (m, dim) int64, values (m,) float64]
        self.levels: dict[tuple[int, str], tuple[np.ndarray, np.ndarray]] = {}

    def add_level(self, gamma: int, gstring: str, mu: np.ndarray, vals: np.ndarray):
        mu = np.asarray(mu, dtype=np.int64).reshape(-1, self.dim)
        vals = np.asarray(vals, dtype=np.float64).ravel()
        keep = np.abs(vals) >= _PRUNE
        mu, vals = mu[keep], vals[keep]
        if mu.size == 0:
            return
        key = (gamma, gstring)
        if key in self.levels:
            mu0, v0 = self.levels[key]
            mu, vals = np.vstack([mu0, mu]), np.concatenate([v0, vals])
        self.levels[key] = (mu, vals)

    # -- queries ----------------------------------------------------------

    @property
    def n_entries(self) -> int:
        return sum(v.size for _, v in self.levels.values())

    def gammas(self) -> list[int]:
        return sorted({g for g, _ in self.levels})

    def values(self) -> np.ndarray:
        if not self.levels:
            return np.zeros(0)
        return np.concatenate([v for _, v in self.levels.values()])

    def sup_at(self, gamma: int) -> float:
        best = 0.0
        for (g, _), (_, vals) in self.levels.items():
            if g == gamma and vals.size:
                best = max(best, float(np.max(np.abs(vals))))
        return best

    def linf(self) -> float:
        vals = self.values()
        return float(np.max(np.abs(vals))) if vals.size else 0.0

    def lr_norm(self, r: float) -> float:
        vals = self.values()
        if not vals.size:
            return 0.0
        return float(np.sum(np.abs(vals) ** r) ** (1.0 / r))

    def l2_sum(self) -> float:
        vals = self.values()
        return float(np.sum(vals**2))

    def entries(self):
        for (g, gs), (mu, vals) in sorted(self.levels.items()):
            for row, val in zip(mu, vals):
                yield WaveletIndex(g, tuple(gs), tuple(int(x) for x in row)), float(val)

    def get(self, idx: WaveletIndex) -> float:
        key = (idx.gamma, "".join(idx.G))
        if key not in self.levels:
            return 0.0
        mu, vals = self.levels[key]
        hit = np.all(mu == np.asarray(idx.mu, dtype=np.int64), axis=1)
        found = np.flatnonzero(hit)
        return float(vals[found[0]]) if found.size else 0.0

    # -- structure --------------------------------------------------------

    def select(self, predicate) -> "CoeffTree":
        """New tree with entries where predicate(gamma, gstring, mu_rows) is True.

        ``predicate`` receives the level key and the (m, dim) translation
        array and returns a boolean mask.
        """
        out = CoeffTree(self.dim, self.j, self.meta)
        for (g, gs), (mu, vals) in self.levels.items():
            mask = predicate(g, gs, mu)
            if np.any(mask):
                out.add_level(g, gs, mu[mask], vals[mask])
        return out

    def merge(self, other: "CoeffTree") -> "CoeffTree":
        out = CoeffTree(self.dim, self.j, self.meta)
        for tree in (self, other):
            for (g, gs), (mu, vals) in tree.levels.items():
                out.add_level(g, gs, mu, vals)
        return out

    # -- serialization: one line per entry "gamma Gstring mu... value" ----

    def to_lines(self) -> list[str]:
        lines = []
        for (g, gs), (mu, vals) in sorted(self.levels.items()):
            order = np.lexsort(mu.T[::-1])
            for row, val in zip(mu[order], vals[order]):
                mus = " ".join(str(int(x)) for x in row)
                lines.append(f"{g} {gs} {mus} {float(val)!r}")
        return lines

    @classmethod
    def from_lines(cls, lines, j: int | None = None) -> "CoeffTree":
        rows: dict[tuple[int, str], tuple[list, list]] = {}
        dim = None
        for line in lines:
            parts = line.split()
            if not parts:
                continue
            g, gs = int(parts[0]), parts[1]
            mu = [int(x) for x in parts[2:-1]]
            val = float(parts[-1])
            dim = len(mu) if dim is None else dim
            rows.setdefault((g, gs), ([], []))
            rows[(g, gs)][0].append(mu)
            rows[(g, gs)][1].append(val)
        if dim is None:
            raise InvalidParameterError("no entries found")
        out = cls(dim, j=j)
        for key, (mu, vals) in rows.items():
            out.add_level(key[0], key[1], np.array(mu), np.array(vals))
        return out


# ---------------------------------------------------------------------------
# Analysis
# ---------------------------------------------------------------------------


def _g_combinations(gamma: int, dim: int) -> list[str]:
    combos = []
    for bits in range(2**dim):
        gs = "".join("M" if (bits >> d) & 1 else "F" for d in range(dim))
        if gamma > 0 and gs == "F" * dim:
            continue
        combos.append(gs)
    return sorted(combos)


def _cube_hits_annulus(mu: np.ndarray, width: float, scale: float,
                       r_in: float, r_out: float) -> np.ndarray:
    """Mask of translation rows whose support cube meets the annulus."""
    lo = mu * scale
    hi = lo + width
    near = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
    far = np.maximum(np.abs(lo), np.abs(hi))
    near2 = np.sum(near**2, axis=1)
    far2 = np.sum(far**2, axis=1)
    return (near2 <= r_out**2 + 1e-300) & (far2 >= r_in**2)


def analyze(piece, system: WaveletSystem, gamma_max: int,
            quad_level: int = 5, threads: int = 1) -> CoeffTree:
    """Coefficients <m, omega> for all tensor wavelets with gamma <= gamma_max
    whose support cube intersects the support annulus of the piece.

    ``piece`` is an AnnularPiece (or a Symbol carrying an ``annulus``).
    Separable symbols take a per-axis quadrature path; everything else is
    integrated with the banded cell rule described in the module
    docstring.  Currently implemented for dim = 2.
    """
    sym = piece.symbol if isinstance(piece, AnnularPiece) else piece
    annulus = piece.annulus if isinstance(piece, AnnularPiece) else sym.annulus
    if annulus is None:
        raise InvalidParameterError("analysis needs a declared support annulus")
    if sym.dim != 2:
        raise InvalidParameterError("coefficient analysis is implemented for dim = 2")
    if gamma_max < 0:
        raise InvalidParameterError("gamma_max must be >= 0")
    meta = {"decay_lambda": sym.decay_lambda, "decay_a": sym.decay_a, "label": sym.label}
    tree = CoeffTree(sym.dim, j=getattr(piece, "j", None), meta=meta)
    if isinstance(sym, SeparableSymbol):
        _analyze_separable(tree, sym, annulus, system, gamma_max)
        return tree
    profile = getattr(sym, "profile", None)
    if profile is None:
        raise InvalidParameterError("non-separable analysis needs a radial symbol")
    for gamma in range(gamma_max + 1):
        _analyze_level_radial(tree, profile, annulus, system, gamma, quad_level, threads)
    return tree


def _analyze_level_radial(tree, profile, annulus, system, gamma, quad_level, threads):
    r_in, r_out = annulus
    S = int(round(system.support_width))
    P = 2**quad_level
    W = S * P
    delta = 2.0 ** (-gamma - quad_level)  # lattice cell width in zeta
    scale = 2.0**-gamma
    dim_half = 2.0**-gamma  # 2^(-gamma * dim/2) for dim = 2

    weights = {}
    for g in ("F", "M"):
        i0, i1, i2 = system.cell_weights(g, quad_level)
        weights[(g, 0)] = i0.reshape(S, P)
        weights[(g, 1)] = i1.reshape(S, P)
        weights[(g, 2)] = i2.reshape(S, P)

    beta_lo = int(math.floor(-r_out / scale)) - 1
    beta_hi = int(math.floor(r_out / scale)) + 1
    betas = list(range(beta_lo, beta_hi + 1))

    def band_windows(beta: int) -> list[tuple[int, int]]:
        v0, v1 = beta * scale, (beta + 1) * scale
        vmin = 0.0 if v0 <= 0.0 <= v1 else min(abs(v0), abs(v1))
        vmax = max(abs(v0), abs(v1))
        hi2 = r_out**2 - vmin**2
        if hi2 <= 0:
            return []
        u_hi = math.sqrt(hi2)
        lo2 = r_in**2 - vmax**2
        u_lo = math.sqrt(lo2) if lo2 > 0 else 0.0
        a_hi = int(math.ceil(u_hi / delta))
        a_lo = int(math.floor(u_lo / delta))
        if a_lo <= 0 or 2 * a_lo < (S + 2) * P:
            return [(-a_hi, a_hi)]
        return [(-a_hi, -a_lo), (a_lo, a_hi)]

    def band_stage1(beta: int):
        """Per-window stage-1 arrays for one band.

        Returns a list of (mu1_start, res) where res maps ('Y'|'Z'|'U', G1)
        to an (n_mu1, P) array; Y collects the terms that take the plain
        cell integral along the second axis, Z the first-moment terms,
        and U the second-moment term.
        """
        out = []
        rows = (np.arange(beta * P, (beta + 1) * P) + 0.5) * delta
        for a0, a1 in band_windows(beta):
            b0 = a0 // P  # floor division: block start
            b1 = -((-a1) // P)  # ceil
            nblocks = b1 - b0
            pad = S - 1
            cols = (np.arange((b0 - pad) * P, (b1 + pad) * P) + 0.5) * delta
            xi = cols[None, :]
            vv = rows[:, None]
            rho = np.hypot(xi, vv)
            gval = profile.value(rho)
            gder = profile.deriv(rho)
            gder2 = profile.deriv2(rho)
            with np.errstate(invalid="ignore", divide="ignore"):
                inv = np.where(rho > 0, 1.0 / np.where(rho > 0, rho, 1.0), 0.0)
            cx, cy = xi * inv, vv * inv
            mx = scale * gder * cx
            my = scale * gder * cy
            rad2 = scale * scale * (gder2 - gder * inv)
            gor = scale * scale * gder * inv
            mxx = rad2 * cx * cx + gor
            myy = rad2 * cy * cy + gor
            mxy = rad2 * cx * cy
            nb = nblocks + 2 * pad
            n_mu1 = nb - S + 1
            if n_mu1 <= 0:
                continue
            res = {}
            for g1 in ("F", "M"):
                y = _correlate_blocks(gval, weights[(g1, 0)], P, S, n_mu1)
                y += _correlate_blocks(mx, weights[(g1, 1)], P, S, n_mu1)
                y += _correlate_blocks(0.5 * mxx, weights[(g1, 2)], P, S, n_mu1)
                z = _correlate_blocks(my, weights[(g1, 0)], P, S, n_mu1)
                z += _correlate_blocks(mxy, weights[(g1, 1)], P, S, n_mu1)
                u = _correlate_blocks(0.5 * myy, weights[(g1, 0)], P, S, n_mu1)
                res[("Y", g1)] = y
                res[("Z", g1)] = z
                res[("U", g1)] = u
            out.append((b0 - pad, res))
        return out

    band_results = dict(zip(betas, parallel_map(band_stage1, betas, threads)))

    combos = _g_combinations(gamma, 2)
    width = system.support_width * scale
    collected_mu = {gs: [] for gs in combos}
    collected_val = {gs: [] for gs in combos}
    for mu2 in range(beta_lo - S + 1, beta_hi + 1):
        items = []
        for s in range(S):
            for mu1_start, res in band_results.get(mu2 + s, []):
                items.append((s, mu1_start, res))
        if not items:
            continue
        lo = min(m for _, m, _ in items)
        hi = max(m + res[("Y", "F")].shape[0] for _, m, res in items)
        for gs in combos:
            g1, g2 = gs[0], gs[1]
            buf = np.zeros(hi - lo)
            for s, mu1_start, res in items:
                contrib = res[("Y", g1)] @ weights[(g2, 0)][s]
                contrib += res[("Z", g1)] @ weights[(g2, 1)][s]
                contrib += res[("U", g1)] @ weights[(g2, 2)][s]
                buf[mu1_start - lo:mu1_start - lo + contrib.size] += contrib
            mu1_vals = np.arange(lo, hi, dtype=np.int64)
            mu_arr = np.stack([mu1_vals, np.full_like(mu1_vals, mu2)], axis=1)
            keep = _cube_hits_annulus(mu_arr, width, scale, r_in, r_out)
            keep &= np.abs(buf) > 0
            if np.any(keep):
                collected_mu[gs].append(mu_arr[keep])
                collected_val[gs].append(buf[keep] * dim_half)
    for gs in combos:
        if collected_mu[gs]:
            tree.add_level(gamma, gs, np.vstack(collected_mu[gs]),
                           np.concatenate(collected_val[gs]))


def _correlate_blocks(field: np.ndarray, weights: np.ndarray, P: int, S: int,
                      n_mu1: int) -> np.ndarray:
    """Strided correlation along the column axis.

    field: (P, nb*P) cell values; weights: (S, P).  Returns (n_mu1, P)
    with entry [m, r] = sum_s sum_q field[r, (m+s)*P + q] * weights[s, q].
    """
    rows, total = field.shape
    nb = total // P
    blocks = field.reshape(rows, nb, P)
    part = np.einsum("rbq,sq->rbs", blocks, weights, optimize=True)
    out = np.zeros((n_mu1, rows))
    for s in range(S):
        out += part[:, s:s + n_mu1, s].T
    return out


def _analyze_separable(tree, sym: SeparableSymbol, annulus, system, gamma_max):
    """Per-axis quadrature for exactly separable symbols."""
    r_out = annulus[1]
    W = system.support_width
    supports = getattr(sym, "factor_supports", None) or [(-r_out, r_out)] * sym.dim
    for gamma in range(gamma_max + 1):
        scale = 2.0**gamma
        per_axis: list[dict[tuple[str, int], float]] = []
        mu_ranges = []
        for d in range(sym.dim):
            lo, hi = supports[d]
            mu_min = int(math.floor(lo * scale)) - int(W)
            mu_max = int(math.ceil(hi * scale))
            mu_ranges.append(range(mu_min, mu_max + 1))
            table: dict[tuple[str, int], float] = {}
            res = max(system.resolution - gamma, 10)
            step = 2.0 ** -(res + gamma)
            for mu in mu_ranges[d]:
                x0, x1 = mu / scale, (mu + W) / scale
                x0c, x1c = max(x0, lo), min(x1, hi)
                if x1c <= x0c:
                    continue
                n = int(round((x1c - x0c) / step))
                if n < 2:
                    continue
                x = x0c + np.arange(n + 1) * step
                fv = np.asarray(sym.factors[d](x), dtype=np.float64)
                for g in ("F", "M"):
                    wv = system.evaluate_1d(g, scale * x - mu)
                    tw = np.ones(n + 1)
                    tw[0] = tw[-1] = 0.5
                    table[(g, mu)] = float(np.sum(fv * wv * tw) * step)
            per_axis.append(table)
        for gs in _g_combinations(gamma, sym.dim):
            mu_rows, vals = [], []
            axis_items = []
            for d in range(sym.dim):
                axis_items.append([(mu, per_axis[d].get((gs[d], mu), 0.0))
                                   for mu in mu_ranges[d]])
            # outer product over axes (dim = 2 in practice, general here)
            def rec(d, mu_acc, val_acc):
                if d == sym.dim:
                    if abs(val_acc) >= _PRUNE:
                        mu_rows.append(tuple(mu_acc))
                        vals.append(val_acc * 2.0 ** (gamma * sym.dim / 2.0))
                    return
                for mu, v in axis_items[d]:
                    if v != 0.0:
                        rec(d + 1, mu_acc + [mu], val_acc * v)

            rec(0, [], 1.0)
            if mu_rows:
                tree.add_level(gamma, gs, np.array(mu_rows), np.array(vals))


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------


def reconstruct(tree: CoeffTree, system: WaveletSystem, grid: Grid) -> Field:
    """Sum a_omega * omega sampled on ``grid`` (dim must match the tree)."""
    if grid.dim != tree.dim:
        raise InvalidParameterError(f"grid dim {grid.dim} != tree dim {tree.dim}")
    ax = grid.axis()
    n = len(ax)
    out = np.zeros((n,) * tree.dim)
    W = system.support_width
    h = grid.spacing
    for (gamma, gs), (mu, vals) in sorted(tree.levels.items()):
        scale = 2.0**gamma
        norm = 2.0 ** (gamma * tree.dim / 2.0)
        width = W / scale
        for row, a in zip(mu, vals):
            sl = []
            factors = []
            ok = True
            for d in range(tree.dim):
                lo = row[d] / scale
                i0 = int(math.ceil((lo - ax[0]) / h - 1e-9))
                i1 = int(math.floor((lo + width - ax[0]) / h + 1e-9)) + 1
                i0, i1 = max(i0, 0), min(i1, n)
                if i1 <= i0:
                    ok = False
                    break
                sl.append(slice(i0, i1))
                factors.append(system.evaluate_1d(gs[d], scale * ax[i0:i1] - row[d]))
            if not ok:
                continue
            patch = factors[0]
            for f in factors[1:]:
                patch = np.multiply.outer(patch, f)
            out[tuple(sl)] += a * norm * patch
    return Field(grid, out)


class WaveletSumSymbol(Symbol):
    """Symbol given by a finite sum of tensor wavelets with coefficients.

    Evaluation on tensor grids accumulates one separable outer product
    per entry, so dilated sampling inside the bilinear operators stays
    cheap even for a few thousand entries.
    """

    def __init__(self, system: WaveletSystem, tree: CoeffTree, label: str = ""):
        super().__init__(tree.dim, label=label or f"wavelet_sum[{tree.n_entries}]")
        self.system = system
        self.tree = tree
        self.decay_lambda = tree.meta.get("decay_lambda")
        self.annulus = self._bounding_annulus()

    def _bounding_annulus(self):
        if not self.tree.levels:
            return (0.0, 0.0)
        W = self.system.support_width
        r_lo, r_hi = math.inf, 0.0
        for (gamma, _), (mu, _vals) in self.tree.levels.items():
            scale = 2.0**-gamma
            lo = mu * scale
            hi = lo + W * scale
            near = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
            far = np.maximum(np.abs(lo), np.abs(hi))
            r_lo = min(r_lo, float(np.sqrt(np.sum(near**2, axis=1)).min()))
            r_hi = max(r_hi, float(np.sqrt(np.sum(far**2, axis=1)).max()))
        return (r_lo, r_hi)

    def __call__(self, points):
        pts = np.asarray(points, dtype=np.float64)
        out = np.zeros(pts.shape[:-1])
        for (gamma, gs), (mu, vals) in self.tree.levels.items():
            scale = 2.0**gamma
            norm = 2.0 ** (gamma * self.dim / 2.0)
            for row, a in zip(mu, vals):
                term = np.full(pts.shape[:-1], a * norm)
                for d in range(self.dim):
                    term = term * self.system.evaluate_1d(gs[d], scale * pts[..., d] - row[d])
                out += term
        return out

    def sample_tensor(self, axes):
        if self.dim != 2:
            return super().sample_tensor(axes)
        ax1 = np.asarray(axes[0], dtype=np.float64)
        ax2 = np.asarray(axes[1], dtype=np.float64)
        out = np.zeros((ax1.size, ax2.size))
        for (gamma, gs), (mu, vals) in self.tree.levels.items():
            scale = 2.0**gamma
            norm = 2.0 ** (gamma * self.dim / 2.0)
            u1, inv1 = np.unique(mu[:, 0], return_inverse=True)
            u2, inv2 = np.unique(mu[:, 1], return_inverse=True)
            A = np.zeros((u1.size, u2.size))
            np.add.at(A, (inv1, inv2), vals)
            # factor matrices: psi_G(2^gamma x - mu) for all unique mu at once
            P1 = self.system.evaluate_1d(gs[0], scale * ax1[None, :] - u1[:, None])
            P2 = self.system.evaluate_1d(gs[1], scale * ax2[None, :] - u2[:, None])
            out += norm * (P1.T @ A @ P2)
        return out


# ---------------------------------------------------------------------------
# Coefficient decay profiling
# ---------------------------------------------------------------------------


@dataclass
class CoeffDecayProfile:
    """Sup-coefficient table over (j, gamma) with fitted slopes."""

    j_values: list[int]
    gammas: list[int]
    sup_table: dict  # (j, gamma) -> sup |a|
    gamma_fits: list[DecayFitReport]  # one per j, slope in gamma
    j_fits: list[DecayFitReport]  # one per gamma, slope in j
    gamma_bound: float
    j_bound: float

    def worst_gamma_slope(self) -> float:
        return max(f.slope for f in self.gamma_fits)

    def worst_j_slope(self) -> float:
        return max(f.slope for f in self.j_fits)

    def to_dict(self) -> dict:
        return {
            "j_values": self.j_values,
            "gammas": self.gammas,
            "sup_table": {f"{j},{g}": v for (j, g), v in sorted(self.sup_table.items())},
            "gamma_fits": [f.to_dict() for f in self.gamma_fits],
            "j_fits": [f.to_dict() for f in self.j_fits],
            "gamma_bound": self.gamma_bound,
            "j_bound": self.j_bound,
        }


def coeff_decay_profile(trees: list[CoeffTree], r: float, s: float, n: int,
                        lam: float | None = None, gamma_tol: float = 0.3,
                        j_tol: float = 0.3) -> CoeffDecayProfile:
    """Fit sup-coefficient decay in j and gamma against the predicted
    exponents -lambda (in j) and -(s + n - 2n/r) (in gamma).

    Requires at least 4 values of j and 3 dilation levels.
    """
    if len(trees) < 4:
        raise FitError(f"need at least 4 trees (j values), got {len(trees)}")
    j_values = [t.j for t in trees]
    if any(j is None for j in j_values):
        raise FitError("every tree needs its piece index j")
    gammas = sorted(set.intersection(*[set(t.gammas()) for t in trees]))
    if len(gammas) < 3:
        raise FitError(f"need at least 3 shared dilation levels, got {len(gammas)}")
    if lam is None:
        lam = trees[0].meta.get("decay_lambda")
    if lam is None:
        raise FitError("no decay exponent lambda available")
    sup = {}
    for t in trees:
        for g in gammas:
            sup[(t.j, g)] = t.sup_at(g)
    gamma_bound = -(s + n - 2.0 * n / r)
    j_bound = -lam
    gamma_fits = [DecayFitReport.from_samples(
        "gamma", gammas, [sup[(j, g)] for g in gammas],
        bound_slope=gamma_bound, tol=gamma_tol, label=f"j={j}") for j in j_values]
    j_fits = [DecayFitReport.from_samples(
        "j", j_values, [sup[(j, g)] for j in j_values],
        bound_slope=j_bound, tol=j_tol, label=f"gamma={g}") for g in gammas]
    return CoeffDecayProfile(j_values, gammas, sup, gamma_fits, j_fits,
                             gamma_bound, j_bound)


# ---------------------------------------------------------------------------
# Diagonal / off-diagonal split
# ---------------------------------------------------------------------------


def diagonal_split(tree: CoeffTree, system: WaveletSystem, n_split: int):
    """Split a tree into diagonal and two off-diagonal parts.

    With k and l the first and second halves of the translation vector:
    part 1 keeps |k| > N and |l| > N, part 2 keeps |l| <= N (all k),
    part 3 keeps |k| <= N and |l| > N.  Every entry lands in exactly one
    part; ties at the threshold go to the axis parts.  N must exceed 10
    times the level-0 support diameter.
    """
    d = system.support_diameter(tree.dim)
    if n_split <= 10 * d:
        raise InvalidSplitError(
            f"n_split = {n_split} must exceed 10 * support diameter = {10 * d:.2f}")
    half = tree.dim // 2

    def norms(mu):
        k = np.sqrt(np.sum(mu[:, :half].astype(float) ** 2, axis=1))
        ell = np.sqrt(np.sum(mu[:, half:].astype(float) ** 2, axis=1))
        return k, ell

    m1 = tree.select(lambda g, gs, mu: (lambda kl: (kl[0] > n_split) & (kl[1] > n_split))(norms(mu)))
    m2 = tree.select(lambda g, gs, mu: norms(mu)[1] <= n_split)
    m3 = tree.select(lambda g, gs, mu: (lambda kl: (kl[0] <= n_split) & (kl[1] > n_split))(norms(mu)))
    return m1, m2, m3


# ---------------------------------------------------------------------------
# Heavy-column amplitude partition
# ---------------------------------------------------------------------------


@dataclass
class ColumnPartition:
    """Amplitude band U_tau split into heavy columns U1 and remainder U2.

    Keys are (gamma, G, k) with k the first half of the translation; a
    column is heavy when it holds at least N1 band members.  N2 is the
    predicted cap on the number of heavy columns, B^r (2^-tau A)^-r / N1
    with B the full tree's l^r norm.
    """

    tau: int
    A: float
    N1: int
    N2: float
    r: float
    U1: list
    U2: list

    @property
    def U_tau(self) -> list:
        return self.U1 + self.U2

    def heavy_columns(self) -> set:
        return {self._col_key(idx) for idx, _ in self.U1}

    @staticmethod
    def _col_key(idx: WaveletIndex):
        half = idx.dim // 2
        return (idx.gamma, idx.G[:half], idx.mu[:half])


def column_partition(tree: CoeffTree, tau: int, A: float, N1: int,
                     r: float = 2.0, bottom: bool = False) -> ColumnPartition:
    """Partition the amplitude band at level tau by column cardinality.

    The band is half-open, 2^-(tau+1) A < |b| <= 2^-tau A; with
    ``bottom=True`` it absorbs everything below 2^-tau A.  Requires
    A >= max |b| and N1 >= 1.
    """
    if N1 < 1:
        raise InvalidParameterError("N1 must be >= 1")
    if tree.n_entries and A < tree.linf() * (1 - 1e-12):
        raise InvalidParameterError(
            f"A = {A} below the top amplitude {tree.linf()}")
    hi = 2.0**-tau * A
    lo = -1.0 if bottom else 2.0 ** -(tau + 1) * A
    band = []
    for idx, val in tree.entries():
        if lo < abs(val) <= hi:
            band.append((idx, val))
    counts: dict = {}
    for idx, _ in band:
        key = ColumnPartition._col_key(idx)
        counts[key] = counts.get(key, 0) + 1
    u1 = [(idx, v) for idx, v in band if counts[ColumnPartition._col_key(idx)] >= N1]
    u2 = [(idx, v) for idx, v in band if counts[ColumnPartition._col_key(idx)] < N1]
    B = tree.lr_norm(r)
    n2 = B**r * (hi ** -r if hi > 0 else math.inf) / N1 if B > 0 else 0.0
    return ColumnPartition(tau=tau, A=A, N1=N1, N2=n2, r=r, U1=u1, U2=u2)
