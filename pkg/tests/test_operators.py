"""Bilinear operator evaluation, maximal sweeps, square functions,
kernels, and the Hardy-Littlewood maximal function."""

import math

import numpy as np
import pytest

from bilmax.errors import InvalidGridError, InvalidParameterError
from bilmax.fits import fit_log2_slope
from bilmax.grids import Field, Grid, apply_freq_multiplier, fft_forward, lp_norm
from bilmax.harness import field_from_spectrum, smooth_spectrum
from bilmax.operators import (
    DilationGrid,
    apply_bilinear,
    apply_bilinear_direct,
    dilation_window,
    g_function,
    hl_maximal,
    hl_maximal_direct,
    kernel,
    maximal_operator,
    tilde_operator,
)
from bilmax.symbols import (
    DyadicPartition,
    GaussianProfile,
    PowerProfile,
    RadialSymbol,
    SeparableSymbol,
    bochner_riesz_symbol,
    constant_symbol,
    dyadic_pieces,
    rescale_piece,
)

from conftest import band_limited


@pytest.fixture()
def fg_pair():
    g = Grid(1, 128, 16.0)
    return band_limited(g, (0.25, 3.0), 21), band_limited(g, (0.25, 3.0), 22)


class TestApplyBilinear:
    def test_identity_multiplier(self, fg_pair):
        f, g = fg_pair
        out = apply_bilinear(constant_symbol(2), f, g, 0.8)
        prod = f.values * g.values
        assert np.max(np.abs(out.values - prod)) / np.max(np.abs(prod)) < 1e-8

    def test_separable_factorizes(self, fg_pair):
        f, g = fg_pair
        p1, p2 = GaussianProfile(2.0), GaussianProfile(3.0)
        t = 0.6
        sym = SeparableSymbol(2, [lambda x: p1.value(np.abs(x)),
                                  lambda x: p2.value(np.abs(x))])
        out = apply_bilinear(sym, f, g, t)
        a = apply_freq_multiplier(f, lambda pts: p1.value(np.abs(t * pts[..., 0])))
        b = apply_freq_multiplier(g, lambda pts: p2.value(np.abs(t * pts[..., 0])))
        prod = a.values * b.values
        assert np.max(np.abs(out.values - prod)) / np.max(np.abs(prod)) < 1e-9

    def test_direct_riemann_oracle(self):
        g = Grid(1, 64, 8.0)
        f = band_limited(g, (0.25, 2.5), 1)
        h = band_limited(g, (0.25, 2.5), 2)
        sym = bochner_riesz_symbol(1, 2.0)
        t = 0.45
        out = apply_bilinear(sym, f, h, t)
        rng = np.random.default_rng(3)
        idx = rng.choice(64, size=5, replace=False)
        oracle = apply_bilinear_direct(sym, f, h, t, idx)
        scale = np.max(np.abs(oracle))
        assert np.max(np.abs(out.values[idx] - oracle)) / scale < 1e-6

    def test_bilinearity(self, fg_pair):
        f, g = fg_pair
        f2 = band_limited(f.grid, (0.25, 3.0), 33)
        sym = bochner_riesz_symbol(1, 2.0)
        a, b = 1.7, -0.4 + 0.2j
        combo = Field(f.grid, a * f.values + b * f2.values)
        lhs = apply_bilinear(sym, combo, g, 0.7)
        rhs = (a * apply_bilinear(sym, f, g, 0.7).values
               + b * apply_bilinear(sym, f2, g, 0.7).values)
        assert np.max(np.abs(lhs.values - rhs)) / np.max(np.abs(rhs)) < 1e-10

    def test_grid_mismatch(self, fg_pair):
        f, _ = fg_pair
        other = band_limited(Grid(1, 64, 16.0), (0.25, 2.0), 4)
        with pytest.raises(InvalidGridError):
            apply_bilinear(constant_symbol(2), f, other, 1.0)

    @pytest.mark.parametrize("t", [0.5, 2.0])
    def test_dilation_covariance(self, t):
        # S_t(f,g)(x) = t^{-n} S_1(f_t, g_t)(x/t) with
        # fhat_t(xi) = t^{-n/2} fhat(xi/t); smooth spectra and a smooth
        # symbol keep the two discretizations quadrature-consistent.
        from bilmax.grids import fft_inverse

        grid = Grid(1, 256, 32.0)
        phi_f = smooth_spectrum((0.1, 1.5), 91)
        phi_g = smooth_spectrum((0.1, 1.5), 92)
        dual = grid.dual()
        f = Field(grid, fft_inverse(Field(dual, phi_f(dual.axis()))).values)
        g = Field(grid, fft_inverse(Field(dual, phi_g(dual.axis()))).values)
        sym = RadialSymbol(2, GaussianProfile(1.2))
        lhs = apply_bilinear(sym, f, g, t)
        # evaluate the t = 1 side on a grid fine enough to contain x/t
        fine = Grid(1, 512, 32.0) if t > 1 else grid
        fdual = fine.dual()
        ft = Field(fine, fft_inverse(Field(fdual, t**-0.5 * phi_f(fdual.axis() / t))).values)
        gt = Field(fine, fft_inverse(Field(fdual, t**-0.5 * phi_g(fdual.axis() / t))).values)
        rhs = apply_bilinear(sym, ft, gt, 1.0)
        x, fx = grid.axis(), fine.axis()
        scale = np.max(np.abs(lhs.values))
        errs = []
        for i in range(0, 256, 3):
            target = x[i] / t
            j = int(np.argmin(np.abs(fx - target)))
            if abs(fx[j] - target) > 1e-12 or abs(target) > fine.extent / 2 - 1:
                continue
            errs.append(abs(lhs.values[i] - rhs.values[j] / t) / scale)
        assert len(errs) > 20 and max(errs) < 1e-6


class TestDilationGrid:
    def test_log_spacing_enforced(self):
        with pytest.raises(InvalidParameterError):
            DilationGrid((0.1, 0.2, 0.5))
        with pytest.raises(InvalidParameterError):
            DilationGrid(())
        DilationGrid(tuple(np.geomspace(0.1, 1.0, 17)))

    def test_covering_window(self):
        tg = DilationGrid.covering((2.0, 4.0), (1.0, 8.0), 4)
        assert tg.valid == (0.25, 4.0)
        assert tg.t_values[0] == pytest.approx(0.25)
        assert tg.t_values[-1] == pytest.approx(4.0)


class TestMaximal:
    def test_single_t(self, fg_pair):
        f, g = fg_pair
        sym = bochner_riesz_symbol(1, 2.0)
        t = 0.6
        res = maximal_operator(sym, f, g, DilationGrid((t,)))
        direct = apply_bilinear(sym, f, g, t)
        assert np.max(np.abs(res.maximal.values - np.abs(direct.values))) < 1e-12

    def test_identity_gives_product(self, fg_pair):
        f, g = fg_pair
        res = maximal_operator(constant_symbol(2), f, g,
                               DilationGrid.geometric(0.2, 3.0, 4))
        prod = np.abs(f.values * g.values)
        assert np.max(np.abs(res.maximal.values - prod)) / prod.max() < 1e-12

    def test_refinement_monotone(self, fg_pair):
        f, g = fg_pair
        sym = bochner_riesz_symbol(1, 2.0)
        coarse = maximal_operator(sym, f, g, DilationGrid.geometric(0.25, 2.0, 8))
        fine = maximal_operator(sym, f, g, DilationGrid.geometric(0.25, 2.0, 16))
        assert np.all(fine.maximal.values.real >= coarse.maximal.values.real - 1e-14)

    def test_empty_grid_rejected(self):
        with pytest.raises(InvalidParameterError):
            DilationGrid(())

    def test_aliasing_warning(self, fg_pair):
        f, g = fg_pair
        sym = bochner_riesz_symbol(1, 2.0)
        tg = DilationGrid(tuple(np.geomspace(0.01, 4.0, 20)), valid=(0.1, 2.0))
        res = maximal_operator(sym, f, g, tg)
        assert res.warnings


class TestTilde:
    def test_constant_symbol_vanishes(self, fg_pair):
        f, g = fg_pair
        out = tilde_operator(constant_symbol(2), f, g, 0.7)
        assert np.max(np.abs(out.values)) < 1e-12

    def test_euler_identity(self, fg_pair):
        f, g = fg_pair
        sym = RadialSymbol(2, PowerProfile(2.0), annulus=(0.0, 50.0))
        t = 0.8
        lhs = tilde_operator(sym, f, g, t)
        rhs = apply_bilinear(sym, f, g, t)
        scale = np.max(np.abs(rhs.values))
        assert np.max(np.abs(lhs.values - 2.0 * rhs.values)) / scale < 1e-8


class TestGFunction:
    def _piece(self, j=2, lam=3.0):
        part = DyadicPartition("riesz")
        return rescale_piece(dyadic_pieces(bochner_riesz_symbol(1, lam), part, j)[j])

    def test_zero_inputs(self, fg_pair):
        f, _ = fg_pair
        zero = Field.zeros(f.grid)
        out, warnings = g_function(self._piece(), f, zero)
        assert np.max(np.abs(out.values)) == 0.0

    def test_disjoint_supports_vanish(self):
        g = Grid(1, 128, 16.0)
        f = band_limited(g, (0.25, 1.0), 1)
        h = band_limited(g, (0.25, 1.0), 2)
        piece = self._piece()
        # s-grid where the dilated annulus misses the pair band entirely;
        # only spectral round-off (out-of-band entries ~1e-17) survives
        sg = DilationGrid.geometric(50.0, 100.0, 8)
        out, _ = g_function(piece, f, h, sg=sg)
        assert np.max(np.abs(out.values)) < 1e-20

    def test_truncation_warning(self, fg_pair):
        f, g = fg_pair
        piece = self._piece()
        lo, hi = dilation_window(piece, f, g)
        clipped = DilationGrid.geometric(math.sqrt(lo * hi) * 0.9,
                                         math.sqrt(lo * hi) * 1.1, 16)
        _, warnings = g_function(piece, f, g, sg=clipped)
        assert warnings


class TestKernel:
    def test_gaussian_kernel(self):
        freq = Grid(2, 128, 16.0)
        sym = RadialSymbol(2, GaussianProfile(1.0))
        K = kernel(sym, freq)
        r = K.grid.radius()
        assert np.max(np.abs(K.values - np.exp(-np.pi * r**2))) < 1e-8

    def test_real_radial_symbol_real_kernel(self):
        freq = Grid(2, 96, 12.0)
        K = kernel(bochner_riesz_symbol(1, 2.0), freq)
        assert np.max(np.abs(K.values.imag)) < 1e-10 * np.max(np.abs(K.values.real))

    def test_far_field_decay(self):
        lam, n = 3.0, 1
        freq = Grid(2, 384, 8.0)  # spatial extent 48
        K = kernel(bochner_riesz_symbol(n, lam), freq)
        ax = K.grid.axis()
        u = 1.0 + np.abs(ax)[:, None] + np.abs(ax)[None, :]
        mag = np.abs(K.values)
        xs, ys = [], []
        for a, b in zip(np.geomspace(4, 14, 13)[:-1], np.geomspace(4, 14, 13)[1:]):
            sel = (u >= a) & (u < b)
            xs.append(math.log2(math.sqrt(a * b)))
            ys.append(mag[sel].max())
        slope, _, _ = fit_log2_slope(xs, ys)
        assert slope <= -(n + lam + 0.5) + 0.4


class TestHardyLittlewood:
    def test_constant(self):
        g = Grid(1, 64, 8.0)
        out = hl_maximal(Field(g, np.full(64, -2.5 + 0j)))
        assert np.max(np.abs(out.values - 2.5)) < 1e-12

    def test_dominates_pointwise(self):
        g = Grid(1, 128, 16.0)
        f = band_limited(g, (0.25, 3.0), 5)
        out = hl_maximal(f)
        assert np.all(out.values.real >= np.abs(f.values) - 1e-12)

    def test_interval_indicator_value(self):
        g = Grid(1, 256, 8.0)
        x = g.axis()
        f = Field(g, ((x >= -0.5) & (x < 0.5)).astype(float))
        out = hl_maximal(f)
        at = int(np.argmin(np.abs(x - 3.0)))
        cell = 1.0 / (7.0 - 2 * g.spacing) - 1.0 / 7.0
        assert abs(out.values.real[at] - 1.0 / 7.0) <= cell + 1e-12

    def test_matches_direct_oracle(self):
        g = Grid(1, 64, 8.0)
        f = band_limited(g, (0.25, 2.0), 6)
        a = hl_maximal(f)
        b = hl_maximal_direct(f)
        assert np.max(np.abs(a.values - b.values)) < 1e-12


class TestN2:
    def test_identity_smoke(self):
        g = Grid(2, 16, 8.0)
        rng = np.random.default_rng(1)
        f = Field(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
        h = Field(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
        out = apply_bilinear(constant_symbol(4), f, h, 1.0)
        prod = f.values * h.values
        assert np.max(np.abs(out.values - prod)) / np.max(np.abs(prod)) < 1e-12

    def test_direct_oracle_n2(self):
        # one point checked against the full quadruple sum
        g = Grid(2, 8, 4.0)
        rng = np.random.default_rng(2)
        f = Field(g, rng.standard_normal(g.shape))
        h = Field(g, rng.standard_normal(g.shape))
        sym = bochner_riesz_symbol(2, 2.0)
        t = 0.4
        out = apply_bilinear(sym, f, h, t)
        dual = g.dual()
        xi = dual.axis()
        F = fft_forward(f).values
        G = fft_forward(h).values
        x = (g.axis()[3], g.axis()[5])
        acc = 0.0
        for a in range(8):
            for b in range(8):
                for c in range(8):
                    for d in range(8):
                        rho = math.hypot(math.hypot(xi[a], xi[b]) * t,
                                         math.hypot(xi[c], xi[d]) * t)
                        m = max(0.0, 1.0 - rho * rho) ** 2
                        phase = np.exp(2j * np.pi * (x[0] * (xi[a] + xi[c])
                                                     + x[1] * (xi[b] + xi[d])))
                        acc += m * F[a, b] * G[c, d] * phase * dual.spacing**4
        assert out.values[3, 5] == pytest.approx(acc, rel=1e-10)
