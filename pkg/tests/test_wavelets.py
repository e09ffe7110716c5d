"""Wavelet system construction and the tensor basis."""

import math

import numpy as np
import pytest

from bilmax.daubechies import DB_FILTERS
from bilmax.errors import InvalidParameterError, TableError
from bilmax.wavelets import (
    WaveletIndex,
    build_wavelet_system,
    tensor_support_cube,
    tensor_wavelet_eval,
)


def wavelet_inner_1d(sys_, a, b):
    """Quadrature inner product of two dilated-translated 1D factors."""
    (g1, G1, m1), (g2, G2, m2) = a, b
    W = sys_.support_width
    lo = max(m1 / 2**g1, m2 / 2**g2)
    hi = min((m1 + W) / 2**g1, (m2 + W) / 2**g2)
    if hi <= lo:
        return 0.0
    gmax = max(g1, g2)
    delta = 2.0 ** -(sys_.resolution + gmax)
    n = int(round((hi - lo) / delta))
    x = lo + np.arange(n + 1) * delta
    v1 = sys_.evaluate_1d(G1, 2.0**g1 * x - m1)
    v2 = sys_.evaluate_1d(G2, 2.0**g2 * x - m2)
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    return float(np.sum(v1 * v2 * w) * delta * 2.0 ** ((g1 + g2) / 2.0))


def random_1d_basis_index(rng, gamma_max=3, mu_range=3):
    """Index of a 1D basis element: F only at level 0."""
    gamma = int(rng.integers(0, gamma_max + 1))
    G = "M" if gamma > 0 else rng.choice(["F", "M"])
    return gamma, str(G), int(rng.integers(-mu_range, mu_range + 1))


class TestBuild:
    def test_filter_normalization(self):
        for k, h in DB_FILTERS.items():
            assert len(h) == 2 * k
            assert sum(h) == pytest.approx(math.sqrt(2.0), abs=1e-12)

    @pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
    def test_unit_norms(self, k):
        sys_ = build_wavelet_system(k, 14)
        assert abs(sys_.l2_norm_1d("F") - 1.0) < 1e-6
        assert abs(sys_.l2_norm_1d("M") - 1.0) < 1e-6

    @pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
    def test_vanishing_moments(self, k):
        sys_ = build_wavelet_system(k, 14)
        for a in range(k):
            assert abs(sys_.moment_1d("M", a)) < 1e-6

    def test_mean_of_wavelet(self):
        for k in (2, 5, 10):
            sys_ = build_wavelet_system(k, 12)
            assert abs(sys_.moment_1d("M", 0)) < 1e-8

    def test_second_moment_db3_riemann_oracle(self):
        sys_ = build_wavelet_system(3, 12)
        tab = sys_.psi_m
        x = np.arange(len(tab)) * 2.0**-12
        oracle = float(np.sum(x**2 * tab) * 2.0**-12)
        assert abs(oracle) < 1e-6
        assert abs(sys_.moment_1d("M", 2)) < 1e-6

    def test_compact_support(self):
        sys_ = build_wavelet_system(4, 14)
        x = np.array([-0.5, -1e-9, 7.0 + 1e-9, 8.0])
        assert np.all(sys_.evaluate_1d("F", x) == 0.0)
        assert np.all(sys_.evaluate_1d("M", x) == 0.0)

    def test_unsupported_order(self):
        with pytest.raises(TableError):
            build_wavelet_system(11, 14)
        with pytest.raises(TableError):
            build_wavelet_system(1, 14)

    def test_resolution_floor(self):
        with pytest.raises(InvalidParameterError):
            build_wavelet_system(4, 8)


class TestTensorEval:
    def test_outside_support(self, db4):
        idx = WaveletIndex(0, ("F", "F"), (0, 0))
        pts = np.array([[7.5, 1.0], [-0.1, 3.0], [10.0, 10.0]])
        assert np.all(tensor_wavelet_eval(db4, idx, pts) == 0.0)

    def test_translation_covariance(self, db4):
        gamma = 2
        idx1 = WaveletIndex(gamma, ("M", "F"), (3, -1))
        idx2 = WaveletIndex(gamma, ("M", "F"), (2, -1))
        rng = np.random.default_rng(0)
        pts = rng.uniform(-2, 4, size=(200, 2))
        shifted = pts.copy()
        shifted[:, 0] += 2.0**-gamma
        a = tensor_wavelet_eval(db4, idx1, shifted)
        b = tensor_wavelet_eval(db4, idx2, pts)
        assert np.max(np.abs(a - b)) < 1e-9

    def test_l2_normalization_quadrature(self, db4):
        # product of 1D norms is the oracle for the tensor norm
        idx = WaveletIndex(2, ("M", "M"), (1, -2))
        lo, hi = tensor_support_cube(db4, idx)
        n = 900
        xs = np.linspace(lo[0], hi[0], n)
        ys = np.linspace(lo[1], hi[1], n)
        XX, YY = np.meshgrid(xs, ys, indexing="ij")
        vals = tensor_wavelet_eval(db4, idx, np.stack([XX, YY], axis=-1))
        dx = (hi[0] - lo[0]) / (n - 1)
        dy = (hi[1] - lo[1]) / (n - 1)
        norm = math.sqrt(np.sum(vals**2) * dx * dy)
        oracle = db4.l2_norm_1d("M") ** 2
        assert norm == pytest.approx(oracle, abs=1e-3)
        assert abs(oracle - 1.0) < 1e-5

    def test_invalid_indices(self):
        with pytest.raises(InvalidParameterError):
            WaveletIndex(1, ("F", "F"), (0, 0))
        with pytest.raises(InvalidParameterError):
            WaveletIndex(-1, ("M", "F"), (0, 0))
        with pytest.raises(InvalidParameterError):
            WaveletIndex(0, ("X", "F"), (0, 0))


class TestOrthonormality:
    @pytest.mark.parametrize("k", [2, 4, 6])
    def test_1d_random_pairs(self, k):
        sys_ = build_wavelet_system(k, 14)
        rng = np.random.default_rng(42)
        checked = 0
        while checked < 200:
            a = random_1d_basis_index(rng)
            b = random_1d_basis_index(rng)
            val = wavelet_inner_1d(sys_, a, b)
            expect = 1.0 if a == b else 0.0
            assert abs(val - expect) < 1e-5, (a, b, val)
            checked += 1

    def test_tensor_pairs(self, db4):
        # tensor inner products factorize axis by axis
        def random_tensor_index(rng):
            gamma = int(rng.integers(0, 3))
            while True:
                G = tuple(rng.choice(["F", "M"]) for _ in range(2))
                if gamma == 0 or "M" in G:
                    return WaveletIndex(gamma, G, tuple(int(m) for m in rng.integers(-2, 3, 2)))

        rng = np.random.default_rng(7)
        for _ in range(20):
            a = random_tensor_index(rng)
            b = random_tensor_index(rng)
            val = 1.0
            for d in range(2):
                val *= wavelet_inner_1d(db4, (a.gamma, a.G[d], a.mu[d]),
                                        (b.gamma, b.G[d], b.mu[d]))
            expect = 1.0 if a == b else 0.0
            assert abs(val - expect) < 1e-5


class TestCellWeights:
    def test_cell_integrals_sum_to_moments(self, db4):
        i0f, i1f, i2f = db4.cell_weights("F", 5)
        i0m, _, _ = db4.cell_weights("M", 5)
        # psi_F integrates to 1, psi_M to 0
        assert abs(i0f.sum() - 1.0) < 1e-7
        assert abs(i0m.sum()) < 1e-9
        assert np.all(np.abs(i1f) <= 2.0**-6 * 1.01 * np.maximum(np.abs(i0f), 1.0))

    def test_quad_level_bound(self, db4):
        with pytest.raises(InvalidParameterError):
            db4.cell_weights("F", 15)
