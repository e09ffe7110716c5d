"""Acceptance suite: one test per criterion, run at the stated scale
with pinned tolerances.  Each test prints a single pass/fail line.

Scales: n = 1 on 2D frequency grids with N <= 512; the n = 2 smoke test
uses N = 32 on 4D grids.
"""

import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bilmax.coeffs import analyze, reconstruct
from bilmax.fits import fit_log2_slope
from bilmax.grids import Field, Grid, lp_norm
from bilmax.harness import EXPERIMENTS, random_band_limited
from bilmax.operators import DilationGrid, apply_bilinear, apply_bilinear_direct, maximal_operator
from bilmax.symbols import (
    GaussianProfile,
    RadialSymbol,
    SmoothBumpProfile,
    ball_piece,
    bochner_riesz_symbol,
    constant_symbol,
    radial_lp_norm,
)
from bilmax.wavelets import build_wavelet_system, cached_wavelet_system

from test_wavelets import random_1d_basis_index, wavelet_inner_1d


def report(criterion: str, ok: bool, detail: str):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"{criterion}: {detail}"


class TestC01WaveletValidity:
    def test_c01(self):
        worst_norm = worst_moment = worst_ortho = 0.0
        rng = np.random.default_rng(101)
        for k in range(2, 7):
            sys_ = cached_wavelet_system(k, 14)
            worst_norm = max(worst_norm,
                             abs(sys_.l2_norm_1d("F") - 1.0),
                             abs(sys_.l2_norm_1d("M") - 1.0))
            worst_moment = max(worst_moment,
                               max(abs(sys_.moment_1d("M", a)) for a in range(k)))
        for k in (2, 4, 6):
            sys_k = cached_wavelet_system(k, 14)
            pairs = 0
            while pairs < 200:
                a = random_1d_basis_index(rng)
                b = random_1d_basis_index(rng)
                val = wavelet_inner_1d(sys_k, a, b)
                worst_ortho = max(worst_ortho, abs(val - (1.0 if a == b else 0.0)))
                pairs += 1
        sys4 = cached_wavelet_system(4, 14)
        tensor = 0
        while tensor < 20:
            fa = [random_1d_basis_index(rng, 2, 2) for _ in range(2)]
            fb = [random_1d_basis_index(rng, 2, 2) for _ in range(2)]
            ga = max(f[0] for f in fa)
            gb = max(f[0] for f in fb)
            a = [(ga, f[1], f[2]) for f in fa]
            b = [(gb, f[1], f[2]) for f in fb]
            if ga > 0 and all(f[1] == "F" for f in a):
                continue
            if gb > 0 and all(f[1] == "F" for f in b):
                continue
            val = 1.0
            for x, y in zip(a, b):
                val *= wavelet_inner_1d(sys4, x, y)
            worst_ortho = max(worst_ortho, abs(val - (1.0 if a == b else 0.0)))
            tensor += 1
        ok = worst_norm < 1e-6 and worst_moment < 1e-6 and worst_ortho < 1e-5
        report("C01 wavelet validity", ok,
               f"norms {worst_norm:.2e} (<1e-6), moments {worst_moment:.2e} "
               f"(<1e-6), orthonormality {worst_ortho:.2e} (<1e-5)")


class TestC02Reconstruction:
    def test_c02(self, db4):
        bump = RadialSymbol(2, SmoothBumpProfile(0.5, 1.0), label="bump")
        tree = analyze(ball_piece(bump, 1.0), db4, gamma_max=5, quad_level=4)
        grid = Grid(2, 512, 4.0)
        rec = reconstruct(tree, db4, grid)
        ref = bump.sample(grid)
        rel = lp_norm(rec - ref, 2) / lp_norm(ref, 2)
        report("C02 reconstruction", rel < 5e-3,
               f"relative L2 error {rel:.2e} (<5e-3) at gamma_max=5")


class TestC03MomentDecay:
    def test_c03(self, db4):
        k, n = 4, 1
        bump = RadialSymbol(2, GaussianProfile(2.0), label="gaussian")
        tree = analyze(ball_piece(bump, bump.profile.support[1]), db4,
                       gamma_max=4, quad_level=4)
        gammas = tree.gammas()
        slope, _, _ = fit_log2_slope(gammas, [tree.sup_at(g) for g in gammas])
        bound = -(k + n) + 0.5
        report("C03 coefficient moment decay", slope <= bound,
               f"gamma-slope {slope:.2f} <= {bound} (db4, gamma=0..4)")


class TestC04CoeffDecay:
    def test_c04(self):
        rep = EXPERIMENTS["coeff-decay"]({
            "order": 3, "lambda": 3.0, "r": 4.0, "s": 2.6,
            "j_range": [2, 7], "gamma_min": 2, "gamma_max": 5, "quad_level": 4})
        v_g = rep["verdicts"]["gamma_slope"]
        v_j = rep["verdicts"]["j_slope"]
        ok = v_g["pass"] and v_j["pass"]
        report("C04 piece coefficient decay", ok,
               f"gamma-slope {v_g['value']:.2f} <= {v_g['bound']}+0.3, "
               f"j-slope {v_j['value']:.2f} <= {v_j['bound']}+0.3 "
               f"(j=2..6, gamma=2..5)")


class TestC05PieceL2Norms:
    def test_c05(self):
        rep = EXPERIMENTS["decompose"]({"lambdas": [2.0, 3.0],
                                        "j_range": [3, 8], "j_max": 8})
        slopes = {lam: rep["verdicts"][f"l2_slope_lambda{lam:g}"] for lam in (2.0, 3.0)}
        quads = {lam: rep["verdicts"][f"l2_quadrature_lambda{lam:g}"] for lam in (2.0, 3.0)}
        ok = all(v["pass"] for v in slopes.values()) and all(v["pass"] for v in quads.values())
        detail = ", ".join(
            f"lambda={lam:g}: slope {slopes[lam]['value']:.3f} "
            f"(target {slopes[lam]['bound']}+-0.15, quad err {quads[lam]['value']:.1e})"
            for lam in (2.0, 3.0))
        report("C05 piece L2-norm decay", ok, detail)


class TestC06SobolevDecay:
    def test_c06(self):
        rep = EXPERIMENTS["sobolev-decay"]({"lambda": 3.0, "s": 2.0, "r": 4.0,
                                            "j_range": [2, 8]})
        v = rep["verdicts"]["sobolev_slope"]
        x = rep["verdicts"]["radial_vs_grid"]
        report("C06 rescaled sobolev decay", v["pass"] and x["pass"],
               f"j-slope {v['value']:.3f} = {v['bound']}+-0.2, "
               f"radial/grid cross-check {x['value']:.2%}")


class TestC07IdentitySanity:
    def test_c07(self):
        grid = Grid(1, 256, 16.0)
        f = random_band_limited(grid, (0.25, 3.0), (7, 0))
        g = random_band_limited(grid, (0.25, 3.0), (7, 1))
        one = constant_symbol(2)
        prod = f.values * g.values
        scale = np.max(np.abs(prod))
        worst_t = max(
            float(np.max(np.abs(apply_bilinear(one, f, g, t).values - prod))) / scale
            for t in (0.3, 1.0, 2.7))
        res = maximal_operator(one, f, g, DilationGrid.geometric(0.1, 4.0, 6))
        worst_max = float(np.max(np.abs(res.maximal.values - np.abs(prod)))) / scale
        ok = worst_t < 1e-8 and worst_max < 1e-12
        report("C07 identity sanity", ok,
               f"S_t vs product {worst_t:.2e} (<1e-8), maximal vs |product| "
               f"{worst_max:.2e}")


class TestC08OracleEquivalence:
    def test_c08(self):
        grid = Grid(1, 64, 8.0)
        f = random_band_limited(grid, (0.25, 2.5), (8, 0))
        g = random_band_limited(grid, (0.25, 2.5), (8, 1))
        sym = bochner_riesz_symbol(1, 2.0)
        t = 0.5
        out = apply_bilinear(sym, f, g, t)
        rng = np.random.default_rng(88)
        idx = rng.choice(64, size=5, replace=False)
        oracle = apply_bilinear_direct(sym, f, g, t, idx)
        rel = float(np.max(np.abs(out.values[idx] - oracle))) / float(np.max(np.abs(oracle)))
        report("C08 oracle equivalence", rel < 1e-6,
               f"slice-FFT vs direct Riemann sum at 5 points: {rel:.2e} (<1e-6)")


class TestC09DilationStructure:
    def test_c09(self):
        rep = EXPERIMENTS["gfunction"]({"pairs": 10})
        ftc = rep["verdicts"]["ftc_identity"]
        dom = rep["verdicts"]["square_domination"]
        report("C09 dilation-derivative structure", ftc["pass"] and dom["pass"],
               f"integral identity {ftc['value']:.2%} (<1%), square-function "
               f"domination ratio {dom['value']:.3f} (<=1.02) over 10 pairs")


class TestC10Majorization:
    def test_c10(self):
        rep = EXPERIMENTS["maximal"]({"trials": 20, "lambda": 2.0, "seed": 10})
        sta_f = rep["verdicts"]["majorization_stability_full"]
        sta_d = rep["verdicts"]["majorization_stability_dilated"]
        kd = EXPERIMENTS["kernel-decay"]({"lambda": 2.0})
        dec = kd["verdicts"]["kernel_decay"]
        ok = sta_f["pass"] and sta_d["pass"] and dec["pass"]
        report("C10 maximal majorization", ok,
               f"constant spread full {sta_f['value']:.2%}, dilated "
               f"{sta_d['value']:.2%} (<=20%), kernel decay slope "
               f"{dec['value']:.2f} <= {dec['bound']}+0.4")


class TestC11PieceRatioDecay:
    def test_c11(self):
        rep = EXPERIMENTS["norm-ratio"]({"lambda": 3.0, "j_range": [2, 8],
                                         "trials": 50, "seed": 11})
        v = rep["verdicts"]["piece_ratio_slope"]
        neg = rep["verdicts"]["strictly_negative"]
        report("C11 piece ratio decay", v["pass"] and neg["pass"],
               f"max-ratio j-slope {v['value']:.2f} <= {v['bound']}+0.5 and < 0 "
               f"(50 pairs, j=2..7)")


class TestC12BesselIdentity:
    def test_c12(self):
        rep = EXPERIMENTS["bessel-check"]({})
        ident = rep["verdicts"]["identity"]
        ctrl = rep["verdicts"]["negative_control"]
        report("C12 circle-measure identity", ident["pass"] and ctrl["pass"],
               f"max deviation {ident['value']:.2e} (<1e-8), perturbed-order "
               f"control {ctrl['value']:.2e} (>1e-3)")


class TestC13Convergence:
    def test_c13(self):
        rep = EXPERIMENTS["convergence"]({"lambda": 3.0, "grid_n": 256,
                                          "t_exponents": [2, 3, 4, 5, 6],
                                          "oracle_n": 1024})
        mono = rep["verdicts"]["monotone"]
        marg = rep["verdicts"]["oracle_margin"]
        report("C13 convergence to product", mono["pass"] and marg["pass"],
               f"sup error at t=2^-6: {marg['value']:.2e} <= 2x oracle "
               f"{marg['bound']:.2e}, errors non-increasing within 5%")


class TestC14N2Smoke:
    def test_c14(self):
        grid = Grid(2, 32, 8.0)
        f = random_band_limited(grid, (0.25, 1.5), (14, 0))
        g = random_band_limited(grid, (0.25, 1.5), (14, 1))
        out = apply_bilinear(constant_symbol(4), f, g, 1.0)
        prod = f.values * g.values
        rel = float(np.max(np.abs(out.values - prod))) / float(np.max(np.abs(prod)))
        res = maximal_operator(bochner_riesz_symbol(2, 2.0), f, g,
                               DilationGrid.geometric(0.3, 1.2, 3))
        finite = bool(np.all(np.isfinite(res.maximal.values.real)))
        report("C14 n=2 smoke", rel < 1e-6 and finite,
               f"identity error {rel:.2e} (<1e-6) at N=32, maximal sweep over "
               f"{len(res.t_values)} dilations completed")


class TestC15Determinism:
    def test_c15(self, tmp_path):
        blobs = []
        for run in (1, 2):
            out = tmp_path / f"suite{run}"
            proc = subprocess.run(
                [sys.executable, "-m", "bilmax.cli", "run", "paper-suite",
                 "--out", str(out)],
                capture_output=True, text=True, cwd=tmp_path)
            assert proc.returncode == 0, proc.stdout + proc.stderr
            blob = (out / "report.json").read_bytes()
            for sub in sorted(p for p in out.iterdir() if p.is_dir()):
                blob += (sub / "report.json").read_bytes()
            blobs.append(blob)
        report("C15 determinism", blobs[0] == blobs[1],
               "paper-suite run twice with the same seed: byte-identical reports")
