import math

import numpy as np
import pytest

from curvlab.geometry import (ScalarField, curvature_energy,
                              curvature_energy_with_flag, gradient,
                              gradient_norm, lq_norm, mean_curvature,
                              radial_field)


def cone_field(shape=128, n=2):
    return radial_field(lambda r: np.clip(1.0 - r, 0.0, None), n=n, shape=shape)


def bump_field(shape=128, n=2):
    return radial_field(lambda r: np.clip(1.0 - r * r, 0.0, None) ** 2,
                        n=n, shape=shape)


class TestScalarField:
    def test_boundary_must_vanish(self):
        vals = np.ones((32, 32))
        with pytest.raises(ValueError):
            ScalarField(n=2, shape=(32, 32), h=0.1, origin=(0, 0), values=vals)

    def test_from_function_clamps_boundary(self):
        f = ScalarField.from_function(lambda x, y: np.ones_like(x), n=2,
                                      shape=32, lo=0.0, hi=1.0)
        assert f.values[0, 0] == 0.0 and f.values[5, 5] == 1.0

    def test_support_measure(self):
        f = cone_field(128)
        # support is the unit disk
        assert f.support_measure() == pytest.approx(math.pi, rel=0.02)

    def test_decimated(self):
        f = cone_field(128)
        d = f.decimated()
        assert d.h == pytest.approx(2 * f.h)
        assert d.shape[0] == 64


class TestGradient:
    def test_linear_field_exact(self):
        def fn(x, y):
            inside = (np.abs(x) < 0.8) & (np.abs(y) < 0.8)
            return np.where(inside, x, 0.0) * 0 + x * inside

        f = ScalarField.from_function(lambda x, y: x * ((np.abs(x) < 0.8) & (np.abs(y) < 0.8)),
                                      n=2, shape=64, lo=-1.0, hi=1.0)
        gx, gy = gradient(f)
        # interior away from the support cut: exact derivative (1, 0)
        assert gx[32, 32] == pytest.approx(1.0, abs=1e-12)
        assert gy[32, 32] == pytest.approx(0.0, abs=1e-12)

    def test_zero_field(self):
        f = ScalarField.from_function(lambda x, y: 0.0 * x, n=2, shape=32,
                                      lo=0.0, hi=1.0)
        assert np.all(gradient_norm(f) == 0.0)

    def test_cone_gradient_norm(self):
        f = cone_field(128)
        gn = gradient_norm(f)
        ax = np.linspace(-1.3, 1.3, 128)
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        R = np.hypot(X, Y)
        sel = (R > 0.2) & (R < 0.8)
        assert np.max(np.abs(gn[sel] - 1.0)) <= 0.05  # O(h) near the kink-free zone


class TestMeanCurvature:
    def test_radial_cone_one_over_r(self):
        f = cone_field(128)
        H, mask = mean_curvature(f)
        ax = np.linspace(-1.3, 1.3, 128)
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        R = np.hypot(X, Y)
        sel = mask & (R >= 0.2) & (R <= 0.8)
        assert np.max(np.abs(H[sel] - 1.0 / R[sel])) <= 0.1

    def test_affine_level_sets_flat(self):
        f = ScalarField.from_function(
            lambda x, y: (x + 0.2 * y) * ((np.abs(x) < 0.7) & (np.abs(y) < 0.7)),
            n=2, shape=96, lo=-1.0, hi=1.0)
        H, mask = mean_curvature(f)
        inner = np.zeros_like(mask)
        inner[30:66, 30:66] = True
        sel = mask & inner
        assert np.max(np.abs(H[sel])) <= 1e-8

    def test_convergence_order(self):
        errs = []
        for shape in (64, 128, 256):
            f = cone_field(shape)
            H, mask = mean_curvature(f)
            ax = np.linspace(-1.3, 1.3, shape)
            X, Y = np.meshgrid(ax, ax, indexing="ij")
            R = np.hypot(X, Y)
            sel = mask & (R >= 0.2) & (R <= 0.8)
            errs.append(np.max(np.abs(H[sel] - 1.0 / R[sel])))
        rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(rates) >= 1.5

    def test_monotone_reparametrization_invariance(self):
        # v and v^3 share level sets, hence curvature, on the common mask
        base = bump_field(128)
        cubed = ScalarField(n=2, shape=base.shape, h=base.h, origin=base.origin,
                            values=base.values ** 3)
        H1, m1 = mean_curvature(base)
        H2, m2 = mean_curvature(cubed)
        ax = np.linspace(-1.3, 1.3, 128)
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        R = np.hypot(X, Y)
        sel = m1 & m2 & (R > 0.25) & (R < 0.75)
        # tolerance: 3x the single-field discretization error
        single = np.max(np.abs(H1[sel] - 1.0 / R[sel]))
        assert np.max(np.abs(H1[sel] - H2[sel])) <= 3.0 * max(single, 1e-3)

    def test_curvature_3d_sphere(self):
        f = radial_field(lambda r: np.clip(1.0 - r, 0.0, None), n=3, shape=64)
        H, mask = mean_curvature(f)
        ax = np.linspace(-1.3, 1.3, 64)
        X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
        R = np.sqrt(X * X + Y * Y + Z * Z)
        sel = mask & (R >= 0.3) & (R <= 0.7)
        assert np.max(np.abs(H[sel] - 1.0 / R[sel])) <= 0.2


class TestCurvatureEnergy:
    def test_zero_field(self):
        f = ScalarField.from_function(lambda x, y: 0.0 * x, n=2, shape=32,
                                      lo=0.0, hi=1.0)
        assert curvature_energy(f, 2, 1) == 0.0

    def test_r0_matches_radial_oracle(self):
        # p=1, r=0: int |grad v| dx for the quartic bump, radial oracle
        # int_0^1 4 rho (1-rho^2) * 2 pi rho drho = 8 pi (1/3 - 1/5)
        f = bump_field(256)
        oracle = 8.0 * math.pi * (1.0 / 3.0 - 1.0 / 5.0)
        got = curvature_energy(f, p=1, r=0)
        assert got == pytest.approx(oracle, rel=0.02)

    def test_cone_log_divergence_flagged(self):
        # int_{B_1} |x|^{-2} dx diverges logarithmically in 2d: the halving
        # detector must fire
        f = cone_field(256)
        _, bad, rel = curvature_energy_with_flag(f, p=2, r=1)
        assert bad and rel > 0.10

    def test_smooth_energy_not_flagged(self):
        f = bump_field(256)
        val, bad, rel = curvature_energy_with_flag(f, p=2, r=1)
        assert not bad and rel < 0.05

    def test_lq_norm_disk(self):
        f = cone_field(256)
        # int_{B_1} (1-|x|)^2 dx = 2 pi (1/2 - 2/3 + 1/4)
        oracle = (2.0 * math.pi * (1.0 / 2.0 - 2.0 / 3.0 + 1.0 / 4.0)) ** 0.5
        assert lq_norm(f, 2) == pytest.approx(oracle, rel=0.01)
