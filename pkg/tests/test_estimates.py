import math

import numpy as np
import pytest

from curvlab.errors import NotSemistable, WrongRegime
from curvlab.estimates import (gradient_estimate_check, linf_estimate_check,
                               lq_estimate_check, pohozaev_and_nedev,
                               stability_geometric_check)
from curvlab.gelfand import (BranchSolver, exp_nonlinearity,
                             power_nonlinearity, solve_branch)

EXP = exp_nonlinearity()


@pytest.fixture(scope="module")
def point_n5():
    return BranchSolver(5, EXP).point(1.0)


@pytest.fixture(scope="module")
def point_n3():
    return BranchSolver(3, EXP).point(1.0)


@pytest.fixture(scope="module")
def point_n10():
    return BranchSolver(10, EXP).point(8.0)


class TestStabilityGeometric:
    def test_truncation_family(self, point_n5):
        for s in (0.1, 0.3, 0.6):
            res = stability_geometric_check(point_n5, ("truncation", s))
            assert res["pass"], res
            assert res["strong_lhs"] == res["lhs"]  # radial: |B|^2 = (n-1) H^2

    def test_dist_cap_family(self, point_n5):
        for eps in (0.1, 0.25):
            res = stability_geometric_check(point_n5, ("dist_cap", eps))
            assert res["pass"], res

    def test_user_eta(self, point_n5):
        rho = point_n5.profile.rho
        res = stability_geometric_check(point_n5, ("user", 1.0 - rho ** 2))
        assert res["pass"]

    def test_small_lambda_both_sides_small(self):
        pt = BranchSolver(3, EXP).point(1e-3)
        res = stability_geometric_check(pt, ("truncation", 5e-4))
        assert res["pass"]
        assert res["rhs"] < 1e-6

    def test_rejects_unstable_point(self):
        # past the fold the branch is no longer semi-stable
        pts = solve_branch(2, EXP, [5.0])
        assert pts[0].mu1 < 0
        with pytest.raises(NotSemistable):
            stability_geometric_check(pts[0], ("truncation", 0.5))


class TestLqEstimate:
    def test_pass_on_grid(self, point_n5):
        s_grid = np.linspace(0.05, 0.95, 16) * point_n5.profile.max_abs()
        results = lq_estimate_check(point_n5, s_grid)
        assert all(r["pass"] for r in results)

    def test_s_above_max_gives_zero_lhs(self, point_n5):
        res = lq_estimate_check(point_n5, [2.0 * point_n5.profile.max_abs()])
        assert res[0]["lhs"] == pytest.approx(0.0, abs=1e-300)
        assert res[0]["pass"]

    def test_wrong_dimension(self, point_n3):
        with pytest.raises(WrongRegime):
            lq_estimate_check(point_n3, [0.5])

    def test_power3_n5_branch_midpoint(self):
        pt = BranchSolver(5, power_nonlinearity(3)).point(1.0)
        s_grid = np.linspace(0.05, 0.95, 16) * pt.profile.max_abs()
        assert all(r["pass"] for r in lq_estimate_check(pt, s_grid))


class TestLinfEstimate:
    def test_n3_midbranch(self, point_n3):
        s_grid = np.linspace(0.05, 0.95, 8) * point_n3.profile.max_abs()
        assert all(r["pass"] for r in linf_estimate_check(point_n3, s_grid))

    def test_small_s_vacuous(self, point_n3):
        res = linf_estimate_check(point_n3, [1e-8])
        assert res[0]["pass"] and res[0]["rhs"] > 1e3

    def test_n2_at_fold(self):
        solver = BranchSolver(2, EXP)
        pt = solver.point(2.0 * math.log(2.0))  # the fold of the disk branch
        s_grid = np.linspace(0.1, 0.9, 6) * pt.profile.max_abs()
        assert all(r["pass"] for r in linf_estimate_check(pt, s_grid))

    def test_wrong_dimension(self, point_n5):
        with pytest.raises(WrongRegime):
            linf_estimate_check(point_n5, [0.5])


class TestGradientEstimate:
    def test_pq_formula(self, point_n5):
        # q = n/(n-2) gives p_q = n/(n-1)
        n = 5
        res = gradient_estimate_check(point_n5, q=n / (n - 2.0), p=1.0)
        assert res["p_q"] == pytest.approx(n / (n - 1.0), rel=1e-12)
        assert res["pass"]

    def test_pq_n5_q10(self, point_n5):
        res = gradient_estimate_check(point_n5, q=10.0, p=1.5)
        assert res["p_q"] == pytest.approx(20.0 / 11.0, rel=1e-12)
        assert res["pass"]

    def test_p_out_of_range(self, point_n5):
        with pytest.raises(WrongRegime):
            gradient_estimate_check(point_n5, q=10.0, p=2.0)

    def test_q_too_small(self, point_n5):
        with pytest.raises(WrongRegime):
            gradient_estimate_check(point_n5, q=1.0, p=1.0)

    def test_n10_near_extremal_p43(self, point_n10):
        res = gradient_estimate_check(point_n10, q=2.0 * 10 / (10 - 4.0), p=4.0 / 3.0)
        assert res["pass"]
        assert res["branch_instantiation"]["p_sup"] == pytest.approx(40.0 / 26.0)

    def test_tuple_form(self, point_n5):
        pt = point_n5
        res = gradient_estimate_check(
            (pt.profile.rho, pt.profile.v, pt.uprime, pt.rhs, pt.n),
            q=10.0, p=1.2)
        assert res["pass"]


class TestPohozaev:
    def test_identity_residual_small(self, point_n3):
        res = pohozaev_and_nedev(point_n3)
        assert res["identity_residual"] <= 1e-6
        assert res["h1_bound_pass"]

    def test_small_lambda_residual(self):
        pt = BranchSolver(3, EXP).point(1e-3)
        res = pohozaev_and_nedev(pt)
        assert res["identity_residual"] <= 1e-4  # both sides are O(lambda^2)
        assert res["h1_bound_pass"]

    def test_whole_branch_h1_bound(self):
        pts = solve_branch(2, EXP, np.linspace(0.2, 1.3, 5))
        h1s = []
        for pt in pts:
            res = pohozaev_and_nedev(pt)
            assert res["h1_bound_pass"]
            h1s.append(pt.norms["H1_grad"])
        assert max(h1s) < math.inf

    def test_residual_refinement_order(self, point_n3):
        # subsampled quadrature of the same profile: residual drops at
        # least quadratically in the node spacing
        import curvlab.gelfand as g
        from scipy.integrate import simpson

        pt = point_n3
        n, omega = 3, g.sphere_area(3)
        resids = []
        for step in (256, 128, 64):
            rho = pt.profile.rho[::step]
            u = pt.profile.v[::step]
            w = pt.uprime[::step]
            weight = rho ** (n - 1.0)
            grad2 = omega * simpson(w * w * weight, x=rho)
            J = 0.5 * grad2 - pt.lam * omega * simpson(EXP.F_vec(u) * weight, x=rho)
            rhs = 0.5 * w[-1] ** 2 * omega + n * J
            resids.append(abs(grad2 - rhs) / abs(rhs))
        assert resids[0] / resids[1] >= 3.0
        assert resids[1] / resids[2] >= 3.0
