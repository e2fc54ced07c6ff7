"""Executable a-priori estimates for semi-stable radial branch points.

For radial solutions the level-set curvature quantities are exact
(H = 1/rho, |B|^2 = (n-1)/rho^2, tangential gradient of |grad u| vanishes),
so every estimate reduces to one-dimensional quadrature:

  * the stability test-function inequality
        (n-1) int H^2 |grad u|^2 eta^2 <= int |grad u|^2 |grad eta|^2
    for eta in the built-in family (truncation at level s, capped boundary
    distance, or user supplied),
  * the truncated L^{2n/(n-4)} bound with constant C(n) = C2(n,2,1)/sqrt(n-1),
  * its sup-norm counterpart in dimensions 2 and 3,
  * the gradient bound for -Delta u = h with u in L^q,
  * the Pohozaev identity and the boundary-flux gradient bound behind the
    extremal solution's H^1 estimate.

All passes are asserted with a 1% quadrature slack.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import simpson

from .constants import IsoperimetricConstants, ball_volume, constants, sphere_area
from .errors import NotSemistable, WrongRegime
from .exponents import InequalityParams
from .gelfand import BranchPoint, tol_eig

SLACK = 0.01


def _wint(rho, values, n):
    """omega * int values rho^{n-1} drho."""
    return sphere_area(n) * simpson(values * rho ** (n - 1.0), x=rho)


def estimate_constant(n: int, part: str) -> float:
    """C(n) of the truncated estimates: the (p, r) = (2, 1) weighted-inequality
    constant divided by sqrt(n-1) from the stability step."""
    iso = IsoperimetricConstants.sphere_equality(n)
    params = InequalityParams(n=n, p=2, r=1)
    bundle = constants(params, iso)
    if part == "sobolev":
        return bundle.C2 / math.sqrt(n - 1.0)
    if part == "morrey":
        return bundle.C1 / math.sqrt(n - 1.0)
    raise ValueError(part)


def _require_semistable(point: BranchPoint):
    if point.mu1 < -tol_eig(point.n):
        raise NotSemistable(
            f"point m={point.m:g} has mu1={point.mu1:g}; not on the minimal branch")


def stability_geometric_check(point: BranchPoint, eta_id) -> dict:
    """Both sides of the stability test-function inequality for one eta.

    ``eta_id`` is ("truncation", s), ("dist_cap", eps), or ("user", eta) with
    eta an array on the profile grid or a callable of rho.  Radially the
    strong |B|^2 form coincides with the (n-1) H^2 form since the tangential
    gradient of |grad u| vanishes; both values are reported.
    """
    _require_semistable(point)
    n = point.n
    rho, u, w = point.profile.rho, point.profile.v, point.uprime
    kind = eta_id[0].lower()

    curv_density = np.zeros_like(rho)          # H^2 |grad u|^2 rho^{n-1} = u'^2 rho^{n-3}
    curv_density[1:] = w[1:] ** 2 * rho[1:] ** (n - 3.0)

    if kind == "truncation":
        s = float(eta_id[1])
        above = u > s
        lhs = (n - 1.0) * s * s * sphere_area(n) * simpson(
            np.where(above, curv_density, 0.0), x=rho)
        rhs = sphere_area(n) * simpson(
            np.where(~above, w ** 4 * rho ** (n - 1.0), 0.0), x=rho)
    elif kind == "dist_cap":
        eps = float(eta_id[1])
        s = float(np.interp(1.0 - eps, rho, u))
        above = u > s
        lhs = (n - 1.0) * eps * eps * sphere_area(n) * simpson(
            np.where(above, curv_density, 0.0), x=rho)
        rhs = sphere_area(n) * simpson(
            np.where(~above, w ** 2 * rho ** (n - 1.0), 0.0), x=rho)
    elif kind == "user":
        eta = eta_id[1]
        eta = np.asarray(eta(rho) if callable(eta) else eta, dtype=float)
        if eta.shape != rho.shape or abs(eta[-1]) > 1e-12:
            raise ValueError("user eta must be sampled on the profile grid and vanish at rho = 1")
        deta = np.gradient(eta, rho, edge_order=2)
        lhs = (n - 1.0) * sphere_area(n) * simpson(curv_density * eta ** 2, x=rho)
        rhs = sphere_area(n) * simpson(w ** 2 * deta ** 2 * rho ** (n - 1.0), x=rho)
    else:
        raise ValueError(f"unknown eta family {eta_id[0]!r}")

    return {"eta": kind, "lhs": lhs, "rhs": rhs, "strong_lhs": lhs,
        "pass": bool(lhs <= rhs * (1.0 + SLACK))}


def lq_estimate_check(point: BranchPoint, s_grid) -> list:
    """Truncated L^{2n/(n-4)} bound, one verdict per truncation level s."""
    n = point.n
    if n <= 4:
        raise WrongRegime("L^{2n/(n-4)} estimate needs n >= 5; "
                          "use linf_estimate_check in dimensions 2 and 3")
    _require_semistable(point)
    rho, u, w = point.profile.rho, point.profile.v, point.uprime
    qs = 2.0 * n / (n - 4.0)
    C = estimate_constant(n, "sobolev")
    out = []
    for s in np.asarray(s_grid, dtype=float):
        excess = np.clip(u - s, 0.0, None)
        lhs = _wint(rho, excess ** qs, n) ** (1.0 / qs)
        grad4 = _wint(rho, np.where(u <= s, w ** 4, 0.0), n)
        rhs = C / s * math.sqrt(grad4)
        out.append({"s": float(s), "lhs": lhs, "rhs": rhs,
                    "pass": bool(lhs <= rhs * (1.0 + SLACK))})
    return out


def linf_estimate_check(point: BranchPoint, s_grid) -> list:
    """Sup-norm bound ||u||_inf <= s + C(n)/s |Omega|^{(4-n)/(2n)} (int_{u<=s} |grad u|^4)^{1/2}."""
    n = point.n
    if n not in (2, 3):
        raise WrongRegime("the sup-norm estimate is for dimensions 2 and 3")
    _require_semistable(point)
    rho, u, w = point.profile.rho, point.profile.v, point.uprime
    C = estimate_constant(n, "morrey")
    omega_measure = ball_volume(n)
    sup_u = float(np.max(u))
    out = []
    for s in np.asarray(s_grid, dtype=float):
        grad4 = _wint(rho, np.where(u <= s, w ** 4, 0.0), n)
        rhs = s + C / s * omega_measure ** ((4.0 - n) / (2.0 * n)) * math.sqrt(grad4)
        out.append({"s": float(s), "lhs": sup_u, "rhs": rhs,
                    "pass": bool(sup_u <= rhs * (1.0 + SLACK))})
    return out


def gradient_estimate_check(point, q: float, p: float) -> dict:
    """Gradient bound for -Delta u = h with u in L^q, q >= n/(n-2).

    int |grad u|^p <= p |Omega| + (p_q/p - 1)^{-1} (||u||_q^q + ||h||_1),
    p_q = 2q/(q+1).  Accepts a BranchPoint or a tuple (rho, u, uprime, h, n).
    """
    if isinstance(point, BranchPoint):
        n = point.n
        rho, u, w, h_rhs = (point.profile.rho, point.profile.v, point.uprime,
                            point.rhs)
    else:
        rho, u, w, h_rhs, n = point
    if n < 3:
        raise WrongRegime("the gradient bound needs n >= 3")
    if q < n / (n - 2.0) - 1e-12:
        raise WrongRegime(f"need q >= n/(n-2) = {n / (n - 2.0):g}, got {q}")
    p_q = 2.0 * q / (q + 1.0)
    if not (1.0 <= p < p_q):
        raise WrongRegime(f"need 1 <= p < p_q = {p_q:g}, got p={p}")
    lhs = _wint(rho, np.abs(w) ** p, n)
    uq = _wint(rho, np.abs(u) ** q, n)
    h1 = _wint(rho, np.abs(h_rhs), n)
    rhs = p * ball_volume(n) + (uq + h1) / (p_q / p - 1.0)
    result = {"p": p, "q": q, "p_q": p_q, "lhs": lhs, "rhs": rhs,
              "pass": bool(lhs <= rhs * (1.0 + 1e-9))}
    if n >= 5:
        result["branch_instantiation"] = {"q": 2.0 * n / (n - 4.0),
                                          "p_sup": 4.0 * n / (3.0 * n - 4.0)}
    return result


def pohozaev_and_nedev(point: BranchPoint) -> dict:
    """Pohozaev identity on the unit ball and the boundary-flux gradient bound.

    Radially: int |grad u|^2 = (1/2) u'(1)^2 |S^{n-1}| + n J(u).  Since the
    minimal solution has J <= 0, the identity implies the H^1 bound
    int |grad u|^2 <= (1/2) u'(1)^2 |S^{n-1}| used for the extremal solution.
    """
    n = point.n
    omega = sphere_area(n)
    grad2 = point.norms["H1_grad"] ** 2
    boundary = 0.5 * point.uprime[-1] ** 2 * omega
    rhs = boundary + n * point.norms["J"]
    residual = abs(grad2 - rhs) / max(abs(grad2), abs(rhs), 1e-300)
    return {
        "grad_l2_sq": grad2,
        "boundary_term": boundary,
        "energy_term": n * point.norms["J"],
        "identity_residual": residual,
        "h1_bound_pass": bool(grad2 <= boundary * (1.0 + 1e-9)),
    }
