"""Pass/fail verdicts of the weighted inequalities on profiles and fields.

Each check compares the full n-dimensional norms (the radial reductions are
multiplied by the angular factor |S^{n-1}|) against the explicit constants of
:mod:`curvlab.constants`.  A verdict passes when

    lhs <= rhs * (1 + analytic_tol + discretization_slack)

with analytic_tol = 1e-9 and slack 1% for radial quadrature, 5% for grid
fields.  Grid energies flagged NONCONVERGENT by the resolution-halving
detector yield an indeterminate verdict (passed = None), never a pass.

|Omega| is taken as the support measure (ball of radius R for profiles, cell
count for fields), which only shrinks the right-hand side of the sup-norm and
exponential bounds - a conservative choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import geometry
from .constants import (ConstantBundle, IsoperimetricConstants, ball_volume,
                        constants, sphere_area, subcritical_constant)
from .errors import DegenerateQuotient, WrongRegime
from .exponents import (ExponentRegime, InequalityParams, critical_exponent,
                        is_inf)
from .radial import (RadialProfile, _integrate_samples, radial_lq_norm,
                     radial_weighted_energy)

ANALYTIC_TOL = 1e-9
RADIAL_SLACK = 0.01
GRID_SLACK = 0.05

Testee = Union[RadialProfile, geometry.ScalarField]


@dataclass
class Verdict:
    check: str
    regime: str
    lhs: float
    rhs: float
    passed: Optional[bool]          # None = indeterminate (nonconvergent energy)
    constants: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else float("inf")
        return self.lhs / self.rhs

    def to_dict(self):
        return {
            "check": self.check,
            "regime": self.regime,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "pass": self.passed,
            "constants": dict(self.constants),
            "caveats": list(self.caveats),
            **({"meta": self.meta} if self.meta else {}),
        }


def _slack_for(v: Testee) -> float:
    return RADIAL_SLACK if isinstance(v, RadialProfile) else GRID_SLACK


def _passes(lhs, rhs, slack) -> bool:
    return lhs <= rhs * (1.0 + ANALYTIC_TOL + slack)


def domain_measure(v: Testee) -> float:
    if isinstance(v, RadialProfile):
        return ball_volume(v.n) * v.R ** v.n
    return v.support_measure()


def sup_norm(v: Testee) -> float:
    return v.max_abs()


def full_lq_norm(v: Testee, q) -> float:
    if is_inf(q):
        return sup_norm(v)
    if isinstance(v, RadialProfile):
        return sphere_area(v.n) ** (1.0 / float(q)) * radial_lq_norm(v, q)
    return geometry.lq_norm(v, q)


def full_energy(v: Testee, p: float, r: float):
    """Rooted curvature-weighted energy and its nonconvergence flag."""
    if isinstance(v, RadialProfile):
        return sphere_area(v.n) ** (1.0 / p) * radial_weighted_energy(v, p, r), False
    value, bad, _ = geometry.curvature_energy_with_flag(v, p, r, root=True)
    return value, bad


def _require_compact(v: Testee):
    if isinstance(v, RadialProfile):
        v.require_compact_support()


def morrey_check(v: Testee, params: InequalityParams,
                 iso: IsoperimetricConstants, slack=None) -> Verdict:
    """Sup-norm bound of the supercritical regime 1+r <= n < p(1+r) (and p=1, n=1+r)."""
    _require_compact(v)
    bundle = constants(params, iso)
    if bundle.C1 is None:
        raise WrongRegime("morrey_check needs the sup-norm regime")
    n, p = params.n, params.p
    energy, bad = full_energy(v, p, params.r)
    lhs = sup_norm(v)
    omega = domain_measure(v)
    rhs = bundle.C1 * omega ** ((params.weight_order - n) / (n * p)) * energy
    slack = _slack_for(v) if slack is None else slack
    passed = None if bad else _passes(lhs, rhs, slack)
    return Verdict("morrey", bundle.regime.value, lhs, rhs, passed,
                   bundle.to_dict(), list(bundle.caveats),
                   meta={"energy": energy, "omega": omega})


def sobolev_check(v: Testee, params: InequalityParams,
                  iso: IsoperimetricConstants, slack=None) -> Verdict:
    """Critical-exponent bound ||v||_{q_crit} <= C2 * energy in the regime n > p(1+r)."""
    _require_compact(v)
    crit = critical_exponent(params)
    if crit.regime is not ExponentRegime.SOBOLEV:
        raise WrongRegime("sobolev_check needs n > p(1+r)")
    bundle = constants(params, iso)
    energy, bad = full_energy(v, params.p, params.r)
    lhs = full_lq_norm(v, crit.value)
    rhs = bundle.C2 * energy
    slack = _slack_for(v) if slack is None else slack
    passed = None if bad else _passes(lhs, rhs, slack)
    return Verdict("sobolev", bundle.regime.value, lhs, rhs, passed,
                   bundle.to_dict(), list(bundle.caveats),
                   meta={"q": crit.value, "energy": energy})


def trudinger_check(v: Testee, params: InequalityParams,
                    iso: IsoperimetricConstants, c3_margin: float = 2.0,
                    slack=None) -> Verdict:
    """Exponential-moment bound in the critical regime n = p(1+r), p > 1."""
    _require_compact(v)
    bundle = constants(params, iso, c3_margin=c3_margin)
    if bundle.C3 is None:
        raise WrongRegime("trudinger_check needs n = p(1+r) with p > 1")
    p = params.p
    pprime = p / (p - 1.0)
    energy, bad = full_energy(v, p, params.r)
    omega = domain_measure(v)
    if energy == 0.0:
        if sup_norm(v) > 0.0:
            raise DegenerateQuotient("zero energy against a nonzero function")
        moment = omega
    else:
        scale = bundle.C3 * energy
        if isinstance(v, RadialProfile):
            integrand = np.exp((np.abs(v.v) / scale) ** pprime) * v.rho ** (v.n - 1.0)
            moment = sphere_area(v.n) * _integrate_samples(integrand, v.rho)
        else:
            vals = np.exp((np.abs(v.values) / scale) ** pprime)
            vals = np.where(np.abs(v.values) > 0, vals, 0.0)
            moment = float(np.sum(vals)) * v.cell_volume()
    rhs = bundle.C4 * omega
    slack = _slack_for(v) if slack is None else slack
    passed = None if bad else _passes(moment, rhs, slack)
    return Verdict("trudinger", bundle.regime.value, moment, rhs, passed,
                   bundle.to_dict(), list(bundle.caveats),
                   meta={"exp_moment": moment, "bound": rhs, "energy": energy,
                         "c3_margin": c3_margin})


def subcritical_check(v: Testee, params: InequalityParams,
                      iso: IsoperimetricConstants, slack=None) -> Verdict:
    """Subcritical bound ||v||_q <= C(q) |Omega|^{1/q - 1/q_crit} * energy, q < q_crit."""
    _require_compact(v)
    q = params.require_q()
    crit = critical_exponent(params)
    if crit.regime is not ExponentRegime.SOBOLEV or is_inf(q) or q >= crit.value:
        raise WrongRegime("subcritical_check needs n > p(1+r) and q < q_crit")
    C = subcritical_constant(params, iso, float(q))
    energy, bad = full_energy(v, params.p, params.r)
    omega = domain_measure(v)
    lhs = full_lq_norm(v, q)
    rhs = C * omega ** (1.0 / float(q) - 1.0 / crit.value) * energy
    slack = _slack_for(v) if slack is None else slack
    passed = None if bad else _passes(lhs, rhs, slack)
    return Verdict("subcritical", crit.regime.value, lhs, rhs, passed,
                   {"C": C, "q": float(q), "q_crit": crit.value},
                   list(iso.caveats()), meta={"energy": energy})


def _radial_weight_sup(v: RadialProfile, r: float):
    """ess-sup of rho^{-r} |v'| with a divergence heuristic at the origin.

    Returns (sup, unbounded): when the nodewise values keep increasing
    monotonically into the origin the sup is reported as unbounded.
    """
    dv = np.abs(v.derivative())
    rho = v.rho
    vals = rho[1:] ** (-r) * dv[1:]
    sup = float(np.max(vals))
    unbounded = False
    if r > 0 and vals.size >= 6:
        inner = vals[:6]
        strictly_inward = np.all(np.diff(inner) < -1e-6 * max(inner[0], 1e-300))
        if np.argmax(vals) == 0 and strictly_inward:
            unbounded = True
    return sup, unbounded


def pinf_check(v: Testee, params: InequalityParams,
               iso: IsoperimetricConstants, slack=None) -> Verdict:
    """Limit p -> infinity sup-norm bound, valid for 1 <= r <= n-1."""
    _require_compact(v)
    n, r = params.n, params.r
    if not (1.0 <= r <= n - 1.0):
        raise WrongRegime(f"pinf_check needs 1 <= r <= n-1, got r={r}, n={n}")
    caveats = list(iso.caveats())
    if isinstance(v, RadialProfile):
        wsup, unbounded = _radial_weight_sup(v, r)
        if unbounded:
            wsup = float("inf")
            caveats.append("weight sup diverges at the origin; bound is vacuous")
    else:
        H, mask = geometry.mean_curvature(v)
        if not np.any(mask):
            raise DegenerateQuotient("empty gradient mask")
        gn = geometry.gradient_norm(v)
        wsup = float(np.max(np.abs(H[mask]) ** r * gn[mask]))
    omega = domain_measure(v)
    pref = (n / (1.0 + r)) * iso.A1 ** ((1.0 + r - n) / (n - 1.0)) * iso.A2 ** r
    rhs = pref * omega ** ((1.0 + r) / n) * wsup
    lhs = sup_norm(v)
    slack = _slack_for(v) if slack is None else slack
    passed = bool(lhs <= rhs * (1.0 + ANALYTIC_TOL + slack)) or np.isinf(rhs)
    return Verdict("pinf", "PINF", lhs, rhs, passed,
                   {"prefactor": pref, "A1": iso.A1, "A2": iso.A2},
                   caveats, meta={"weight_sup": wsup, "omega": omega})
