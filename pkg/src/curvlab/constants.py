"""Explicit admissible constants for the curvature-weighted inequalities.

All constants are assembled from two isoperimetric ingredients:

    A1 = n |B_1|^{1/n}        (classical isoperimetric constant)
    A2                        (mean-curvature isoperimetric constant:
                               |S|^{(n-2)/(n-1)} <= A2 int_S |H| dsigma)

and combine into A = A1^{-(n-(1+r))/(n-1)} A2^r.  The sphere-equality choice
A2 = (n|B_1|)^{-1/(n-1)} turns the mean-curvature inequality into an equality
on spheres; it is proven admissible only for starshaped mean-convex
hypersurfaces, so every verdict built on it carries a caveat flag.

Regime constants:

    (a)  n < p(1+r) (or p=1, r=n-1):
         C1 = ((p-1) n / (p(1+r) - n))^(1 - 1/p) * A1^((1+r-n)/(n-1)) * A2^r
         C1 = A2^(n-1)                                  when p = 1, r = n-1
    (b)  n > p(1+r):
         C2 = (n-(1+r))/(n-p(1+r)) * p * A1^(-(n-(1+r))/(n-1)) * A2^r
    (c)  n = p(1+r), p > 1:
         any C3 > A, and C4 = C3^{p'} / (C3^{p'} - A^{p'})

plus, for q < q_crit in regime (b), the subcritical constant

    C(q) = (q/p')^{1/q} (p'/q_crit)^{-1/p'} A
           * ( int_0^inf tau^{q/p'-1} (tau+1)^{-q_crit/p'} dtau )^{1/q}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from scipy.integrate import quad

from .errors import WrongRegime
from .exponents import ExponentRegime, InequalityParams, critical_exponent, is_inf

A2_CAVEAT = ("A2 uses the sphere-equality value, proven admissible only for "
             "starshaped mean-convex level sets")


def ball_volume(n: int) -> float:
    """|B_1| in R^n."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_area(n: int) -> float:
    """|S^{n-1}| = n |B_1|."""
    return n * ball_volume(n)


class A2Mode(enum.Enum):
    SPHERE_EQUALITY = "SPHERE_EQUALITY"
    USER = "USER"


@dataclass(frozen=True)
class IsoperimetricConstants:
    n: int
    A1: float
    A2: float
    a2_mode: A2Mode

    def __post_init__(self):
        if not (self.A1 > 0 and self.A2 > 0):
            raise ValueError("isoperimetric constants must be positive")

    @classmethod
    def sphere_equality(cls, n: int) -> "IsoperimetricConstants":
        return cls(n=n, A1=n * ball_volume(n) ** (1.0 / n),
                   A2=(n * ball_volume(n)) ** (-1.0 / (n - 1.0)),
                   a2_mode=A2Mode.SPHERE_EQUALITY)

    @classmethod
    def user(cls, n: int, a2: float) -> "IsoperimetricConstants":
        return cls(n=n, A1=n * ball_volume(n) ** (1.0 / n), A2=float(a2),
                   a2_mode=A2Mode.USER)

    def caveats(self):
        return [A2_CAVEAT] if self.a2_mode is A2Mode.SPHERE_EQUALITY else []


def combination_constant(params: InequalityParams, iso: IsoperimetricConstants) -> float:
    """A = A1^{-(n-(1+r))/(n-1)} A2^r, the constant of the key chain inequality."""
    n, r = params.n, params.r
    return iso.A1 ** (-(n - (1.0 + r)) / (n - 1.0)) * iso.A2 ** r


@dataclass(frozen=True)
class ConstantBundle:
    """Constants active in one regime; unused slots stay None."""

    params: InequalityParams
    iso: IsoperimetricConstants
    regime: ExponentRegime
    A: float
    C1: Optional[float] = None
    C2: Optional[float] = None
    C3: Optional[float] = None
    C4: Optional[float] = None
    subcritical_C: Optional[Callable[[float], float]] = None
    caveats: tuple = field(default=())

    def to_dict(self):
        out = {"regime": self.regime.value, "A": self.A}
        for name in ("C1", "C2", "C3", "C4"):
            val = getattr(self, name)
            if val is not None:
                out[name] = val
        out["A1"] = self.iso.A1
        out["A2"] = self.iso.A2
        out["a2_mode"] = self.iso.a2_mode.value
        return out


def _is_morrey_regime(params: InequalityParams) -> bool:
    reg = critical_exponent(params).regime
    if reg is ExponentRegime.SUPERCRITICAL_MORREY and 1.0 + params.r <= params.n:
        return True
    # the p=1 critical borderline n = 1+r belongs to the sup-norm estimate
    return (reg is ExponentRegime.CRITICAL and params.p == 1.0)


def subcritical_constant(params: InequalityParams, iso: IsoperimetricConstants, q: float) -> float:
    """Constant of the subcritical bound ||v||_q <= C |Omega|^{1/q - 1/q_crit} energy.

    Finite exactly for q < q_crit; the tau-integral is evaluated by adaptive
    quadrature and blows up as q approaches the critical exponent.
    """
    crit = critical_exponent(params)
    if crit.regime is not ExponentRegime.SOBOLEV:
        raise WrongRegime("subcritical constant needs n > p(1+r)")
    if params.p <= 1.0:
        raise WrongRegime("subcritical constant needs p > 1 (p' finite)")
    qc = crit.value
    if not (1.0 <= q < qc):
        raise WrongRegime(f"subcritical constant needs 1 <= q < {qc}, got {q}")
    pprime = params.p / (params.p - 1.0)
    a = q / pprime
    b = (qc - q) / pprime
    # tau = sigma/(1-sigma) maps the integral onto [0,1]; split at 1/2 and let
    # the QAWS rule absorb each algebraic endpoint singularity (b can be tiny)
    left, _ = quad(lambda s: (1.0 - s) ** (b - 1.0), 0.0, 0.5,
                   weight="alg", wvar=(a - 1.0, 0.0))
    right, _ = quad(lambda u: (1.0 - u) ** (a - 1.0), 0.0, 0.5,
                    weight="alg", wvar=(b - 1.0, 0.0))
    integral = left + right
    A = combination_constant(params, iso)
    return (q / pprime) ** (1.0 / q) * (pprime / qc) ** (-1.0 / pprime) * A \
        * integral ** (1.0 / q)


def constants(params: InequalityParams, iso: IsoperimetricConstants,
              c3_margin: float = 2.0) -> ConstantBundle:
    """Populate the constant bundle for the regime selected by (n, p, r).

    ``c3_margin`` > 1 sets C3 = margin * A in the critical regime; the bound
    constant C4 = margin^{p'} / (margin^{p'} - 1) then tightens monotonically
    as the margin grows.
    """
    n, p, r = params.n, params.p, params.r
    crit = critical_exponent(params)
    A = combination_constant(params, iso)
    caveats = tuple(iso.caveats())

    if _is_morrey_regime(params):
        if p == 1.0:
            # covered case: p = 1 forces r = n-1 on the critical line
            if abs(r - (n - 1.0)) > 1e-12 * n:
                raise WrongRegime(
                    f"p=1 sup-norm estimate needs r = n-1 exactly (r={r}, n={n})")
            C1 = iso.A2 ** (n - 1.0)
        else:
            beta = (params.weight_order - n) / ((p - 1.0) * n)
            C1 = A / beta ** (1.0 - 1.0 / p)
        return ConstantBundle(params=params, iso=iso, regime=crit.regime, A=A,
                              C1=C1, caveats=caveats)

    if crit.regime is ExponentRegime.SUPERCRITICAL_MORREY:
        # only reachable with n < 1+r, which no part of the theorem covers
        raise WrongRegime(f"n < 1+r is not covered (n={n}, r={r})")

    if crit.regime is ExponentRegime.SOBOLEV:
        C2 = (n - (1.0 + r)) / (n - params.weight_order) * p \
            * iso.A1 ** (-(n - (1.0 + r)) / (n - 1.0)) * iso.A2 ** r
        sub = None
        if p > 1.0:
            sub = lambda q: subcritical_constant(params, iso, q)  # noqa: E731
        return ConstantBundle(params=params, iso=iso, regime=crit.regime, A=A,
                              C2=C2, subcritical_C=sub, caveats=caveats)

    # critical regime with p > 1: Trudinger constants
    if p <= 1.0:
        raise WrongRegime("critical regime with p = 1 is the sup-norm case")
    if not (c3_margin > 1.0):
        raise ValueError("c3_margin must exceed 1 (C3 > A is required strictly)")
    pprime = p / (p - 1.0)
    C3 = c3_margin * A
    C4 = C3 ** pprime / (C3 ** pprime - A ** pprime)
    return ConstantBundle(params=params, iso=iso, regime=crit.regime, A=A,
                          C3=C3, C4=C4, caveats=caveats)
