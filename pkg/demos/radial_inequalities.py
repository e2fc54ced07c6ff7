"""Radial weighted inequalities: regimes, quotients, sharpness.

For radial functions the level sets are spheres and the curvature weight is
exactly 1/rho, so everything reduces to one-dimensional quadrature.  This
script walks the regime map, evaluates quotients against the explicit
constants, and shows dilation ladders blowing up exactly where the validity
map says they must.
"""

import numpy as np

from curvlab import (INF, InequalityParams, IsoperimetricConstants,
                     builtin_profile_suite, constants, critical_exponent,
                     regime_classify, sharpness_scan, sobolev_check,
                     sobolev_quotient)

print("=== regime map ===")
for (n, p, r, q) in [(3, 2, 1, INF), (5, 2, 1, 10), (5, 2, 1, 12),
                     (4, 2, 1, INF), (4, 2, 1, 7)]:
    params = InequalityParams(n=n, p=p, r=r, q=q)
    crit = critical_exponent(params)
    qtxt = "inf" if q is INF else q
    print(f"n={n} p={p} r={r} q={qtxt:>4}: critical exponent = "
          f"{crit.value if crit.value is not INF else 'inf'} "
          f"({crit.regime.value}), inequality {regime_classify(params).value}")

print("\n=== quotients vs the explicit constant, (n,p,r) = (5,2,1) ===")
params = InequalityParams(n=5, p=2, r=1, q=10)
iso = IsoperimetricConstants.sphere_equality(5)
C2 = constants(params, iso).C2
for name, prof in builtin_profile_suite(5):
    verdict = sobolev_check(prof, params, iso)
    print(f"  {name:14s} lhs/rhs = {verdict.ratio:.4f}  (C2 = {C2:.4f})  "
          f"pass={verdict.passed}")

print("\n=== dilation ladder: critical vs supercritical target exponent ===")
for q in (10, 12):
    qs = sharpness_scan("PEAK", InequalityParams(n=5, p=2, r=1, q=q), k_max=24)
    trend = "constant (dilation invariant)" if q == 10 else "grows without bound"
    print(f"  q={q}: quotient first={qs[0]:.4f} last={qs[-1]:.4f}  -> {trend}")

print("\n=== homogeneity / dilation invariance ===")
prof = builtin_profile_suite(5)[1][1]
q0 = sobolev_quotient(prof, params)
print(f"  quotient(v)        = {q0:.12f}")
print(f"  quotient(1000 v)   = {sobolev_quotient(prof.scaled(1e3), params):.12f}")
print(f"  quotient(v(./2))   = {sobolev_quotient(prof.dilated(2.0), params):.12f}")
