"""Why the curvature exponent cannot drop below 2/p - 1.

The cutoff field psi(dist(x, cube)/eps0) has level sets that are offset
squares: flat sides with zero curvature plus tiny corner arcs of radius
proportional to the offset.  Shrinking eps0 concentrates all curvature in
the corners and drives the weighted energy to zero like
eps0^{(1-pr)-(p-1)}, while the function keeps a fixed plateau on the cube.
Fitting that slope demonstrates the failure window r < 2/p - 1.
"""

from curvlab import counterexample_report

EPS = [0.2, 0.15, 0.1, 0.075]

for (p, r) in [(1.0, 0.5), (1.0, 1.0), (1.5, 0.2), (2.0, 0.1)]:
    rep = counterexample_report(p, r, EPS, field_params={"n": 2, "shape": 256})
    print(f"p={p:g} r={r:g}: window sup = {rep.failure_range_sup:+.2f}, "
          f"slope = {rep.slope:+.3f} (theory {rep.theoretical_slope:+.2f}) "
          f"-> {rep.verdict}")
    for row in rep.rows:
        flag = " [below grid resolution]" if row.nonconvergent else ""
        print(f"    eps0={row.eps0:6.3f}  energy={row.energy:.5e}  "
              f"norm/energy ratio={row.ratio:.4f}{flag}")
    print()
