"""Cube-collar fields showing where the curvature-weighted bounds break down.

The field is v(x) = psi(d(x)/eps0), where d is the Euclidean distance to the
unit cube and psi a smooth decreasing cutoff with psi(s) = 0 for s >= 1 and
all derivatives vanishing at 0.  Its level sets are the offset surfaces of
the cube: flat faces plus corner fillets of radius d, so the curvature
integral over a level at distance d scales like d^{1-pr} and the total
curvature energy like

    int |H|^{pr} |grad v|^p dx  ~  eps0^{(1-pr) - (p-1)}.

For r < 2/p - 1 this tends to zero while every L^q norm of v stays bounded
below by psi(0) (the plateau on the cube), so no constant can close the
inequality: the slope of log(energy) against log(eps0) is the failure
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import BadEpsilon
from .exponents import INF, critical_exponent, ExponentRegime, InequalityParams
from .geometry import ScalarField, curvature_energy_with_flag, lq_norm


class BumpIntegralCutoff:
    """psi(s) = int_s^1 exp(-1/(t(1-t))) dt: decreasing, flat at both ends."""

    def __init__(self, table_size: int = 4097):
        s = np.linspace(0.0, 1.0, table_size)
        inner = s[1:-1]
        w = np.zeros_like(s)
        w[1:-1] = np.exp(-1.0 / (inner * (1.0 - inner)))
        cum = cumulative_simpson(w, x=s, initial=0.0)
        self._s = s
        self._psi = cum[-1] - cum
        self.psi0 = float(self._psi[0])

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return np.interp(np.clip(s, 0.0, 1.0), self._s, self._psi)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inside = (s > 0.0) & (s < 1.0)
        si = s[inside]
        out[inside] = -np.exp(-1.0 / (si * (1.0 - si)))
        return out


_CUTOFFS = {"bump": BumpIntegralCutoff}


def get_cutoff(cutoff_id: str):
    try:
        return _CUTOFFS[cutoff_id]()
    except KeyError:
        raise ValueError(f"unknown cutoff {cutoff_id!r}; choose from {sorted(_CUTOFFS)}")


def cube_distance(*coords):
    """Euclidean distance to the unit cube [0,1]^n, vectorized."""
    parts = []
    for c in coords:
        c = np.asarray(c, dtype=float)
        parts.append(np.maximum(np.maximum(-c, 0.0), c - 1.0) ** 2)
    return np.sqrt(sum(parts))


def build_cube_counterexample(eps0: float, cutoff_id: str = "bump",
                              field_params: dict | None = None) -> ScalarField:
    """Field psi(d/eps0): equal to psi(0) on the whole cube, supported in the
    eps0-collar around it."""
    if not (0.0 < eps0 < 1.0):
        raise BadEpsilon(f"eps0 must lie in (0, 1), got {eps0}")
    fp = dict(field_params or {})
    n = int(fp.get("n", 2))
    shape = fp.get("shape", 256)
    margin = float(fp.get("margin", min(1.0, eps0 + 0.1)))
    if margin <= eps0:
        raise BadEpsilon(f"box margin {margin} must exceed eps0 = {eps0}")
    psi = get_cutoff(cutoff_id)

    def fn(*coords):
        return psi(cube_distance(*coords) / eps0)

    return ScalarField.from_function(fn, n=n, shape=shape,
                                     lo=-margin, hi=1.0 + margin)


@dataclass
class CounterexampleRow:
    eps0: float
    energy: float           # int |H|^{pr} |grad v|^p dx (not rooted)
    lq_norm: float
    ratio: float            # lq_norm / energy^{1/p}
    nonconvergent: bool


@dataclass
class CounterexampleReport:
    p: float
    r: float
    q: object
    rows: list
    slope: float
    theoretical_slope: float
    verdict: str
    failure_range_sup: float
    notes: list = dataclass_field(default_factory=list)

    def to_dict(self):
        return {
            "p": self.p, "r": self.r,
            "q": "inf" if self.q is INF else self.q,
            "slope": self.slope,
            "theoretical_slope": self.theoretical_slope,
            "verdict": self.verdict,
            "failure_range_sup": self.failure_range_sup,
            "rows": [{"eps0": row.eps0, "energy": row.energy,
                      "lq_norm": row.lq_norm, "ratio": row.ratio,
                      "nonconvergent": row.nonconvergent} for row in self.rows],
            "notes": list(self.notes),
        }


def counterexample_report(p: float, r: float, eps0_list, cutoff_id: str = "bump",
                          field_params: dict | None = None) -> CounterexampleReport:
    """Energy/norm scan over a decreasing eps0 ladder with a log-log slope fit.

    Verdicts: FAILURE_DEMONSTRATED when r sits inside the failure window
    (0, 2/p - 1), the fitted slope is within 0.15 of (1-pr) - (p-1), and the
    norm/energy ratio diverges monotonically; NO_FAILURE when r is on or
    beyond the window boundary and the energy shows no vanishing trend;
    NOT_IN_FAILURE_RANGE when the window (0, 2/p - 1) is empty (p >= 2).
    """
    if p < 1:
        raise ValueError("p must satisfy p >= 1")
    if not (r > 0):
        raise ValueError("the counterexample needs r > 0 (exploration band)")
    eps0_list = [float(e) for e in eps0_list]
    if len(eps0_list) < 4:
        raise ValueError("need at least 4 epsilon values")
    if any(b >= a for a, b in zip(eps0_list, eps0_list[1:])):
        raise ValueError("eps0_list must decrease strictly")

    fp = dict(field_params or {})
    fp.setdefault("margin", min(1.0, max(eps0_list) + 0.08))
    n = int(fp.get("n", 2))
    params = InequalityParams(n=n, p=p, r=r, explore=True)
    crit = critical_exponent(params)
    q = crit.value if crit.regime is ExponentRegime.SOBOLEV else INF

    rows = []
    for eps0 in eps0_list:
        fld = build_cube_counterexample(eps0, cutoff_id=cutoff_id, field_params=fp)
        energy, bad, _ = curvature_energy_with_flag(fld, p, r)
        norm = fld.max_abs() if q is INF else lq_norm(fld, q)
        ratio = norm / energy ** (1.0 / p) if energy > 0 else float("inf")
        rows.append(CounterexampleRow(eps0=eps0, energy=energy, lq_norm=norm,
                                      ratio=ratio, nonconvergent=bad))

    good = [row for row in rows if not row.nonconvergent]
    notes = []
    if len(good) >= 2:
        logs_e = np.log([row.eps0 for row in good])
        logs_E = np.log([row.energy for row in good])
        slope = float(np.polyfit(logs_e, logs_E, 1)[0])
        if len(good) < len(rows):
            notes.append(f"slope fitted on the {len(good)} grid-converged rows; "
                         f"{len(rows) - len(good)} rows below resolution were excluded")
    else:
        slope = float("nan")
        notes.append("fewer than 2 grid-converged rows; slope unavailable")
    theo = (1.0 - p * r) - (p - 1.0)
    sup = 2.0 / p - 1.0

    ratios = [row.ratio for row in good]
    diverges = len(ratios) >= 2 and all(b > a for a, b in zip(ratios, ratios[1:]))
    if sup <= 0.0:
        verdict = "NOT_IN_FAILURE_RANGE"
        notes.append(f"failure window (0, 2/p-1) is empty at p = {p:g}")
    elif not np.isfinite(slope):
        verdict = "INCONCLUSIVE"
    elif r < sup:
        if slope >= theo - 0.15 and diverges:
            verdict = "FAILURE_DEMONSTRATED"
        else:
            verdict = "INCONCLUSIVE"
            notes.append("slope or ratio trend did not match the failure signature")
    else:
        verdict = "NO_FAILURE" if slope <= 0.1 else "INCONCLUSIVE"
    if any(row.nonconvergent for row in rows):
        notes.append("some energies flagged NONCONVERGENT by the halving detector")
    return CounterexampleReport(p=p, r=r, q=q, rows=rows, slope=slope,
                                theoretical_slope=theo, verdict=verdict,
                                failure_range_sup=sup, notes=notes)
