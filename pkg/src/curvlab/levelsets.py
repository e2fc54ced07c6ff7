"""Level-set statistics of grid fields: V(t), P(t), curvature integrals.

The distribution function V(t) = |{|v| > t}| is estimated by cell counting
with a linear sub-cell correction (each node contributes the fraction of its
cell predicted by the local signed distance (|v|-t)/|grad v|).  The perimeter
P(t) comes from contour extraction: marching squares in 2d, marching cubes in
3d, summing segment lengths / triangle areas.  Surface integrals of |H|^r
interpolate the node curvature samples at the extracted geometry (bilinear /
trilinear), failing with IRREGULAR_LEVEL when the extraction touches nodes
where the gradient mask is off.

The chain verification compares, level by level,

    ratio_talenti = A1 V^{(n-1)/n} / P
    ratio_ms      = P^{(n-1-r)/(n-1)} / (A2^r int |H|^r dsigma)
    ratio_chain   = A1^{(n-1-r)/(n-1)} V^{(n-1-r)/n} / (A2^r int |H|^r dsigma)

all of which stay <= 1 (up to discretization) on starshaped mean-convex
fields when A2 is the sphere-equality constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import binary_dilation, map_coordinates
from skimage import measure

from .constants import IsoperimetricConstants
from .errors import IrregularLevel
from .geometry import ScalarField, default_eps_grad, gradient_norm, mean_curvature


def curvature_for_interpolation(field: ScalarField, eps_grad=None):
    """Node curvature with the stencil-contaminated band blanked out.

    The divergence stencil reads two nodes in every direction, so H values
    within two cells of the gradient mask boundary are polluted by masked-out
    (or kinked) neighbors; interpolating them would silently corrupt surface
    integrals.  They are set to NaN so extraction fails loudly instead.
    """
    H, mask = mean_curvature(field, eps_grad)
    contaminated = binary_dilation(~mask, iterations=2)
    return np.where(contaminated, np.nan, H), mask & ~contaminated


@dataclass
class LevelSetStats:
    t: float
    V: float = float("nan")
    P: float = float("nan")
    curv_int: float = float("nan")
    ratio_talenti: float = float("nan")
    ratio_ms: float = float("nan")
    ratio_chain: float = float("nan")
    ok: bool = True


def default_t_grid(field: ScalarField, count: int = 64) -> np.ndarray:
    """64 levels uniform in (0.02, 0.98) * max|v| by default."""
    top = field.max_abs()
    return np.linspace(0.02 * top, 0.98 * top, count)


def distribution_volume(field: ScalarField, t: float,
                        grad_norm: Optional[np.ndarray] = None) -> float:
    """|{|v| > t}| by cell counting with the linear sub-cell correction."""
    a = np.abs(field.values)
    gn = gradient_norm(field) if grad_norm is None else grad_norm
    d = a - t
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(gn > 0, 0.5 + d / (gn * field.h), np.where(d > 0, 1.0, 0.0))
    return float(np.sum(np.clip(frac, 0.0, 1.0))) * field.cell_volume()


def _contours_2d(field: ScalarField, t: float):
    return measure.find_contours(np.abs(field.values), t)


def perimeter_2d(field: ScalarField, t: float) -> float:
    total = 0.0
    for poly in _contours_2d(field, t):
        seg = np.diff(poly, axis=0)
        total += float(np.sum(np.hypot(seg[:, 0], seg[:, 1])))
    return total * field.h


def _mesh_3d(field: ScalarField, t: float):
    verts, faces, _, _ = measure.marching_cubes(np.abs(field.values), level=t)
    return verts, faces  # vertex coordinates in index units


def _triangle_areas(verts, faces, h):
    tri = verts[faces] * h
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    return 0.5 * np.sqrt(np.sum(cross * cross, axis=1))


def perimeter(field: ScalarField, t: float) -> float:
    """Surface measure of {|v| = t} by contour / isosurface extraction."""
    if field.n == 2:
        return perimeter_2d(field, t)
    verts, faces = _mesh_3d(field, t)
    return float(np.sum(_triangle_areas(verts, faces, field.h)))


def level_surface_integral(field: ScalarField, t: float, r: float,
                           eps_grad: Optional[float] = None,
                           H: Optional[np.ndarray] = None) -> float:
    """int |H|^r dsigma over the extracted level {|v| = t}.

    Curvature is interpolated from the node samples at segment midpoints
    (triangle centroids in 3d); touching a masked node raises IRREGULAR_LEVEL.
    For r = 0 this reduces to the perimeter.
    """
    top = field.max_abs()
    if not (0.0 < t < top):
        raise IrregularLevel(f"level {t:g} outside (0, {top:g})")
    if r == 0.0:
        return perimeter(field, t)
    if H is None:
        H, _ = curvature_for_interpolation(field, eps_grad)
    if field.n == 2:
        total = 0.0
        for poly in _contours_2d(field, t):
            seg = np.diff(poly, axis=0)
            lengths = np.hypot(seg[:, 0], seg[:, 1]) * field.h
            mid = 0.5 * (poly[:-1] + poly[1:])
            vals = map_coordinates(H, mid.T, order=1, mode="nearest")
            if not np.all(np.isfinite(vals)):
                raise IrregularLevel(f"gradient mask hit on level {t:g}")
            total += float(np.sum(np.abs(vals) ** r * lengths))
        return total
    verts, faces = _mesh_3d(field, t)
    areas = _triangle_areas(verts, faces, field.h)
    centroids = verts[faces].mean(axis=1)
    vals = map_coordinates(H, centroids.T, order=1, mode="nearest")
    if not np.all(np.isfinite(vals)):
        raise IrregularLevel(f"gradient mask hit on level {t:g}")
    return float(np.sum(np.abs(vals) ** r * areas))


def distribution_and_perimeter(field: ScalarField, t_grid,
                               iso: Optional[IsoperimetricConstants] = None):
    """LevelSetStats with V, P, and ratio_talenti = A1 V^{(n-1)/n} / P per level."""
    n = field.n
    if iso is None:
        iso = IsoperimetricConstants.sphere_equality(n)
    gn = gradient_norm(field)
    top = field.max_abs()
    stats = []
    for t in np.asarray(t_grid, dtype=float):
        if not (0.0 < t < top):
            stats.append(LevelSetStats(t=float(t), ok=False))
            continue
        V = distribution_volume(field, t, grad_norm=gn)
        P = perimeter(field, t)
        ratio = iso.A1 * V ** ((n - 1.0) / n) / P if P > 0 else float("nan")
        stats.append(LevelSetStats(t=float(t), V=V, P=P, ratio_talenti=ratio))
    return stats


def check_distribution_monotone(stats) -> bool:
    vs = [s.V for s in stats if s.ok]
    return all(b <= a * (1.0 + 1e-9) for a, b in zip(vs, vs[1:]))


def verify_key_chain(field: ScalarField, r: float, t_grid,
                     constants: Optional[IsoperimetricConstants] = None):
    """Per-level ratios of the perimeter/volume vs curvature-integral chain.

    Entries where the surface extraction fails carry ok=False instead of
    aborting the sweep.
    """
    if not (r >= 1.0 or r == 0.0):
        raise ValueError("the chain inequalities need r >= 1 or r = 0")
    n = field.n
    if constants is None:
        constants = IsoperimetricConstants.sphere_equality(n)
    gn = gradient_norm(field)
    eps = default_eps_grad(field, gn)
    H, _ = curvature_for_interpolation(field, eps)
    top = field.max_abs()
    expo = (n - (1.0 + r)) / (n - 1.0)
    stats = []
    for t in np.asarray(t_grid, dtype=float):
        if not (0.0 < t < top):
            stats.append(LevelSetStats(t=float(t), ok=False))
            continue
        V = distribution_volume(field, t, grad_norm=gn)
        P = perimeter(field, t)
        try:
            ci = level_surface_integral(field, t, r, eps_grad=eps, H=H)
        except IrregularLevel:
            stats.append(LevelSetStats(t=float(t), V=V, P=P, ok=False))
            continue
        denom = constants.A2 ** r * ci
        ratio_ms = P ** expo / denom if denom > 0 else float("nan")
        ratio_chain = (constants.A1 ** expo * V ** ((n - (1.0 + r)) / n) / denom
                       if denom > 0 else float("nan"))
        ratio_tal = constants.A1 * V ** ((n - 1.0) / n) / P if P > 0 else float("nan")
        stats.append(LevelSetStats(t=float(t), V=V, P=P, curv_int=ci,
                                   ratio_talenti=ratio_tal, ratio_ms=ratio_ms,
                                   ratio_chain=ratio_chain))
    return stats


def coarea_check(field: ScalarField, weight_exponent: float,
                 n_levels: int = 128):
    """Compare int g |grad v| dx against int (int_{v=t} g dsigma) dt.

    g = |H|^weight_exponent restricted to the gradient mask; the t-integral
    uses midpoint levels over (0, max|v|).  Returns (lhs, rhs, relerr).
    """
    gn = gradient_norm(field)
    eps = default_eps_grad(field, gn)
    H, mask = mean_curvature(field, eps)
    H_interp, _ = curvature_for_interpolation(field, eps)
    if weight_exponent == 0.0:
        g = np.where(mask, 1.0, 0.0)
    else:
        g = np.where(mask, np.abs(H) ** weight_exponent, 0.0)
    lhs = float(np.sum(g * gn * mask)) * field.cell_volume()
    top = field.max_abs()
    dt = top / n_levels
    levels = (np.arange(n_levels) + 0.5) * dt
    rhs = 0.0
    for t in levels:
        try:
            rhs += level_surface_integral(field, t, weight_exponent,
                                          eps_grad=eps, H=H_interp) * dt
        except IrregularLevel:
            continue
    relerr = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return lhs, rhs, relerr
