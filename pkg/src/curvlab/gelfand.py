"""Radial solver for -Delta u = lambda f(u) on the unit ball.

The branch of positive radial solutions is parametrized by the center value
m = u(0): for each m the boundary condition u(1) = 0 is solved for lambda by
bracketed root finding, which stays single-valued through the fold.  Profiles
come from an adaptive Dormand-Prince 5(4) integration of

    u'' + (n-1)/rho * u' + lambda f(u) = 0,   u(0) = m, u'(0) = 0,

started at rho_0 > 0 with the two-term series u = m - lambda f(m) rho^2 / (2n)
(plus the rho^4 correction), and densified onto a uniform grid by cubic
Hermite interpolation of the accepted steps.

Each accepted branch point carries the smallest eigenvalue mu1 of the
linearized operator -xi'' - (n-1)/rho xi' - lambda f'(u) xi in the
rho^{n-1}-weighted space, a norm bundle, and the residual of the integral
identity u'(rho) = -lambda rho^{1-n} int_0^rho f(u) s^{n-1} ds.
"""

from __future__ import annotations

import ast
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq, minimize_scalar
from scipy.special import jv

from .constants import sphere_area
from .errors import (EigFailed, InconclusiveBranch, NoSolutionAtM,
                     ShootDiverged)
from .exponents import sharp_radial_exponents
from .radial import RadialProfile

# ---------------------------------------------------------------------------
# nonlinearities


@dataclass(frozen=True)
class Nonlinearity:
    """Reaction term f with derivative and antiderivative (F(0) = 0).

    ``f`` is a scalar-fast callable used inside the integrator; ``f_vec``,
    ``fprime_vec`` and ``F_vec`` act on numpy arrays for quadrature work.
    """

    name: str
    f: Callable[[float], float]
    fprime: Callable[[float], float]
    f_vec: Callable[[np.ndarray], np.ndarray]
    fprime_vec: Callable[[np.ndarray], np.ndarray]
    F_vec: Callable[[np.ndarray], np.ndarray]


def exp_nonlinearity() -> Nonlinearity:
    return Nonlinearity("exp", math.exp, math.exp, np.exp, np.exp, np.expm1)


def power_nonlinearity(mexp: float) -> Nonlinearity:
    """f(u) = (1+u)^mexp, extended by zero below u = -1."""
    mexp = float(mexp)

    def f(u):
        return (1.0 + u) ** mexp if u > -1.0 else 0.0

    def fprime(u):
        return mexp * (1.0 + u) ** (mexp - 1.0) if u > -1.0 else 0.0

    def f_vec(u):
        base = np.clip(1.0 + u, 0.0, None)
        return base ** mexp

    def fprime_vec(u):
        base = np.clip(1.0 + u, 0.0, None)
        return mexp * base ** (mexp - 1.0)

    def F_vec(u):
        base = np.clip(1.0 + u, 0.0, None)
        return (base ** (mexp + 1.0) - 1.0) / (mexp + 1.0)

    return Nonlinearity(f"pow(1+u,{mexp:g})", f, fprime, f_vec, fprime_vec, F_vec)


_ALLOWED_FUNCS = {"exp": np.exp, "log": np.log, "pow": np.power}


def _compile_expression(expr: str):
    """Compile a tiny arithmetic grammar (+,-,*,/,**, pow, exp, log) in u."""
    tree = ast.parse(expr, mode="eval")
    allowed = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name,
               ast.Call, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow,
               ast.USub, ast.UAdd, ast.Load)
    for node in ast.walk(tree):
        if isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name)
                    and node.func.id in _ALLOWED_FUNCS
                    and not node.keywords):
                raise ValueError(f"call not allowed in nonlinearity: {ast.dump(node)}")
        elif isinstance(node, ast.Name):
            if node.id != "u" and node.id not in _ALLOWED_FUNCS:
                raise ValueError(f"unknown symbol {node.id!r} in nonlinearity")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise ValueError("only numeric constants are allowed")
        elif not isinstance(node, allowed):
            raise ValueError(f"syntax not allowed in nonlinearity: {type(node).__name__}")
    code = compile(tree, "<nonlinearity>", "eval")

    def fn(u):
        return eval(code, {"__builtins__": {}}, {"u": u, **_ALLOWED_FUNCS})

    return fn


def user_nonlinearity(expr: str) -> Nonlinearity:
    raw = _compile_expression(expr)

    def f(u):
        return float(raw(u))

    def fprime(u):
        d = 1e-6 * (1.0 + abs(u))
        return (f(u + d) - f(u - d)) / (2.0 * d)

    def f_vec(u):
        return np.asarray(raw(np.asarray(u, dtype=float)), dtype=float)

    def fprime_vec(u):
        u = np.asarray(u, dtype=float)
        d = 1e-6 * (1.0 + np.abs(u))
        return (f_vec(u + d) - f_vec(u - d)) / (2.0 * d)

    def F_vec(u):
        u = np.asarray(u, dtype=float)
        top = float(np.max(u, initial=0.0))
        grid = np.linspace(0.0, max(top, 1e-12), 4097)
        table = np.concatenate([[0.0], cumulative_simpson(f_vec(grid), x=grid)])
        table = table[: grid.size]
        return np.interp(u, grid, table)

    return Nonlinearity(f"user:{expr}", f, fprime, f_vec, fprime_vec, F_vec)


def nonlinearity_from_spec(spec: str) -> Nonlinearity:
    s = spec.strip().lower()
    if s == "exp":
        return exp_nonlinearity()
    if s.startswith("pow(1+u,") and s.endswith(")"):
        return power_nonlinearity(float(s[len("pow(1+u,"):-1]))
    return user_nonlinearity(spec)


def probe_nonlinearity(nl: Nonlinearity, tmax: float = 20.0):
    """f must be positive and increasing on a probe grid; superlinearity only warns."""
    t = np.linspace(0.0, tmax, 257)
    vals = nl.f_vec(t)
    if vals[0] <= 0.0:
        raise ValueError(f"nonlinearity {nl.name} needs f(0) > 0")
    if np.any(np.diff(vals) < -1e-12 * np.max(np.abs(vals))):
        raise ValueError(f"nonlinearity {nl.name} must be increasing")
    ratio = vals[1:] / t[1:]
    tail = ratio[3 * ratio.size // 4:]
    if np.any(np.diff(tail) < -1e-12 * tail[0]):
        warnings.warn(f"nonlinearity {nl.name} does not look superlinear",
                      stacklevel=2)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with Hermite dense output

_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (_B1 - 5179 / 57600, _B3 - 7571 / 16695,
                                _B4 - 393 / 640, _B5 + 92097 / 339200,
                                _B6 - 187 / 2100, -1 / 40)
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9


class _Diverged(Exception):
    pass


def _series_start(n, lam, fm, fpm, m, target=1e-10):
    """rho_0 and series coefficients so the truncation stays below `target`."""
    a = -lam * fm / (2.0 * n)
    b = lam * lam * fm * fpm / (8.0 * n * (n + 2.0))
    scale = max(1.0, abs(m))
    rho0 = math.sqrt(target * scale / max(abs(a), 1e-300))
    rho0 = min(rho0, 1e-4)
    return rho0, a, b


def _integrate(n, nl, lam, m, *, rtol=1e-8, atol=1e-10, stop_on_zero=False,
               grid=None, u_cap=None, max_step=None, collect_steps=False):
    """Integrate the radial problem from the series start to rho = 1.

    Returns a dict with endpoint state, optional zero-crossing location,
    (when ``grid`` is given) dense values of u and u' at the grid nodes, and
    (when ``collect_steps``) the accepted step nodes themselves.
    """
    f = nl.f
    nm1 = n - 1.0
    try:
        fm = f(m)
        rho0, a, b = _series_start(n, lam, fm, nl.fprime(m), m)
    except OverflowError:
        raise ShootDiverged(f"reaction overflows at the center value m={m:g}")
    if u_cap is None:
        u_cap = 1e6 * max(10.0, abs(m))
    steps = ([rho0], [m + a * rho0 * rho0 + b * rho0 ** 4],
             [2.0 * a * rho0 + 4.0 * b * rho0 ** 3]) if collect_steps else None

    out_u = out_w = None
    next_out = 0
    if grid is not None:
        out_u = np.empty(grid.size)
        out_w = np.empty(grid.size)
        while next_out < grid.size and grid[next_out] <= rho0:
            rr = grid[next_out]
            out_u[next_out] = m + a * rr * rr + b * rr ** 4
            out_w[next_out] = 2.0 * a * rr + 4.0 * b * rr ** 3
            next_out += 1

    t = rho0
    u = m + a * rho0 * rho0 + b * rho0 ** 4
    w = 2.0 * a * rho0 + 4.0 * b * rho0 ** 3

    def rhs(rr, uu, ww):
        val = f(uu)
        if not math.isfinite(val) or abs(uu) > u_cap:
            raise _Diverged
        return ww, -nm1 / rr * ww - lam * val

    try:
        ku, kw = rhs(t, u, w)
    except (_Diverged, OverflowError):
        raise ShootDiverged(f"reaction overflows at the series start (m={m:g})")
    h = min(1e-3, rho0, 1.0 - t)
    crossing = None

    def hermite(theta, hh, y0, d0, y1, d1):
        t2 = theta * theta
        t3 = t2 * theta
        return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + theta) * hh * d0
                + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * hh * d1)

    while t < 1.0 - 1e-14:
        h = min(h, 1.0 - t)
        if max_step is not None:
            h = min(h, max_step)
        try:
            k2u, k2w = rhs(t + _C2 * h, u + h * _A21 * ku, w + h * _A21 * kw)
            k3u, k3w = rhs(t + _C3 * h, u + h * (_A31 * ku + _A32 * k2u),
                           w + h * (_A31 * kw + _A32 * k2w))
            k4u, k4w = rhs(t + _C4 * h, u + h * (_A41 * ku + _A42 * k2u + _A43 * k3u),
                           w + h * (_A41 * kw + _A42 * k2w + _A43 * k3w))
            k5u, k5w = rhs(t + _C5 * h,
                           u + h * (_A51 * ku + _A52 * k2u + _A53 * k3u + _A54 * k4u),
                           w + h * (_A51 * kw + _A52 * k2w + _A53 * k3w + _A54 * k4w))
            k6u, k6w = rhs(t + h,
                           u + h * (_A61 * ku + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u),
                           w + h * (_A61 * kw + _A62 * k2w + _A63 * k3w + _A64 * k4w + _A65 * k5w))
            un = u + h * (_B1 * ku + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u)
            wn = w + h * (_B1 * kw + _B3 * k3w + _B4 * k4w + _B5 * k5w + _B6 * k6w)
            k7u, k7w = rhs(t + h, un, wn)
        except (_Diverged, OverflowError):
            # a stage left the representable range: treat as a rejected step
            # unless the accepted state itself has blown past the cap
            if abs(u) > u_cap:
                raise ShootDiverged(
                    f"blow-up before rho=1 (n={n}, lambda={lam:g}, m={m:g})")
            h *= 0.25
            if t + h == t:
                raise ShootDiverged(
                    f"step underflow (n={n}, lambda={lam:g}, m={m:g})")
            continue
        err_u = h * (_E1 * ku + _E3 * k3u + _E4 * k4u + _E5 * k5u + _E6 * k6u + _E7 * k7u)
        err_w = h * (_E1 * kw + _E3 * k3w + _E4 * k4w + _E5 * k5w + _E6 * k6w + _E7 * k7w)
        tol_u = atol + rtol * max(abs(u), abs(un))
        tol_w = atol + rtol * max(abs(w), abs(wn))
        err = math.sqrt(0.5 * ((err_u / tol_u) ** 2 + (err_w / tol_w) ** 2))
        if err <= 1.0:
            # accepted step: dense output, crossing detection, advance
            t_new = t + h
            if grid is not None:
                while next_out < grid.size and grid[next_out] <= t_new + 1e-15:
                    theta = (grid[next_out] - t) / h
                    out_u[next_out] = hermite(theta, h, u, ku, un, k7u)
                    out_w[next_out] = hermite(theta, h, w, kw, wn, k7w)
                    next_out += 1
            if stop_on_zero and un <= 0.0 < u:
                lo, hi = 0.0, 1.0
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if hermite(mid, h, u, ku, un, k7u) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                theta = 0.5 * (lo + hi)
                crossing = (t + theta * h,
                            hermite(theta, h, w, kw, wn, k7w))
                t, u, w = t + theta * h, 0.0, crossing[1]
                break
            t, u, w = t_new, un, wn
            ku, kw = k7u, k7w
            if steps is not None:
                steps[0].append(t)
                steps[1].append(u)
                steps[2].append(w)
            h *= min(5.0, max(0.2, 0.9 * err ** -0.2 if err > 0 else 5.0))
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
        if t + h == t:
            raise ShootDiverged(f"step underflow (n={n}, lambda={lam:g}, m={m:g})")

    out = {"rho_end": t, "u_end": u, "w_end": w, "crossing": crossing,
           "grid_u": out_u, "grid_w": out_w}
    if steps is not None:
        out["steps"] = tuple(np.asarray(s) for s in steps)
    return out


def shoot(n, nonlin: Nonlinearity, lam: float, m: float, grid=None,
          rtol=1e-8, atol=1e-10):
    """One shot from the center: returns (RadialProfile, u(1))."""
    if not (lam > 0 and m > 0):
        raise ValueError("shoot needs lambda > 0 and m > 0")
    if grid is None:
        grid = np.linspace(0.0, 1.0, 2049)
    res = _integrate(n, nonlin, lam, m, rtol=rtol, atol=atol, grid=grid)
    prof = RadialProfile(n=n, rho=grid, v=res["grid_u"], R=1.0)
    return prof, res["u_end"]


def _boundary_residual(n, nl, lam, m, rtol, atol):
    """u(1) when positive throughout, else a signed surrogate past the zero."""
    res = _integrate(n, nl, lam, m, rtol=rtol, atol=atol, stop_on_zero=True)
    if res["crossing"] is None:
        return res["u_end"]
    rho_star, w_star = res["crossing"]
    return (rho_star - 1.0) * abs(w_star)


# ---------------------------------------------------------------------------
# branch machinery


def dirichlet_radial_eigenvalue(n: int) -> float:
    """Smallest radial Dirichlet eigenvalue of -Delta on the unit ball: j_{n/2-1,1}^2."""
    nu = n / 2.0 - 1.0
    x = nu + 0.5
    prev = jv(nu, x)
    while True:
        x_next = x + 0.25
        cur = jv(nu, x_next)
        if prev > 0 >= cur or prev >= 0 > cur:
            root = brentq(lambda xx: jv(nu, xx), x, x_next, xtol=1e-13)
            return root * root
        x, prev = x_next, cur
        if x > 100 * (nu + 1.0):  # pragma: no cover - defensive
            raise EigFailed("could not bracket the Bessel zero")


def tol_eig(n: int) -> float:
    return 1e-6 * dirichlet_radial_eigenvalue(n)


def stability_mu1(n, rho, u, lam, nl: Nonlinearity) -> float:
    """Smallest eigenvalue of the linearized operator, rho^{n-1}-weighted.

    The substitution eta = rho^{(n-1)/2} xi turns the weighted problem into a
    flat-measure Schroedinger operator

        -eta'' + [ (n-1)(n-3)/(4 rho^2) - lambda f'(u) ] eta = mu eta

    with Dirichlet ends (eta ~ rho^{(n-1)/2} at the origin), discretized by
    the symmetric 3-point scheme on the interior nodes.  Unlike the direct
    rho^{n-1}-weighted scheme this prices the first-cell gradient correctly,
    so Hardy-critical potentials (the stable singular limit at n = 10) do not
    produce a spurious localized mode at the origin.

    At n = 2 the transformed centrifugal term is the attractive critical
    Hardy potential -1/(4 rho^2), whose rho^{1/2} cusp wrecks second-order
    convergence; there the rho^{n-1}-weighted finite-volume scheme is used
    instead (minimal-branch profiles in the plane never get Hardy-critical).
    """
    if n == 2:
        return _stability_mu1_weighted(n, rho, u, lam, nl)
    N = rho.size - 1
    h = rho[1] - rho[0]
    ri = rho[1:N]
    hardy = (n - 1.0) * (n - 3.0) / 4.0
    diag = 2.0 / h ** 2 + hardy / ri ** 2 - lam * nl.fprime_vec(u[1:N])
    off = np.full(N - 2, -1.0 / h ** 2)
    try:
        vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0),
                                eigvals_only=True)
    except Exception:
        try:
            vals = eigh_tridiagonal(diag + 1e-13, off, select="i",
                                    select_range=(0, 0), eigvals_only=True)
        except Exception as exc:  # pragma: no cover - defensive
            raise EigFailed(str(exc))
    return float(vals[0])


def _stability_mu1_weighted(n, rho, u, lam, nl: Nonlinearity) -> float:
    """Finite-volume rho^{n-1}-weighted scheme (Neumann closure at the origin)."""
    N = rho.size - 1
    h = rho[1] - rho[0]
    half = (rho[:-1] + rho[1:]) / 2.0
    s = half ** (n - 1.0) / h
    edges = np.concatenate([[0.0], half, [rho[-1]]])
    W = (edges[1:] ** n - edges[:-1] ** n) / n
    pot = lam * nl.fprime_vec(u)
    diag = np.empty(N)
    diag[0] = s[0]
    diag[1:] = s[: N - 1] + s[1:N]
    diag -= pot[:N] * W[:N]
    off = -s[: N - 1]
    bdiag = diag / W[:N]
    off = off / np.sqrt(W[: N - 1] * W[1:N])
    try:
        vals = eigh_tridiagonal(bdiag, off, select="i", select_range=(0, 0),
                                eigvals_only=True)
    except Exception as exc:  # pragma: no cover - defensive
        raise EigFailed(str(exc))
    return float(vals[0])


def _refine_steps(n, nl, lam, steps, k_base=8, k_max=64):
    """Subdivide integrator steps with cubic Hermite values of u and u'.

    The integrand f(u) s^{n-1} of the residual identity varies much faster
    than u itself (exponentially so for f = exp), so the residual quadrature
    needs sub-step nodes even where the ODE solver did not; intervals with a
    large |du| get proportionally more.
    """
    t, u, w = steps
    dw = -(n - 1.0) / t * w - lam * nl.f_vec(u)
    counts = np.clip(np.ceil(4.0 * np.abs(np.diff(u))).astype(int),
                     k_base, k_max)
    ts, us, ws = [t[:1]], [u[:1]], [w[:1]]
    for i, k in enumerate(counts):
        th = np.arange(1, k + 1) / k
        h = t[i + 1] - t[i]
        t2, t3 = th * th, th * th * th
        h00, h10 = 2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + th
        h01, h11 = -2 * t3 + 3 * t2, t3 - t2
        ts.append(t[i] + th * h)
        us.append(h00 * u[i] + h10 * h * w[i] + h01 * u[i + 1] + h11 * h * w[i + 1])
        ws.append(h00 * w[i] + h10 * h * dw[i] + h01 * w[i + 1] + h11 * h * dw[i + 1])
    return np.concatenate(ts), np.concatenate(us), np.concatenate(ws)


def ode_residual(n, rho, u, w, lam, nl: Nonlinearity) -> float:
    """Scaled sup norm of u'(rho) + lambda rho^{1-n} int_0^rho f(u) s^{n-1} ds.

    Nodes may be nonuniform (typically the integrator's accepted steps, which
    resolve the inner layer).  The cumulative integral runs in the variable
    z = s^n, where the integrand f(u)/n is flat near the origin; this keeps
    the check accurate against the rho^{1-n} amplification.  A first node at
    rho_0 > 0 contributes the series head f(u(0)) rho_0^n / n.
    """
    head = 0.0
    if rho[0] > 0.0:
        head = nl.f(float(u[0])) * rho[0] ** n / n
    z = rho ** n
    cum = head + cumulative_simpson(nl.f_vec(u), x=z, initial=0.0) / n
    pos = rho > 0
    resid = w[pos] + lam * rho[pos] ** (1.0 - n) * cum[pos]
    scale = max(float(np.max(np.abs(w))), 1e-30)
    return float(np.max(np.abs(resid))) / scale


@dataclass
class BranchPoint:
    m: float
    lam: float
    profile: RadialProfile
    uprime: np.ndarray
    mu1: float
    norms: dict
    residual: float
    bv_residual: float
    accepted: bool
    rhs: np.ndarray = field(repr=False, default=None)  # lambda * f(u) samples

    @property
    def n(self):
        return self.profile.n


def _norm_bundle(n, rho, u, w, lam, nl):
    omega = sphere_area(n)
    weight = rho ** (n - 1.0)
    L1 = omega * simpson(np.abs(u) * weight, x=rho)
    L2 = math.sqrt(omega * simpson(u * u * weight, x=rho))
    H1 = math.sqrt(omega * simpson(w * w * weight, x=rho))
    J = 0.5 * H1 ** 2 - lam * omega * simpson(nl.F_vec(u) * weight, x=rho)
    norms = {"L1": L1, "L2": L2, "H1_grad": H1, "J": J}
    if n >= 5:
        qs = 2.0 * n / (n - 4.0)
        norms["Lq_star"] = (omega * simpson(np.abs(u) ** qs * weight, x=rho)) ** (1.0 / qs)
    else:
        norms["Lq_star"] = None
    return norms


class BranchSolver:
    """Shared context for lambda(m) root solving on one (n, nonlinearity) pair."""

    def __init__(self, n, nonlin: Nonlinearity, nodes=2048, rtol=1e-8, atol=1e-10,
                 bv_tol=1e-10):
        probe_nonlinearity(nonlin)
        self.n = int(n)
        self.nl = nonlin
        self.grid = np.linspace(0.0, 1.0, nodes + 1)
        self.rtol, self.atol = rtol, atol
        self.bv_tol = bv_tol
        self._tol_eig = tol_eig(n)

    def lam_of_m(self, m, guess=None) -> float:
        """Solve u(1; lambda, m) = 0 for lambda by bracketed root finding."""
        phi = lambda lam: _boundary_residual(self.n, self.nl, lam, m,  # noqa: E731
                                             self.rtol, self.atol)
        lo = hi = max(guess or 2.0 * self.n * m / self.nl.f(0.0), 1e-8)
        flo = phi(lo)
        tries = 0
        while flo <= 0.0:
            lo *= 0.5
            flo = phi(lo)
            tries += 1
            if lo < 1e-14 or tries > 80:
                raise NoSolutionAtM(f"no positive-boundary bracket at m={m:g}")
        fhi = phi(hi)
        tries = 0
        while fhi > 0.0:
            hi *= 2.0
            fhi = phi(hi)
            tries += 1
            if tries > 80:
                raise NoSolutionAtM(f"no sign change in lambda at m={m:g}")
        return brentq(phi, lo, hi, xtol=1e-14 * max(1.0, hi), rtol=8.9e-16)

    def point(self, m, lam=None, guess=None) -> BranchPoint:
        if lam is None:
            lam = self.lam_of_m(m, guess=guess)
        tight = dict(rtol=self.rtol / 100.0, atol=self.atol / 100.0)
        # one secant polish against the tight integrator so the boundary
        # residual is limited by float precision, not by tolerance mismatch
        phi0 = _boundary_residual(self.n, self.nl, lam, m, tight["rtol"], tight["atol"])
        if abs(phi0) > self.bv_tol:
            dlam = 1e-7 * lam
            phi1 = _boundary_residual(self.n, self.nl, lam + dlam, m,
                                      tight["rtol"], tight["atol"])
            slope = (phi1 - phi0) / dlam
            if math.isfinite(slope) and slope != 0.0:
                lam = lam - phi0 / slope
        res = _integrate(self.n, self.nl, lam, m, grid=self.grid,
                         collect_steps=True, **tight)
        u, w = res["grid_u"], res["grid_w"]
        u = u.copy()
        u[-1] = 0.0  # boundary node pinned by the lambda solve
        prof = RadialProfile(n=self.n, rho=self.grid, v=u, R=1.0)
        st, su, sw = _refine_steps(self.n, self.nl, lam, res["steps"])
        mu1 = stability_mu1(self.n, self.grid, u, lam, self.nl)
        resid = ode_residual(self.n, st, su, sw, lam, self.nl)
        bv = abs(res["u_end"])
        norms = _norm_bundle(self.n, self.grid, u, w, lam, self.nl)
        accepted = (mu1 >= -self._tol_eig and bv <= 10.0 * self.bv_tol
                    and resid <= 1e-8)
        return BranchPoint(m=m, lam=lam, profile=prof, uprime=w, mu1=mu1,
                           norms=norms, residual=resid, bv_residual=bv,
                           accepted=accepted,
                           rhs=lam * self.nl.f_vec(u))


def solve_branch(n, nonlin: Nonlinearity, m_grid, nodes=2048, rtol=1e-8,
                 atol=1e-10):
    """Branch points for each m in the increasing grid m_grid."""
    solver = BranchSolver(n, nonlin, nodes=nodes, rtol=rtol, atol=atol)
    points = []
    guess = None
    for m in np.asarray(m_grid, dtype=float):
        lam = solver.lam_of_m(m, guess=guess)
        points.append(solver.point(m, lam=lam))
        guess = lam
    return points


def stability_eigenvalue(point: BranchPoint, nonlin: Nonlinearity) -> float:
    return stability_mu1(point.n, point.profile.rho, point.profile.v,
                         point.lam, nonlin)


# ---------------------------------------------------------------------------
# extremal parameter estimation


def _detect_fold(lams) -> Optional[int]:
    """Index of the sample before a run of 3 consecutive material decreases.

    The threshold keeps root-solver noise (relative 1e-12) on a flat plateau
    from masquerading as a fold.
    """
    lams = np.asarray(lams)
    scale = np.max(np.abs(lams))
    dec = np.diff(lams) < -1e-8 * scale
    for j in range(len(dec) - 2):
        if dec[j] and dec[j + 1] and dec[j + 2]:
            return j
    return None


def _detect_plateau(ms, lams, rel=1e-4) -> bool:
    m_max = ms[-1]
    window = lams[ms >= m_max / 10.0]
    if window.size < 3:
        return False
    return (window.max() - window.min()) / abs(lams[-1]) < rel


@dataclass
class ExtremalEstimate:
    lambda_star: float
    uncertainty: float
    regime: str                      # "fold" or "plateau"
    branch: list
    fold_point: Optional[BranchPoint]
    u_star_proxy: BranchPoint
    norm_report: dict
    weak_solution: dict


def _weak_solution_check(point: BranchPoint) -> dict:
    """Distributional identity against a battery of radial test functions.

    Checks int u (-Delta phi) = int lambda f(u) phi for phi(1) = 0, and the
    integrability of the reaction against the boundary distance.
    """
    n = point.n
    rho = point.profile.rho
    u = point.profile.v
    omega = sphere_area(n)
    weight = rho ** (n - 1.0)
    # -Delta phi = -phi'' - (n-1) phi'/rho for each radial test function
    half_pi = np.pi / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        sinc_term = np.where(rho > 0, np.sin(half_pi * rho) / rho, half_pi)
    battery = {
        "parabola": (1.0 - rho ** 2,
                     np.full_like(rho, 2.0 * n)),
        "quartic": ((1.0 - rho ** 2) ** 2,
                    (4.0 - 12.0 * rho ** 2) + (n - 1.0) * 4.0 * (1.0 - rho ** 2)),
        "cosine": (np.cos(half_pi * rho),
                   half_pi ** 2 * np.cos(half_pi * rho) + (n - 1.0) * half_pi * sinc_term),
    }

    out = {}
    worst = 0.0
    for name, (phi, neg_lap) in battery.items():
        lhs = omega * simpson(u * neg_lap * weight, x=rho)
        rhs = omega * simpson(point.rhs * phi * weight, x=rho)
        rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30)
        out[name] = rel
        worst = max(worst, rel)
    out["max_relerr"] = worst
    out["reaction_distance_l1"] = float(
        omega * simpson(point.rhs * (1.0 - rho) * weight, x=rho))
    return out


def extremal_estimate(n, nonlin: Nonlinearity, m_max, points=48, m_min=0.05,
                      nodes=2048) -> ExtremalEstimate:
    """Estimate lambda* and the extremal-solution proxy from a branch sweep."""
    solver = BranchSolver(n, nonlin, nodes=nodes)
    m_grid = np.geomspace(m_min, m_max, points)
    branch = []
    guess = None
    for m in m_grid:
        lam = solver.lam_of_m(m, guess=guess)
        branch.append(solver.point(m, lam=lam))
        guess = lam
    lams = np.array([pt.lam for pt in branch])

    fold_idx = _detect_fold(lams)
    fold_point = None
    if fold_idx is not None:
        jmax = int(np.argmax(lams))
        lo = m_grid[max(jmax - 1, 0)]
        hi = m_grid[min(jmax + 1, len(m_grid) - 1)]
        res = minimize_scalar(lambda m: -solver.lam_of_m(m), bounds=(lo, hi),
                              method="bounded",
                              options={"xatol": 1e-5 * m_grid[jmax]})
        fold_point = solver.point(float(res.x))
        lambda_star = fold_point.lam
        uncertainty = max(abs(lambda_star - lams.max()), 1e-9 * lambda_star)
        regime = "fold"
    elif _detect_plateau(m_grid, lams):
        lambda_star = lams[-1]
        window = lams[m_grid >= m_grid[-1] / 10.0]
        uncertainty = max(window.max() - window.min(), 1e-12 * lambda_star)
        regime = "plateau"
    else:
        raise InconclusiveBranch(
            "neither a fold nor a plateau was detected; increase m_max")

    accepted = [pt for pt in branch if pt.accepted]
    if not accepted:
        raise InconclusiveBranch("no accepted semi-stable branch point")
    proxy = accepted[-1]

    from .exponents import is_inf

    q0, q1 = sharp_radial_exponents(n)
    norm_report = {
        "proxy_m": proxy.m,
        "proxy_lambda": proxy.lam,
        "norms": dict(proxy.norms),
        "sup": proxy.profile.max_abs(),
        "sharp_exponents": {"q0": "inf" if is_inf(q0) else q0,
                            "q1": "inf" if is_inf(q1) else q1},
        "norm_trend": [
            {"m": pt.m, "lambda": pt.lam, "sup": pt.profile.max_abs(),
             "H1_grad": pt.norms["H1_grad"], "Lq_star": pt.norms["Lq_star"]}
            for pt in accepted[-4:]
        ],
    }
    weak = _weak_solution_check(proxy)
    return ExtremalEstimate(lambda_star=float(lambda_star),
                            uncertainty=float(uncertainty), regime=regime,
                            branch=branch, fold_point=fold_point,
                            u_star_proxy=proxy, norm_report=norm_report,
                            weak_solution=weak)
