"""Command-line front end: batch verification, scans, branch sweeps, reports.

Subcommands: verify, scan, counterexample, chain, gelfand, constants.
Outputs land in --out as CSV/JSON (12 significant digits, byte-stable across
runs with the same config and seed) plus static SVG plots.  CURVLAB_THREADS
caps the fan-out over independent cases; results are assembled in a fixed
order regardless of the worker count.

Exit codes: 0 when every non-indeterminate verdict passes, 1 when any hard
failure (or a requested regime classified as failing) occurs, 2 for malformed
inputs or out-of-bounds resolutions.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "curvlab"
import matplotlib.pyplot as plt  # noqa: E402

from . import io as cio  # noqa: E402
from .checks import (morrey_check, sobolev_check, subcritical_check,  # noqa: E402
                     trudinger_check)
from .constants import IsoperimetricConstants, constants as constant_bundle  # noqa: E402
from .counterexample import counterexample_report  # noqa: E402
from .errors import CurvlabError, InconclusiveBranch  # noqa: E402
from .exponents import (INF, ExponentRegime, InequalityParams,  # noqa: E402
                        RegimeVerdict, as_exponent, critical_exponent, is_inf,
                        regime_classify)
from .gelfand import extremal_estimate, nonlinearity_from_spec  # noqa: E402
from .geometry import ScalarField, radial_field  # noqa: E402
from .levelsets import default_t_grid, verify_key_chain  # noqa: E402
from .radial import builtin_profile_suite, sharpness_scan  # noqa: E402

MAX_RADIAL_NODES = 2 ** 20
MAX_GRID = {2: 512, 3: 128}


@dataclass
class RunConfig:
    command: str
    out: str = "curvlab_out"
    seed: int | None = None
    res: int | None = None
    iso_mode: str = "sphere_equality"
    c3_margin: float = 2.0
    tol: dict = field(default_factory=dict)

    def outdir(self) -> str:
        os.makedirs(self.out, exist_ok=True)
        return self.out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CURVLAB_THREADS", "1")))
    except ValueError:
        return 1


def _fanout(func, items):
    """Apply func over items, optionally threaded; order is preserved."""
    workers = _threads()
    if workers == 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _iso_for(mode: str, n: int) -> IsoperimetricConstants:
    if mode == "sphere_equality":
        return IsoperimetricConstants.sphere_equality(n)
    if mode.startswith("user:"):
        return IsoperimetricConstants.user(n, float(mode[5:]))
    raise ValueError(f"unknown iso mode {mode!r}")


def _params_from(args, need_q=False) -> InequalityParams:
    q = None
    if getattr(args, "q", None) is not None:
        q = as_exponent(args.q)
    elif need_q:
        raise ValueError("this command needs --q")
    return InequalityParams(n=args.n, p=args.p, r=args.r, q=q,
                            explore=getattr(args, "explore", False))


def _check_radial_res(nodes: int):
    if not (16 <= nodes <= MAX_RADIAL_NODES):
        raise ValueError(f"radial resolution {nodes} outside [16, {MAX_RADIAL_NODES}]")


def _check_grid_res(n: int, shape: int):
    if not (32 <= shape <= MAX_GRID[n]):
        raise ValueError(f"grid resolution {shape} outside [32, {MAX_GRID[n]}] for n={n}")


def _exit_code(verdicts) -> int:
    hard_fail = any(v.get("pass") is False for v in verdicts)
    return 1 if hard_fail else 0


def _verdict_rows(verdicts):
    head = "case,check,regime,lhs,rhs,ratio,pass\n"
    rows = []
    for v in verdicts:
        rows.append(",".join([
            str(v.get("case", "")), v.get("check", ""), v.get("regime", ""),
            cio._fmt(v.get("lhs")), cio._fmt(v.get("rhs")),
            cio._fmt(v.get("ratio")),
            {True: "1", False: "0", None: "indeterminate"}[v.get("pass")],
        ]) + "\n")
    return head + "".join(rows)


def cmd_verify(args) -> int:
    cfg = RunConfig("verify", out=args.out, seed=args.seed, res=args.res,
                    iso_mode=args.iso_mode, c3_margin=args.c3_margin)
    params = _params_from(args)
    iso = _iso_for(cfg.iso_mode, params.n)
    nodes = cfg.res or 2049
    _check_radial_res(nodes)

    report = {"params": {"n": params.n, "p": params.p, "r": params.r,
                         "q": "inf" if is_inf(params.q) else params.q},
              "iso_mode": cfg.iso_mode, "verdicts": []}
    exit_code = 0

    if params.q is not None:
        regime = regime_classify(params)
        report["regime_classification"] = regime.value
        if regime is RegimeVerdict.FAILS:
            exit_code = 1

    crit = critical_exponent(params)
    if args.regime is not None:
        actual = {ExponentRegime.SUPERCRITICAL_MORREY: "a",
                  ExponentRegime.SOBOLEV: "b",
                  ExponentRegime.CRITICAL: "c"}[crit.regime]
        report["regime"] = actual
        if actual != args.regime:
            report["regime_mismatch"] = f"expected {args.regime}, classified {actual}"
            exit_code = 1

    cases = []
    if args.builtin_suite:
        for name, prof in builtin_profile_suite(params.n, nodes=nodes, seed=cfg.seed):
            cases.append((name, prof))
    if args.profile:
        cases.append((os.path.basename(args.profile), cio.load_profile(args.profile)))
    if args.field:
        cases.append((os.path.basename(args.field), cio.load_field(args.field)))
    if not cases:
        print("verify: no inputs (use --builtin-suite, --profile, or --field)",
              file=sys.stderr)
        return 2

    slack = args.tol_slack

    def run_case(item):
        name, v = item
        entries = []
        try:
            if crit.regime is ExponentRegime.SOBOLEV:
                entries.append((name, sobolev_check(v, params, iso, slack=slack)))
                if params.q is not None and not is_inf(params.q) \
                        and params.p > 1 and params.q < crit.value:
                    entries.append((name, subcritical_check(v, params, iso,
                                                            slack=slack)))
            elif crit.regime is ExponentRegime.CRITICAL and params.p > 1:
                entries.append((name, trudinger_check(v, params, iso,
                                                      c3_margin=cfg.c3_margin,
                                                      slack=slack)))
            else:
                entries.append((name, morrey_check(v, params, iso, slack=slack)))
        except CurvlabError as exc:
            return [{"case": name, "check": "error", "regime": exc.code,
                     "pass": None, "error": str(exc)}]
        out = []
        for cname, verdict in entries:
            d = verdict.to_dict()
            d["case"] = cname
            out.append(d)
        return out

    for chunk in _fanout(run_case, cases):
        report["verdicts"].extend(chunk)

    code = max(exit_code, _exit_code(report["verdicts"]))
    outdir = cfg.outdir()
    cio.write_json(report, os.path.join(outdir, "verdicts.json"))
    with open(os.path.join(outdir, "verdicts.csv"), "w") as fh:
        fh.write(_verdict_rows(report["verdicts"]))
    print(f"verify: {len(report['verdicts'])} verdicts -> {outdir} (exit {code})")
    return code


def cmd_scan(args) -> int:
    cfg = RunConfig("scan", out=args.out, res=args.res)
    params = _params_from(args, need_q=True)
    nodes = cfg.res or 1025
    _check_radial_res(nodes)
    quotients = sharpness_scan(args.family, params, args.kmax, nodes=nodes)
    regime = regime_classify(params)
    outdir = cfg.outdir()
    with open(os.path.join(outdir, "scan.csv"), "w") as fh:
        fh.write("k,scale,quotient\n")
        for k, q in enumerate(quotients, start=1):
            fh.write(f"{k},{cio._fmt(2.0 ** (k - 1))},{cio._fmt(q)}\n")
    cio.write_json({"family": args.family, "regime": regime.value,
                    "quotients": [float(q) for q in quotients]},
                   os.path.join(outdir, "scan.json"))
    scales = 2.0 ** np.arange(len(quotients))
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(scales, quotients, "o-")
    ax.set_xlabel("dilation scale")
    ax.set_ylabel("norm/energy quotient")
    ax.set_title(f"{args.family} scan, regime {regime.value}")
    fig.savefig(os.path.join(outdir, "scan.svg"), metadata={"Date": None})
    plt.close(fig)
    print(f"scan: regime {regime.value}, quotient range "
          f"[{quotients.min():.4g}, {quotients.max():.4g}] -> {outdir}")
    return 0


def cmd_counterexample(args) -> int:
    cfg = RunConfig("counterexample", out=args.out, res=args.res)
    shape = cfg.res or 256
    _check_grid_res(2, shape)
    eps_list = [float(x) for x in args.eps0_list.split(",")]
    rep = counterexample_report(args.p, args.r, eps_list,
                                field_params={"n": 2, "shape": shape})
    outdir = cfg.outdir()
    cio.write_json(rep.to_dict(), os.path.join(outdir, "counterexample.json"))
    with open(os.path.join(outdir, "counterexample.csv"), "w") as fh:
        fh.write("eps0,energy,lq_norm,ratio,nonconvergent\n")
        for row in rep.rows:
            fh.write(f"{cio._fmt(row.eps0)},{cio._fmt(row.energy)},"
                     f"{cio._fmt(row.lq_norm)},{cio._fmt(row.ratio)},"
                     f"{int(row.nonconvergent)}\n")
    good = [row for row in rep.rows if not row.nonconvergent]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog([r.eps0 for r in rep.rows], [r.energy for r in rep.rows], "o",
              label="energy")
    if len(good) >= 2 and np.isfinite(rep.slope):
        e = np.array([r.eps0 for r in good])
        anchor = good[0]
        ax.loglog(e, anchor.energy * (e / anchor.eps0) ** rep.slope, "-",
                  label=f"fit slope {rep.slope:.3f}")
    ax.set_xlabel("eps0")
    ax.set_ylabel("curvature energy")
    ax.legend()
    ax.set_title(f"p={args.p:g}, r={args.r:g}: {rep.verdict}")
    fig.savefig(os.path.join(outdir, "counterexample.svg"), metadata={"Date": None})
    plt.close(fig)
    print(f"counterexample: verdict {rep.verdict}, slope {rep.slope:.4g} "
          f"(theory {rep.theoretical_slope:.4g}) -> {outdir}")
    return 0 if rep.verdict != "INCONCLUSIVE" else 1


_BUILTIN_FIELDS = {
    "builtin:ball": lambda shape: radial_field(
        lambda r: np.clip(1.0 - r, 0.0, None), n=2, shape=shape),
    "builtin:ellipse": lambda shape: ScalarField.from_function(
        lambda x, y: np.clip(1.0 - np.sqrt(x * x + 4.0 * y * y), 0.0, None),
        n=2, shape=shape, lo=-1.3, hi=1.3),
}


def cmd_chain(args) -> int:
    cfg = RunConfig("chain", out=args.out, res=args.res)
    shape = cfg.res or 256
    if args.field in _BUILTIN_FIELDS:
        _check_grid_res(2, shape)
        fld = _BUILTIN_FIELDS[args.field](shape)
        starshaped = True
    else:
        fld = cio.load_field(args.field)
        starshaped = False
    iso = _iso_for(args.iso_mode, fld.n)
    stats = verify_key_chain(fld, args.r, default_t_grid(fld, args.levels), iso)
    outdir = cfg.outdir()
    cio.write_stats_csv(stats, os.path.join(outdir, "chain.csv"))
    ok = [s for s in stats if s.ok]
    summary = {
        "field": args.field,
        "r": args.r,
        "levels_extracted": len(ok),
        "levels_total": len(stats),
        "caveats": iso.caveats(),
        "starshaped_assertion": starshaped,
    }
    code = 0
    if ok:
        tol = args.tol_chain
        ms = np.array([s.ratio_ms for s in ok])
        ch = np.array([s.ratio_chain for s in ok])
        tal = np.array([s.ratio_talenti for s in ok])
        summary.update(ratio_ms_max=float(ms.max()), ratio_chain_max=float(ch.max()),
                       ratio_talenti_max=float(tal.max()),
                       frac_ms_ok=float(np.mean(ms <= 1.0 + tol)),
                       frac_chain_ok=float(np.mean(ch <= 1.0 + tol)),
                       frac_talenti_ok=float(np.mean(tal <= 1.0 + tol * 2 / 3)))
        if starshaped:
            passed = (summary["frac_ms_ok"] >= 0.95
                      and summary["frac_chain_ok"] >= 0.95
                      and summary["frac_talenti_ok"] >= 0.95)
            summary["pass"] = passed
            code = 0 if passed else 1
        fig, ax = plt.subplots(figsize=(5, 4))
        ts = [s.t for s in ok]
        ax.plot(ts, ms, label="ratio_ms")
        ax.plot(ts, ch, "--", label="ratio_chain")
        ax.plot(ts, tal, ":", label="ratio_talenti")
        ax.axhline(1.0, color="k", lw=0.5)
        ax.set_xlabel("level t")
        ax.set_ylabel("ratio")
        ax.legend()
        fig.savefig(os.path.join(outdir, "chain.svg"), metadata={"Date": None})
        plt.close(fig)
    cio.write_json(summary, os.path.join(outdir, "chain.json"))
    print(f"chain: {len(ok)}/{len(stats)} levels -> {outdir} (exit {code})")
    return code


def cmd_gelfand(args) -> int:
    cfg = RunConfig("gelfand", out=args.out, res=args.nodes)
    nodes = cfg.res or 2048
    _check_radial_res(nodes)
    nl = nonlinearity_from_spec(args.f)
    try:
        est = extremal_estimate(args.n, nl, m_max=args.m_max, points=args.points,
                                nodes=nodes)
    except InconclusiveBranch as exc:
        print(f"gelfand: {exc.code}: {exc}", file=sys.stderr)
        return 1
    outdir = cfg.outdir()
    cio.write_branch_csv(est.branch, os.path.join(outdir, "branch.csv"))
    summary = {
        "n": args.n,
        "nonlinearity": nl.name,
        "lambda_star": est.lambda_star,
        "uncertainty": est.uncertainty,
        "regime_flags": [est.regime],
        "u_star_proxy": est.norm_report,
        "weak_solution": est.weak_solution,
    }
    cio.write_json(summary, os.path.join(outdir, "gelfand.json"))
    ms = [pt.m for pt in est.branch]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.semilogx(ms, [pt.lam for pt in est.branch], "o-")
    ax1.axhline(est.lambda_star, color="r", lw=0.7)
    ax1.set_xlabel("m = u(0)")
    ax1.set_ylabel("lambda")
    ax2.semilogx(ms, [pt.mu1 for pt in est.branch], "o-")
    ax2.axhline(0.0, color="k", lw=0.5)
    ax2.set_xlabel("m = u(0)")
    ax2.set_ylabel("mu1")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "gelfand.svg"), metadata={"Date": None})
    plt.close(fig)
    print(f"gelfand: n={args.n} f={nl.name} lambda*={est.lambda_star:.6g} "
          f"+- {est.uncertainty:.2g} ({est.regime}) -> {outdir}")
    return 0


def cmd_constants(args) -> int:
    cfg = RunConfig("constants", out=args.out, c3_margin=args.c3_margin,
                    iso_mode=args.iso_mode)
    params = _params_from(args)
    iso = _iso_for(cfg.iso_mode, params.n)
    try:
        bundle = constant_bundle(params, iso, c3_margin=cfg.c3_margin)
    except CurvlabError as exc:
        print(f"constants: {exc.code}: {exc}", file=sys.stderr)
        return 1
    payload = bundle.to_dict()
    payload["caveats"] = list(bundle.caveats)
    if params.q is not None and bundle.subcritical_C is not None \
            and not is_inf(params.q):
        crit = critical_exponent(params)
        if params.q < crit.value:
            payload["subcritical_C"] = bundle.subcritical_C(float(params.q))
    outdir = cfg.outdir()
    cio.write_json(payload, os.path.join(outdir, "constants.json"))
    for key in sorted(payload):
        print(f"{key} = {payload[key]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvlab",
        description="curvature-weighted inequality laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, q_flag=True):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--p", type=float, default=2.0)
        p.add_argument("--r", type=float, default=1.0)
        if q_flag:
            p.add_argument("--q", type=str, default=None,
                           help="target exponent (number or 'inf')")
        p.add_argument("--explore", action="store_true",
                       help="admit r in (0,1) without validity claims")
        p.add_argument("--iso-mode", default="sphere_equality",
                       help="sphere_equality or user:<A2 value>")
        p.add_argument("--out", default="curvlab_out")
        p.add_argument("--seed", type=int, default=None)

    pv = sub.add_parser("verify", help="run inequality verdicts")
    common(pv)
    pv.add_argument("--regime", choices=("a", "b", "c"), default=None)
    pv.add_argument("--builtin-suite", action="store_true")
    pv.add_argument("--profile", default=None, help="profile CSV path")
    pv.add_argument("--field", default=None, help="field JSON path")
    pv.add_argument("--c3-margin", type=float, default=2.0)
    pv.add_argument("--res", type=int, default=None, help="radial nodes")
    pv.add_argument("--tol-slack", type=float, default=None,
                    help="override the discretization slack of every verdict")
    pv.set_defaults(func=cmd_verify)

    ps = sub.add_parser("scan", help="sharpness scan along a dilation ladder")
    common(ps)
    ps.add_argument("--family", default="PEAK",
                    choices=("PEAK", "PLATEAU", "MOLLIFIED_POWER"))
    ps.add_argument("--kmax", type=int, default=16)
    ps.add_argument("--res", type=int, default=None)
    ps.set_defaults(func=cmd_scan)

    pc = sub.add_parser("counterexample", help="cube-collar failure scan")
    pc.add_argument("--p", type=float, required=True)
    pc.add_argument("--r", type=float, required=True)
    pc.add_argument("--eps0-list", default="0.2,0.1,0.05,0.025,0.0125")
    pc.add_argument("--res", type=int, default=None, help="grid per axis")
    pc.add_argument("--out", default="curvlab_out")
    pc.set_defaults(func=cmd_counterexample)

    pch = sub.add_parser("chain", help="level-set chain verification")
    pch.add_argument("--field", default="builtin:ball",
                     help="builtin:ball, builtin:ellipse, or a field JSON path")
    pch.add_argument("--r", type=float, default=1.0)
    pch.add_argument("--levels", type=int, default=64)
    pch.add_argument("--res", type=int, default=None)
    pch.add_argument("--iso-mode", default="sphere_equality")
    pch.add_argument("--out", default="curvlab_out")
    pch.add_argument("--tol-chain", type=float, default=0.03,
                     help="slack on the chain ratios for the pass fractions")
    pch.set_defaults(func=cmd_chain)

    pg = sub.add_parser("gelfand", help="radial branch sweep")
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--f", default="exp",
                    help="exp, pow(1+u,M), or an expression in u")
    pg.add_argument("--m-max", type=float, default=20.0)
    pg.add_argument("--points", type=int, default=48)
    pg.add_argument("--nodes", type=int, default=2048)
    pg.add_argument("--out", default="curvlab_out")
    pg.set_defaults(func=cmd_gelfand)

    pk = sub.add_parser("constants", help="explicit constant bundle")
    common(pk)
    pk.add_argument("--c3-margin", type=float, default=2.0)
    pk.set_defaults(func=cmd_constants)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"curvlab: {exc}", file=sys.stderr)
        return 2
    except CurvlabError as exc:
        print(f"curvlab: {exc.code}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
