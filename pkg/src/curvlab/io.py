"""File formats: profiles, fields, level-set stats, branch tables.

Formats are fixed by contract:
  * RadialProfile: CSV with header "rho,v" plus a JSON sidecar {"n", "R"}
    at the same path with a .json extension.
  * ScalarField: JSON header {n, shape, h, origin, dtype} plus a companion
    .bin with the row-major little-endian float64 samples; a pure-CSV debug
    form (i,j,value) exists for 2-d fields.
  * Stats CSV columns: t,V,P,curv_int,ratio_talenti,ratio_ms,ratio_chain.
  * Branch CSV columns: m,lambda,mu1,L1,L2,H1_grad,Lqstar,J,residual.

All floats are written with 12 significant digits so identical runs yield
byte-identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .geometry import ScalarField
from .radial import RadialProfile


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if x != x:
        return "nan"
    return f"{x:.12g}"


def _sidecar(path: str) -> str:
    base, _ = os.path.splitext(path)
    return base + ".json"


def save_profile(profile: RadialProfile, csv_path: str):
    with open(csv_path, "w") as fh:
        fh.write("rho,v\n")
        for rho, v in zip(profile.rho, profile.v):
            fh.write(f"{_fmt(rho)},{_fmt(v)}\n")
    with open(_sidecar(csv_path), "w") as fh:
        json.dump({"n": profile.n, "R": profile.R}, fh, sort_keys=True)
        fh.write("\n")


def load_profile(csv_path: str) -> RadialProfile:
    with open(_sidecar(csv_path)) as fh:
        meta = json.load(fh)
    data = np.atleast_2d(np.loadtxt(csv_path, delimiter=",", skiprows=1))
    if data.shape[1] != 2:
        raise ValueError(f"{csv_path}: expected two columns rho,v")
    return RadialProfile(n=int(meta["n"]), rho=data[:, 0], v=data[:, 1],
                         R=float(meta["R"]))


def save_field(field: ScalarField, json_path: str):
    base, _ = os.path.splitext(json_path)
    bin_path = base + ".bin"
    header = {
        "n": field.n,
        "shape": list(field.shape),
        "h": field.h,
        "origin": list(field.origin),
        "dtype": "<f8",
        "data": os.path.basename(bin_path),
    }
    with open(json_path, "w") as fh:
        json.dump(header, fh, sort_keys=True)
        fh.write("\n")
    field.values.astype("<f8").tofile(bin_path)


def load_field(json_path: str) -> ScalarField:
    with open(json_path) as fh:
        header = json.load(fh)
    bin_path = os.path.join(os.path.dirname(json_path) or ".", header["data"])
    values = np.fromfile(bin_path, dtype="<f8").reshape(header["shape"])
    return ScalarField(n=int(header["n"]), shape=tuple(header["shape"]),
                       h=float(header["h"]), origin=tuple(header["origin"]),
                       values=values)


def save_field_csv_2d(field: ScalarField, csv_path: str):
    """Pure-CSV debug format for 2-d fields (header row carries the geometry)."""
    if field.n != 2:
        raise ValueError("the CSV debug format is 2-d only")
    with open(csv_path, "w") as fh:
        fh.write(f"# n=2 shape={field.shape[0]}x{field.shape[1]} "
                 f"h={_fmt(field.h)} origin={_fmt(field.origin[0])},{_fmt(field.origin[1])}\n")
        fh.write("i,j,value\n")
        for i in range(field.shape[0]):
            row = field.values[i]
            for j in range(field.shape[1]):
                fh.write(f"{i},{j},{_fmt(row[j])}\n")


def write_stats_csv(stats, path: str):
    with open(path, "w") as fh:
        fh.write("t,V,P,curv_int,ratio_talenti,ratio_ms,ratio_chain\n")
        for s in stats:
            fh.write(",".join(_fmt(x) for x in
                              (s.t, s.V, s.P, s.curv_int, s.ratio_talenti,
                               s.ratio_ms, s.ratio_chain)) + "\n")


def write_branch_csv(points, path: str):
    with open(path, "w") as fh:
        fh.write("m,lambda,mu1,L1,L2,H1_grad,Lqstar,J,residual\n")
        for pt in points:
            fh.write(",".join(_fmt(x) for x in
                              (pt.m, pt.lam, pt.mu1, pt.norms["L1"],
                               pt.norms["L2"], pt.norms["H1_grad"],
                               pt.norms["Lq_star"], pt.norms["J"],
                               pt.residual)) + "\n")


def write_json(obj, path: str):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")
