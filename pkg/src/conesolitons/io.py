"""File formats: CSV (RFC 4180, ``%.12e``), JSON (UTF-8, sorted keys), OBJ meshes."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.12e"


def write_csv(path, header, columns):
    """Write equal-length numeric columns under ``header``; CRLF line endings."""
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    if len(cols) != len(header):
        raise ValueError("header and columns differ in length")
    n = cols[0].size if cols else 0
    if any(c.size != n for c in cols):
        raise ValueError("columns must have equal length")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([FLOAT_FMT % v for v in row])
    return path


def read_csv(path):
    """Inverse of :func:`write_csv`: ``(header, dict of arrays)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    return header, {name: data[:, i] for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(obj), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


def write_profile(path, p):
    return write_csv(path, ["rho", "h"], [p.grid, p.values])


def write_conformal(path, r, u):
    return write_csv(path, ["r", "u"], [r, u])


def write_trajectory(path, t):
    from .soliton import curvature_along, potential_along

    return write_csv(path, ["r", "h", "u", "K", "f"], [t.params, t.h, t.u, curvature_along(t), potential_along(t)])


def write_flow_slice(path, state, K):
    return write_csv(path, ["rho", "h", "K"], [state.grid, state.h, K])


def write_cusp_metric(path, m):
    return write_csv(path, ["r", "H", "F", "h", "f", "sec_xy", "sec_rx"], [m.r, m.H, m.F, m.h, m.f, m.sec_xy, m.sec_rx])


# ---------------------------------------------------------------------------
# OBJ
# ---------------------------------------------------------------------------


def revolution_mesh(h, z, segments=64, tip_tol=1e-12):
    """Vertices and faces of the surface swept by the meridian ``(h, z)``.

    Rings with ``h = 0`` collapse to one vertex on the axis; faces are wound
    counter-clockwise seen from outside (normals point away from the axis).
    Faces are 0-based index tuples.
    """
    h = np.asarray(h, dtype=float)
    z = np.asarray(z, dtype=float)
    if segments < 3:
        raise ValueError("need at least 3 angular segments")
    theta = 2.0 * math.pi * np.arange(segments) / segments
    c, s = np.cos(theta), np.sin(theta)
    verts = []
    rings = []
    for hi, zi in zip(h, z):
        if abs(hi) <= tip_tol:
            rings.append([len(verts)] * segments)
            verts.append((0.0, 0.0, zi))
        else:
            start = len(verts)
            verts.extend(zip(hi * c, hi * s, np.full(segments, zi)))
            rings.append(list(range(start, start + segments)))
    faces = []
    # Meridian runs with increasing z; (i, j) -> (i+1, j) -> (i+1, j+1) is CCW from outside.
    for i in range(len(rings) - 1):
        lo, hi_ = rings[i], rings[i + 1]
        for j in range(segments):
            jn = (j + 1) % segments
            quad = [lo[j], lo[jn], hi_[jn], hi_[j]]
            uniq = []
            for v in quad:
                if v not in uniq:
                    uniq.append(v)
            if len(uniq) >= 3:
                faces.append(tuple(uniq))
    return np.asarray(verts), faces


def write_obj(path, verts, faces, comment=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.extend(f"v {FLOAT_FMT % x} {FLOAT_FMT % y} {FLOAT_FMT % zz}" for x, y, zz in verts)
    lines.extend("f " + " ".join(str(i + 1) for i in f) for f in faces)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path
