"""Serialization: profile CSV, JSON run reports and OBJ surfaces of revolution.

All floats are written with 17 significant digits so files round-trip
exactly and repeated runs are byte-identical.
"""
from __future__ import annotations

import json
import math

import numpy as np

from . import geometry

SCHEMA_VERSION = 1
SHOT_COLUMNS = ("s", "x", "r", "theta", "kappa", "H", "support", "residual")
FLOAT_FMT = "%.17g"


def _fmt_rows(columns):
    # + 0.0 turns -0.0 into 0.0 so mirrored axis points print identically
    data = np.column_stack([np.asarray(c, dtype=float) + 0.0 for c in columns])
    return "".join(",".join(FLOAT_FMT % v for v in row) + "\n" for row in data)


def shot_table(curve):
    kappa, H, support, residual = geometry.curve_geometry(curve)
    return [curve.s, curve.x, curve.r, curve.theta, kappa, H, support, residual]


def write_shot_csv(path, curve):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(SHOT_COLUMNS) + "\n")
        fh.write(_fmt_rows(shot_table(curve)))


def read_csv(path):
    """Header plus float columns keyed by name."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_profile_csv(path, points):
    """Closed profile as ``x,r`` rows; the first row is repeated at the end."""
    pts = np.asarray(points, dtype=float) + 0.0
    if not np.array_equal(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[:1]])
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("x,r\n")
        fh.write(_fmt_rows([pts[:, 0], pts[:, 1]]))


def read_profile_csv(path):
    cols = read_csv(path)
    if "x" not in cols or "r" not in cols:
        raise ValueError(f"{path}: expected x,r columns")
    return np.column_stack([cols["x"], cols["r"]])


def _check_finite(obj, where="report"):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite value at {where}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{where}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_finite(v, f"{where}[{i}]")


def dumps_report(report):
    _check_finite(report)
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def write_report(path, report):
    text = dumps_report(report)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def read_report(path):
    with open(path, encoding="utf-8") as fh:
        report = json.load(fh)
    if report.get("schema_version", 0) > SCHEMA_VERSION:
        raise ValueError(f"report schema {report['schema_version']} is newer than {SCHEMA_VERSION}")
    return report


# ---------------------------------------------------------------- meshes

class Mesh:
    """Triangle mesh with 0-based faces."""

    def __init__(self, vertices, faces):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = np.asarray(faces, dtype=np.int64)

    def edges(self):
        f = self.faces
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        return np.sort(e, axis=1)

    def euler_characteristic(self):
        n_edges = len(np.unique(self.edges(), axis=0))
        return len(self.vertices) - n_edges + len(self.faces)

    def is_watertight(self):
        """Every edge is shared by exactly two faces, used once in each direction."""
        f = self.faces
        directed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        _, counts = np.unique(np.sort(directed, axis=1), axis=0, return_counts=True)
        if not np.all(counts == 2):
            return False
        _, dcounts = np.unique(directed, axis=0, return_counts=True)
        return bool(np.all(dcounts == 1))

    def signed_volume(self):
        v = self.vertices[self.faces]
        return float(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum() / 6.0)


def revolve(points, segments):
    """Revolve an (x, r) polyline about the x-axis into a triangle mesh.

    A closed polyline (first point repeated at the end) gives a torus.
    Endpoints with r = 0 collapse to single pole vertices. Faces are wound
    so their normals follow N = (-r', x' a).
    """
    pts = np.asarray(points, dtype=float)
    m = int(segments)
    if m < 3:
        raise ValueError("need at least 3 angular segments")
    closed = len(pts) > 2 and np.array_equal(pts[0], pts[-1])
    if closed:
        pts = pts[:-1]
    if np.any(pts[:, 1] < 0):
        raise ValueError("profile must lie in r >= 0")
    phi = 2 * math.pi * np.arange(m) / m
    c, s = np.cos(phi), np.sin(phi)

    verts = []
    ring = []  # per profile point: list of m vertex ids (repeated for a pole)
    for x, r in pts:
        if r == 0.0:
            if closed:
                raise ValueError("closed profile touches the axis of revolution")
            ring.append([len(verts)] * m)
            verts.append((x, 0.0, 0.0))
        else:
            base = len(verts)
            ring.append(list(range(base, base + m)))
            verts.extend(zip(np.full(m, x), r * c, r * s))
    rows = len(pts) if closed else len(pts) - 1

    faces = []
    for i in range(rows):
        a = ring[i]
        b = ring[(i + 1) % len(pts)]
        for j in range(m):
            k = (j + 1) % m
            t1 = (a[j], a[k], b[k])
            t2 = (a[j], b[k], b[j])
            for t in (t1, t2):
                if len(set(t)) == 3:
                    faces.append(t)
    return Mesh(np.array(verts), np.array(faces))


def write_obj(path, mesh):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("".join("v %s %s %s\n" % tuple(FLOAT_FMT % (c + 0.0) for c in v) for v in mesh.vertices))
        fh.write("".join("f %d %d %d\n" % tuple(f + 1) for f in mesh.faces))


def read_obj(path):
    verts, faces = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(v) for v in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
    return Mesh(np.array(verts), np.array(faces))
