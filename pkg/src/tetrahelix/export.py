"""Serialisation of chains: JSON documents, OBJ and PLY meshes, CSV root tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .assembly import Chain
from .axisfit import HelixAnalysis
from .geometry import face_indices
from .periodicity import BetaRoot, PeriodResult

SCHEMA = 1


@dataclass(frozen=True)
class ChainDocument:
    """A chain with the parameters that produced it and optional analyses.

    ``vertices`` is ``(4n, 3)``; tetrahedron ``k`` uses rows ``4k .. 4k+3``
    in label order, listed in ``tetrahedra``.
    """

    beta: float
    face_rule: object
    count: int
    vertices: np.ndarray
    tetrahedra: tuple[tuple[int, int, int, int], ...]
    period: PeriodResult | None = None
    analysis: HelixAnalysis | None = None

    def __post_init__(self):
        n = len(self.vertices)
        for quad in self.tetrahedra:
            if len(set(quad)) != 4 or not all(0 <= i < n for i in quad):
                raise ValueError(f"bad tetrahedron index quadruple {quad!r}")

    @classmethod
    def from_chain(cls, chain: Chain, beta: float, face_rule, period=None, analysis=None) -> "ChainDocument":
        n = len(chain)
        quads = tuple(tuple(range(4 * k, 4 * k + 4)) for k in range(n))
        return cls(float(beta), face_rule, n, chain.vertices().reshape(-1, 3), quads, period, analysis)

    def tetrahedron_vertices(self) -> np.ndarray:
        return self.vertices[np.array(self.tetrahedra)]

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA,
            "spec": {"beta": self.beta, "face_rule": self.face_rule, "count": self.count},
            "vertices": [[float(x) for x in v] for v in self.vertices],
            "tetrahedra": [list(q) for q in self.tetrahedra],
        }
        if self.period is not None and self.period.periodic:
            out["period"] = self.period.to_json()
        if self.analysis is not None:
            out["analysis"] = self.analysis.to_json()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ChainDocument":
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        period = None
        if "period" in d:
            p = d["period"]
            w = p["translation_w"]
            period = PeriodResult(p["least_period"], None if w is None else np.array(w), p["residual"], p["bound"])
        analysis = HelixAnalysis.from_json(d["analysis"]) if "analysis" in d else None
        spec = d["spec"]
        return cls(
            spec["beta"],
            spec["face_rule"],
            spec["count"],
            np.array(d["vertices"], dtype=float).reshape(-1, 3),
            tuple(tuple(q) for q in d["tetrahedra"]),
            period,
            analysis,
        )


def outward_faces(tet: np.ndarray, quad) -> list[tuple[int, int, int]]:
    """The four triangles of one tetrahedron, wound counter-clockwise seen from outside."""
    out = []
    for f in range(4):
        a, b, c = (quad[j] for j in face_indices(f))
        pa, pb, pc = (tet[j] for j in face_indices(f))
        normal = np.cross(pb - pa, pc - pa)
        if normal @ (pa - tet[f]) < 0:
            b, c = c, b
        out.append((a, b, c))
    return out


def mesh_faces(doc: ChainDocument) -> list[tuple[int, int, int]]:
    tets = doc.tetrahedron_vertices()
    faces = []
    for tet, quad in zip(tets, doc.tetrahedra):
        faces.extend(outward_faces(tet, quad))
    return faces


def to_obj(doc: ChainDocument) -> str:
    lines = [f"# tetrahelix chain, {doc.count} tetrahedra, beta={doc.beta!r}"]
    lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in doc.vertices.tolist()]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh_faces(doc)]
    return "\n".join(lines) + "\n"


def to_ply(doc: ChainDocument) -> bytes:
    faces = np.array(mesh_faces(doc), dtype="<i4")
    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        f"element vertex {len(doc.vertices)}\n"
        "property double x\nproperty double y\nproperty double z\n"
        f"element face {len(faces)}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    ).encode("ascii")
    rows = np.empty(len(faces), dtype=[("n", "u1"), ("idx", "<i4", (3,))])
    rows["n"] = 3
    rows["idx"] = faces
    return header + doc.vertices.astype("<f8").tobytes() + rows.tobytes()


def read_ply(data: bytes) -> tuple[np.ndarray, np.ndarray]:
    """Parse what :func:`to_ply` writes; returns ``(vertices, faces)``."""
    end = data.index(b"end_header\n") + len(b"end_header\n")
    header = data[:end].decode("ascii").splitlines()
    counts = {ln.split()[1]: int(ln.split()[2]) for ln in header if ln.startswith("element")}
    nv, nf = counts["vertex"], counts["face"]
    verts = np.frombuffer(data, dtype="<f8", count=3 * nv, offset=end).reshape(nv, 3)
    rows = np.frombuffer(data, dtype=[("n", "u1"), ("idx", "<i4", (3,))], count=nf, offset=end + 24 * nv)
    return verts, rows["idx"].copy()


def roots_to_csv(roots: list[BetaRoot]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "beta", "residual", "exact_form"])
    for r in roots:
        writer.writerow([r.period_m, repr(float(r.beta)), repr(float(r.residual_at_root)), r.exact_form or ""])
    return buf.getvalue()


def roots_to_json(roots: list[BetaRoot]) -> str:
    rows = [
        {"m": r.period_m, "beta": float(r.beta), "residual": float(r.residual_at_root), "exact_form": r.exact_form}
        for r in roots
    ]
    return json.dumps({"schema": SCHEMA, "roots": rows}, indent=2) + "\n"
