"""Face frames and the two face-anchored transforms every helix step uses.

A step appends a tetrahedron to face ``f`` of ``T`` in two moves: the mirror
image of ``T`` across the face plane (``apply_A``), followed by a rotation by
``beta`` about the outward face normal through the face center (``apply_B``).
Faces are indexed by the vertex they do not contain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DegenerateFace

PHI = (1.0 + math.sqrt(5.0)) / 2.0
# cos(beta) = (3 phi - 1) / 4 = (1 + 3 sqrt 5) / 8
GOLDEN_BETA = math.acos((3.0 * PHI - 1.0) / 4.0)

EDGE_TOL = 1e-9
_AREA_TOL = 1e-12


def _as_points(a, n):
    arr = np.array(a, dtype=float)
    if arr.shape != (n, 3):
        raise ValueError(f"expected shape ({n}, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coordinates must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Tetrahedron:
    """Regular unit-edge tetrahedron with labelled vertices v0..v3."""

    vertices: np.ndarray

    def __post_init__(self):
        v = _as_points(self.vertices, 4)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        err = np.abs(self.edge_lengths() - 1.0).max()
        if err > EDGE_TOL:
            raise ValueError(f"edge lengths deviate from 1 by {err:.3e}")

    def edge_lengths(self) -> np.ndarray:
        v = self.vertices
        i, j = np.triu_indices(4, k=1)
        return np.linalg.norm(v[i] - v[j], axis=1)

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def face_vertices(self, f: int) -> np.ndarray:
        return self.vertices[face_indices(f)]

    def translated(self, w) -> "Tetrahedron":
        return Tetrahedron(self.vertices + np.asarray(w, dtype=float))

    def transformed(self, rotation, pivot) -> "Tetrahedron":
        """Image under ``v -> rotation @ (v - pivot)``."""
        return Tetrahedron((self.vertices - pivot) @ np.asarray(rotation).T)

    def allclose(self, other: "Tetrahedron", atol: float = 1e-12) -> bool:
        return bool(np.abs(self.vertices - other.vertices).max() <= atol)

    def __repr__(self):
        return f"Tetrahedron({self.vertices.tolist()!r})"


@dataclass(frozen=True)
class FaceFrame:
    center: np.ndarray
    outward_normal: np.ndarray


def face_indices(f: int) -> list[int]:
    if f not in (0, 1, 2, 3):
        raise ValueError(f"face index must be 0..3, got {f!r}")
    return [j for j in range(4) if j != f]


def reference_tetrahedron() -> Tetrahedron:
    """Seed tetrahedron centred at the origin with face 0 horizontal below v0."""
    s3, s6 = math.sqrt(3.0), math.sqrt(6.0)
    base = -1.0 / (2.0 * s6)
    return Tetrahedron(
        [
            (0.0, 0.0, math.sqrt(2.0 / 3.0) + base),
            (-1.0 / (2.0 * s3), -0.5, base),
            (-1.0 / (2.0 * s3), 0.5, base),
            (1.0 / s3, 0.0, base),
        ]
    )


def face_frame(t: Tetrahedron, f: int) -> FaceFrame:
    """Center and outward unit normal of face ``f`` (opposite vertex ``f``)."""
    a, b, c = t.face_vertices(f)
    center = (a + b + c) / 3.0
    n = np.cross(b - a, c - a)
    norm = np.linalg.norm(n)
    if 0.5 * norm < _AREA_TOL:
        raise DegenerateFace(f"face {f} has area {0.5 * norm:.3e}")
    n = n / norm
    if np.dot(n, center - t.vertices[f]) < 0.0:
        n = -n
    return FaceFrame(center, n)


def reflection_across_face(t: Tetrahedron, f: int) -> np.ndarray:
    n = face_frame(t, f).outward_normal
    return np.eye(3) - 2.0 * np.outer(n, n)


def rotation_about_normal(frame: FaceFrame, beta: float) -> np.ndarray:
    """Right-handed rotation by ``beta`` about the frame's outward normal."""
    n = np.asarray(frame.outward_normal, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("face normal must be a unit vector")
    return Rotation.from_rotvec(beta * n).as_matrix()


def apply_A(t: Tetrahedron, f: int) -> Tetrahedron:
    """Mirror ``t`` across the plane of face ``f``; labels are kept."""
    frame = face_frame(t, f)
    m = reflection_across_face(t, f)
    v = (t.vertices - frame.center) @ m.T + frame.center
    # the face vertices are fixed points of the mirror; keep them bit-exact
    idx = face_indices(f)
    v[idx] = t.vertices[idx]
    return Tetrahedron(v)


def apply_B(t_prime: Tetrahedron, frame: FaceFrame, beta: float) -> Tetrahedron:
    """Rotate ``t_prime`` by ``beta`` about the axis of ``frame``."""
    r = rotation_about_normal(frame, beta)
    return Tetrahedron((t_prime.vertices - frame.center) @ r.T + frame.center)


def step(t: Tetrahedron, f: int, beta: float) -> Tetrahedron:
    """One append: ``apply_B(apply_A(t, f), face_frame(t, f), beta)``."""
    return apply_B(apply_A(t, f), face_frame(t, f), beta)


def contact(a: Tetrahedron, b: Tetrahedron) -> tuple[int, int, float]:
    """Best face pairing between ``a`` and ``b``.

    Two tetrahedra glued by a step share a face plane: the face centers
    coincide and the outward normals are opposite. Returns ``(fa, fb,
    residual)`` where residual is the larger of the two mismatches.
    """
    best = (-1, -1, math.inf)
    frames_b = [face_frame(b, g) for g in range(4)]
    for f in range(4):
        fa = face_frame(a, f)
        for g, fb in enumerate(frames_b):
            r = max(
                np.linalg.norm(fa.center - fb.center),
                np.linalg.norm(fa.outward_normal + fb.outward_normal),
            )
            if r < best[2]:
                best = (f, g, float(r))
    return best
