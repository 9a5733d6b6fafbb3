"""Building chains of tetrahedra: canonical BC helix and modified (m-BC) helices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DegenerateConfiguration, SeamMismatch, SelfCoincidence
from .geometry import EDGE_TOL, Tetrahedron, contact, reference_tetrahedron, step

RIGHT = "right"
LEFT = "left"
EXPLICIT = "explicit"

_RIGHT_CYCLE = (0, 3, 1, 2)
_LEFT_CYCLE = (0, 3, 2, 1)


@dataclass(frozen=True)
class CanonicalHelixParams:
    """Parameters of the canonical BC helix point sequence.

    Point ``n`` is ``(r cos(n theta), +-r sin(n theta), n h)`` with the sign
    chosen by ``chirality``; every four consecutive points form a regular
    tetrahedron of edge ``edge``.
    """

    edge: float = 1.0
    chirality: str = RIGHT

    def __post_init__(self):
        if self.edge <= 0:
            raise ValueError("edge length must be positive")
        if self.chirality not in (RIGHT, LEFT):
            raise ValueError(f"chirality must be 'right' or 'left', got {self.chirality!r}")

    @property
    def radius(self) -> float:
        return 3.0 * self.edge * math.sqrt(3.0) / 10.0

    @property
    def theta(self) -> float:
        return math.acos(-2.0 / 3.0)

    @property
    def rise(self) -> float:
        return self.edge / math.sqrt(10.0)


def canonical_points(params: CanonicalHelixParams, start: int, stop: int) -> np.ndarray:
    """Points ``s_n`` for ``start <= n < stop`` as an ``(n, 3)`` array."""
    if stop <= start:
        raise ValueError("empty index range")
    n = np.arange(start, stop, dtype=float)
    sign = 1.0 if params.chirality == RIGHT else -1.0
    return np.column_stack(
        [
            params.radius * np.cos(n * params.theta),
            sign * params.radius * np.sin(n * params.theta),
            n * params.rise,
        ]
    )


def canonical_tetrahedra(params: CanonicalHelixParams, count: int, start: int = 0) -> list[Tetrahedron]:
    """Consecutive 4-tuples ``(s_k, .., s_{k+3})`` for ``k = start .. start+count-1``."""
    pts = canonical_points(params, start, start + count + 3)
    return [Tetrahedron(pts[k : k + 4]) for k in range(count)]


@dataclass(frozen=True)
class FaceRule:
    """Which face of each tetrahedron the next one is appended to.

    The two cycle rules append to the face opposite the oldest vertex
    (the one carried over unchanged for the longest), which is what Gray's
    sliding 4-tuples do. ``faces`` is only used by explicit rules; the list is
    repeated cyclically.
    """

    kind: str
    faces: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in (RIGHT, LEFT, EXPLICIT):
            raise ValueError(f"unknown face rule {self.kind!r}")
        if self.kind == EXPLICIT:
            if not self.faces:
                raise ValueError("explicit face rule needs at least one face")
            if any(f not in (0, 1, 2, 3) for f in self.faces):
                raise ValueError(f"face indices must be 0..3, got {self.faces!r}")

    @classmethod
    def right(cls) -> "FaceRule":
        return cls(RIGHT)

    @classmethod
    def left(cls) -> "FaceRule":
        return cls(LEFT)

    @classmethod
    def explicit(cls, faces) -> "FaceRule":
        return cls(EXPLICIT, tuple(int(f) for f in faces))

    @classmethod
    def from_name(cls, name: str) -> "FaceRule":
        return {RIGHT: cls.right, LEFT: cls.left}[name]()

    def cycle(self, seed: Tetrahedron) -> tuple[int, ...]:
        """Face labels used at steps 0, 1, 2, ... (repeat cyclically)."""
        if self.kind == EXPLICIT:
            return self.faces
        v = seed.vertices
        positive = np.linalg.det(np.array([v[3] - v[0], v[1] - v[0], v[2] - v[0]])) > 0
        if positive == (self.kind == RIGHT):
            return _RIGHT_CYCLE
        return _LEFT_CYCLE

    def to_json(self):
        return list(self.faces) if self.kind == EXPLICIT else self.kind


@dataclass(frozen=True)
class HelixSpec:
    beta: float
    count: int
    face_rule: FaceRule = field(default_factory=FaceRule.right)
    seed: Tetrahedron = field(default_factory=reference_tetrahedron)

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if not (-math.pi < self.beta <= math.pi):
            raise ValueError(f"beta must lie in (-pi, pi], got {self.beta!r}")


@dataclass(frozen=True)
class Chain:
    tetrahedra: tuple[Tetrahedron, ...]
    faces_used: tuple[int, ...]

    def __len__(self):
        return len(self.tetrahedra)

    def __getitem__(self, k) -> Tetrahedron:
        return self.tetrahedra[k]

    def vertices(self) -> np.ndarray:
        """``(n, 4, 3)`` array of all vertices."""
        return np.stack([t.vertices for t in self.tetrahedra])

    def centroids(self) -> np.ndarray:
        return self.vertices().mean(axis=1)

    def contact_residuals(self) -> np.ndarray:
        return np.array([contact(a, b)[2] for a, b in zip(self.tetrahedra, self.tetrahedra[1:])])

    def transformed(self, rotation, pivot) -> "Chain":
        return Chain(tuple(t.transformed(rotation, pivot) for t in self.tetrahedra), self.faces_used)


def assemble(spec: HelixSpec) -> Chain:
    """Append ``spec.count - 1`` tetrahedra to the seed, rotating each by beta."""
    cycle = spec.face_rule.cycle(spec.seed)
    tets = [spec.seed]
    faces = []
    for k in range(spec.count - 1):
        f = cycle[k % len(cycle)]
        new = step(tets[-1], f, spec.beta)
        if len(tets) >= 2 and np.linalg.norm(new.centroid - tets[-2].centroid) <= EDGE_TOL:
            raise SelfCoincidence(f"step {k + 1} retraces tetrahedron {k - 1} (face {f})")
        tets.append(new)
        faces.append(f)
    return Chain(tuple(tets), tuple(faces))


def rigid_register(p, q) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares proper rigid motion ``R p_i + t ~ q_i``.

    Returns ``(R, t, rms)``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 2 or p.shape[1] != 3 or len(p) < 3:
        raise ValueError("need two equally sized (n >= 3, 3) point sets")
    pc, qc = p.mean(axis=0), q.mean(axis=0)
    dp, dq = p - pc, q - qc
    scale = max(np.abs(dp).max(), np.abs(dq).max(), 1.0)
    for d in (dp, dq):
        if np.linalg.svd(d, compute_uv=False)[1] <= 1e-12 * scale:
            raise DegenerateConfiguration("points are collinear or coincident")
    rot, _ = Rotation.align_vectors(dq, dp)
    r = rot.as_matrix()
    t = qc - r @ pc
    rms = float(np.sqrt(np.mean(np.sum((p @ r.T + t - q) ** 2, axis=1))))
    return r, t, rms


def extend_periodic(primitive: Chain, w, copies: int, tol: float = 1e-9) -> Chain:
    """Append ``copies`` translated copies (by ``w``, ``2w``, ...) of a primitive set."""
    if len(primitive) == 0:
        raise ValueError("primitive chain is empty")
    if copies < 0:
        raise ValueError("copies must be non-negative")
    w = np.asarray(w, dtype=float)
    tets = list(primitive.tetrahedra)
    faces = list(primitive.faces_used)
    for k in range(1, copies + 1):
        block = [t.translated(k * w) for t in primitive.tetrahedra]
        f, _, res = contact(tets[-1], block[0])
        if res > tol:
            raise SeamMismatch(f"copy {k} does not meet the chain face to face (residual {res:.3e})")
        faces.append(f)
        tets.extend(block)
        faces.extend(primitive.faces_used)
    return Chain(tuple(tets), tuple(faces))
