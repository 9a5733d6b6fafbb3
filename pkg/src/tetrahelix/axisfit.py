"""Centroid helix of a periodic chain: axis, pitch, radius, phase, and z-alignment."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .assembly import Chain
from .errors import NotPeriodic, RankDeficient
from .fixtures import load

FIT_TOL = 1e-8
TRANSLATION_TOL = 1e-9
_PERMS = np.array(list(itertools.permutations(range(4))))


@dataclass(frozen=True)
class HelixAnalysis:
    """Centroid helix ``c(t) = r (u1 cos t + u2 sin t) + t/(m step_angle) w + q``.

    Tetrahedron ``k`` sits at ``t = k * step_angle``; ``(u1, u2, w_hat)`` is
    right-handed, so ``u2 = w_hat x u1``.
    """

    axis_w: np.ndarray
    pitch: float
    radius: float
    u1: np.ndarray
    u2: np.ndarray
    offset_q: np.ndarray
    step_angle: float
    period_m: int
    residual: float = 0.0

    @property
    def axis_unit(self) -> np.ndarray:
        return self.axis_w / self.pitch

    def point(self, t):
        """Evaluate the helix at parameter(s) ``t``; returns ``(..., 3)``."""
        t = np.asarray(t, dtype=float)[..., None]
        advance = t / (self.period_m * self.step_angle)
        return self.radius * (self.u1 * np.cos(t) + self.u2 * np.sin(t)) + advance * self.axis_w + self.offset_q

    def to_json(self) -> dict:
        return {
            "axis_w": self.axis_w.tolist(),
            "pitch": self.pitch,
            "radius": self.radius,
            "u1": self.u1.tolist(),
            "u2": self.u2.tolist(),
            "offset_q": self.offset_q.tolist(),
            "step_angle": self.step_angle,
            "period_m": self.period_m,
            "residual": self.residual,
        }

    @classmethod
    def from_json(cls, d: dict) -> "HelixAnalysis":
        vec = {k: np.array(d[k], dtype=float) for k in ("axis_w", "u1", "u2", "offset_q")}
        return cls(
            pitch=d["pitch"],
            radius=d["radius"],
            step_angle=d["step_angle"],
            period_m=d["period_m"],
            residual=d.get("residual", 0.0),
            **vec,
        )


@dataclass(frozen=True)
class AlignmentTransform:
    """``v -> rotation_C (v - pivot_q)``."""

    rotation_C: np.ndarray
    pivot_q: np.ndarray

    def apply(self, points) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.pivot_q) @ self.rotation_C.T


def translation_residual(chain: Chain, m: int, w) -> float:
    """Largest distance between ``T_{k+m}`` and ``T_k + w`` as vertex sets."""
    v = chain.vertices()
    shifted = v[:-m] + w
    later = v[m:]
    # best relabelling per tetrahedron: (n, 24, 4, 3)
    diff = later[:, _PERMS] - shifted[:, None]
    per = np.abs(diff).max(axis=(2, 3)).min(axis=1)
    return float(per.max())


def fit_helix(chain: Chain, period_m: int, tol: float = TRANSLATION_TOL) -> HelixAnalysis:
    """Recover the centroid helix of an ``period_m``-periodic chain."""
    m = int(period_m)
    if m < 1:
        raise ValueError("period must be positive")
    if len(chain) < 2 * m + 1:
        raise ValueError(f"need at least {2 * m + 1} tetrahedra to fit period {m}, got {len(chain)}")
    cents = chain.centroids()
    w = cents[m] - cents[0]
    pitch = float(np.linalg.norm(w))
    if pitch <= tol:
        raise NotPeriodic(f"period-{m} translation vanishes")
    res = translation_residual(chain, m, w)
    if res > tol:
        raise NotPeriodic(f"T(k+{m}) is not T(k) + w (residual {res:.3e})")

    axis = w / pitch
    k = np.arange(len(cents))
    drift_free = cents - np.outer(k / m, w)
    e1, e2 = _plane_basis(axis)
    xy = np.column_stack([drift_free @ e1, drift_free @ e2])
    centre = _circle_centre(xy[:m])
    offset_q = centre[0] * e1 + centre[1] * e2 + (drift_free[0] @ axis) * axis

    rel0 = cents[0] - offset_q
    radius = float(np.linalg.norm(rel0))
    if radius <= 1e-12:
        raise RankDeficient("centroids lie on the axis")
    u1 = rel0 / radius
    u2 = np.cross(axis, u1)
    rel1 = cents[1] - offset_q - w / m
    step_angle = math.atan2(rel1 @ u2, rel1 @ u1)

    analysis = HelixAnalysis(w, pitch, radius, u1, u2, offset_q, step_angle, m)
    residual = float(np.abs(analysis.point(k * step_angle) - cents).max())
    if residual > FIT_TOL:
        raise NotPeriodic(f"centroids leave the fitted helix by {residual:.3e}")
    return HelixAnalysis(w, pitch, radius, u1, u2, offset_q, step_angle, m, residual)


def _plane_basis(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.eye(3)[np.argmin(np.abs(axis))]
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(axis, e1)


def _circle_centre(xy: np.ndarray) -> np.ndarray:
    """Algebraic least-squares circle centre through planar points."""
    pts = np.unique(np.round(xy, 12), axis=0)
    if len(pts) == 2:
        # period 2: the two positions are half a turn apart
        return xy[:2].mean(axis=0)
    if len(pts) < 2:
        raise RankDeficient("centroids collapse onto the axis")
    a = np.column_stack([2.0 * xy, np.ones(len(xy))])
    b = (xy**2).sum(axis=1)
    sol, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < 3:
        raise RankDeficient("projected centroids are collinear")
    return sol[:2]


def minimal_rotation_to_z(direction) -> np.ndarray:
    """Smallest-angle rotation taking ``direction`` onto +z."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    z = np.array([0.0, 0.0, 1.0])
    cross = np.cross(d, z)
    s = np.linalg.norm(cross)
    angle = math.atan2(s, d @ z)
    if s <= 1e-15:
        axis = np.array([1.0, 0.0, 0.0])
    else:
        axis = cross / s
    return Rotation.from_rotvec(angle * axis).as_matrix()


def align_to_z(chain: Chain, analysis: HelixAnalysis) -> tuple[Chain, AlignmentTransform]:
    """Put the helix axis on the z axis through the origin."""
    if not analysis.pitch > 0 or not analysis.radius > 0:
        raise RankDeficient("analysis has no usable axis")
    rot = minimal_rotation_to_z(analysis.axis_w)
    xf = AlignmentTransform(rot, np.asarray(analysis.offset_q, dtype=float))
    return chain.transformed(rot, xf.pivot_q), xf


def closed_form_constants(which: str) -> HelixAnalysis:
    """Closed-form helix parameters of the 5- and 3-period structures.

    ``u2`` is returned as printed, which is ``u1 x w_hat``: the opposite of
    the fitted basis. With it the closed-form curve meets the centroids at
    ``t = -k * step_angle``.
    """
    fs = load(which)
    v, s = fs.vectors, fs.scalars
    return HelixAnalysis(
        axis_w=np.array(v["w"]),
        pitch=s["p"],
        radius=s["r"],
        u1=np.array(v["u1"]),
        u2=np.array(v["u2"]),
        offset_q=np.array(v["q"]),
        step_angle=s["step_angle"],
        period_m=fs.period,
    )


def rotational_symmetry_residual(points, m: int) -> float:
    """Worst distance from a 2π/m-rotated xy-projected point to the unrotated set (and back)."""
    xy = np.asarray(points, dtype=float).reshape(-1, 3)[:, :2]
    a = 2.0 * math.pi / m
    rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    turned = xy @ rot.T
    tree, tree_t = cKDTree(xy), cKDTree(turned)
    return float(max(tree.query(turned)[0].max(), tree_t.query(xy)[0].max()))
