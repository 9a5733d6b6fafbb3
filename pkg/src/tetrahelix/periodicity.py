"""Period detection for modified BC helices and the search for period-inducing beta.

A chain is periodic with period ``m`` when the tetrahedron ``m`` steps on is
a pure translate of the first one *and* the face sequence continues in step
with the translate. Vertices keep their source labels through A and B, so the
translate generally matches under a relabelling ``sigma`` with
``sigma(f_j) = f_{j+m}``. For the two cycle rules ``sigma`` is the
oldest-to-newest vertex order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.spatial.transform import Rotation

from .assembly import EXPLICIT, LEFT, FaceRule
from .geometry import GOLDEN_BETA, Tetrahedron, reference_tetrahedron

DETECT_TOL = 1e-9
ROOT_TOL = 1e-10
DEDUP_TOL = 1e-6

EXACT_FORMS = {
    "PiOver3": math.pi / 3.0,
    "MinusPiOver3": -math.pi / 3.0,
    "PlusAcosGolden": GOLDEN_BETA,
    "MinusAcosGolden": -GOLDEN_BETA,
}


@dataclass(frozen=True)
class PeriodResult:
    least_period: int | None
    translation_w: np.ndarray | None
    residual: float
    bound: int

    @property
    def periodic(self) -> bool:
        return self.least_period is not None

    def to_json(self):
        return {
            "least_period": self.least_period,
            "translation_w": None if self.translation_w is None else [float(x) for x in self.translation_w],
            "residual": float(self.residual),
            "bound": self.bound,
        }


@dataclass(frozen=True)
class BetaRoot:
    period_m: int
    beta: float
    residual_at_root: float
    exact_form: str | None = None


@lru_cache(maxsize=None)
def label_maps(cycle: tuple[int, ...], m: int) -> tuple[tuple[int, ...], ...]:
    """Relabellings ``sigma`` (``sigma[j]`` = label in T_m matching label j in T_0).

    Only maps with ``sigma(f_j) = f_{j+m}`` for the repeating face sequence
    are returned; an empty result means no period ``m`` is possible.
    """
    n = len(cycle)
    required = {}
    for j in range(n):
        a, b = cycle[j], cycle[(j + m) % n]
        if required.setdefault(a, b) != b:
            return ()
    out = []
    for perm in itertools.permutations(range(4)):
        if all(perm[a] == b for a, b in required.items()):
            out.append(perm)
    return tuple(out)


def batch_chain(betas, count: int, cycle: tuple[int, ...], seed: Tetrahedron | None = None) -> np.ndarray:
    """Vertices of ``count`` tetrahedra for many beta at once, shape ``(N, count, 4, 3)``.

    Same construction as :func:`tetrahelix.assembly.assemble`, vectorised
    over beta. The reflected vertex of a regular tetrahedron lies on the face
    axis, so A sends it to ``2c - v`` and B leaves it there.
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    seed = reference_tetrahedron() if seed is None else seed
    out = np.empty((len(betas), count, 4, 3))
    t = np.repeat(seed.vertices[None], len(betas), axis=0)
    out[:, 0] = t
    for k in range(count - 1):
        f = cycle[k % len(cycle)]
        others = [j for j in range(4) if j != f]
        c = t[:, others].mean(axis=1)
        n = c - t[:, f]
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        rot = Rotation.from_rotvec(n * betas[:, None]).as_matrix()
        new = np.empty_like(t)
        new[:, others] = np.einsum("nij,nkj->nki", rot, t[:, others] - c[:, None]) + c[:, None]
        new[:, f] = 2.0 * c - t[:, f]
        t = new
        out[:, k + 1] = t
    return out


def _offsets(verts: np.ndarray, m: int, cycle: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Per-beta misalignment at period ``m`` and the offending offset vectors.

    ``verts`` is a batch from :func:`batch_chain` with at least ``m + 1``
    tetrahedra. Returns ``(residual (N,), offsets (N, 4, 3))``.
    """
    t0, tm = verts[:, 0], verts[:, m]
    w = tm.mean(axis=1) - t0.mean(axis=1)
    maps = label_maps(tuple(cycle), m)
    if not maps:
        return np.full(len(verts), np.inf), np.full(t0.shape, np.nan)
    best_res = None
    best_off = None
    for sigma in maps:
        off = tm[:, list(sigma)] - t0 - w[:, None]
        res = np.linalg.norm(off, axis=2).max(axis=1)
        if best_res is None:
            best_res, best_off = res, off
        else:
            better = res < best_res
            best_res = np.where(better, res, best_res)
            best_off = np.where(better[:, None, None], off, best_off)
    return best_res, best_off


def _rule_cycle(face_rule: FaceRule | None, seed: Tetrahedron | None):
    face_rule = FaceRule.right() if face_rule is None else face_rule
    seed = reference_tetrahedron() if seed is None else seed
    return face_rule, seed, face_rule.cycle(seed)


def misalignment(beta: float, m: int, face_rule: FaceRule | None = None, seed: Tetrahedron | None = None) -> float:
    """Largest vertex mismatch between T_m and the matching translate of T_0.

    Zero exactly when the chain repeats after ``m`` steps by pure translation.
    """
    if m < 1:
        raise ValueError("m must be positive")
    _, seed, cycle = _rule_cycle(face_rule, seed)
    verts = batch_chain([beta], m + 1, cycle, seed)
    return float(_offsets(verts, m, cycle)[0][0])


def misalignment_grid(betas, m: int, face_rule: FaceRule | None = None, seed: Tetrahedron | None = None) -> np.ndarray:
    _, seed, cycle = _rule_cycle(face_rule, seed)
    verts = batch_chain(betas, m + 1, cycle, seed)
    return _offsets(verts, m, cycle)[0]


def detect_period(
    beta: float,
    face_rule: FaceRule | None = None,
    bound: int = 25,
    tol: float = DETECT_TOL,
    seed: Tetrahedron | None = None,
) -> PeriodResult:
    """Least ``m <= bound`` with misalignment ``<= tol``.

    When nothing is found, ``residual`` is the smallest misalignment seen.
    """
    if bound < 2:
        raise ValueError("bound must be at least 2")
    _, seed, cycle = _rule_cycle(face_rule, seed)
    verts = batch_chain([beta], bound + 1, cycle, seed)
    floor = math.inf
    for m in range(1, bound + 1):
        res = float(_offsets(verts, m, cycle)[0][0])
        if res <= tol:
            w = verts[0, m].mean(axis=0) - verts[0, 0].mean(axis=0)
            return PeriodResult(m, w, res, bound)
        floor = min(floor, res)
    return PeriodResult(None, None, floor, bound)


def screw_angle(beta: float, face_rule: FaceRule | None = None, seed: Tetrahedron | None = None) -> float:
    """Rotation angle in ``[0, pi]`` of the rigid motion taking T_k to T_{k+1}.

    Each step is the same proper screw motion (relabelled), so period ``m``
    requires ``m * angle`` to be a multiple of ``2 pi``.
    """
    _, seed, cycle = _rule_cycle(face_rule, seed)
    if len(set(cycle)) != 4 or len(cycle) != 4:
        raise ValueError("screw angle is defined for the cycle rules only")
    verts = batch_chain([beta], 2, cycle, seed)[0]
    sigma = label_maps(tuple(cycle), 1)[0]
    a = verts[0] - verts[0].mean(axis=0)
    b = verts[1][list(sigma)] - verts[1].mean(axis=0)
    ea, eb = a[1:] - a[0], b[1:] - b[0]
    r = np.linalg.solve(ea, eb).T
    return float(np.arccos(np.clip((np.trace(r) - 1.0) / 2.0, -1.0, 1.0)))


def principal_branch(face_rule: FaceRule | None = None) -> tuple[float, float]:
    """Half-open beta interval ``(lo, hi]`` on which the screw angle rises from
    its minimum to pi; it holds one root per admissible rotation fraction."""
    face_rule = FaceRule.right() if face_rule is None else face_rule
    if face_rule.kind == EXPLICIT:
        raise ValueError("principal branch is defined for the cycle rules only")
    if face_rule.kind == LEFT:
        return (-math.pi / 3.0, 2.0 * math.pi / 3.0)
    return (-2.0 * math.pi / 3.0, math.pi / 3.0)


def _wrap(beta: float) -> float:
    b = math.remainder(beta, 2.0 * math.pi)
    # +-pi name the same rotation; report it as +pi
    if abs(abs(b) - math.pi) <= 1e-12:
        return math.pi
    return b


def _tag(beta: float) -> str | None:
    for name, value in EXACT_FORMS.items():
        if abs(beta - value) <= 1e-12:
            return name
    return None


def _polish(fvec, a: float, b: float) -> float | None:
    """Refine a root of the vector function ``fvec`` bracketed by ``[a, b]``.

    The offset vector is smooth in beta and vanishes transversally at a root,
    so its projection on the local secant direction changes sign there.
    """
    for _ in range(2):
        direction = fvec(b) - fvec(a)
        fa, fb = fvec(a) @ direction, fvec(b) @ direction
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if fa * fb > 0:
            return None
        x = brentq(lambda s: fvec(s) @ direction, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=200)
        a, b = x - 1e-7, x + 1e-7
    return x


def search_beta(
    m: int,
    face_rule: FaceRule | None = None,
    *,
    step: float = 1e-3,
    refine_below: float | None = None,
    principal: bool = False,
    tol: float = ROOT_TOL,
    seed: Tetrahedron | None = None,
) -> list[BetaRoot]:
    """All beta in ``(-pi, pi]`` whose chain has least period exactly ``m``.

    A grid of spacing ``step`` is scanned for local minima of the
    misalignment below ``refine_below`` (default ``50 * step``); each is
    refined by Brent's method and kept if its residual is ``<= tol``.
    Roots that are periodic for a proper divisor of ``m`` are dropped.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    face_rule, seed, cycle = _rule_cycle(face_rule, seed)
    refine_below = 50.0 * step if refine_below is None else refine_below
    n = int(math.ceil(2.0 * math.pi / step))
    grid = -math.pi + 2.0 * math.pi * np.arange(1, n + 1) / n
    h = 2.0 * math.pi / n
    verts = batch_chain(grid, m + 1, cycle, seed)
    g = _offsets(verts, m, cycle)[0]
    is_min = (g <= np.roll(g, 1)) & (g <= np.roll(g, -1)) & (g <= refine_below)

    def fvec(beta):
        v = batch_chain([beta], m + 1, cycle, seed)
        return _offsets(v, m, cycle)[1][0].ravel()

    found = []
    for i in np.flatnonzero(is_min):
        x = _polish(fvec, grid[i] - h, grid[i] + h)
        if x is None:
            continue
        x = _wrap(x)
        res = misalignment(x, m, face_rule, seed)
        if res > tol:
            continue
        divisors = [d for d in range(1, m) if m % d == 0]
        if any(misalignment(x, d, face_rule, seed) <= DETECT_TOL * 10 for d in divisors):
            continue
        found.append(BetaRoot(m, x, res, _tag(x)))
    found.sort(key=lambda r: r.beta)
    roots = []
    for r in found:
        if roots and abs(r.beta - roots[-1].beta) <= DEDUP_TOL:
            if r.residual_at_root < roots[-1].residual_at_root:
                roots[-1] = r
            continue
        roots.append(r)
    if len(roots) > 1 and 2.0 * math.pi - (roots[-1].beta - roots[0].beta) <= DEDUP_TOL:
        roots.pop(0)
    if principal:
        lo, hi = principal_branch(face_rule)
        roots = [r for r in roots if lo < r.beta <= hi]
    return roots


def verify_chirality_rule(face_rule: FaceRule | None = None, bound: int = 20) -> dict[int, int | None]:
    """Least period for ``beta = +-arccos((3 phi - 1) / 4)``, keyed by the sign of beta."""
    return {
        sign: detect_period(sign * GOLDEN_BETA, face_rule, bound).least_period
        for sign in (1, -1)
    }
