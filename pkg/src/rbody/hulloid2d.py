"""Exact planar R-hulloids of point triples and the triple test for finite sets.

For a non-collinear triple V with circumradius r(V) < R the hulloid is
V together with a curvilinear triangle: the part of the triangle co(V) outside
the three open R-disks whose boundary circles pass through two vertices each,
centered on the far side of the opposite edge. Otherwise it is V itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateInput, NoSuchBall
from .geom import (
    Ball,
    as_points,
    circumsphere,
    is_collinear,
    pair_ball_centers,
    triangle_contains,
)
from .report import VerificationReport

TWO_PI = 2.0 * np.pi
# points closer than this fraction of the set's extent count as one point
COINCIDENCE_RTOL = 1e-12


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise arc of the circle |x - center| = radius."""

    center: np.ndarray
    radius: float
    start_angle: float
    end_angle: float

    @property
    def sweep(self) -> float:
        return (self.end_angle - self.start_angle) % TWO_PI

    def point(self, t) -> np.ndarray:
        """Point at fraction t in [0, 1] along the arc."""
        a = self.start_angle + np.asarray(t, dtype=float) * self.sweep
        return self.center + self.radius * np.stack([np.cos(a), np.sin(a)], axis=-1)

    def sample(self, spacing: float) -> np.ndarray:
        n = max(2, int(np.ceil(self.radius * self.sweep / spacing)) + 1)
        return self.point(np.linspace(0.0, 1.0, n))

    def to_json(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius,
                "start_angle": self.start_angle, "end_angle": self.end_angle,
                "orientation": "ccw"}


def _arc_between(center: np.ndarray, radius: float, p: np.ndarray, q: np.ndarray) -> Arc:
    a = float(np.arctan2(*(p - center)[::-1]) % TWO_PI)
    b = float(np.arctan2(*(q - center)[::-1]) % TWO_PI)
    # the short way round: arcs of the curvilinear triangle sweep less than pi
    if (b - a) % TWO_PI > np.pi:
        a, b = b, a
    return Arc(center, float(radius), a, b)


@dataclass(frozen=True)
class CurvilinearTriangle:
    vertices: np.ndarray        # (3, 2); vertex i lies on the circles other than i
    arcs: tuple[Arc, Arc, Arc]  # arc j on circle j joins vertices l and m (l, m != j)
    centers: np.ndarray         # (3, 2) generating disk centers


class HulloidKind(str, Enum):
    DISCRETE = "discrete"
    FULL = "full"


@dataclass(frozen=True)
class TripleHulloid:
    kind: HulloidKind
    V: np.ndarray
    R: float
    circumradius: float         # inf for collinear triples
    triangle: CurvilinearTriangle | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "V": self.V.tolist(), "R": self.R,
               "circumradius": self.circumradius if np.isfinite(self.circumradius) else "inf"}
        if self.triangle is not None:
            out["triangle"] = {
                "vertices": self.triangle.vertices.tolist(),
                "centers": self.triangle.centers.tolist(),
                "arcs": [a.to_json() for a in self.triangle.arcs],
            }
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TripleHulloid":
        return triple_hulloid(data["V"], float(data["R"]))


def _opposite_side_center(V: np.ndarray, i: int, rho: float) -> np.ndarray:
    l, m = [j for j in range(3) if j != i]
    c1, c2 = pair_ball_centers(V[l], V[m], rho)
    e = V[m] - V[l]
    side = e[0] * (V[i][1] - V[l][1]) - e[1] * (V[i][0] - V[l][0])
    # c1 is left of l -> m; keep the center on the side away from vertex i
    return c2 if side > 0 else c1


def johnson_circles(V, rho: float) -> list[Ball]:
    """Radius-rho disks through each pair of vertices, not containing the third."""
    V = as_points(V, dim=2, dedupe=False)
    if V.shape[0] != 3:
        raise DegenerateInput("a triangle needs exactly three points")
    if is_collinear(V):
        raise DegenerateInput("collinear points do not form a triangle")
    _, r = circumsphere(V)
    if rho < r * (1 - 1e-12):
        raise NoSuchBall(f"radius {rho:.6g} is below the circumradius {r:.6g}")
    return [Ball(_opposite_side_center(V, i, rho), float(rho)) for i in range(3)]


def _reflect(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    t = (p - a) @ d / (d @ d)
    foot = a + t * d
    return 2 * foot - p


def triple_hulloid(V, R: float) -> TripleHulloid:
    raw = np.asarray(V, dtype=float)
    V = as_points(V, dim=2, dedupe=True)
    if V.shape[0] != raw.reshape(-1, 2).shape[0] or V.shape[0] != 3:
        raise DegenerateInput("triple_hulloid needs three distinct points")
    if not R > 0:
        raise DegenerateInput("R must be positive")
    gaps = np.linalg.norm(V - np.roll(V, 1, axis=0), axis=1)
    if gaps.min() <= COINCIDENCE_RTOL * gaps.max():
        raise DegenerateInput("two of the points coincide up to rounding")
    if is_collinear(V):
        return TripleHulloid(HulloidKind.DISCRETE, V, float(R), float("inf"))
    _, r = circumsphere(V)
    # within rounding of the threshold the arc construction is ill-conditioned;
    # take the discrete side, which the limit r -> R favours
    if r >= R * (1 - COINCIDENCE_RTOL):
        return TripleHulloid(HulloidKind.DISCRETE, V, float(R), float(r))
    centers = np.array([b.center for b in johnson_circles(V, R)])
    corners = np.empty((3, 2))
    for i in range(3):
        l, m = [j for j in range(3) if j != i]
        # circles l and m both pass through V[i]; their other crossing is its mirror
        y = _reflect(V[i], centers[l], centers[m])
        inside = bool(triangle_contains(V, y[None, :], tol=-1e-12 * R)[0])
        corners[i] = y if inside else V[i]
    arcs = []
    for j in range(3):
        l, m = [k for k in range(3) if k != j]
        arcs.append(_arc_between(centers[j], R, corners[l], corners[m]))
    tri = CurvilinearTriangle(corners, tuple(arcs), centers)
    return TripleHulloid(HulloidKind.FULL, V, float(R), float(r), tri)


def hulloid_contains(H: TripleHulloid, p, tol: float | None = None) -> np.ndarray:
    tol = 1e-9 * H.R if tol is None else tol
    p = np.asarray(p, dtype=float)
    pts = np.atleast_2d(p)
    near_v = np.min(np.linalg.norm(pts[:, None, :] - H.V[None, :, :], axis=2), axis=1) <= tol
    out = near_v
    if H.kind is HulloidKind.FULL:
        inside = triangle_contains(H.V, pts, tol)
        for c in H.triangle.centers:
            inside &= np.linalg.norm(pts - c, axis=1) >= H.R - tol
        out = out | inside
    return out if p.ndim > 1 else out[0]


def sample_hulloid(H: TripleHulloid, spacing: float) -> np.ndarray:
    """V, the boundary arcs, and a triangular lattice of the curvilinear triangle."""
    parts = [H.V]
    if H.kind is HulloidKind.FULL:
        tri = H.triangle
        parts.extend(a.sample(spacing) for a in tri.arcs)
        lo = tri.vertices.min(axis=0)
        hi = tri.vertices.max(axis=0)
        # arcs bulge inward, so the corner box bounds the region
        dy = spacing * np.sqrt(3) / 2
        rows = np.arange(lo[1], hi[1] + dy, dy)
        pts = []
        for k, y in enumerate(rows):
            x0 = lo[0] + (0.5 * spacing if k % 2 else 0.0)
            xs = np.arange(x0, hi[0] + spacing, spacing)
            pts.append(np.column_stack([xs, np.full(xs.shape, y)]))
        grid = np.concatenate(pts, axis=0)
        keep = triangle_contains(H.V, grid)
        for c in tri.centers:
            keep &= np.linalg.norm(grid - c, axis=1) >= H.R
        parts.append(grid[keep])
    return np.concatenate(parts, axis=0)


def _small_triples(A: np.ndarray, R: float, tol: float = 0.0):
    """Index triples with tol < r < R; the others cannot put a point beyond tol of A.

    Above R the hulloid is the triple itself; at or below tol every point of the
    triangle is within r of a vertex.
    """
    idx = np.array(list(combinations(range(A.shape[0]), 3)), dtype=np.int64).reshape(-1, 3)
    a, b, c = (A[idx[:, k]] for k in range(3))
    ab = np.linalg.norm(b - a, axis=1)
    bc = np.linalg.norm(c - b, axis=1)
    ca = np.linalg.norm(a - c, axis=1)
    u, v = b - a, c - a
    area2 = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    # r = abc / (4 area); keep a margin so rounding never drops a candidate
    with np.errstate(divide="ignore", invalid="ignore"):
        r = ab * bc * ca / (2 * area2)
    keep = np.isfinite(r) & (r < R * (1 + 1e-6)) & (r > tol)
    return [tuple(t) for t in idx[keep]]


def _merge_coincident(A: np.ndarray) -> np.ndarray:
    scale = float(np.ptp(A, axis=0).max()) if A.shape[0] > 1 else 0.0
    if scale == 0.0:
        return A
    pairs = cKDTree(A).query_pairs(COINCIDENCE_RTOL * scale)
    drop = {max(p) for p in pairs}
    return A[[i for i in range(A.shape[0]) if i not in drop]]


def qr_check(A, R: float, tol: float) -> VerificationReport:
    """Every triple's hulloid, sampled at tol/2, must lie within tol of A."""
    A = _merge_coincident(as_points(A, dim=2))
    tree = cKDTree(A)
    report = VerificationReport("triple-hulloid containment", metadata={
        "R": R, "tol": tol, "points": A.shape[0]})
    worst = 0.0
    checked = 0
    for idx in _small_triples(A, R, tol):
        H = triple_hulloid(A[list(idx)], R)
        checked += 1
        if H.kind is HulloidKind.DISCRETE:
            continue
        pts = sample_hulloid(H, 0.5 * tol)
        d, _ = tree.query(pts)
        k = int(np.argmax(d))
        worst = max(worst, float(d[k]))
        if d[k] > tol:
            report.add("every triple hulloid lies in A", float(d[k]), tol, False,
                       "R-bodies in the plane are the sets containing all triple hulloids",
                       triple=list(idx), witness=pts[k], triples_checked=checked)
            return report
    report.add("every triple hulloid lies in A", worst, tol, True,
               "R-bodies in the plane are the sets containing all triple hulloids",
               triples_checked=checked)
    return report
