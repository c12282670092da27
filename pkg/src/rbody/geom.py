"""Low-dimensional primitives: balls, circumspheres, triangle shape, R-lenses."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateInput, NoSuchBall

# normalized Gram determinant below this => affinely dependent
DEGENERACY_THRESHOLD = 1e-12


def as_point(p, dim: int | None = None) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.ndim != 1 or not np.all(np.isfinite(a)):
        raise DegenerateInput(f"not a finite point: {p!r}")
    if dim is not None and a.shape[0] != dim:
        raise DegenerateInput(f"expected a {dim}-dimensional point, got {a.shape[0]}")
    return a


def as_points(points, dim: int | None = None, dedupe: bool = True) -> np.ndarray:
    """Return an (n, d) float array; exact duplicates are dropped, order kept."""
    a = np.asarray(points, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[0] == 0:
        raise DegenerateInput("a point set needs at least one point")
    if not np.all(np.isfinite(a)):
        raise DegenerateInput("point coordinates must be finite")
    if dim is not None and a.shape[1] != dim:
        raise DegenerateInput(f"expected {dim}-dimensional points, got {a.shape[1]}")
    if dedupe:
        _, idx = np.unique(a, axis=0, return_index=True)
        a = a[np.sort(idx)]
    return a


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    closed: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise DegenerateInput(f"ball radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "center", as_point(self.center))

    def signed_distance(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.linalg.norm(p - self.center, axis=-1) - self.radius

    def contains(self, p, tol: float = 0.0) -> np.ndarray:
        sd = self.signed_distance(p)
        return sd <= tol if self.closed else sd < tol


def normalized_gram_det(vectors: np.ndarray) -> float:
    """det(G) / prod |v_i|^2: 1 for orthogonal vectors, 0 for dependent ones."""
    v = np.atleast_2d(vectors)
    norms2 = np.einsum("ij,ij->i", v, v)
    if np.any(norms2 == 0):
        return 0.0
    # normalize first so tiny or huge vectors cannot underflow the product
    u = v / np.sqrt(norms2)[:, None]
    return float(np.linalg.det(u @ u.T))


def circumsphere(points) -> tuple[np.ndarray, float]:
    """Center (in the affine hull) and radius of the sphere through n+1 points."""
    p = as_points(points, dedupe=False)
    n, d = p.shape
    if n == 1:
        return p[0].copy(), 0.0
    if n - 1 > d:
        raise DegenerateInput(f"{n} points in dimension {d} cannot be affinely independent")
    b = p[1:] - p[0]
    if normalized_gram_det(b) < DEGENERACY_THRESHOLD:
        raise DegenerateInput("points are affinely dependent")
    g = b @ b.T
    try:
        lam = np.linalg.solve(g, 0.5 * np.diag(g))
    except np.linalg.LinAlgError:
        # squared lengths underflowed although the normalized test passed
        raise DegenerateInput("points are affinely dependent") from None
    offset = lam @ b
    if not np.all(np.isfinite(offset)):
        raise DegenerateInput("points are affinely dependent")
    return p[0] + offset, float(np.linalg.norm(offset))


def circumradius(points) -> float:
    return circumsphere(points)[1]


def is_collinear(points) -> bool:
    p = as_points(points, dedupe=False)
    if p.shape[0] < 3:
        return True
    b = p[1:] - p[0]
    if np.any(np.einsum("ij,ij->i", b, b) == 0):
        return True
    return normalized_gram_det(b[:2]) < DEGENERACY_THRESHOLD


def pair_ball_centers(a, b, R: float) -> tuple[np.ndarray, np.ndarray]:
    """Centers of the two radius-R circles through a and b (2D).

    The first center lies to the left of the directed segment a -> b.
    """
    a = as_point(a, 2)
    b = as_point(b, 2)
    chord = b - a
    L = float(np.hypot(*chord))
    if L == 0:
        raise DegenerateInput("pair_ball_centers needs two distinct points")
    if L > 2 * R * (1 + 1e-12):
        raise NoSuchBall(f"|a-b| = {L:.6g} exceeds the diameter 2R = {2 * R:.6g}")
    mid = 0.5 * (a + b)
    normal = np.array([-chord[1], chord[0]]) / L
    offset = np.sqrt(max(R * R - 0.25 * L * L, 0.0))
    return mid + offset * normal, mid - offset * normal


@dataclass(frozen=True)
class Lens:
    """Intersection of all closed radius-R disks containing a and b (2D)."""

    a: np.ndarray
    b: np.ndarray
    R: float
    x1: np.ndarray
    x2: np.ndarray

    @classmethod
    def from_points(cls, a, b, R: float) -> "Lens":
        a = as_point(a, 2)
        b = as_point(b, 2)
        x1, x2 = pair_ball_centers(a, b, R)
        return cls(a, b, float(R), x1, x2)

    def contains(self, p, tol: float = 0.0) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        d1 = np.linalg.norm(p - self.x1, axis=-1)
        d2 = np.linalg.norm(p - self.x2, axis=-1)
        lim = self.R + tol
        return (d1 <= lim) & (d2 <= lim)


def lens_contains(lens: Lens, p, tol: float = 0.0):
    return lens.contains(p, tol)


class TriangleKind(str, Enum):
    ACUTE = "acute"
    RIGHT = "right"
    OBTUSE = "obtuse"


def classify_triangle(V, tol: float = 1e-12) -> tuple[TriangleKind, int | None]:
    """Classify by the largest angle; returns the index of that vertex unless acute."""
    p = as_points(V, dim=2, dedupe=False)
    if p.shape[0] != 3:
        raise DegenerateInput("a triangle needs exactly three points")
    if is_collinear(p):
        raise DegenerateInput("collinear points do not form a triangle")
    cosines = []
    for i in range(3):
        u = p[(i + 1) % 3] - p[i]
        v = p[(i + 2) % 3] - p[i]
        cosines.append(float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v))))
    major = int(np.argmin(cosines))
    c = cosines[major]
    if abs(c) <= tol:
        return TriangleKind.RIGHT, major
    if c < 0:
        return TriangleKind.OBTUSE, major
    return TriangleKind.ACUTE, None


def orthocenter(V) -> np.ndarray:
    p = as_points(V, dim=2, dedupe=False)
    a, b, c = p
    # (y - a).(b - c) = 0 and (y - b).(c - a) = 0
    m = np.array([b - c, c - a])
    rhs = np.array([a @ (b - c), b @ (c - a)])
    return np.linalg.solve(m, rhs)


def triangle_contains(V, p, tol: float = 0.0) -> np.ndarray:
    """Closed triangle membership with signed edge distances >= -tol."""
    v = as_points(V, dim=2, dedupe=False)
    p = np.asarray(p, dtype=float)
    area2 = (v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1]) - (v[1, 1] - v[0, 1]) * (v[2, 0] - v[0, 0])
    sign = 1.0 if area2 > 0 else -1.0
    inside = np.ones(p.shape[:-1], dtype=bool)
    for i in range(3):
        q, r = v[i], v[(i + 1) % 3]
        e = r - q
        cross = e[0] * (p[..., 1] - q[1]) - e[1] * (p[..., 0] - q[0])
        inside &= sign * cross / np.hypot(*e) >= -tol
    return inside
