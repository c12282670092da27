"""Exact hulloid membership for finite point bodies.

For a finite set P, co_R(P) is the set of points y with dist(y, P'_R) >= R,
where P'_R = {x : dist(x, P) >= R} is the closed complement of a union of
balls. The nearest point of P'_R to y sits on an intersection of at most d
of the spheres |x - p| = R; enumerating those intersections gives the
distance exactly (up to rounding), with no lattice involved.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..geom import DEGENERACY_THRESHOLD, normalized_gram_det

FEASIBILITY_RTOL = 1e-12


@dataclass
class _Face:
    center: np.ndarray          # center of the intersection sphere
    radius: float               # its radius
    tangent: np.ndarray         # orthonormal rows spanning the sites' affine directions
    normal_fallback: np.ndarray  # unit vector orthogonal to ``tangent``
    fixed: np.ndarray | None    # the two points when the intersection is 0-dimensional


def _orthonormal_complement(rows: np.ndarray, dim: int) -> np.ndarray:
    if rows.shape[0] == 0:
        return np.eye(dim)
    _, _, vt = np.linalg.svd(rows, full_matrices=True)
    return vt[rows.shape[0]:]


def _faces(sites: np.ndarray, R: float) -> list[_Face]:
    n, d = sites.shape
    faces = []
    for k in range(1, min(d, n) + 1):
        for idx in combinations(range(n), k):
            p = sites[list(idx)]
            if k == 1:
                c, r2 = p[0], 0.0
                tangent = np.zeros((0, d))
            else:
                b = p[1:] - p[0]
                if normalized_gram_det(b) < DEGENERACY_THRESHOLD:
                    continue
                g = b @ b.T
                lam = np.linalg.solve(g, 0.5 * np.diag(g))
                c = p[0] + lam @ b
                r2 = float(np.sum((c - p[0]) ** 2))
                q, _ = np.linalg.qr(b.T)
                tangent = q.T
            if r2 > R * R:
                continue
            rho = float(np.sqrt(R * R - r2))
            normals = _orthonormal_complement(tangent, d)
            fixed = None
            if k == d:
                fixed = np.array([c + rho * normals[0], c - rho * normals[0]])
            faces.append(_Face(c, rho, tangent, normals[0], fixed))
    return faces


class FarSetDistance:
    """Distance from query points to {x : dist(x, sites) >= R}."""

    def __init__(self, sites, R: float):
        self.sites = np.atleast_2d(np.asarray(sites, dtype=float))
        self.R = float(R)
        self._faces = _faces(self.sites, self.R)
        fixed = [f.fixed for f in self._faces if f.fixed is not None]
        if fixed:
            pts = np.concatenate(fixed, axis=0)
            self._fixed = pts[self._feasible(pts)]
        else:
            self._fixed = np.zeros((0, self.sites.shape[1]))

    def _feasible(self, z: np.ndarray) -> np.ndarray:
        lim = (self.R * (1 - FEASIBILITY_RTOL)) ** 2
        d2 = ((z[:, None, :] - self.sites[None, :, :]) ** 2).sum(axis=2)
        return d2.min(axis=1) >= lim

    def __call__(self, y, chunk: int = 65536) -> np.ndarray:
        y = np.atleast_2d(np.asarray(y, dtype=float))
        out = np.empty(y.shape[0])
        for lo in range(0, y.shape[0], chunk):
            out[lo:lo + chunk] = self._eval(y[lo:lo + chunk])
        return out

    def nearest(self, y, chunk: int = 65536) -> tuple[np.ndarray, np.ndarray]:
        """Distances to the far set and the nearest far points."""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        dist = np.empty(y.shape[0])
        near = np.empty_like(y)
        for lo in range(0, y.shape[0], chunk):
            dist[lo:lo + chunk], near[lo:lo + chunk] = self._eval(y[lo:lo + chunk], True)
        return dist, near

    @property
    def vertices(self) -> np.ndarray:
        """Far-set points where d of the spheres meet."""
        return self._fixed

    def _eval(self, y: np.ndarray, with_points: bool = False):
        best = np.full(y.shape[0], np.inf)
        arg = np.zeros_like(y)
        if self._fixed.shape[0]:
            d2 = ((y[:, None, :] - self._fixed[None, :, :]) ** 2).sum(axis=2)
            j = d2.argmin(axis=1)
            best = np.sqrt(d2[np.arange(y.shape[0]), j])
            arg = self._fixed[j]
        for f in self._faces:
            if f.fixed is not None:
                continue
            w = y - f.center
            if f.tangent.shape[0]:
                w = w - (w @ f.tangent.T) @ f.tangent
            norm = np.linalg.norm(w, axis=1)
            small = norm <= 1e-15 * max(self.R, 1.0)
            w[small] = f.normal_fallback
            norm[small] = 1.0
            z = f.center + f.radius * (w / norm[:, None])
            ok = self._feasible(z)
            if ok.any():
                dist = np.linalg.norm(y[ok] - z[ok], axis=1)
                better = dist < best[ok]
                rows = np.flatnonzero(ok)[better]
                best[rows] = dist[better]
                arg[rows] = z[ok][better]
        # queries already at distance >= R from every site belong to the far set
        d2 = ((y[:, None, :] - self.sites[None, :, :]) ** 2).sum(axis=2)
        far = d2.min(axis=1) >= self.R ** 2
        best[far] = 0.0
        arg[far] = y[far]
        return (best, arg) if with_points else best

    def depth(self, y) -> np.ndarray:
        """R - dist(y, far set): <= 0 exactly on the hulloid, 1-Lipschitz."""
        return self.R - self(y)


def hulloid_cells(origin, spacing: float, extents, sites, R: float,
                  tau: float | None = None, min_fraction: float = 1 / 64) -> np.ndarray:
    """Cells whose closed cube meets co_R(sites).

    A cube is accepted as soon as a sample inside it has depth <= tau. It is
    rejected once the depth at its center exceeds the center's Lipschitz
    radius, or once a single open R-ball centered in the far set covers it.
    Undecided cubes are split until their half-width drops below
    ``min_fraction * spacing`` and then accepted.
    """
    origin = np.asarray(origin, dtype=float)
    ext = np.asarray(extents, dtype=np.int64)
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    dim = origin.shape[0]
    tau = 1e-9 * R if tau is None else tau
    far = FarSetDistance(sites, R)
    guard = 0.5 * spacing * np.sqrt(dim)
    out = np.zeros(tuple(ext), dtype=bool)

    site_idx = np.rint((sites - origin) / spacing).astype(np.int64)
    inside = np.all((site_idx >= 0) & (site_idx < ext), axis=1)
    out[tuple(site_idx[inside].T)] = True

    cand = _candidate_cells(origin, spacing, ext, sites, R + guard)
    if cand.shape[0] == 0:
        return out
    centers = origin + spacing * cand
    phi = far.depth(centers)
    out[tuple(cand[phi <= tau].T)] = True
    amb = (phi > tau) & (phi <= guard)
    cells = cand[amb]
    if cells.shape[0] == 0:
        return out

    signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * dim), indexing="ij")).reshape(dim, -1).T
    owner = np.arange(cells.shape[0])
    pts = origin + spacing * cells.astype(float)
    half = 0.5 * spacing
    accepted = np.zeros(cells.shape[0], dtype=bool)
    while owner.shape[0]:
        dist, near = far.nearest(pts)
        phi = R - dist
        hit = phi <= tau
        accepted[owner[hit]] = True
        live = ~hit & ~accepted[owner] & (phi <= half * np.sqrt(dim))
        live &= ~_cube_in_open_ball(pts, half, near, R)
        for v in far.vertices:
            live &= ~_cube_in_open_ball(pts, half, v, R)
        pts, owner = pts[live], owner[live]
        if half <= min_fraction * spacing:
            # unresolved at the finest level: keep the cell (errs toward membership)
            accepted[owner] = True
            break
        half *= 0.5
        pts = (pts[:, None, :] + half * signs[None, :, :]).reshape(-1, dim)
        owner = np.repeat(owner, signs.shape[0])
    out[tuple(cells[accepted].T)] = True
    return out


def _cube_in_open_ball(centers: np.ndarray, half: float, ball_centers, R: float) -> np.ndarray:
    """Whether each cube (center, half-width) lies inside the open ball of radius R."""
    far_corner = np.abs(centers - ball_centers) + half
    return (far_corner ** 2).sum(axis=1) < (R * (1 - FEASIBILITY_RTOL)) ** 2


def _candidate_cells(origin, spacing, ext, sites, radius) -> np.ndarray:
    """Lattice indices within ``radius`` of some site, each listed once."""
    dim = origin.shape[0]
    mask = np.zeros(tuple(ext), dtype=bool)
    reach = int(np.ceil(radius / spacing)) + 1
    for s in sites:
        c = np.rint((s - origin) / spacing).astype(np.int64)
        lo = np.maximum(c - reach, 0)
        hi = np.minimum(c + reach + 1, ext)
        if np.any(hi <= lo):
            continue
        axes = np.ix_(*[np.arange(lo[k], hi[k]) for k in range(dim)])
        d2 = sum((origin[k] + spacing * axes[k] - s[k]) ** 2 for k in range(dim))
        block = tuple(slice(lo[k], hi[k]) for k in range(dim))
        mask[block] |= d2 < radius * radius
    return np.argwhere(mask)
