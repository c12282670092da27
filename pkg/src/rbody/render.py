"""Deterministic SVG figures of planar scenes (points, circles, arcs, lattices)."""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Circle, Polygon  # noqa: E402

from .errors import Unsupported  # noqa: E402
from .grid.lattice import Grid  # noqa: E402
from .hulloid2d import Arc, HulloidKind, TripleHulloid  # noqa: E402

FIG_INCHES = (6.0, 6.0)
GRID_CMAP = "Greys"


@dataclass
class Scene:
    points: list = field(default_factory=list)    # arrays of shape (n, 2)
    balls: list = field(default_factory=list)     # (center, radius)
    arcs: list = field(default_factory=list)      # Arc
    regions: list = field(default_factory=list)   # closed polygons (n, 2)
    grids: list = field(default_factory=list)     # 2D Grid
    title: str = ""


def _check_2d(scene: Scene) -> None:
    for p in scene.points:
        if np.asarray(p).reshape(-1, np.asarray(p).shape[-1]).shape[1] != 2:
            raise Unsupported("only planar scenes can be rendered")
    for c, _ in scene.balls:
        if np.asarray(c).shape != (2,):
            raise Unsupported("only planar scenes can be rendered")
    for g in scene.grids:
        if g.dim != 2:
            raise Unsupported(f"only 2D grids can be rendered, got {g.dim}D")


def _bounds(scene: Scene) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([np.inf, np.inf])
    hi = -lo
    for p in scene.points + scene.regions:
        p = np.atleast_2d(p)
        lo, hi = np.minimum(lo, p.min(axis=0)), np.maximum(hi, p.max(axis=0))
    for c, r in scene.balls:
        lo, hi = np.minimum(lo, np.asarray(c) - r), np.maximum(hi, np.asarray(c) + r)
    for a in scene.arcs:
        pts = a.point(np.linspace(0, 1, 33))
        lo, hi = np.minimum(lo, pts.min(axis=0)), np.maximum(hi, pts.max(axis=0))
    for g in scene.grids:
        box = g.occupied_bbox()
        if box is not None:
            lo = np.minimum(lo, g.centers(box[0]) - g.spacing)
            hi = np.maximum(hi, g.centers(box[1]) + g.spacing)
    if not np.all(np.isfinite(lo)):
        return np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    pad = 0.05 * max(float((hi - lo).max()), 1e-9)
    return lo - pad, hi + pad


def render_svg_bytes(scene: Scene) -> bytes:
    _check_2d(scene)
    lo, hi = _bounds(scene)
    with plt.rc_context({"svg.hashsalt": "rbody", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=FIG_INCHES)
        for k, g in enumerate(scene.grids):
            box = g.occupied_bbox()
            if box is None:
                continue
            a = np.maximum(box[0] - 2, 0)
            b = np.minimum(box[1] + 3, np.asarray(g.extents))
            occ = g.occupancy[a[0]:b[0], a[1]:b[1]].T
            x0, y0 = g.centers(a) - 0.5 * g.spacing
            x1, y1 = g.centers(b) - 0.5 * g.spacing
            # later grids draw on top in darker tones; empty cells stay transparent
            layer = np.ma.masked_where(~occ, np.full(occ.shape, k + 1.0))
            ax.imshow(layer, origin="lower", extent=(x0, x1, y0, y1), cmap=GRID_CMAP,
                      vmin=0, vmax=max(len(scene.grids), 1) + 1, interpolation="nearest",
                      zorder=0)
        for poly in scene.regions:
            ax.add_patch(Polygon(np.asarray(poly), closed=True, facecolor="#f4c27a",
                                 edgecolor="none", zorder=1))
        for c, r in scene.balls:
            ax.add_patch(Circle(tuple(c), r, fill=False, edgecolor="#5a7fb5",
                                linestyle="--", linewidth=0.8, zorder=2))
        for a in scene.arcs:
            pts = a.point(np.linspace(0, 1, 129))
            ax.plot(pts[:, 0], pts[:, 1], color="#b5402a", linewidth=1.6, zorder=3)
        for p in scene.points:
            p = np.atleast_2d(p)
            ax.plot(p[:, 0], p[:, 1], "o", color="black", markersize=3.5, zorder=4)
        ax.set_xlim(lo[0], hi[0])
        ax.set_ylim(lo[1], hi[1])
        ax.set_aspect("equal")
        if scene.title:
            ax.set_title(scene.title)
        fig.canvas.draw()
        # world box -> viewport box in SVG points (origin top-left)
        height = fig.get_figheight() * 72
        (px0, py0), (px1, py1) = ax.transData.transform([lo, hi]) * (72 / fig.dpi)
        transform = {"world": [lo.tolist(), hi.tolist()],
                     "viewport": [[px0, height - py0], [px1, height - py1]]}
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={
            "Date": None, "Creator": "rbody",
            "Description": "world-to-viewport " + json.dumps(transform, sort_keys=True)})
        plt.close(fig)
    return buf.getvalue()


def hulloid_scene(H: TripleHulloid, title: str = "") -> Scene:
    scene = Scene(points=[H.V], title=title)
    if H.kind is HulloidKind.FULL:
        tri = H.triangle
        scene.balls = [(c, H.R) for c in tri.centers]
        scene.arcs = list(tri.arcs)
        scene.regions = [_triangle_outline(tri.arcs)]
    return scene


def _triangle_outline(arcs: tuple[Arc, Arc, Arc]) -> np.ndarray:
    """Closed polygon following the three arcs end to end."""
    pieces = [a.point(np.linspace(0, 1, 65)) for a in arcs]
    out = [pieces[0]]
    rest = pieces[1:]
    while rest:
        tail = out[-1][-1]
        k = int(np.argmin([min(np.linalg.norm(p[0] - tail), np.linalg.norm(p[-1] - tail))
                           for p in rest]))
        p = rest.pop(k)
        if np.linalg.norm(p[-1] - tail) < np.linalg.norm(p[0] - tail):
            p = p[::-1]
        out.append(p)
    return np.concatenate(out, axis=0)


def grid_scene(grid: Grid, points=None, title: str = "", overlay: Grid | None = None) -> Scene:
    """The grid, with ``overlay`` (e.g. the body inside its hulloid) drawn darker on top."""
    scene = Scene(grids=[grid] if overlay is None else [grid, overlay], title=title)
    if points is not None:
        scene.points = [np.atleast_2d(points)]
    return scene
