"""Constructive shape expressions evaluated at lattice cell centers.

Primitives: ball, halfspace, sphere_shell, points. Operators: union,
intersection, complement, difference. Expressions round-trip through plain
JSON-compatible dicts (see ``to_json`` / ``from_json``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import InvalidParameters


class ShapeExpr:
    dim: int

    def __or__(self, other: "ShapeExpr") -> "Union":
        return Union((self, other))

    def __and__(self, other: "ShapeExpr") -> "Intersection":
        return Intersection((self, other))

    def __invert__(self) -> "Complement":
        return Complement(self)

    def __sub__(self, other: "ShapeExpr") -> "Difference":
        return Difference(self, other)


@dataclass(frozen=True, eq=False)
class Ball(ShapeExpr):
    center: np.ndarray
    radius: float
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.radius > 0:
            raise InvalidParameters("ball radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True, eq=False)
class Halfspace(ShapeExpr):
    """Closed halfspace {x : <normal, x> <= offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise InvalidParameters("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", n / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]


@dataclass(frozen=True, eq=False)
class SphereShell(ShapeExpr):
    """Cells within thickness/2 of the sphere |x - center| = radius.

    With ``thickness=None`` the half-width is the lattice guard h*sqrt(d)/2, i.e.
    exactly the cells whose closed cube can touch the sphere.
    """

    center: np.ndarray
    radius: float
    thickness: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True, eq=False)
class Points(ShapeExpr):
    points: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        if p.shape[0] == 0:
            raise InvalidParameters("points primitive needs at least one point")
        object.__setattr__(self, "points", p)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class Union(ShapeExpr):
    children: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "children", _flatten(self.children, Union))
        _check_dims(self.children)

    @property
    def dim(self) -> int:
        return self.children[0].dim


@dataclass(frozen=True, eq=False)
class Intersection(ShapeExpr):
    children: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "children", _flatten(self.children, Intersection))
        _check_dims(self.children)

    @property
    def dim(self) -> int:
        return self.children[0].dim


@dataclass(frozen=True, eq=False)
class Complement(ShapeExpr):
    child: ShapeExpr

    @property
    def dim(self) -> int:
        return self.child.dim


@dataclass(frozen=True, eq=False)
class Difference(ShapeExpr):
    a: ShapeExpr
    b: ShapeExpr

    def __post_init__(self):
        _check_dims((self.a, self.b))

    @property
    def dim(self) -> int:
        return self.a.dim


def _flatten(children: Sequence[ShapeExpr], kind) -> tuple:
    out = []
    for c in children:
        if not isinstance(c, ShapeExpr):
            raise InvalidParameters(f"not a shape expression: {c!r}")
        if isinstance(c, kind):
            out.extend(c.children)
        else:
            out.append(c)
    if not out:
        raise InvalidParameters("operator needs at least one operand")
    return tuple(out)


def _check_dims(children) -> None:
    dims = {c.dim for c in children}
    if len(dims) != 1:
        raise InvalidParameters(f"mixed dimensions in one expression: {sorted(dims)}")


def union(*children: ShapeExpr) -> Union:
    return Union(tuple(children))


def intersection(*children: ShapeExpr) -> Intersection:
    return Intersection(tuple(children))


# --- evaluation ---------------------------------------------------------------

@dataclass
class LatticeSlab:
    """Cell centers of a block of the lattice, as open (broadcastable) axes."""

    axes: list[np.ndarray]
    origin: np.ndarray
    spacing: float
    index_lo: np.ndarray  # lattice index of the slab's first cell on every axis
    shape: tuple

    def squared_distance_to(self, c: np.ndarray) -> np.ndarray:
        total = None
        for ax, ck in zip(self.axes, c):
            term = (ax - ck) ** 2
            total = term if total is None else total + term
        return np.broadcast_to(total, self.shape)


def lattice_slab(origin, spacing: float, lo, hi) -> LatticeSlab:
    origin = np.asarray(origin, dtype=float)
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    dim = origin.shape[0]
    axes = []
    for k in range(dim):
        coords = origin[k] + spacing * np.arange(lo[k], hi[k], dtype=float)
        shape = [1] * dim
        shape[k] = coords.shape[0]
        axes.append(coords.reshape(shape))
    return LatticeSlab(axes, origin, float(spacing), lo, tuple(int(v) for v in hi - lo))


def nearest_cells(points: np.ndarray, origin: np.ndarray, spacing: float) -> np.ndarray:
    return np.rint((np.atleast_2d(points) - origin) / spacing).astype(np.int64)


def evaluate(expr: ShapeExpr, slab: LatticeSlab) -> np.ndarray:
    """Boolean membership of every cell center in the slab."""
    if isinstance(expr, Ball):
        d2 = slab.squared_distance_to(expr.center)
        r2 = expr.radius ** 2
        return d2 <= r2 if expr.closed else d2 < r2
    if isinstance(expr, Halfspace):
        total = None
        for ax, nk in zip(slab.axes, expr.normal):
            term = ax * nk
            total = term if total is None else total + term
        return np.broadcast_to(total <= expr.offset, slab.shape).copy()
    if isinstance(expr, SphereShell):
        half = (0.5 * expr.thickness if expr.thickness is not None
                else 0.5 * slab.spacing * np.sqrt(len(slab.axes)))
        dist = np.sqrt(slab.squared_distance_to(expr.center))
        return np.abs(dist - expr.radius) <= half
    if isinstance(expr, Points):
        out = np.zeros(slab.shape, dtype=bool)
        idx = nearest_cells(expr.points, slab.origin, slab.spacing) - slab.index_lo
        ok = np.all((idx >= 0) & (idx < np.asarray(slab.shape)), axis=1)
        if ok.any():
            out[tuple(idx[ok].T)] = True
        return out
    if isinstance(expr, Union):
        out = evaluate(expr.children[0], slab).copy()
        for c in expr.children[1:]:
            out |= evaluate(c, slab)
        return out
    if isinstance(expr, Intersection):
        out = evaluate(expr.children[0], slab).copy()
        for c in expr.children[1:]:
            out &= evaluate(c, slab)
        return out
    if isinstance(expr, Complement):
        return ~evaluate(expr.child, slab)
    if isinstance(expr, Difference):
        return evaluate(expr.a, slab) & ~evaluate(expr.b, slab)
    raise InvalidParameters(f"unknown shape node {type(expr).__name__}")


def positive_sites(expr: ShapeExpr) -> np.ndarray | None:
    """Points that the expression unions in at top level, kept at full precision."""
    if isinstance(expr, Points):
        return expr.points
    if isinstance(expr, Union):
        found = [p for p in (positive_sites(c) for c in expr.children) if p is not None]
        if found:
            return np.concatenate(found, axis=0)
    return None


def is_point_set(expr: ShapeExpr) -> bool:
    if isinstance(expr, Points):
        return True
    if isinstance(expr, Union):
        return all(is_point_set(c) for c in expr.children)
    return False


def bounding_box(expr: ShapeExpr) -> tuple[np.ndarray, np.ndarray] | None:
    """Axis-aligned box containing the set, or None when it is unbounded."""
    d = expr.dim
    if isinstance(expr, (Ball, SphereShell)):
        pad = expr.radius + (0.5 * expr.thickness if getattr(expr, "thickness", None) else 0.0)
        return expr.center - pad, expr.center + pad
    if isinstance(expr, Points):
        return expr.points.min(axis=0), expr.points.max(axis=0)
    if isinstance(expr, Union):
        boxes = [bounding_box(c) for c in expr.children]
        if any(b is None for b in boxes):
            return None
        return (np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0))
    if isinstance(expr, Intersection):
        boxes = [b for b in (bounding_box(c) for c in expr.children) if b is not None]
        if not boxes:
            return None
        lo = np.max([b[0] for b in boxes], axis=0)
        hi = np.min([b[1] for b in boxes], axis=0)
        return lo, np.maximum(hi, lo)
    if isinstance(expr, Difference):
        return bounding_box(expr.a)
    if isinstance(expr, (Halfspace, Complement)):
        return None
    raise InvalidParameters(f"unknown shape node {type(expr).__name__}")


# --- JSON ---------------------------------------------------------------------

def to_json(expr: ShapeExpr) -> dict:
    if isinstance(expr, Ball):
        return {"kind": "ball", "center": expr.center.tolist(), "radius": float(expr.radius),
                "closure": "closed" if expr.closed else "open"}
    if isinstance(expr, Halfspace):
        return {"kind": "halfspace", "normal": expr.normal.tolist(), "offset": float(expr.offset)}
    if isinstance(expr, SphereShell):
        out = {"kind": "sphere_shell", "center": expr.center.tolist(), "radius": float(expr.radius)}
        if expr.thickness is not None:
            out["thickness"] = float(expr.thickness)
        return out
    if isinstance(expr, Points):
        return {"kind": "points", "points": expr.points.tolist()}
    if isinstance(expr, Union):
        return {"kind": "union", "args": [to_json(c) for c in expr.children]}
    if isinstance(expr, Intersection):
        return {"kind": "intersection", "args": [to_json(c) for c in expr.children]}
    if isinstance(expr, Complement):
        return {"kind": "complement", "arg": to_json(expr.child)}
    if isinstance(expr, Difference):
        return {"kind": "difference", "args": [to_json(expr.a), to_json(expr.b)]}
    raise InvalidParameters(f"unknown shape node {type(expr).__name__}")


def from_json(node: dict) -> ShapeExpr:
    if not isinstance(node, dict) or "kind" not in node:
        raise InvalidParameters(f"shape node must be an object with a 'kind': {node!r}")
    kind = node["kind"]
    try:
        if kind == "ball":
            closure = node.get("closure", "closed")
            if closure not in ("open", "closed"):
                raise InvalidParameters(f"ball closure must be 'open' or 'closed', got {closure!r}")
            return Ball(node["center"], float(node["radius"]), closure == "closed")
        if kind == "halfspace":
            return Halfspace(node["normal"], float(node["offset"]))
        if kind == "sphere_shell":
            t = node.get("thickness")
            return SphereShell(node["center"], float(node["radius"]), None if t is None else float(t))
        if kind == "points":
            return Points(node["points"])
        if kind == "union":
            return Union(tuple(from_json(c) for c in node["args"]))
        if kind == "intersection":
            return Intersection(tuple(from_json(c) for c in node["args"]))
        if kind == "complement":
            return Complement(from_json(node["arg"]))
        if kind == "difference":
            a, b = node["args"]
            return Difference(from_json(a), from_json(b))
    except KeyError as exc:
        raise InvalidParameters(f"shape node {kind!r} is missing field {exc}") from None
    raise InvalidParameters(f"unknown shape kind {kind!r}")
