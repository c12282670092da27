"""Occupancy lattices: construction, windows and the binary dump format."""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass, replace

import numpy as np

from ..errors import InvalidParameters, ResourceLimit, Unsupported
from . import shapes

MAGIC = b"RBGR"
FORMAT_VERSION = 1
DEFAULT_MAX_CELLS = 90_000_000


@dataclass(frozen=True, eq=False)
class Grid:
    """Cubic lattice with spacing h; cell i has its center at origin + i*h.

    ``sites`` are points of the body kept at full precision next to their
    lattice cells. ``sites_only`` marks bodies made of nothing but sites.
    """

    origin: np.ndarray
    spacing: float
    occupancy: np.ndarray
    sites: np.ndarray | None = None
    sites_only: bool = False
    whole_space: bool = False

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=bool)
        if occ.ndim not in (2, 3, 4):
            raise Unsupported(f"lattices are 2-, 3- or 4-dimensional, got {occ.ndim}")
        if not self.spacing > 0:
            raise InvalidParameters("lattice spacing must be positive")
        origin = np.asarray(self.origin, dtype=float)
        if origin.shape != (occ.ndim,):
            raise InvalidParameters("origin dimension does not match the occupancy array")
        occ.flags.writeable = False
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(self, "origin", origin)
        if self.sites is not None:
            s = np.atleast_2d(np.asarray(self.sites, dtype=float))
            s.flags.writeable = False
            object.__setattr__(self, "sites", s)

    @property
    def dim(self) -> int:
        return self.occupancy.ndim

    @property
    def extents(self) -> tuple[int, ...]:
        return self.occupancy.shape

    @property
    def guard(self) -> float:
        """Half the cell diagonal: the largest distance from a cell center to its cube."""
        return 0.5 * self.spacing * np.sqrt(self.dim)

    @property
    def count(self) -> int:
        return int(self.occupancy.sum())

    def is_empty(self) -> bool:
        return not self.occupancy.any()

    def with_occupancy(self, occupancy: np.ndarray, **kw) -> "Grid":
        kw.setdefault("sites", None)
        kw.setdefault("sites_only", False)
        kw.setdefault("whole_space", False)
        return replace(self, occupancy=occupancy, **kw)

    def same_lattice(self, other: "Grid") -> bool:
        return (self.extents == other.extents and self.spacing == other.spacing
                and np.array_equal(self.origin, other.origin))

    def centers(self, index) -> np.ndarray:
        return self.origin + self.spacing * np.asarray(index, dtype=float)

    def occupied_centers(self) -> np.ndarray:
        return self.centers(np.argwhere(self.occupancy))

    def cell_of(self, points) -> np.ndarray:
        return shapes.nearest_cells(np.asarray(points, dtype=float), self.origin, self.spacing)

    def contains_index(self, index) -> np.ndarray:
        idx = np.atleast_2d(index)
        return np.all((idx >= 0) & (idx < np.asarray(self.extents)), axis=1)

    def occupied_bbox(self) -> tuple[np.ndarray, np.ndarray] | None:
        idx = [np.flatnonzero(self.occupancy.any(axis=tuple(j for j in range(self.dim) if j != k)))
               for k in range(self.dim)]
        if any(len(i) == 0 for i in idx):
            return None
        return np.array([i[0] for i in idx]), np.array([i[-1] for i in idx])

    def window(self) -> tuple[np.ndarray, np.ndarray]:
        return self.origin.copy(), self.centers(np.asarray(self.extents) - 1)


def reframe(grid: Grid, like: Grid) -> Grid:
    """Grid's occupancy moved onto ``like``'s window (same spacing, aligned lattice).

    Cells outside the new window are dropped; new cells are unoccupied.
    """
    if grid.spacing != like.spacing:
        raise InvalidParameters("reframe needs equal spacings")
    shift = (grid.origin - like.origin) / grid.spacing
    off = np.rint(shift).astype(np.int64)
    if np.any(np.abs(shift - off) > 1e-6):
        raise InvalidParameters("lattices are not aligned")
    out = np.zeros(like.extents, dtype=bool)
    src = []
    dst = []
    for k in range(grid.dim):
        lo = max(0, off[k])
        hi = min(like.extents[k], off[k] + grid.extents[k])
        if hi <= lo:
            return like.with_occupancy(out)
        dst.append(slice(lo, hi))
        src.append(slice(lo - off[k], hi - off[k]))
    out[tuple(dst)] = grid.occupancy[tuple(src)]
    return like.with_occupancy(out)


def snapped_window(lo, hi, margin: float, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    """Box [lo - margin, hi + margin] with corners on multiples of ``spacing``.

    Snapping keeps the world origin on the lattice whenever it is inside the box.
    """
    lo = np.asarray(lo, dtype=float) - margin
    hi = np.asarray(hi, dtype=float) + margin
    return np.floor(lo / spacing - 1e-9) * spacing, np.ceil(hi / spacing + 1e-9) * spacing


def lattice_extents(window, spacing: float) -> tuple[np.ndarray, tuple[int, ...]]:
    lo, hi = (np.asarray(w, dtype=float) for w in window)
    if lo.shape != hi.shape or np.any(hi < lo):
        raise InvalidParameters("window must be a nonempty box (lo <= hi on every axis)")
    ext = tuple(int(v) for v in np.floor((hi - lo) / spacing + 1e-9).astype(np.int64) + 1)
    return lo, ext


def rasterize(expr: shapes.ShapeExpr, window, spacing: float,
              max_cells: int = DEFAULT_MAX_CELLS) -> Grid:
    """Occupy every cell whose center satisfies the expression."""
    if not spacing > 0:
        raise InvalidParameters("spacing must be positive")
    origin, ext = lattice_extents(window, spacing)
    if origin.shape[0] != expr.dim:
        raise InvalidParameters(f"window is {origin.shape[0]}-D but the shape is {expr.dim}-D")
    if expr.dim not in (2, 3, 4):
        raise Unsupported(f"dimension {expr.dim} is not supported (2, 3 or 4)")
    n = int(np.prod(ext, dtype=np.int64))
    if n > max_cells:
        raise ResourceLimit(
            f"lattice of {n} cells exceeds the budget of {max_cells}; "
            f"use a coarser spacing or a smaller window")
    occ = np.zeros(ext, dtype=bool)
    # evaluate in slabs along axis 0 to bound temporaries
    per_slice = max(1, n // ext[0])
    step = max(1, 4_000_000 // per_slice)
    for a0 in range(0, ext[0], step):
        lo = np.zeros(len(ext), dtype=np.int64)
        hi = np.asarray(ext, dtype=np.int64)
        lo[0], hi[0] = a0, min(ext[0], a0 + step)
        slab = shapes.lattice_slab(origin, spacing, lo, hi)
        occ[lo[0]:hi[0]] = shapes.evaluate(expr, slab)
    sites = shapes.positive_sites(expr)
    return Grid(origin, float(spacing), occ, sites=sites, sites_only=shapes.is_point_set(expr))


def rasterize_for_hulloid(expr: shapes.ShapeExpr, R: float, spacing: float,
                          max_cells: int = DEFAULT_MAX_CELLS) -> Grid:
    """Rasterize a bounded shape on its bounding box inflated by 2R + 4h."""
    box = shapes.bounding_box(expr)
    if box is None:
        raise InvalidParameters("shape is unbounded; give an explicit window")
    window = snapped_window(box[0], box[1], hulloid_margin(R, spacing), spacing)
    return rasterize(expr, window, spacing, max_cells)


def hulloid_margin(R: float, spacing: float) -> float:
    return 2.0 * R + 4.0 * spacing


def from_points(points, R: float, spacing: float, max_cells: int = DEFAULT_MAX_CELLS) -> Grid:
    return rasterize_for_hulloid(shapes.Points(points), R, spacing, max_cells)


# --- binary dump ---------------------------------------------------------------

def dump(grid: Grid, fh) -> None:
    """Write header + bit-packed occupancy (little-endian bits, axis 0 fastest)."""
    ext = grid.extents
    fh.write(MAGIC)
    fh.write(struct.pack("<HB", FORMAT_VERSION, grid.dim))
    fh.write(struct.pack(f"<{grid.dim}I", *ext))
    fh.write(struct.pack(f"<{grid.dim}d", *grid.origin))
    fh.write(struct.pack("<d", grid.spacing))
    bits = np.packbits(grid.occupancy.ravel(order="F"), bitorder="little")
    fh.write(bits.tobytes())


def dumps(grid: Grid) -> bytes:
    buf = io.BytesIO()
    dump(grid, buf)
    return buf.getvalue()


def load(fh) -> Grid:
    magic = fh.read(4)
    if magic != MAGIC:
        raise InvalidParameters(f"not a grid dump (magic {magic!r})")
    version, dim = struct.unpack("<HB", fh.read(3))
    if version != FORMAT_VERSION:
        raise Unsupported(f"grid dump version {version} is not supported")
    ext = struct.unpack(f"<{dim}I", fh.read(4 * dim))
    origin = np.array(struct.unpack(f"<{dim}d", fh.read(8 * dim)))
    (spacing,) = struct.unpack("<d", fh.read(8))
    n = int(np.prod(ext, dtype=np.int64))
    payload = np.frombuffer(fh.read((n + 7) // 8), dtype=np.uint8)
    if payload.shape[0] != (n + 7) // 8:
        raise InvalidParameters("truncated grid dump")
    flat = np.unpackbits(payload, count=n, bitorder="little").astype(bool)
    return Grid(origin, spacing, flat.reshape(ext, order="F"))


def loads(data: bytes) -> Grid:
    return load(io.BytesIO(data))
