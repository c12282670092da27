"""Named constructions around regular simplices and their certification.

Builders return shape expressions plus the outcomes they should produce;
``certify`` rasterizes them and checks those outcomes on the lattice.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import hulloid2d
from .errors import InvalidParameters, Unsupported
from .geom import circumsphere
from .grid import lattice, ops
from .grid import shapes as S
from .grid.sites import FarSetDistance
from .report import VerificationReport

SUPPORTED_DIMS = (2, 3, 4)
DEFAULT_SEED = 20240611


def default_spacing(dim: int, R: float) -> float:
    if dim == 2:
        return R / 200
    if dim == 3:
        return R / 60
    raise Unsupported("lattice certification runs in 2 and 3 dimensions; 4D uses sampling checks")


@dataclass(frozen=True, eq=False)
class SimplexConfig:
    d: int
    R0: float
    W: np.ndarray               # (d+1, d) vertices on the sphere of radius R0
    facet_centers: np.ndarray   # o_j = -(d/2) k_j

    @property
    def R(self) -> float:
        return self.d * self.R0 / 2


def _unit_simplex(d: int) -> np.ndarray:
    if d == 2:
        a = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
        return np.column_stack([np.cos(a), np.sin(a)])
    if d == 3:
        return np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    # centered standard basis of R^(d+1), written in an orthonormal basis of its hyperplane
    e = np.eye(d + 1) - 1.0 / (d + 1)
    q, _ = np.linalg.qr(e[:, :d])
    v = e @ q
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def regular_simplex(d: int, R0: float = 1.0) -> SimplexConfig:
    if d not in SUPPORTED_DIMS:
        raise Unsupported(f"regular simplices are built for d in {SUPPORTED_DIMS}, got {d}")
    if not R0 > 0:
        raise InvalidParameters("R0 must be positive")
    W = R0 * _unit_simplex(d)
    return SimplexConfig(d, float(R0), W, -(d / 2) * W)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def simplex_identities_check(S_: SimplexConfig, samples: int = 100_000,
                             seed: int = DEFAULT_SEED) -> VerificationReport:
    d, R0, W, o, R = S_.d, S_.R0, S_.W, S_.facet_centers, S_.R
    rep = VerificationReport(f"regular simplex identities d={d}",
                             metadata={"d": d, "R0": R0, "R": R, "samples": samples, "seed": seed})
    off = ~np.eye(d + 1, dtype=bool)
    gram = W @ W.T
    rep.add("vertices on the sphere", float(np.max(np.abs(np.sqrt(np.diag(gram)) - R0)) / R0),
            1e-12, np.max(np.abs(np.sqrt(np.diag(gram)) - R0)) / R0 <= 1e-12,
            "vertices of a regular simplex on a sphere")
    err = float(np.max(np.abs(gram[off] - (-R0 ** 2 / d)))) / R0 ** 2
    rep.add("Gram off-diagonal = -R0^2/d", float(gram[off].mean()), -R0 ** 2 / d, err <= 1e-12,
            "inner products of simplex vertices", relative_error=err)
    rep.add("vertex sum is zero", float(np.linalg.norm(W.sum(axis=0))) / R0, 1e-12,
            np.linalg.norm(W.sum(axis=0)) / R0 <= 1e-12, "vertices sum to the center")
    dist = np.linalg.norm(W[:, None] - W[None], axis=2)[off]
    want = np.sqrt(2 * (d + 1) / d) * R0
    rep.add("edge length sqrt(2(d+1)/d) R0", float(dist.mean()), want,
            np.max(np.abs(dist - want)) / want <= 1e-12, "edge length of the simplex")
    oo = np.linalg.norm(o[:, None] - o[None], axis=2)[off]
    want = 2 * R * np.sqrt(0.5 + 1 / (2 * d))
    rep.add("facet-ball centers 2R sqrt(1/2 + 1/(2d)) apart", float(oo.mean()), want,
            np.max(np.abs(oo - want)) / want <= 1e-12, "distance between facet-ball centers")
    ok_r = np.linalg.norm(o[:, None] - W[None], axis=2)[off]
    rep.add("|o_j - k_i| = R for i != j", float(ok_r.mean()), R,
            np.max(np.abs(ok_r - R)) / R <= 1e-12, "facet balls pass through the other vertices")
    worst = 0.0
    for i in range(d + 1):
        c, _ = circumsphere(np.delete(W, i, axis=0))
        worst = max(worst, float(np.linalg.norm(c + W[i] / d)))
    rep.add("facet sphere centered at -k_i/d", worst, 1e-12 * R0, worst <= 1e-12 * R0,
            "facet spheres of the simplex")
    bound = R0 * np.arccos(1 / d)
    rng = np.random.default_rng(seed)
    p = rng.normal(size=(samples, d))
    p *= R0 / np.linalg.norm(p, axis=1, keepdims=True)
    cosines = np.clip((p @ W.T).max(axis=1) / R0 ** 2, -1, 1)
    emp = float(R0 * np.arccos(cosines).max())
    # the bound is attained at -k_i, include those directions too
    anti = -W
    emp = max(emp, float(R0 * np.arccos(np.clip((anti @ W.T).max(axis=1) / R0 ** 2, -1, 1)).max()))
    rep.add("covering radius <= R0 arccos(1/d)", emp, bound, emp <= bound * (1 + 1e-12),
            "spherical distance from the sphere to the vertex set")
    return rep


def origin_membership_check(S_: SimplexConfig, samples: int = 100_000, delta: float = 1e-3,
                            seed: int = DEFAULT_SEED, R: float | None = None) -> VerificationReport:
    """No sampled open R-ball containing 0 avoids the vertices."""
    R = S_.R if R is None else float(R)
    d, W = S_.d, S_.W
    rng = np.random.default_rng(seed)
    # uniform in the ball of radius R - delta
    z = rng.normal(size=(samples, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    z *= (R - delta) * rng.random((samples, 1)) ** (1 / d)
    unit = W / np.linalg.norm(W, axis=1, keepdims=True)
    z = np.concatenate([np.zeros((1, d)), (R - delta) * unit, -(R - delta) * unit, z])
    gap = np.linalg.norm(z[:, None] - W[None], axis=2).min(axis=1)
    k = int(np.argmax(gap))
    ok = bool(gap[k] < R)
    rep = VerificationReport(f"origin in the hulloid of the vertices d={d}", metadata={
        "d": d, "R0": S_.R0, "R": R, "delta": delta, "samples": int(z.shape[0]), "seed": seed})
    rep.add("every sampled ball containing 0 meets the vertices", float(gap[k]), R, ok,
            "a point is in the hulloid iff no open R-ball through it avoids the body",
            witness_center=None if ok else z[k])
    return rep


def origin_threshold(S_: SimplexConfig, iters: int = 60) -> float:
    """Smallest radius rho at which 0 belongs to co_rho(W), by bisection on exact depth."""
    lo, hi = S_.R0, S_.R * (1 + 1e-9)
    if FarSetDistance(S_.W, hi).depth(np.zeros((1, S_.d)))[0] > 1e-9 * S_.R:
        return float("inf")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if FarSetDistance(S_.W, mid).depth(np.zeros((1, S_.d)))[0] <= 1e-12 * S_.R:
            hi = mid
        else:
            lo = mid
    return hi


# --- named examples ------------------------------------------------------------

EXAMPLE_NAMES = ("disc2d", "disc2d_simply_connected", "disc_nd", "simplex_hulloid",
                 "nonclosure", "k2gap")


@dataclass
class ExampleSpec:
    name: str
    params: dict
    shape: S.ShapeExpr
    expected: dict
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "params": _jsonable(self.params),
                "shape": S.to_json(self.shape), "expected": _jsonable(self.expected)}


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    return v


def build_example(name: str, R: float = 1.0, **params) -> ExampleSpec:
    if not R > 0:
        raise InvalidParameters("R must be positive")
    if name in ("disc2d", "disc2d_simply_connected"):
        return _disc2d(R, simply_connected=name.endswith("connected"), **params)
    if name == "disc_nd":
        return _disc_nd(R, **params)
    if name == "simplex_hulloid":
        return _simplex_hulloid(R, **params)
    if name == "nonclosure":
        return _nonclosure(R, **params)
    if name == "k2gap":
        return _k2gap(R, **params)
    raise InvalidParameters(f"unknown example {name!r}; choose from {', '.join(EXAMPLE_NAMES)}")


def _disc2d(R: float, simply_connected: bool, R0: float | None = None,
            strip_width: float | None = None, outer: float = 4.0) -> ExampleSpec:
    R0 = 0.7 * R if R0 is None else float(R0)
    if not R / np.sqrt(3) < R0 < R:
        raise InvalidParameters(f"needs R/sqrt(3) < R0 < R, got R0={R0}, R={R}")
    cfg = regular_simplex(2, R0)
    balls = hulloid2d.johnson_circles(cfg.W, R)
    o = np.array([b.center for b in balls])
    D = S.Ball(np.zeros(2), outer * R)
    removed = [S.Ball(np.zeros(2), R0, closed=False)] + [S.Ball(c, R, closed=False) for c in o]
    shape = S.Difference(D, S.union(*removed))
    params = {"R": R, "R0": R0, "outer_radius": outer * R, "o": o}
    expected = {"components_E": 1, "components_hulloid": 2, "vertices_in_hulloid": True}
    if simply_connected:
        w = R / 10 if strip_width is None else float(strip_width)
        n = o[0] / np.linalg.norm(o[0])
        t = np.array([-n[1], n[0]])
        # radial corridor from the boundary of B(o_1, R) out through the outer circle
        start = np.linalg.norm(o[0])
        strip = S.intersection(S.Halfspace(t, w / 2), S.Halfspace(-t, w / 2),
                               S.Halfspace(-n, -start))
        extra_full = shape
        shape = S.Difference(shape, strip)
        params.update(strip_width=w, strip_direction=n, strip_start=start)
        expected["complement_components"] = 1
    tri = hulloid2d.triple_hulloid(cfg.W, R)
    name = "disc2d_simply_connected" if simply_connected else "disc2d"
    extra = {"vertices": cfg.W, "triangle": tri, "full_shape": extra_full if simply_connected else shape}
    return ExampleSpec(name, params, shape, expected, extra)


def _disc_nd(R: float, d: int = 3) -> ExampleSpec:
    if d not in (3, 4):
        raise InvalidParameters("disc_nd needs d > 2 (3 on the lattice, 4 by sampling)")
    cfg = regular_simplex(d, 2 * R / d)
    D = S.Ball(np.zeros(d), np.sqrt(2) * R)
    removed = S.union(*[S.Ball(c, R, closed=False) for c in cfg.facet_centers],
                      S.Points(np.zeros((1, d))))
    # the vertices lie in E; listing them as points keeps them exact for the hulloid
    shape = S.union(S.Difference(D, removed), S.Points(cfg.W))
    params = {"R": R, "d": d, "R0": cfg.R0, "outer_radius": np.sqrt(2) * R}
    expected = {"components_E": 1, "components_hulloid": 2, "extra_component_at_origin": True,
                "dist_origin_to_E_at_least": cfg.R0 / d, "is_r_body": False, "k2_membership": True}
    return ExampleSpec("disc_nd", params, shape, expected, {"simplex": cfg})


def _simplex_hulloid(R: float, d: int = 3, R0: float | None = None) -> ExampleSpec:
    R0 = 2 * R / d if R0 is None else float(R0)
    cfg = regular_simplex(d, R0)
    params = {"R": R, "d": d, "R0": R0}
    expected = {"hulloid": "W plus the origin", "extra_components": 1, "is_r_body": False}
    return ExampleSpec("simplex_hulloid", params, S.Points(cfg.W), expected, {"simplex": cfg})


def _nonclosure(R: float, n: int = 0, eps0: float | None = None) -> ExampleSpec:
    eps0 = 0.05 * R if eps0 is None else float(eps0)
    Wn, Rn, eps = nonclosure_points(n, eps0, R)
    params = {"R": R, "n": n, "eps0": eps0, "eps_n": eps, "R_n": Rn}
    expected = {"is_r_body": True, "hausdorff_to_limit": eps}
    return ExampleSpec("nonclosure", params, S.Points(Wn), expected,
                       {"simplex": regular_simplex(3, 2 * R / 3)})


def _k2gap(R: float, r: float | None = None, r1: float | None = None,
           spacing: float | None = None, dim: int = 2) -> ExampleSpec:
    r = 2 * R if r is None else float(r)
    r1 = R / 2 if r1 is None else float(r1)
    if not r1 < R < r:
        raise InvalidParameters(f"needs r1 < R < r, got r1={r1}, R={R}, r={r}")
    h = default_spacing(dim, R) if spacing is None else float(spacing)
    c = np.zeros(dim)
    # a one-cell-thick shell: thick enough to stay connected, thin enough to have no interior
    shape = S.union(S.Difference(S.Ball(c, r), S.Ball(c, R, closed=False)),
                    S.SphereShell(c, r1, thickness=h))
    params = {"R": R, "r": r, "r1": r1, "dim": dim, "shell_thickness": h}
    expected = {"is_r_body": False, "k2_membership": True}
    return ExampleSpec("k2gap", params, shape, expected)


def nonclosure_points(n: int, eps0: float, R: float) -> tuple[np.ndarray, float, float]:
    cfg = regular_simplex(3, 2 * R / 3)
    eps = eps0 * 2.0 ** (-n)
    Wn = cfg.W * (1 + eps / cfg.R0)
    Rn = float(np.sqrt(R * R + eps * eps + (2 / 3) * R * eps))
    return Wn, Rn, eps


def point_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    d = np.linalg.norm(a[:, None] - b[None], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# --- certification -------------------------------------------------------------

def _extra_clusters(hull: lattice.Grid, base: lattice.Grid):
    """Clusters of the hulloid that hold no cell of the base body."""
    n, labels = ops.clusters(hull)
    base_labels = set(np.unique(labels[base.occupancy]).tolist()) - {0}
    extra = [k for k in range(1, n + 1) if k not in base_labels]
    return n, labels, extra


def certify(spec: ExampleSpec, spacing: float | None = None) -> VerificationReport:
    if spec.name in ("disc2d", "disc2d_simply_connected"):
        return _certify_disc2d(spec, spacing)
    if spec.name == "disc_nd":
        return _certify_disc_nd(spec, spacing)
    if spec.name == "simplex_hulloid":
        return _certify_simplex_hulloid(spec, spacing)
    if spec.name == "nonclosure":
        return nonclosure_sequence(spec.params["n"], spec.params["eps0"], spec.params["R"],
                                   spacing)[2]
    if spec.name == "k2gap":
        return _certify_k2gap(spec, spacing)
    raise InvalidParameters(f"no certification for {spec.name!r}")


def _certify_disc2d(spec: ExampleSpec, spacing: float | None) -> VerificationReport:
    R = spec.params["R"]
    h = default_spacing(2, R) if spacing is None else spacing
    rep = VerificationReport(f"{spec.name}: connected body, disconnected hulloid",
                             metadata={**_jsonable(spec.params), "spacing": h})
    E = lattice.rasterize_for_hulloid(spec.shape, R, h)
    tol = 2 * h * np.sqrt(2)
    face_E, _ = ops.components(E)
    nE, _ = ops.clusters(E)
    rep.add("components of E", nE, 1, nE == 1, "the body is connected",
            face_adjacent_components=face_E, merge_gap=tol)
    hull = ops.hulloid_grid(E, R)
    n, labels, extra = _extra_clusters(hull, E)
    rep.add("components of co_R(E)", n, 2, n == 2 and len(extra) == 1,
            "a connected planar body can have a disconnected R-hulloid",
            face_adjacent_components=ops.components(hull)[0])
    # the k_i are cusps of E, so ask for a hulloid cell nearby rather than the nearest cell
    occupied = hull.occupied_centers()
    gaps = [float(np.linalg.norm(occupied - k, axis=1).min()) for k in spec.extra["vertices"]]
    rep.add("triangle vertices k_i in co_R(E)", max(gaps), tol, max(gaps) <= tol,
            "the vertices k_i belong to E")
    tri = spec.extra["triangle"]
    pts = hulloid2d.sample_hulloid(tri, h / 2)
    # the strip variant has the same hulloid as the uncut body
    ref = np.array(lattice.rasterize(spec.extra["full_shape"], E.window(), h).occupancy)
    ref[tuple(E.cell_of(pts).T)] = True
    reference = E.with_occupancy(ref)
    missing, _ = ops.directed_distance(reference, hull)
    rep.add("uncut body with the curvilinear triangle lies in co_R(E)", missing, tol,
            missing <= tol, "the hulloid adds exactly the curvilinear triangle")
    # surplus cells: how deep they sit inside the removed R-disks, which exclude them
    surplus = hull.centers(np.argwhere(hull.occupancy & ~ref))
    o = spec.params["o"]
    depth = 0.0
    if surplus.shape[0]:
        depth = float(np.max(R - np.linalg.norm(surplus[:, None] - o[None], axis=2), axis=1).max())
    rep.add("co_R(E) holds nothing deeper than the lattice guard inside a removed disk",
            depth, 2 * hull.guard, depth <= 2 * hull.guard,
            "the hulloid adds exactly the curvilinear triangle",
            surplus_cells=int(surplus.shape[0]),
            hausdorff_to_reference=ops.hausdorff(hull, reference))
    if extra:
        trimmed = hull.with_occupancy(hull.occupancy & ~np.isin(labels, extra))
        v = ops.is_r_body(trimmed, R)
        rep.add("hulloid minus its extra component is not an R-body", v.distance, tol,
                not v.is_body, "the hulloid is the minimal R-body containing E")
    if "complement_components" in spec.expected:
        outside = E.with_occupancy(~E.occupancy)
        nc, _ = ops.clusters(outside)
        rep.add("components of the complement", nc, 1, nc == 1,
                "cutting a strip makes the body simply connected")
    return rep


def _certify_disc_nd(spec: ExampleSpec, spacing: float | None) -> VerificationReport:
    R, d = spec.params["R"], spec.params["d"]
    cfg: SimplexConfig = spec.extra["simplex"]
    rep = VerificationReport(f"disc_nd d={d}: body in a ball of radius sqrt(2)R with "
                             "disconnected hulloid", metadata=_jsonable(spec.params))
    want = 2 * R * np.sqrt(0.5 - 1 / (2 * d))
    o = cfg.facet_centers
    far = 0.0
    for i in range(d + 1):
        for j in range(i + 1, d + 1):
            mid = 0.5 * (o[i] + o[j])
            rad = np.sqrt(R * R - np.sum((o[i] - o[j]) ** 2) / 4)
            far = max(far, float(np.linalg.norm(mid) + rad))
    rep.add("max distance of L_ij from 0", far, want, _rel(far, want) <= 1e-12 and far < np.sqrt(2) * R,
            "sphere intersections of facet balls stay inside the outer ball")
    if d != 3:
        rep.metadata["lattice"] = "skipped (4D uses sampling checks)"
        return rep
    h = default_spacing(3, R) if spacing is None else spacing
    rep.metadata["spacing"] = h
    tol = 2 * h * np.sqrt(3)
    E = lattice.rasterize_for_hulloid(spec.shape, R, h)
    nE, _ = ops.clusters(E)
    rep.add("components of E", nE, 1, nE == 1, "the body is connected",
            face_adjacent_components=ops.components(E)[0], merge_gap=tol)
    zero = E.cell_of(np.zeros(3))[0]
    d0 = float(ops.distance_field(E).at(zero)[0])
    floor = spec.expected["dist_origin_to_E_at_least"]
    rep.add("dist(0, E)", d0, floor - tol, d0 >= floor - tol, "the origin is at positive distance from E")
    hull = ops.hulloid_grid(E, R)
    n, labels, extra = _extra_clusters(hull, E)
    rep.add("components of co_R(E)", n, 2, n == 2 and len(extra) == 1,
            "in dimension d > 2 a connected body can have a disconnected R-hulloid",
            face_adjacent_components=ops.components(hull)[0])
    if extra:
        pts = hull.centers(np.argwhere(np.isin(labels, extra)))
        reach = float(np.linalg.norm(pts, axis=1).max())
        rep.add("extra component near the origin", reach, tol, reach <= tol,
                "co_R(E) adds exactly the origin")
        trimmed = hull.with_occupancy(hull.occupancy & ~np.isin(labels, extra), sites=E.sites)
        v = ops.is_r_body(trimmed, R)
        rep.add("hulloid minus its extra component is not an R-body", v.distance, tol,
                not v.is_body, "the hulloid is the minimal R-body containing E")
    del labels
    v = ops.is_r_body(E, R, hull=hull)
    near0 = v.witness is not None and float(np.linalg.norm(v.witness)) <= tol
    rep.add("E is not an R-body (witness at the origin)", v.distance, tol, (not v.is_body) and near0,
            "E is not an R-body", witness=v.witness)
    del hull
    k2 = ops.k2_membership(E, R)
    rep.add("E belongs to K2", k2.distance, R + E.guard, k2.member,
            "every exterior point lies in a closed R-ball missing the interior")
    return rep


def _certify_simplex_hulloid(spec: ExampleSpec, spacing: float | None) -> VerificationReport:
    R, d = spec.params["R"], spec.params["d"]
    cfg: SimplexConfig = spec.extra["simplex"]
    h = default_spacing(d, R) if spacing is None else spacing
    rep = VerificationReport(f"hulloid of simplex vertices d={d}",
                             metadata={**_jsonable(spec.params), "spacing": h})
    tol = 2 * h * np.sqrt(d)
    W = lattice.from_points(cfg.W, R, h)
    hull = ops.hulloid_grid(W, R)
    n, labels, extra = _extra_clusters(hull, W)
    pts = [hull.centers(np.argwhere(labels == k)) for k in extra]
    reach = [float(np.linalg.norm(p, axis=1).max()) for p in pts]
    ok = len(extra) == 1 and reach[0] <= tol
    rep.add("extra components of co_R(W)", len(extra), 1, ok,
            "co_R(W) is W plus the origin", reach_from_origin=reach, clusters=n,
            face_adjacent_components=ops.components(hull)[0])
    ref = np.array(W.occupancy)
    ref[tuple(W.cell_of(np.zeros(d))[0])] = True
    dist = ops.hausdorff(hull, W.with_occupancy(ref))
    rep.add("co_R(W) = W with the origin", dist, tol, dist <= tol, "co_R(W) is W plus the origin")
    v = ops.is_r_body(W, R, hull=hull)
    rep.add("W is not an R-body", v.distance, tol, not v.is_body, "W is not an R-body",
            witness=v.witness)
    thr = origin_threshold(cfg)
    rep.add("radius where the origin enters the hulloid (reported only)", thr, None, True,
            "open question: behaviour just below R", R=R)
    return rep


def _certify_k2gap(spec: ExampleSpec, spacing: float | None) -> VerificationReport:
    R, dim = spec.params["R"], spec.params["dim"]
    h = spec.params["shell_thickness"] if spacing is None else spacing
    rep = VerificationReport("K2 strictly contains the R-bodies",
                             metadata={**_jsonable(spec.params), "spacing": h})
    E = lattice.rasterize_for_hulloid(spec.shape, R, h)
    v = ops.is_r_body(E, R)
    rep.add("is_r_body", v.distance, 2 * h * np.sqrt(dim), not v.is_body,
            "the gap body is not an R-body", witness=v.witness)
    k2 = ops.k2_membership(E, R)
    rep.add("k2_membership", k2.distance, R + E.guard, k2.member,
            "the gap body belongs to K2")
    return rep


def nonclosure_sequence(n: int, eps0: float | None = None, R: float = 1.0,
                        spacing: float | None = None) -> tuple[np.ndarray, float, VerificationReport]:
    eps0 = 0.05 * R if eps0 is None else float(eps0)
    h = default_spacing(3, R) if spacing is None else spacing
    Wn, Rn, eps = nonclosure_points(n, eps0, R)
    cfg = regular_simplex(3, 2 * R / 3)
    rep = VerificationReport(f"non-closure sequence term n={n}", metadata={
        "R": R, "n": n, "eps0": eps0, "eps_n": eps, "spacing": h})
    geo = np.linalg.norm(cfg.facet_centers[0] - Wn[1])
    rep.add("R_n^2 - R^2 = eps^2 + (2/3) R eps", Rn * Rn - R * R, eps * eps + (2 / 3) * R * eps,
            Rn > R and _rel(geo, Rn) <= 1e-12, "the moved facet balls have radius above R",
            geometric_R_n=geo)
    dh = point_hausdorff(Wn, cfg.W)
    rep.add("Hausdorff distance to the limit", dh, eps, _rel(dh, eps) <= 1e-12,
            "each vertex moves radially by eps_n")
    v = ops.is_r_body(lattice.from_points(Wn, R, h), R)
    rep.add("W(n) is an R-body", v.distance, 2 * h * np.sqrt(3), v.is_body,
            "every term of the sequence is an R-body")
    return Wn, Rn, rep


def limit_check(R: float = 1.0, spacing: float | None = None) -> VerificationReport:
    """The limit vertex set is not an R-body; the witness sits at the origin."""
    h = default_spacing(3, R) if spacing is None else spacing
    cfg = regular_simplex(3, 2 * R / 3)
    v = ops.is_r_body(lattice.from_points(cfg.W, R, h), R)
    tol = 2 * h * np.sqrt(3)
    near = v.witness is not None and float(np.linalg.norm(v.witness)) <= tol
    rep = VerificationReport("limit of the non-closure sequence", metadata={"R": R, "spacing": h})
    rep.add("W is not an R-body, witness near 0", v.distance, tol, (not v.is_body) and near,
            "a Hausdorff limit of R-bodies need not be an R-body", witness=v.witness)
    return rep


def run_r_eps_check(W, R: float, eps_list, spacing: float | None = None) -> VerificationReport:
    W = np.atleast_2d(np.asarray(W, dtype=float))
    dim = W.shape[1]
    h = default_spacing(dim, R) if spacing is None else spacing
    rep = VerificationReport("limit is an (R - eps)-body", metadata={"R": R, "spacing": h})
    for eps in eps_list:
        r = R - float(eps)
        v = ops.is_r_body(lattice.from_points(W, r, h), r)
        rep.add(f"is_r_body(W, R - {eps:.6g})", v.distance, 2 * h * np.sqrt(dim), v.is_body,
                "a Hausdorff limit of R-bodies is an (R - eps)-body", eps=float(eps))
    return rep
