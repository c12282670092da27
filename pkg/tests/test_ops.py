from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rbody.errors import InvalidParameters, Undefined, WindowTooSmall, WitnessNotFound
from rbody.grid import ops
from rbody.grid.lattice import Grid, from_points, rasterize, rasterize_for_hulloid, reframe
from rbody.grid.shapes import Ball, Complement, Halfspace, SphereShell, intersection, union
from rbody.hulloid2d import hulloid_contains, sample_hulloid, triple_hulloid

R = 1.0


def _grid(occ, h=1.0):
    occ = np.asarray(occ, dtype=bool)
    return Grid(np.zeros(occ.ndim), h, occ)


# --- distance field and offsets ------------------------------------------------

def test_distance_field_single_cell():
    occ = np.zeros((6, 9), dtype=bool)
    occ[0, 0] = True
    f = ops.distance_field(_grid(occ, 0.5))
    i, j = np.indices(occ.shape)
    assert np.allclose(f.values, 0.5 * np.sqrt(i ** 2 + j ** 2))
    assert f.at([[3, 4]])[0] == pytest.approx(2.5)


def test_distance_field_full_and_empty():
    assert np.all(ops.distance_field(_grid(np.ones((4, 4)))).values == 0)
    f = ops.distance_field(_grid(np.zeros((4, 4))))
    assert f.empty and np.all(np.isinf(f.values))


def test_dilate_disk_grows_radius():
    h = 0.02
    w = ([-2, -2], [2, 2])
    D = rasterize(Ball([0, 0], 0.5), w, h)
    grown = ops.offset(D, 0.4, "dilate_open")
    ref = rasterize(Ball([0, 0], 0.9), w, h)
    r = np.linalg.norm(grown.occupied_centers(), axis=1)
    assert r.max() <= 0.9 + h
    assert ops.hausdorff(grown, ref) <= h * np.sqrt(2)


def test_erode_far_beyond_window_is_empty():
    D = rasterize(Ball([0, 0], 0.5), ([-1, -1], [1, 1]), 0.05)
    assert ops.offset(D, 0.5 + 2 * np.sqrt(8), "erode_far").is_empty()


def test_offset_rejects_bad_args():
    D = _grid(np.ones((3, 3)))
    with pytest.raises(InvalidParameters):
        ops.offset(D, 0.0, "dilate_open")
    with pytest.raises(InvalidParameters):
        ops.offset(D, 1.0, "grow")
    with pytest.raises(InvalidParameters):
        ops.distance_field(D, outside="maybe")


# --- hulloid --------------------------------------------------------------------

def test_two_points_stay_two_cells():
    h = R / 40
    E = from_points([[0, 0], [1.2 * R, 0]], R, h)
    H = ops.hulloid_grid(E, R)
    assert np.array_equal(H.occupancy, E.occupancy)


def test_disk_is_its_own_hulloid():
    h = R / 40
    E = rasterize_for_hulloid(Ball([0, 0], 0.8), R, h)
    H = ops.hulloid_grid(E, R)
    assert ops.hausdorff(E, H) <= 2 * h * np.sqrt(2)


def test_equilateral_matches_exact_triangle():
    h = R / 100
    V = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    E = from_points(V, R, h)
    H = ops.hulloid_grid(E, R)
    exact = triple_hulloid(V, R)
    pts = sample_hulloid(exact, h / 2)
    ref = E.with_occupancy(np.zeros(E.extents, dtype=bool))
    occ = ref.occupancy.copy()
    occ[tuple(E.cell_of(pts).T)] = True
    assert ops.hausdorff(H, ref.with_occupancy(occ)) <= 2 * h * np.sqrt(2)
    # every hulloid cell center is near the exact set
    centers = H.occupied_centers()
    assert np.all(hulloid_contains(exact, centers, tol=h * np.sqrt(2)))


def test_hulloid_errors():
    with pytest.raises(Undefined):
        ops.hulloid_grid(_grid(np.zeros((5, 5))), R)
    tight = rasterize(Ball([0, 0], 0.5), ([-1, -1], [1, 1]), 0.05)
    with pytest.raises(WindowTooSmall):
        ops.hulloid_grid(tight, R)
    # padding repairs the window
    assert ops.hulloid_grid(tight, R, pad=True).count >= tight.count
    with pytest.raises(InvalidParameters):
        ops.hulloid_grid(tight, 0.0)


def test_single_point_boundary_formula():
    E = from_points([[0.3, 0.1]], R, R / 20)
    res = ops.boundary_formula(E, R)
    assert res.passed
    assert res.hulloid.count == 1


def test_boundary_formula_two_points_and_blob():
    h = R / 20
    E = from_points([[0, 0], [1.2, 0]], R, h)
    assert ops.boundary_formula(E, R).passed
    rng = np.random.default_rng(11)
    blob = union(*[Ball(rng.uniform(-1, 1, 2), rng.uniform(0.2, 0.5)) for _ in range(5)])
    B = rasterize_for_hulloid(blob, R, h)
    assert ops.boundary_formula(B, R).passed


# --- Hausdorff and components -------------------------------------------------

def test_hausdorff_examples():
    occ = np.zeros((20, 20), dtype=bool)
    occ[5:8, 4:9] = True
    G = _grid(occ, 0.1)
    assert ops.hausdorff(G, G) == 0
    assert ops.hausdorff(G, G.with_occupancy(np.roll(occ, 3, axis=0))) == pytest.approx(0.3)
    a = np.zeros((20, 20), dtype=bool)
    a[2, 2] = True
    ab = a.copy()
    ab[10, 14] = True
    d = ops.hausdorff(_grid(a, 0.1), _grid(ab, 0.1))
    assert d == pytest.approx(0.1 * np.hypot(8, 12))


def test_hausdorff_errors():
    G = _grid(np.ones((4, 4)))
    with pytest.raises(Undefined):
        ops.hausdorff(G, _grid(np.zeros((4, 4))))
    with pytest.raises(InvalidParameters):
        ops.hausdorff(G, _grid(np.ones((5, 4))))


def test_components_examples():
    occ = np.zeros((10, 10), dtype=bool)
    occ[1, 1] = occ[5, 5] = True
    assert ops.components(_grid(occ))[0] == 2
    assert ops.components(_grid(np.ones((7, 7, 7))))[0] == 1
    h = 0.05
    ring = intersection(Ball([0, 0], 1.0), Complement(Ball([0, 0], 0.6)))
    A = rasterize(union(ring, Ball([0, 0], 0.1)), ([-1.2, -1.2], [1.2, 1.2]), h)
    assert ops.components(A)[0] == 2
    # diagonal neighbors are separate under face adjacency
    diag = np.zeros((4, 4), dtype=bool)
    diag[1, 1] = diag[2, 2] = True
    assert ops.components(_grid(diag))[0] == 2
    assert ops.clusters(_grid(diag))[0] == 1


def test_diameter():
    occ = np.zeros((30, 30), dtype=bool)
    occ[3, 4] = occ[20, 25] = occ[10, 10] = True
    assert ops.diameter(_grid(occ, 0.5)) == pytest.approx(0.5 * np.hypot(17, 21))
    assert ops.diameter(_grid(np.zeros((3, 3)))) == 0.0


# --- R-body verdicts --------------------------------------------------------------

def test_complement_of_large_ball_is_body():
    A = rasterize(Complement(Ball([0, 0], 1.5, closed=False)), ([-3, -3], [3, 3]), R / 20)
    v = ops.is_r_body(A, R, outside="occupied")
    assert v.is_body and v.witness is None


def test_complement_of_small_ball_is_not_body():
    h = R / 20
    A = rasterize(Complement(Ball([0, 0], 0.5, closed=False)), ([-3, -3], [3, 3]), h)
    v = ops.is_r_body(A, R, outside="occupied")
    assert not v.is_body
    assert np.linalg.norm(v.witness) <= 2 * h * np.sqrt(2)


def test_arc_of_radius_r_circle_is_body():
    h = R / 20
    arc = intersection(SphereShell([0, 0], R), Halfspace([0, -1], -0.2))
    A = rasterize_for_hulloid(arc, R, h)
    assert ops.is_r_body(A, R).is_body


def test_k2_on_bodies_and_gap():
    h = R / 20
    D = rasterize_for_hulloid(Ball([0, 0], 0.7), R, h)
    assert ops.is_r_body(D, R).is_body
    assert ops.k2_membership(D, R).member
    r, r1 = 2 * R, R / 2
    gap = union(intersection(Ball([0, 0], r), Complement(Ball([0, 0], R, closed=False))),
                SphereShell([0, 0], r1, thickness=h))
    G = rasterize_for_hulloid(gap, R, h)
    assert not ops.is_r_body(G, R).is_body
    assert ops.k2_membership(G, R).member


def test_k2_fails_for_small_hole():
    h = R / 20
    A = rasterize(Complement(Ball([0, 0], 0.5, closed=False)), ([-3, -3], [3, 3]), h)
    v = ops.k2_membership(A, R, outside="occupied")
    assert not v.member
    assert np.linalg.norm(v.witness) <= 0.5


# --- boundary witnesses --------------------------------------------------------------

def test_witness_for_complement_of_r_ball():
    h = R / 20
    A = rasterize(Complement(Ball([0, 0], R, closed=False)), ([-3, -3], [3, 3]), h)
    w = ops.boundary_witness(A, R, [R, 0], outside="occupied")
    assert np.linalg.norm(w.center) <= 2 * h * np.sqrt(2)


def test_witness_for_two_points():
    h = R / 20
    E = from_points([[0, 0], [1.2, 0]], R, h)
    w = ops.boundary_witness(E, R, [0, 0])
    assert abs(np.linalg.norm(w.center) - R) <= 2 * h * np.sqrt(2)
    pts = np.array([[0, 0], [1.2, 0]])
    assert np.all(np.linalg.norm(pts - w.center, axis=1) >= R - 2 * h * np.sqrt(2))


def test_witness_for_small_disk_on_normal_ray():
    h = R / 20
    D = rasterize_for_hulloid(Ball([0, 0], R / 2), R, h)
    w = ops.boundary_witness(D, R, [R / 2, 0])
    assert w.center == pytest.approx([1.5 * R, 0], abs=2 * h * np.sqrt(2))
    assert w.distance_to_body == pytest.approx(R, abs=2 * h * np.sqrt(2))


def test_witness_not_found_inside_full_grid():
    A = rasterize(Ball([0, 0], 5.0), ([-3, -3], [3, 3]), R / 10)
    with pytest.raises(WitnessNotFound):
        ops.boundary_witness(A, R, [0, 0])


# --- properties ---------------------------------------------------------------------

@st.composite
def blobs(draw):
    dim = draw(st.sampled_from([2, 3]))
    k = draw(st.integers(1, 4))
    balls = [Ball([draw(st.floats(-1, 1)) for _ in range(dim)], draw(st.floats(0.15, 0.6)))
             for _ in range(k)]
    h = R / 16 if dim == 2 else R / 8
    return rasterize_for_hulloid(union(*balls), R, h)


@given(blobs())
def test_inclusion_chain(E):
    H = ops.hulloid_grid(E, R)
    assert not np.any(E.occupancy & ~H.occupancy)
    near = ops.offset(E, R, "dilate_open").occupancy
    assert not np.any(H.occupancy & ~near)


@given(blobs())
def test_idempotent_and_diameter(E):
    H = ops.hulloid_grid(E, R)
    H2 = reframe(ops.hulloid_grid(H, R, pad=True), H)
    assert ops.hausdorff(H, H2) <= 2 * E.spacing * np.sqrt(E.dim)
    assert abs(ops.diameter(E) - ops.diameter(H)) <= 2 * E.spacing * np.sqrt(E.dim)


@given(blobs(), st.integers(0, 2 ** 31 - 1))
def test_monotone(E, seed):
    rng = np.random.default_rng(seed)
    extra = ops.offset(E, 0.3 * R, "dilate_open").occupancy & (rng.random(E.extents) < 0.02)
    E2 = E.with_occupancy(E.occupancy | extra)
    H1 = ops.hulloid_grid(E, R)
    H2 = reframe(ops.hulloid_grid(E2, R, pad=True), E)
    assert not np.any(H1.occupancy & ~H2.occupancy)


@given(blobs())
def test_distance_floor_to_far_set(E):
    H = ops.hulloid_grid(E, R)
    far = ops.offset(E, R, "erode_far")
    if far.is_empty():
        return
    d = ops.distance_field(far).values[H.occupancy]
    assert d.min() >= R - 2 * E.spacing * np.sqrt(E.dim)


@given(blobs())
def test_hulloid_is_body_at_smaller_radii(E):
    H = ops.hulloid_grid(E, R)
    for r in (R / 4, R / 2, 3 * R / 4):
        assert ops.is_r_body(H, r).is_body


def test_planar_converse_from_smaller_radii():
    # sets that are rho-bodies just below R are R-bodies; threshold triples are excluded
    from itertools import combinations

    from rbody.geom import circumradius, is_collinear

    rng = np.random.default_rng(21)
    h = R / 50
    seen = 0
    while seen < 8:
        A = rng.uniform(-1.5, 1.5, (int(rng.integers(4, 7)), 2))
        radii = [circumradius(A[list(t)]) for t in combinations(range(len(A)), 3)
                 if not is_collinear(A[list(t)])]
        gaps = np.linalg.norm(A[:, None] - A[None], axis=2) + 9 * np.eye(len(A))
        if gaps.min() < 10 * h or any(0.8 * R <= r <= 1.1 * R for r in radii):
            continue
        rho_ok = all(ops.is_r_body(from_points(A, rho, h), rho).is_body for rho in (0.85 * R, 0.95 * R))
        if not rho_ok:
            continue
        seen += 1
        assert ops.is_r_body(from_points(A, R, h), R, tol=3 * h * np.sqrt(2)).is_body
