from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from rbody.errors import DegenerateInput, NoSuchBall
from rbody.geom import circumsphere, is_collinear, orthocenter, triangle_contains
from rbody.grid.sites import FarSetDistance
from rbody.hulloid2d import (
    HulloidKind,
    TripleHulloid,
    hulloid_contains,
    johnson_circles,
    qr_check,
    sample_hulloid,
    triple_hulloid,
)

EQ = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])

coord = st.floats(-2, 2, allow_nan=False)
triangles = st.lists(st.tuples(coord, coord), min_size=3, max_size=3).map(np.array)


def _good(V):
    if is_collinear(V):
        return False
    e = np.linalg.norm(V - np.roll(V, 1, axis=0), axis=1)
    a, b = V[1] - V[0], V[2] - V[0]
    area = 0.5 * abs(a[0] * b[1] - a[1] * b[0])
    return e.min() > 0.05 and area > 1e-3


def test_johnson_concurrence_equilateral():
    r = 1 / np.sqrt(3)
    balls = johnson_circles(EQ, r)
    for b in balls:
        assert np.linalg.norm(b.center - EQ.mean(axis=0)) == pytest.approx(r, abs=1e-9)


def test_johnson_circles_exclude_third_vertex():
    V = np.array([[0, 0], [2, 0], [0.7, 1.3]])
    for i, b in enumerate(johnson_circles(V, 3.0)):
        others = [j for j in range(3) if j != i]
        assert np.allclose(np.linalg.norm(V[others] - b.center, axis=1), 3.0)
        assert np.linalg.norm(V[i] - b.center) > 3.0


def test_johnson_right_triangle_tangent_at_right_angle():
    V = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]])
    _, r = circumsphere(V)
    b = johnson_circles(V, r)
    # circles 1 and 2 pass through the right-angle vertex 0; tangent means centers collinear with it
    c1, c2 = b[1].center, b[2].center
    assert np.linalg.norm(c1 - c2) == pytest.approx(2 * r, abs=1e-9)


def test_johnson_obtuse_second_point_outside():
    V = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.2]])
    _, r = circumsphere(V)
    b = johnson_circles(V, r)
    c0, c1 = b[0].center, b[1].center
    # both pass through V[2]; the other crossing is the mirror of V[2] across c0 c1
    d = c1 - c0
    foot = c0 + ((V[2] - c0) @ d) / (d @ d) * d
    other = 2 * foot - V[2]
    assert np.linalg.norm(other - c0) == pytest.approx(r)
    assert not triangle_contains(V, other[None])[0]


def test_johnson_errors():
    with pytest.raises(NoSuchBall):
        johnson_circles(EQ, 0.5)
    with pytest.raises(DegenerateInput):
        johnson_circles([[0, 0], [1, 0], [2, 0]], 1.0)


@settings(suppress_health_check=[HealthCheck.filter_too_much])
@given(triangles)
def test_johnson_concurrence_acute(V):
    assume(_good(V))
    ang = []
    for i in range(3):
        a, b = V[(i + 1) % 3] - V[i], V[(i + 2) % 3] - V[i]
        ang.append(a @ b / np.linalg.norm(a) / np.linalg.norm(b))
    assume(min(ang) > 0.05)
    _, r = circumsphere(V)
    H = orthocenter(V)
    for b in johnson_circles(V, r):
        assert abs(np.linalg.norm(H - b.center) - r) <= 1e-8 * r


def test_examples():
    assert triple_hulloid(EQ, 0.5).kind is HulloidKind.DISCRETE
    H = triple_hulloid(EQ, 1.0)
    assert H.kind is HulloidKind.FULL
    assert hulloid_contains(H, EQ.mean(axis=0))
    assert triple_hulloid([[0, 0], [1, 0], [2, 0]], 5.0).kind is HulloidKind.DISCRETE
    with pytest.raises(DegenerateInput):
        triple_hulloid([[0, 0], [0, 0], [1, 1]], 1.0)


def test_contains_vertices_and_not_far_points():
    H = triple_hulloid(EQ, 1.0)
    assert np.all(hulloid_contains(H, EQ))
    assert not hulloid_contains(H, EQ[0] + np.array([10.0, 0]))


def test_obtuse_major_vertex_is_a_corner():
    V = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.5]])
    H = triple_hulloid(V, 3.0)
    assert H.kind is HulloidKind.FULL
    assert np.min(np.linalg.norm(H.triangle.vertices - V[2], axis=1)) < 1e-12


def test_arcs_lie_on_generating_circles():
    H = triple_hulloid(np.array([[0.1, 0], [1.3, 0.2], [0.4, 0.9]]), 1.5)
    for a, c in zip(H.triangle.arcs, H.triangle.centers):
        pts = a.sample(0.01)
        assert np.allclose(np.linalg.norm(pts - c, axis=1), 1.5)
        assert 0 < a.sweep < np.pi


def test_json_round_trip():
    H = triple_hulloid(EQ, 1.0)
    again = TripleHulloid.from_json(H.to_json())
    assert again.to_json() == H.to_json()


@given(triangles, st.floats(0.3, 3.0))
def test_agrees_with_far_set_oracle(V, R):
    assume(_good(V))
    H = triple_hulloid(V, R)
    far = FarSetDistance(V, R)
    rng = np.random.default_rng(0)
    lo, hi = V.min(axis=0) - 0.2, V.max(axis=0) + 0.2
    p = rng.uniform(lo, hi, (400, 2))
    phi = far.depth(p)
    clear = np.abs(phi) > 1e-7 * R
    got = hulloid_contains(H, p, tol=1e-9 * R)
    assert np.array_equal(got[clear], (phi <= 0)[clear])


@given(triangles, st.floats(0.3, 3.0))
def test_inside_convex_hull_and_diameter(V, R):
    assume(_good(V))
    H = triple_hulloid(V, R)
    pts = sample_hulloid(H, 0.02)
    assert np.all(triangle_contains(V, pts, 1e-9))
    d = np.max(np.linalg.norm(pts[:, None] - pts[None], axis=2))
    dv = np.max(np.linalg.norm(V[:, None] - V[None], axis=2))
    assert d <= dv + 1e-9


@given(triangles, st.floats(0.3, 2.0), st.floats(1.05, 2.0))
def test_monotone_in_radius(V, R, k):
    assume(_good(V))
    small, big = triple_hulloid(V, R), triple_hulloid(V, k * R)
    pts = sample_hulloid(small, 0.03)
    assert np.all(hulloid_contains(big, pts, tol=1e-9 * k * R))


@given(triangles, st.floats(0.3, 3.0))
def test_symmetric_under_permutation(V, R):
    assume(_good(V))
    H = triple_hulloid(V, R)
    Hp = triple_hulloid(V[[2, 0, 1]], R)
    assert H.kind == Hp.kind
    rng = np.random.default_rng(1)
    p = rng.uniform(V.min(axis=0), V.max(axis=0), (300, 2))
    assert np.array_equal(hulloid_contains(H, p, 0.0), hulloid_contains(Hp, p, 0.0)) or \
        np.all(np.abs(FarSetDistance(V, R).depth(p)[hulloid_contains(H, p, 0.0)
                                                    != hulloid_contains(Hp, p, 0.0)]) < 1e-9)


def test_boundary_arcs_touch_generating_disks():
    H = triple_hulloid(EQ, 1.0)
    far = FarSetDistance(EQ, 1.0)
    for a in H.triangle.arcs:
        assert np.max(np.abs(far.depth(a.sample(0.01)))) < 1e-9


def test_qr_check_examples():
    rep = qr_check(EQ, 1.0, tol=0.01)
    assert not rep.passed
    w = np.array(rep.checks[0].detail["witness"])
    assert np.linalg.norm(w - EQ.mean(axis=0)) < 0.2
    # the hulloid itself, sampled finely enough for the tolerance
    dense = sample_hulloid(triple_hulloid(EQ, 1.0), 0.12)
    assert qr_check(dense, 1.0, tol=0.24).passed
    line = np.column_stack([np.linspace(0, 3, 10), 0.5 * np.linspace(0, 3, 10)])
    assert qr_check(line, 1.0, tol=0.01).passed
    assert qr_check(EQ, 0.5, tol=0.01).passed
