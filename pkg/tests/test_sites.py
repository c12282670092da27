from __future__ import annotations

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from rbody.grid.sites import FarSetDistance, hulloid_cells


def _sampled_far_distance(sites, R, y, n=200_000, seed=0):
    """Brute force: sample the far set densely around y and take the closest sample."""
    rng = np.random.default_rng(seed)
    d = sites.shape[1]
    # directions times radii cover the ball of radius 2R around y
    v = rng.normal(size=(n, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = 2 * R * rng.random(n) ** (1 / d)
    z = y + v * r[:, None]
    far = np.min(np.linalg.norm(z[:, None] - sites[None], axis=2), axis=1) >= R
    return np.min(np.linalg.norm(z[far] - y, axis=1))


def test_single_site_depth():
    f = FarSetDistance([[0.0, 0.0]], 1.0)
    assert f([[0.0, 0.0]])[0] == 1.0
    assert f([[0.3, 0.4]])[0] == 0.5
    assert f([[2.0, 0.0]])[0] == 0.0


def test_far_distance_below_sampling_oracle():
    rng = np.random.default_rng(5)
    sites = rng.uniform(-1, 1, (5, 2))
    f = FarSetDistance(sites, 1.0)
    for y in rng.uniform(-1, 1, (10, 2)):
        exact = f(y[None])[0]
        sampled = _sampled_far_distance(sites, 1.0, y)
        # the sampled minimum overestimates slightly, never underestimates
        assert exact <= sampled + 1e-12
        assert sampled - exact < 0.02


def test_far_distance_3d_against_sampling():
    rng = np.random.default_rng(6)
    sites = rng.uniform(-0.8, 0.8, (4, 3))
    f = FarSetDistance(sites, 1.0)
    for y in rng.uniform(-0.5, 0.5, (5, 3)):
        exact = f(y[None])[0]
        sampled = _sampled_far_distance(sites, 1.0, y, n=400_000)
        assert exact <= sampled + 1e-12
        assert sampled - exact < 0.05


def test_nearest_points_are_far_and_at_reported_distance():
    rng = np.random.default_rng(2)
    sites = rng.uniform(-1, 1, (6, 2))
    f = FarSetDistance(sites, 0.8)
    y = rng.uniform(-1, 1, (50, 2))
    dist, near = f.nearest(y)
    assert np.allclose(np.linalg.norm(near - y, axis=1), dist)
    dmin = np.min(np.linalg.norm(near[:, None] - sites[None], axis=2), axis=1)
    assert np.all(dmin >= 0.8 * (1 - 1e-9))


@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=6),
       st.floats(0.3, 2.0))
def test_depth_is_one_lipschitz(pts, R):
    f = FarSetDistance(np.array(pts), R)
    rng = np.random.default_rng(0)
    a = rng.uniform(-2, 2, (200, 2))
    b = a + rng.normal(scale=0.05, size=a.shape)
    diff = np.abs(f.depth(a) - f.depth(b))
    assert np.all(diff <= np.linalg.norm(a - b, axis=1) + 1e-9)


def test_two_far_apart_sites_give_two_cells():
    sites = np.array([[0.0, 0.0], [1.2, 0.0]])
    f = FarSetDistance(sites, 1.0)
    # a site is exactly R from the far set
    assert np.allclose(f.depth(sites), 0.0)
    h = 0.05
    origin = np.array([-3.0, -3.0])
    mask = hulloid_cells(origin, h, (150, 150), sites, 1.0)
    # two points: nothing beyond the segment cells (the segment is not in co_R)
    idx = np.argwhere(mask)
    assert len(idx) == 2


def test_equilateral_cells_cover_centroid():
    V = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    h = 0.02
    origin = np.array([-3.0, -3.0])
    mask = hulloid_cells(origin, h, (300, 300), V, 1.0)
    c = np.rint((V.mean(axis=0) - origin) / h).astype(int)
    assert mask[tuple(c)]
