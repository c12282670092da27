from __future__ import annotations

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
from scipy import ndimage

from rbody.grid.edt import INF, brute_force_squared_edt, squared_edt


@st.composite
def occupancy(draw, max_side=12):
    dim = draw(st.integers(2, 4))
    side = max_side if dim < 4 else 6
    shape = tuple(draw(st.integers(1, side)) for _ in range(dim))
    return draw(hnp.arrays(bool, shape, elements=st.booleans()))


@given(occupancy())
def test_matches_brute_force(occ):
    assert np.array_equal(squared_edt(occ), brute_force_squared_edt(occ))


@given(occupancy())
def test_matches_scipy_when_nonempty(occ):
    if not occ.any():
        return
    ref = ndimage.distance_transform_edt(~occ) ** 2
    assert np.array_equal(squared_edt(occ), np.rint(ref).astype(np.int64))


def test_empty_is_inf_and_single_site_is_exact():
    occ = np.zeros((5, 7), dtype=bool)
    assert np.all(squared_edt(occ) == INF)
    occ[2, 3] = True
    i, j = np.indices(occ.shape)
    assert np.array_equal(squared_edt(occ), (i - 2) ** 2 + (j - 3) ** 2)


def test_long_line_in_3d():
    occ = np.zeros((3, 4, 200), dtype=bool)
    occ[0, 0, 0] = True
    out = squared_edt(occ)
    assert out[2, 3, 199] == 4 + 9 + 199 ** 2


def test_non_contiguous_input():
    occ = np.zeros((20, 20), dtype=bool)
    occ[5, 5] = True
    view = occ[::2, ::-1]
    assert np.array_equal(squared_edt(view), brute_force_squared_edt(view))
