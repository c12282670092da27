"""Exact squared Euclidean distance transform on integer lattices.

Separable lower-envelope scheme: one pass per axis, each pass linear in the
line length. All arithmetic is on integer squared distances, so the output is
exact and independent of how the work is split.
"""
from __future__ import annotations

import os

import numba
import numpy as np

if "NUMBA_THREADING_LAYER" not in os.environ:
    # tbb in this stack is too old and only warns; workqueue is always present
    numba.config.THREADING_LAYER = "workqueue"

# sentinel for "no occupied cell reachable"; sums with lattice terms stay in int64
INF = np.int64(1) << 40


@numba.njit(cache=True)
def _envelope_line(g, out, s, t):
    n = g.shape[0]
    q = -1
    for u in range(n):
        gu = g[u]
        if gu >= INF:
            continue
        while q >= 0:
            i = s[q]
            x = t[q]
            if (x - i) * (x - i) + g[i] > (x - u) * (x - u) + gu:
                q -= 1
            else:
                break
        if q < 0:
            q = 0
            s[0] = u
            t[0] = 0
        else:
            i = s[q]
            num = u * u - i * i + gu - g[i]
            w = 1 + num // (2 * (u - i))
            if w < n:
                q += 1
                s[q] = u
                t[q] = w
    if q < 0:
        for u in range(n):
            out[u] = INF
        return
    for u in range(n - 1, -1, -1):
        i = s[q]
        out[u] = (u - i) * (u - i) + g[i]
        if u == t[q]:
            q -= 1


@numba.njit(parallel=True, cache=True)
def _pass_middle_axis(a):
    # a has shape (pre, n, post); transform along axis 1 in place
    pre, n, post = a.shape
    for p in numba.prange(pre):
        g = np.empty(n, dtype=np.int64)
        out = np.empty(n, dtype=np.int64)
        s = np.empty(n, dtype=np.int64)
        t = np.empty(n, dtype=np.int64)
        for c in range(post):
            for k in range(n):
                g[k] = a[p, k, c]
            _envelope_line(g, out, s, t)
            for k in range(n):
                a[p, k, c] = out[k]


@numba.njit(parallel=True, cache=True)
def _pass_last_axis(a):
    pre, n = a.shape
    for p in numba.prange(pre):
        g = np.empty(n, dtype=np.int64)
        out = np.empty(n, dtype=np.int64)
        s = np.empty(n, dtype=np.int64)
        t = np.empty(n, dtype=np.int64)
        for k in range(n):
            g[k] = a[p, k]
        _envelope_line(g, out, s, t)
        for k in range(n):
            a[p, k] = out[k]


def _configure_threads() -> None:
    raw = os.environ.get("RBODY_THREADS")
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        return
    if n >= 1:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def squared_edt(occupied: np.ndarray) -> np.ndarray:
    """Squared lattice distance from every cell to the nearest occupied cell.

    Returns an int64 array; cells with no occupied cell anywhere hold INF.
    """
    occ = np.ascontiguousarray(occupied, dtype=bool)
    _configure_threads()
    a = np.where(occ, np.int64(0), INF)
    shape = a.shape
    for axis in range(a.ndim):
        n = shape[axis]
        post = int(np.prod(shape[axis + 1:], dtype=np.int64))
        pre = int(np.prod(shape[:axis], dtype=np.int64))
        if post == 1:
            _pass_last_axis(a.reshape(pre, n))
        else:
            _pass_middle_axis(a.reshape(pre, n, post))
        np.minimum(a, INF, out=a)
    return a


def brute_force_squared_edt(occupied: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """O(cells x occupied) reference: nearest occupied cell by exhaustive scan.

    |c - s|^2 = |c|^2 + |s|^2 - 2 c.s evaluated in float64 is exact here because
    every term is an integer far below 2**53.
    """
    occ = np.asarray(occupied, dtype=bool)
    sites = np.argwhere(occ).astype(np.float64)
    cells = np.indices(occ.shape).reshape(occ.ndim, -1).T.astype(np.float64)
    out = np.full(cells.shape[0], INF, dtype=np.int64)
    if sites.shape[0] == 0:
        return out.reshape(occ.shape)
    s2 = (sites ** 2).sum(axis=1)
    for lo in range(0, cells.shape[0], chunk):
        c = cells[lo:lo + chunk]
        d2 = (c ** 2).sum(axis=1)[:, None] + s2[None, :] - 2.0 * (c @ sites.T)
        out[lo:lo + chunk] = np.rint(d2.min(axis=1)).astype(np.int64)
    return out.reshape(occ.shape)
