"""Compiled CART growth and routing.

The kernel mirrors ``random_forest.best_split`` and the node policy documented
in ``random_forest.fit_tree``; the pure-Python paths in the tests check it.
"""

import numpy as np
from numba import njit

from .rng import GAMMA, _M1, _M2

# weighted-Gini candidates closer than this are treated as tied
SPLIT_TOL = 1e-14

_GAMMA = np.uint64(GAMMA)
_C1 = np.uint64(_M1)
_C2 = np.uint64(_M2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S32 = np.uint64(32)


@njit(cache=True)
def _next_u64(state):
    state[0] += _GAMMA
    z = state[0]
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


@njit(cache=True)
def _randbelow(state, n):
    return np.int64(((_next_u64(state) >> _S32) * np.uint64(n)) >> _S32)


@njit(cache=True)
def _draw_features(state, n_features, mtry):
    items = np.arange(n_features)
    for i in range(mtry):
        j = i + _randbelow(state, n_features - i)
        tmp = items[i]
        items[i] = items[j]
        items[j] = tmp
    return np.sort(items[:mtry])


@njit(cache=True)
def _weighted_gini(l0, l1, r0, r1):
    nl = l0 + l1
    nr = r0 + r1
    n = nl + nr
    gl = 1.0 - (l0 * l0 + l1 * l1) / (nl * nl)
    gr = 1.0 - (r0 * r0 + r1 * r1) / (nr * nr)
    return (nl * gl + nr * gr) / n


@njit(cache=True)
def best_split_kernel(X, y, idx, features, min_leaf):
    """Best (feature, threshold, impurity) over ``features`` for rows ``idx``.

    Returns feature -1 when no admissible threshold exists.
    """
    m = idx.shape[0]
    best_f = -1
    best_t = 0.0
    best_g = np.inf
    vals = np.empty(m)
    labs = np.empty(m, dtype=np.int64)
    total1 = 0
    for i in range(m):
        total1 += y[idx[i]]
    for fi in range(features.shape[0]):
        f = features[fi]
        for i in range(m):
            vals[i] = X[idx[i], f]
        order = np.argsort(vals)
        for i in range(m):
            labs[i] = y[idx[order[i]]]
        c1 = 0
        for k in range(1, m):
            c1 += labs[k - 1]
            lo = vals[order[k - 1]]
            hi = vals[order[k]]
            if not lo < hi:
                continue
            if k < min_leaf or m - k < min_leaf:
                continue
            l1 = float(c1)
            l0 = float(k - c1)
            r1 = float(total1 - c1)
            r0 = float(m - k) - r1
            g = _weighted_gini(l0, l1, r0, r1)
            if g < best_g - SPLIT_TOL:
                best_g = g
                best_f = f
                t = 0.5 * (lo + hi)
                if not t < hi:
                    t = lo
                best_t = t
    return best_f, best_t, best_g


@njit(cache=True)
def grow_tree(X, y, sample, mtry, max_depth, min_leaf, state):
    """Grow one CART tree on the rows listed in ``sample`` (may repeat).

    ``state`` is a length-1 uint64 array holding the SplitMix64 state; it is
    consumed once per node that attempts a split, in preorder.
    Returns preorder arrays (feature, threshold, left, right, counts).
    """
    n_features = X.shape[1]
    m = sample.shape[0]
    cap = 2 * m + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    counts = np.zeros((cap, 2), dtype=np.int64)

    idx = sample.copy()
    buf = np.empty(m, dtype=np.int64)
    # stack entries: start, end, depth, parent, is_left
    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)
    st_parent = np.empty(cap, dtype=np.int64)
    st_left = np.empty(cap, dtype=np.int64)
    top = 0
    st_start[0] = 0
    st_end[0] = m
    st_depth[0] = 0
    st_parent[0] = -1
    st_left[0] = 0
    top = 1
    n_nodes = 0

    while top > 0:
        top -= 1
        start = st_start[top]
        end = st_end[top]
        depth = st_depth[top]
        parent = st_parent[top]
        is_left = st_left[top]

        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_left == 1:
                left[parent] = node
            else:
                right[parent] = node

        size = end - start
        c1 = 0
        for i in range(start, end):
            c1 += y[idx[i]]
        counts[node, 0] = size - c1
        counts[node, 1] = c1

        if c1 == 0 or c1 == size:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue
        if size < 2 * min_leaf:
            continue

        feats = _draw_features(state, n_features, mtry)
        f, t, g = best_split_kernel(X, y, idx[start:end], feats, min_leaf)
        if f < 0:
            continue

        feature[node] = f
        threshold[node] = t
        nl = 0
        nr = 0
        for i in range(start, end):
            r = idx[i]
            if X[r, f] <= t:
                idx[start + nl] = r
                nl += 1
            else:
                buf[nr] = r
                nr += 1
        for i in range(nr):
            idx[start + nl + i] = buf[i]

        # right pushed first so the left child is numbered next (preorder)
        st_start[top] = start + nl
        st_end[top] = end
        st_depth[top] = depth + 1
        st_parent[top] = node
        st_left[top] = 0
        top += 1
        st_start[top] = start
        st_end[top] = start + nl
        st_depth[top] = depth + 1
        st_parent[top] = node
        st_left[top] = 1
        top += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            counts[:n_nodes].copy())


@njit(cache=True)
def apply_tree(feature, threshold, left, right, X):
    """Leaf node index reached by each row of ``X``."""
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out
