"""Pure-Python pair-scoring backend.

Same contract as the compiled backend in ``_native.pyx``: posts arrive as
CSR-packed sorted token-id arrays, margins come back as float64. The
accumulation order of the decision value is pinned so both backends agree
bit for bit.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _as_sets(ids: np.ndarray, offsets: np.ndarray) -> list[frozenset[int]]:
    data = ids.tolist()
    off = offsets.tolist()
    return [frozenset(data[off[k] : off[k + 1]]) for k in range(len(off) - 1)]


def _margin(wa, wb, ca, cb, mean, std, weights, bias):
    i_w = len(wa & wb)
    i_c = len(ca & cb)
    la, lb = len(wa), len(wb)
    u_w = la + lb - i_w
    u_c = len(ca) + len(cb) - i_c
    if la > lb:
        la, lb = lb, la
    feats = (u_w, u_c, i_w, i_c, la, lb)
    acc = 0.0
    for k in range(6):
        acc += weights[k] * ((feats[k] - mean[k]) / std[k])
    return acc + bias


def score_pairs(w_ids, w_off, c_ids, c_off, mean, std, weights, bias, ii, jj):
    """Decision margins for explicit candidate pairs (ii[k], jj[k])."""
    wsets = _as_sets(w_ids, w_off)
    csets = _as_sets(c_ids, c_off)
    mean = mean.tolist()
    std = std.tolist()
    weights = weights.tolist()
    out = np.empty(len(ii), dtype=np.float64)
    for k in range(len(ii)):
        a, b = int(ii[k]), int(jj[k])
        out[k] = _margin(wsets[a], wsets[b], csets[a], csets[b], mean, std, weights, bias)
    return out


def accept_all_pairs(w_ids, w_off, c_ids, c_off, mean, std, weights, bias):
    """All i < j pairs with positive margin, in lexicographic order."""
    wsets = _as_sets(w_ids, w_off)
    csets = _as_sets(c_ids, c_off)
    mean = mean.tolist()
    std = std.tolist()
    weights = weights.tolist()
    n = len(wsets)
    out_i: list[int] = []
    out_j: list[int] = []
    out_m: list[float] = []
    for a in range(n):
        wa, ca = wsets[a], csets[a]
        for b in range(a + 1, n):
            m = _margin(wa, wsets[b], ca, csets[b], mean, std, weights, bias)
            if m > 0.0:
                out_i.append(a)
                out_j.append(b)
                out_m.append(m)
    return (
        np.asarray(out_i, dtype=np.int64),
        np.asarray(out_j, dtype=np.int64),
        np.asarray(out_m, dtype=np.float64),
    )
