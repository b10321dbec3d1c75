# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-scoring backend.

Token sets are CSR-packed sorted int32 id arrays; intersections are merge
walks. Must stay numerically identical to ``_purepy``: same feature
order, same accumulation order, and the build keeps fp-contraction off.
"""

import numpy as np

NAME = "native"


cdef inline long _intersect_size(const int[:] ids, long a0, long a1, long b0, long b1) nogil:
    cdef long count = 0
    while a0 < a1 and b0 < b1:
        if ids[a0] < ids[b0]:
            a0 += 1
        elif ids[a0] > ids[b0]:
            b0 += 1
        else:
            count += 1
            a0 += 1
            b0 += 1
    return count


cdef inline double _margin(const int[:] w_ids, const long[:] w_off,
                           const int[:] c_ids, const long[:] c_off,
                           const double[:] mean, const double[:] std,
                           const double[:] weights, double bias,
                           long a, long b) nogil:
    cdef long i_w = _intersect_size(w_ids, w_off[a], w_off[a + 1], w_off[b], w_off[b + 1])
    cdef long i_c = _intersect_size(c_ids, c_off[a], c_off[a + 1], c_off[b], c_off[b + 1])
    cdef long la = w_off[a + 1] - w_off[a]
    cdef long lb = w_off[b + 1] - w_off[b]
    cdef long u_w = la + lb - i_w
    cdef long u_c = (c_off[a + 1] - c_off[a]) + (c_off[b + 1] - c_off[b]) - i_c
    cdef long tmp
    if la > lb:
        tmp = la
        la = lb
        lb = tmp
    cdef double acc = 0.0
    acc += weights[0] * ((u_w - mean[0]) / std[0])
    acc += weights[1] * ((u_c - mean[1]) / std[1])
    acc += weights[2] * ((i_w - mean[2]) / std[2])
    acc += weights[3] * ((i_c - mean[3]) / std[3])
    acc += weights[4] * ((la - mean[4]) / std[4])
    acc += weights[5] * ((lb - mean[5]) / std[5])
    return acc + bias


def score_pairs(const int[:] w_ids, const long[:] w_off,
                const int[:] c_ids, const long[:] c_off,
                const double[:] mean, const double[:] std,
                const double[:] weights, double bias,
                const long[:] ii, const long[:] jj):
    """Decision margins for explicit candidate pairs (ii[k], jj[k])."""
    cdef long n = ii.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[:] out_v = out
    cdef long k
    with nogil:
        for k in range(n):
            out_v[k] = _margin(w_ids, w_off, c_ids, c_off, mean, std, weights, bias,
                               ii[k], jj[k])
    return out


def accept_all_pairs(const int[:] w_ids, const long[:] w_off,
                     const int[:] c_ids, const long[:] c_off,
                     const double[:] mean, const double[:] std,
                     const double[:] weights, double bias):
    """All i < j pairs with positive margin, in lexicographic order."""
    cdef long n = w_off.shape[0] - 1
    cdef long cap = 1024
    out_i = np.empty(cap, dtype=np.int64)
    out_j = np.empty(cap, dtype=np.int64)
    out_m = np.empty(cap, dtype=np.float64)
    cdef long[:] iv = out_i
    cdef long[:] jv = out_j
    cdef double[:] mv = out_m
    cdef long count = 0
    cdef long a, b
    cdef double m
    for a in range(n):
        for b in range(a + 1, n):
            m = _margin(w_ids, w_off, c_ids, c_off, mean, std, weights, bias, a, b)
            if m > 0.0:
                if count == cap:
                    cap *= 2
                    out_i = np.resize(out_i, cap)
                    out_j = np.resize(out_j, cap)
                    out_m = np.resize(out_m, cap)
                    iv = out_i
                    jv = out_j
                    mv = out_m
                iv[count] = a
                jv[count] = b
                mv[count] = m
                count += 1
    return out_i[:count].copy(), out_j[:count].copy(), out_m[:count].copy()
