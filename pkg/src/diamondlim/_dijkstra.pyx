# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled bounded distance sweep over a uniform-weight CSR graph.

Mirrors _dijkstra_py.bounded_dijkstra exactly; kernels.py picks whichever
is available at import time.
"""

import numpy as np


cdef inline void _heap_push(long long[::1] hd, int[::1] hv, Py_ssize_t* hn,
                            long long d, int v) noexcept:
    cdef Py_ssize_t i = hn[0]
    cdef Py_ssize_t parent
    hn[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if hd[parent] <= d:
            break
        hd[i] = hd[parent]
        hv[i] = hv[parent]
        i = parent
    hd[i] = d
    hv[i] = v


cdef inline void _heap_pop(long long[::1] hd, int[::1] hv, Py_ssize_t* hn) noexcept:
    # caller reads hd[0], hv[0] before calling
    cdef Py_ssize_t n, i, child
    cdef long long d
    cdef int v
    hn[0] -= 1
    n = hn[0]
    if n == 0:
        return
    d = hd[n]
    v = hv[n]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and hd[child + 1] < hd[child]:
            child += 1
        if hd[child] >= d:
            break
        hd[i] = hd[child]
        hv[i] = hv[child]
        i = child
    hd[i] = d
    hv[i] = v


def bounded_dijkstra(const long long[::1] indptr, const int[::1] nbr,
                     long long edge_len,
                     const int[::1] src_v, const long long[::1] src_d,
                     long long bound):
    """Uniform-weight Dijkstra from seeded sources, cut off at `bound`.

    Integer distances per vertex (int64), -1 where farther than `bound`.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] dist = dist_arr
    cdef unsigned char[::1] done = np.zeros(n, dtype=np.uint8)

    # one push per improving relaxation, so |nbr| + |sources| bounds the heap
    cdef Py_ssize_t cap = nbr.shape[0] + src_v.shape[0] + 1
    cdef long long[::1] hd = np.empty(cap, dtype=np.int64)
    cdef int[::1] hv = np.empty(cap, dtype=np.int32)
    cdef Py_ssize_t hn = 0

    cdef Py_ssize_t j
    cdef long long d, nd
    cdef int v, u
    for j in range(src_v.shape[0]):
        d = src_d[j]
        v = src_v[j]
        if d <= bound and (dist[v] < 0 or d < dist[v]):
            dist[v] = d
            _heap_push(hd, hv, &hn, d, v)

    while hn > 0:
        d = hd[0]
        v = hv[0]
        _heap_pop(hd, hv, &hn)
        if done[v]:
            continue
        done[v] = 1
        nd = d + edge_len
        if nd > bound:
            continue
        for j in range(indptr[v], indptr[v + 1]):
            u = nbr[j]
            if dist[u] < 0 or nd < dist[u]:
                dist[u] = nd
                _heap_push(hd, hv, &hn, nd, u)
    return dist_arr
