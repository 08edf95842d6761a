"""Pure-Python fallback for the bounded distance sweep.

Same contract as the compiled kernel in _dijkstra.pyx; see kernels.py for
how the backend is chosen.
"""

from __future__ import annotations

import heapq

import numpy as np


def bounded_dijkstra(indptr, nbr, edge_len, src_v, src_d, bound):
    """Uniform-weight Dijkstra from seeded sources, cut off at `bound`.

    All arithmetic is on integers (distances in fixed fractional units), so
    results are exact.  Returns int64 distances per vertex, -1 where the
    vertex is farther than `bound`.
    """
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    edge_len = int(edge_len)
    bound = int(bound)

    heap: list[tuple[int, int]] = []
    for v, d in zip(src_v, src_d):
        v, d = int(v), int(d)
        if d <= bound and (dist[v] < 0 or d < dist[v]):
            dist[v] = d
            heapq.heappush(heap, (d, v))

    while heap:
        d, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        nd = d + edge_len
        if nd > bound:
            continue
        for i in range(indptr[v], indptr[v + 1]):
            u = int(nbr[i])
            if dist[u] < 0 or nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist
