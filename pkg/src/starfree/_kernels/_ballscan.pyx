# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled ball-scan kernels.

Must match _ballscan_py.py exactly: same BFS order, same output order.
"""

import numpy as np

BACKEND = "compiled"


def ball_vertices(int[:] indptr, int[:] indices, int start, int depth):
    """Vertices within `depth` out-hops of `start`, in BFS discovery order."""
    cdef int n = indptr.shape[0] - 1
    out_arr = np.empty(n, dtype=np.int32)
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef int[:] out = out_arr
    cdef unsigned char[:] seen = seen_arr
    cdef int head = 0, tail = 1, level_end = 1, d = 0
    cdef int u, w
    cdef long e
    out[0] = start
    seen[start] = 1
    while head < tail:
        u = out[head]
        head += 1
        if d < depth:
            for e in range(indptr[u], indptr[u + 1]):
                w = indices[e]
                if not seen[w]:
                    seen[w] = 1
                    out[tail] = w
                    tail += 1
        if head == level_end:
            d += 1
            level_end = tail
    return out_arr[:tail].copy()


def scan_candidates(int[:] indptr, int[:] indices, int depth,
                    unsigned char[:] member, unsigned char[:] skip):
    """Vertices v (skip[v]==0) whose depth-limited out-ball touches `member`."""
    cdef int n = member.shape[0]
    out_arr = np.empty(n, dtype=np.int32)
    queue_arr = np.zeros(n, dtype=np.int32)
    stamp_arr = np.zeros(n, dtype=np.int32)
    cdef int[:] out = out_arr
    cdef int[:] queue = queue_arr
    cdef int[:] stamp = stamp_arr
    cdef int nout = 0
    cdef int v, u, w, head, tail, level_end, d
    cdef long e
    cdef bint hit
    for v in range(n):
        if skip[v]:
            continue
        if member[v]:
            out[nout] = v
            nout += 1
            continue
        stamp[v] = v + 1
        queue[0] = v
        head = 0
        tail = 1
        level_end = 1
        d = 0
        hit = False
        while head < tail and not hit:
            u = queue[head]
            head += 1
            if d < depth:
                for e in range(indptr[u], indptr[u + 1]):
                    w = indices[e]
                    if stamp[w] != v + 1:
                        stamp[w] = v + 1
                        if member[w]:
                            hit = True
                            break
                        queue[tail] = w
                        tail += 1
            if head == level_end:
                d += 1
                level_end = tail
        if hit:
            out[nout] = v
            nout += 1
    return out_arr[:nout].copy()
