"""Pure Python fallback for the ball-scan kernels.

Semantics must match _ballscan.pyx exactly: same BFS order, same output
order, so results are byte-identical whichever backend is loaded.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def ball_vertices(indptr, indices, start: int, depth: int):
    """Vertices within `depth` out-hops of `start`, in BFS discovery order."""
    seen = {int(start)}
    order = [int(start)]
    frontier = [int(start)]
    for _ in range(depth):
        if not frontier:
            break
        nxt = []
        for v in frontier:
            for e in range(indptr[v], indptr[v + 1]):
                w = int(indices[e])
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    nxt.append(w)
        frontier = nxt
    return np.asarray(order, dtype=np.int32)


def scan_candidates(indptr, indices, depth: int, member, skip):
    """Vertices v (skip[v]==0) whose depth-limited out-ball touches `member`.

    `member` and `skip` are uint8 arrays of length n.  The scan early-exits
    per vertex on the first touched member.  Output is ascending.
    """
    n = len(member)
    out = []
    queue = [0] * n
    stamp = [0] * n
    for v in range(n):
        if skip[v]:
            continue
        if member[v]:
            out.append(v)
            continue
        stamp[v] = v + 1
        queue[0] = v
        head, tail = 0, 1
        level_end, d = 1, 0
        hit = False
        while head < tail and not hit:
            u = queue[head]
            head += 1
            if d < depth:
                for e in range(indptr[u], indptr[u + 1]):
                    w = int(indices[e])
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
            out.append(v)
    return np.asarray(out, dtype=np.int32)
