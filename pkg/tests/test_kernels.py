"""Kernel backends: pure Python and compiled must agree exactly."""

import random

import numpy as np
import pytest

from starfree._kernels import BACKEND, compiled, pure
from starfree.digraph import BoundedOutDigraph


def random_graph(n, d, rng):
    adj = []
    for v in range(n):
        deg = rng.randrange(d + 1)
        choices = [w for w in range(n) if w != v]
        adj.append(rng.sample(choices, min(deg, len(choices))))
    return BoundedOutDigraph(n, d, adj)


def brute_ball(g, start, depth):
    seen = {start}
    order = [start]
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for w in g.adj[v]:
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    nxt.append(w)
        frontier = nxt
    return order


def test_pure_ball_matches_bruteforce():
    rng = random.Random(0)
    for trial in range(30):
        g = random_graph(rng.randrange(1, 40), 3, rng)
        indptr, indices = g.csr()
        v = rng.randrange(g.n)
        depth = rng.randrange(4)
        got = list(pure.ball_vertices(indptr, indices, v, depth))
        assert got == brute_ball(g, v, depth)


def test_pure_scan_matches_bruteforce():
    rng = random.Random(1)
    for trial in range(30):
        g = random_graph(rng.randrange(2, 40), 3, rng)
        n = g.n
        indptr, indices = g.csr()
        member = np.zeros(n, dtype=np.uint8)
        for v in rng.sample(range(n), rng.randrange(n)):
            member[v] = 1
        skip = np.zeros(n, dtype=np.uint8)
        for v in rng.sample(range(n), rng.randrange(n // 2 + 1)):
            skip[v] = 1
        depth = rng.randrange(4)
        got = list(pure.scan_candidates(indptr, indices, depth, member, skip))
        want = [
            v
            for v in range(n)
            if not skip[v] and any(member[w] for w in brute_ball(g, v, depth))
        ]
        assert got == want


@pytest.mark.skipif(compiled is None, reason="compiled kernel unavailable")
def test_backends_agree():
    rng = random.Random(2)
    for trial in range(25):
        g = random_graph(rng.randrange(2, 60), 3, rng)
        n = g.n
        indptr, indices = g.csr()
        member = np.zeros(n, dtype=np.uint8)
        for v in rng.sample(range(n), rng.randrange(n)):
            member[v] = 1
        skip = np.zeros(n, dtype=np.uint8)
        depth = rng.randrange(5)
        assert np.array_equal(
            pure.scan_candidates(indptr, indices, depth, member, skip),
            compiled.scan_candidates(indptr, indices, depth, member, skip),
        )
        v = rng.randrange(n)
        assert np.array_equal(
            pure.ball_vertices(indptr, indices, v, depth),
            compiled.ball_vertices(indptr, indices, v, depth),
        )


def test_backend_label():
    assert BACKEND in ("compiled", "python")
