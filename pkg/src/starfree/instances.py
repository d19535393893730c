"""Instance generators and reductions.

Planted far graphs, free/far collision sequences, the sequence-to-star
reduction, and the dummy-symbol collapse.  Every generator is a pure
function of (parameters, seed).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from .digraph import BoundedOutDigraph, PatternGraph


@dataclass(frozen=True)
class IntegerSequence:
    """Length-n sequence over alphabet [lo..r] (lo is 0 for the dummy variant)."""

    n: int
    r: int
    values: tuple[int, ...]
    lo: int = 1

    def __post_init__(self):
        if len(self.values) != self.n:
            raise ValueError("value count does not match n")
        for x in self.values:
            if not self.lo <= x <= self.r:
                raise ValueError(f"value {x} outside [{self.lo}, {self.r}]")

    def occurrence_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for x in self.values:
            counts[x] = counts.get(x, 0) + 1
        return counts

    def to_text(self) -> str:
        lines = [f"{self.n} {self.r}"]
        lines.extend(str(x) for x in self.values)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, lo: int = 1) -> "IntegerSequence":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n, r = (int(tok) for tok in lines[0].split())
        values = tuple(int(ln) for ln in lines[1 : n + 1])
        return cls(n, r, values, lo=lo)

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "r": self.r, "values": list(self.values)}, sort_keys=True
        )

    @classmethod
    def from_json(cls, text: str, lo: int = 1) -> "IntegerSequence":
        obj = json.loads(text)
        return cls(obj["n"], obj["r"], tuple(obj["values"]), lo=lo)


@dataclass(frozen=True)
class FarnessCertificate:
    epsilon: Fraction
    witness_kind: str  # "planted-copies" or "brute-force-distance"

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.witness_kind not in ("planted-copies", "brute-force-distance"):
            raise ValueError(f"unknown witness kind {self.witness_kind!r}")


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def gen_far_h_instance(
    n: int,
    d_out: int,
    pattern: PatternGraph,
    eps,
    seed: int,
    *,
    extra_filler_edges: int = 0,
) -> tuple[BoundedOutDigraph, FarnessCertificate]:
    """Graph that is eps-far from pattern-free, with a planted-copy witness.

    Plants twice the minimum number of vertex-disjoint copies needed for
    eps-farness (each copy independently forces at least one edge deletion,
    so min-deletion distance >= #copies >= eps*n*d_out).  Remaining
    vertices carry filler edges that provably create no pattern copy.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if d_out < pattern.max_out_degree:
        raise ValueError(
            f"d_out={d_out} below pattern's max out-degree {pattern.max_out_degree}"
        )
    h = pattern.h
    if h == 0:
        raise ValueError("empty pattern")
    m_min = _ceil_frac(eps * n * d_out)
    m = 2 * m_min
    if m < 1 or m * h > n:
        raise ValueError(
            f"infeasible parameters: need {m} disjoint copies of size {h} in {n} vertices"
        )
    rng = random.Random(seed)
    placement = rng.sample(range(n), m * h)
    adj: list[list[int]] = [[] for _ in range(n)]
    for i in range(m):
        block = placement[i * h : (i + 1) * h]
        for u, v in pattern.edges:
            adj[block[u]].append(block[v])
    rest = sorted(set(range(n)) - set(placement))
    # Filler: a directed cycle over leftover vertices is pattern-free whenever
    # the pattern has a vertex of in- or out-degree >= 2 (a cycle has max
    # degree 1 both ways); otherwise leave the leftovers isolated.
    indeg = [0] * h
    for _, v in pattern.edges:
        indeg[v] += 1
    cycle_safe = pattern.max_out_degree >= 2 or max(indeg, default=0) >= 2
    if cycle_safe and len(rest) >= 2:
        ring = rest[:]
        rng.shuffle(ring)
        for i, u in enumerate(ring):
            adj[u].append(ring[(i + 1) % len(ring)])
    g = BoundedOutDigraph(n, d_out, adj)
    for _ in range(extra_filler_edges):
        g = _try_add_filler_edge(g, pattern, rng)
    return g, FarnessCertificate(epsilon=eps, witness_kind="planted-copies")


def _try_add_filler_edge(
    g: BoundedOutDigraph, pattern: PatternGraph, rng: random.Random
) -> BoundedOutDigraph:
    """Add one random edge if it does not complete a pattern copy (desk scale)."""
    from .digraph import count_source_disjoint_copies

    base = count_source_disjoint_copies(g, pattern)
    for _ in range(32):
        u = rng.randrange(g.n)
        v = rng.randrange(g.n)
        if u == v or v in g.adj[u] or g.out_degree(u) >= g.d_out:
            continue
        adj = [list(row) for row in g.adj]
        adj[u].append(v)
        cand = BoundedOutDigraph(g.n, g.d_out, adj)
        if count_source_disjoint_copies(cand, pattern) == base:
            return cand
    return g


def gen_h_free_instance(
    n: int, d_out: int, pattern: PatternGraph, seed: int
) -> BoundedOutDigraph:
    """Pattern-free graph: a star-free matching layout when the pattern is a
    star, otherwise a plain filler cycle (or isolated vertices)."""
    rng = random.Random(seed)
    adj: list[list[int]] = [[] for _ in range(n)]
    star_center = pattern.h - 1 if pattern.edges and all(v == pattern.h - 1 for _, v in pattern.edges) else None
    if star_center is not None and n >= 2:
        # Outer half points into inner half with every in-degree <= k-1.
        inner = max(1, n // 2)
        outer = n - inner
        k = pattern.k
        cap = max(1, k - 1)
        targets = []
        for j in range(inner):
            targets.extend([outer + j] * cap)
        rng.shuffle(targets)
        for i in range(min(outer, len(targets))):
            adj[i].append(targets[i])
    else:
        indeg = [0] * pattern.h
        for _, v in pattern.edges:
            indeg[v] += 1
        if (pattern.max_out_degree >= 2 or max(indeg, default=0) >= 2) and n >= 2:
            ring = list(range(n))
            rng.shuffle(ring)
            for i, u in enumerate(ring):
                adj[u].append(ring[(i + 1) % len(ring)])
    return BoundedOutDigraph(n, d_out, adj)


def gen_collision_sequence(
    n: int,
    r: int,
    k: int,
    mode: str,
    seed: int,
    eps=None,
) -> IntegerSequence:
    """Collision-free or eps-far sequence over [1..r].

    mode="free": no value occurs k or more times (needs r*(k-1) >= n).
    mode="far": 2*ceil(eps*n) disjoint k-groups sit on fresh values, so at
    least one entry of every group must change before the sequence is
    k-collision-free; the remaining entries reuse leftover values fewer
    than k times each.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = random.Random(seed)
    if mode == "free":
        if r * (k - 1) < n:
            raise ValueError(f"free mode needs r*(k-1) >= n, got {r}*{k - 1} < {n}")
        values = [1 + (i % r) for i in range(n)]
        rng.shuffle(values)
        return IntegerSequence(n, r, tuple(values))
    if mode == "far":
        if eps is None:
            raise ValueError("far mode requires eps")
        eps = Fraction(eps)
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        groups = 2 * _ceil_frac(eps * n)
        rest = n - groups * k
        if rest < 0:
            raise ValueError(f"infeasible: {groups} groups of size {k} exceed n={n}")
        if groups > r:
            raise ValueError(f"infeasible: {groups} fresh values exceed alphabet {r}")
        if rest > (r - groups) * (k - 1):
            raise ValueError("infeasible: leftover alphabet too small to stay collision-light")
        values = [0] * n
        positions = list(range(n))
        rng.shuffle(positions)
        pos = 0
        for gidx in range(groups):
            for _ in range(k):
                values[positions[pos]] = gidx + 1
                pos += 1
        spare = []
        j = 0
        while len(spare) < rest:
            spare.append(groups + 1 + (j % (r - groups)))
            j += 1
        for x in spare:
            values[positions[pos]] = x
            pos += 1
        return IntegerSequence(n, r, tuple(values))
    raise ValueError(f"unknown mode {mode!r}")


def reduce_collision_to_star(s: IntegerSequence, d: int = 1) -> BoundedOutDigraph:
    """Sequence -> digraph on n + r vertices with edge u_i -> v_{s_i}.

    Outer vertices are 0..n-1, inner (value) vertices are n..n+r-1.  The
    output has out-degree <= 1, and a value occurs k times exactly when the
    matching inner vertex is the centre of a k-star.
    """
    if d < 1:
        raise ValueError("out-degree bound must be >= 1")
    if s.lo < 1:
        raise ValueError("reduction expects values in [1..r]; collapse dummies first")
    n, r = s.n, s.r
    adj: list[list[int]] = [[] for _ in range(n + r)]
    for i, x in enumerate(s.values):
        adj[i].append(n + x - 1)
    return BoundedOutDigraph(n + r, d, adj)


def reduced_star_epsilon(eps, n: int, r: int, d: int = 1) -> Fraction:
    """Farness parameter carried through the sequence-to-star reduction."""
    eps = Fraction(eps)
    return eps * n / (d * (n + r))


def reduce_dummy_collision(s: IntegerSequence) -> IntegerSequence:
    """Collapse dummy zeros: value 0 at (1-indexed) position i becomes r + ceil(i/2).

    Positive values pass through.  New values collide at most pairwise, so
    k-collision structure is preserved exactly for k >= 3 (the caller is
    responsible for the k >= 3 context).
    """
    if s.lo != 0:
        raise ValueError("dummy reduction expects a [0..r] sequence")
    r_new = s.r + (s.n + 1) // 2
    values = []
    for idx, x in enumerate(s.values, start=1):
        values.append(x if x > 0 else s.r + (idx + 1) // 2)
    return IntegerSequence(s.n, r_new, tuple(values))


def has_k_collision(s: IntegerSequence, k: int, *, ignore_zero: bool = False) -> bool:
    counts = s.occurrence_counts()
    if ignore_zero:
        counts.pop(0, None)
    return any(c >= k for c in counts.values())


def min_changes_to_collision_free(s: IntegerSequence, k: int) -> int:
    """Exact minimum number of entries to change to kill all k-collisions.

    Each value with c >= k occurrences needs c - (k-1) entries changed, and
    changed entries can always be parked on fresh headroom when the
    alphabet allows it; callers at desk scale should check headroom.
    """
    counts = s.occurrence_counts()
    need = sum(max(0, c - (k - 1)) for c in counts.values())
    headroom = sum(
        (k - 1) - counts.get(v, 0) for v in range(1, s.r + 1) if counts.get(v, 0) < k - 1
    )
    if need > headroom:
        raise ValueError("alphabet too small for the closed-form repair count")
    return need
