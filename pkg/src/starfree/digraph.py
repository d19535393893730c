"""Bounded out-degree digraphs with query-counted oracle access.

The central objects are:

* :class:`BoundedOutDigraph` -- an immutable adjacency-list digraph whose
  out-degrees are capped by ``d_out``.  Only outgoing edges are ever
  visible to algorithms: a query ``(v, i)`` returns the i-th out-neighbour
  of ``v`` or ``None`` ("bottom") when ``v`` has fewer than ``i`` edges.
* :class:`QueryLedger` / :class:`OracleView` -- every slot query goes
  through a view that charges the ledger, so the query cost of an
  algorithm is exactly what its ledger says.
* :class:`PatternGraph` -- a constant-size pattern with its source
  components (strongly connected vertex sets with no incoming edge from
  outside) precomputed.

Graphs are immutable after construction and safe to share between
concurrent tasks; each OracleView owns its ledger and is meant to be used
from one task at a time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence


@dataclass
class QueryLedger:
    """Counts classical queries and charged (modelled) search queries."""

    classical_queries: int = 0
    grover_charged_queries: int = 0

    def charge_classical(self, amount: int = 1) -> None:
        if amount < 0:
            raise ValueError("ledger charges must be non-negative")
        self.classical_queries += amount

    def charge_grover(self, amount: int) -> None:
        if amount < 0:
            raise ValueError("ledger charges must be non-negative")
        self.grover_charged_queries += amount

    @property
    def total(self) -> int:
        return self.classical_queries + self.grover_charged_queries

    def snapshot(self) -> dict:
        return {
            "queries_classical": self.classical_queries,
            "queries_charged": self.grover_charged_queries,
            "queries_total": self.total,
        }


class BoundedOutDigraph:
    """Immutable digraph on vertices ``0..n-1`` with out-degree <= d_out."""

    __slots__ = ("n", "d_out", "adj", "_csr", "_rev")

    def __init__(
        self,
        n: int,
        d_out: int,
        adj: Sequence[Sequence[int]],
        *,
        allow_self_loops: bool = False,
    ):
        if n < 0 or d_out < 0:
            raise ValueError("n and d_out must be non-negative")
        if len(adj) != n:
            raise ValueError(f"adjacency has {len(adj)} rows, expected {n}")
        frozen = []
        for v, row in enumerate(adj):
            row = tuple(int(w) for w in row)
            if len(row) > d_out:
                raise ValueError(f"vertex {v} exceeds out-degree bound {d_out}")
            for w in row:
                if not 0 <= w < n:
                    raise ValueError(f"edge {v}->{w} leaves vertex range")
                if w == v and not allow_self_loops:
                    raise ValueError(f"self-loop at vertex {v}")
            frozen.append(row)
        self.n = n
        self.d_out = d_out
        self.adj = tuple(frozen)
        self._csr = None
        self._rev = None

    # -- basic accessors ---------------------------------------------------

    def out_degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def m(self) -> int:
        return sum(len(row) for row in self.adj)

    def edges(self) -> Iterator[tuple[int, int]]:
        for v, row in enumerate(self.adj):
            for w in row:
                yield (v, w)

    def csr(self):
        """(indptr, indices) int32 arrays for the compiled kernels."""
        if self._csr is None:
            import numpy as np

            indptr = np.zeros(self.n + 1, dtype=np.int32)
            for v, row in enumerate(self.adj):
                indptr[v + 1] = indptr[v] + len(row)
            indices = np.empty(int(indptr[-1]), dtype=np.int32)
            pos = 0
            for row in self.adj:
                for w in row:
                    indices[pos] = w
                    pos += 1
            self._csr = (indptr, indices)
        return self._csr

    def reverse_adj(self) -> tuple[tuple[int, ...], ...]:
        """In-neighbour lists (full knowledge only; never oracle-visible)."""
        if self._rev is None:
            rev: list[list[int]] = [[] for _ in range(self.n)]
            for v, row in enumerate(self.adj):
                for w in row:
                    rev[w].append(v)
            self._rev = tuple(tuple(r) for r in rev)
        return self._rev

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoundedOutDigraph)
            and self.n == other.n
            and self.d_out == other.d_out
            and self.adj == other.adj
        )

    def __repr__(self) -> str:
        return f"BoundedOutDigraph(n={self.n}, d_out={self.d_out}, m={self.m})"

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.n} {self.d_out}"]
        lines.extend(" ".join(str(w) for w in row) for row in self.adj)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BoundedOutDigraph":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty graph text")
        n, d_out = (int(tok) for tok in lines[0].split())
        rows = []
        for v in range(n):
            if v + 1 >= len(lines) or not lines[v + 1].strip():
                rows.append(())
            else:
                rows.append(tuple(int(tok) for tok in lines[v + 1].split()))
        return cls(n, d_out, rows)

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "d_out": self.d_out, "adj": [list(r) for r in self.adj]},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "BoundedOutDigraph":
        obj = json.loads(text)
        return cls(obj["n"], obj["d_out"], obj["adj"])


class OracleView:
    """Mediated access to a digraph (or integer sequence) that charges a ledger.

    Every neighbour/sequence access increments the ledger exactly once.
    ``target`` is exposed for full-knowledge simulator paths that must not
    be charged; algorithms under measurement may only call the query
    methods.
    """

    __slots__ = ("target", "ledger")

    def __init__(self, target, ledger: Optional[QueryLedger] = None):
        self.target = target
        self.ledger = ledger if ledger is not None else QueryLedger()

    @property
    def graph(self) -> BoundedOutDigraph:
        return self.target

    @property
    def n(self) -> int:
        return self.target.n

    def out_neighbor_query(self, v: int, i: int) -> Optional[int]:
        return out_neighbor_query(self, v, i)

    def value_query(self, i: int) -> int:
        """Charged access to position i of an integer-sequence target."""
        values = self.target.values
        if not 0 <= i < len(values):
            raise ValueError(f"sequence index {i} out of range")
        self.ledger.charge_classical(1)
        return values[i]


def out_neighbor_query(view: OracleView, v: int, i: int) -> Optional[int]:
    """i-th out-neighbour of v (1-indexed slot), or None when deg_out(v) < i.

    Charges exactly one classical query.
    """
    g = view.graph
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    if not 1 <= i <= g.d_out:
        raise ValueError(f"slot {i} outside [1, {g.d_out}]")
    view.ledger.charge_classical(1)
    row = g.adj[v]
    return row[i - 1] if i <= len(row) else None


@dataclass
class ExploredSubgraph:
    """Result of a depth-limited BFS: what the algorithm has actually seen."""

    start: int
    depth: int
    vertices: set[int]
    adj: dict[int, tuple[int, ...]]  # discovered out-lists of expanded vertices
    queries: int = 0

    def edges(self) -> Iterator[tuple[int, int]]:
        for v, row in self.adj.items():
            for w in row:
                yield (v, w)


def bfs_limited(view: OracleView, start: int, depth: int) -> ExploredSubgraph:
    """Explore all vertices within `depth` out-hops of `start` through the oracle.

    Each reached vertex has its slots queried at most once (slots are read
    in order and stop at the first bottom), so the charge is at most
    sum_{j<depth} d_out^j * d_out.
    """
    g = view.graph
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if not 0 <= start < g.n:
        raise ValueError(f"vertex {start} out of range")
    before = view.ledger.classical_queries
    vertices = {start}
    adj: dict[int, tuple[int, ...]] = {}
    frontier = [start]
    for _ in range(depth):
        if not frontier:
            break
        nxt = []
        for v in frontier:
            if v in adj:
                continue
            row = []
            for i in range(1, g.d_out + 1):
                w = view.out_neighbor_query(v, i)
                if w is None:
                    break
                row.append(w)
                if w not in vertices:
                    vertices.add(w)
                    nxt.append(w)
            adj[v] = tuple(row)
        frontier = nxt
    return ExploredSubgraph(
        start=start,
        depth=depth,
        vertices=vertices,
        adj=adj,
        queries=view.ledger.classical_queries - before,
    )


# ---------------------------------------------------------------------------
# Strongly connected components and source components
# ---------------------------------------------------------------------------


def _tarjan_scc(n: int, adj: Sequence[Sequence[int]]) -> list[int]:
    """Iterative Tarjan; returns component id per vertex."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            row = adj[v]
            while pi < len(row):
                w = row[pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comp


def source_components(g) -> list[frozenset[int]]:
    """Maximal SCCs with no incoming edge from outside, sorted by min vertex.

    Accepts a BoundedOutDigraph or a PatternGraph (whose cached value is
    returned directly).
    """
    if isinstance(g, PatternGraph):
        return list(g.source_components)
    comp = _tarjan_scc(g.n, g.adj)
    ncomp = max(comp, default=-1) + 1
    has_incoming = [False] * ncomp
    for v in range(g.n):
        for w in g.adj[v]:
            if comp[v] != comp[w]:
                has_incoming[comp[w]] = True
    members: list[list[int]] = [[] for _ in range(ncomp)]
    for v in range(g.n):
        members[comp[v]].append(v)
    out = [frozenset(ms) for c, ms in enumerate(members) if not has_incoming[c]]
    out.sort(key=min)
    return out


class PatternGraph:
    """Constant-size pattern H with cached source components.

    A source component is a strongly connected vertex set with no edge
    entering it from the rest of the pattern.  ``k`` is the number of
    source components; testers require k >= 2.
    """

    def __init__(self, h: int, edges: Iterable[tuple[int, int]], *, allow_self_loops: bool = False):
        edges = tuple((int(u), int(v)) for u, v in edges)
        adj: list[list[int]] = [[] for _ in range(h)]
        for u, v in edges:
            if not (0 <= u < h and 0 <= v < h):
                raise ValueError(f"pattern edge {u}->{v} out of range")
            if u == v and not allow_self_loops:
                raise ValueError(f"pattern self-loop at {u}")
            adj[u].append(v)
        self.h = h
        self.edges = edges
        self.adj = tuple(tuple(sorted(set(row))) for row in adj)
        max_deg = max((len(r) for r in self.adj), default=0)
        self._graph = BoundedOutDigraph(h, max(max_deg, 1), self.adj, allow_self_loops=allow_self_loops)
        self.source_components = tuple(source_components(self._graph))
        self.k = len(self.source_components)
        self.source_vertices = frozenset().union(*self.source_components) if self.k else frozenset()
        self._vertex_comp = {}
        for ci, members in enumerate(self.source_components):
            for v in members:
                self._vertex_comp[v] = ci
        und: list[set[int]] = [set() for _ in range(h)]
        for u, v in edges:
            und[u].add(v)
            und[v].add(u)
        self._und = tuple(tuple(sorted(s)) for s in und)
        self._closures: dict[frozenset, tuple] = {}

    @classmethod
    def star(cls, k: int) -> "PatternGraph":
        """k-star: source vertices 0..k-1 all pointing at centre vertex k."""
        if k < 1:
            raise ValueError("star needs k >= 1")
        return cls(k + 1, [(i, k) for i in range(k)])

    @property
    def max_out_degree(self) -> int:
        return max((len(r) for r in self.adj), default=0)

    def component_of(self, v: int) -> Optional[int]:
        return self._vertex_comp.get(v)

    def is_weakly_connected(self) -> bool:
        if self.h == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in self._und[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.h

    def closure(self, comp_indices: Iterable[int]):
        """Sub-pattern induced by everything reachable from the given components.

        Returns (subpattern, vertex_map old->new, comp_map old_comp->new_comp).
        The sub-pattern's source components are exactly the chosen ones.
        """
        key = frozenset(comp_indices)
        if not key or not key <= set(range(self.k)):
            raise ValueError(f"component indices {sorted(key)} out of range")
        cached = self._closures.get(key)
        if cached is not None:
            return cached
        reach: set[int] = set()
        stack = [v for c in key for v in self.source_components[c]]
        reach.update(stack)
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                if w not in reach:
                    reach.add(w)
                    stack.append(w)
        verts = sorted(reach)
        vmap = {v: i for i, v in enumerate(verts)}
        sub_edges = [(vmap[u], vmap[v]) for u, v in self.edges if u in reach]
        sub = PatternGraph(len(verts), sub_edges)
        comp_map = {}
        for c in key:
            image = frozenset(vmap[v] for v in self.source_components[c])
            for nc, members in enumerate(sub.source_components):
                if members == image:
                    comp_map[c] = nc
                    break
            else:
                raise RuntimeError("source component lost under closure")
        result = (sub, vmap, comp_map)
        self._closures[key] = result
        return result

    def all_closures_weakly_connected(self) -> bool:
        """True when every component-subset closure is weakly connected.

        Used to decide whether ball-intersection prefiltering is sound.
        """
        from itertools import combinations

        for size in range(1, self.k + 1):
            for combo in combinations(range(self.k), size):
                sub, _, _ = self.closure(combo)
                if not sub.is_weakly_connected():
                    return False
        return True

    def __repr__(self) -> str:
        return f"PatternGraph(h={self.h}, k={self.k}, edges={list(self.edges)})"


# ---------------------------------------------------------------------------
# Anchored pattern embedding
# ---------------------------------------------------------------------------


def find_anchored_embedding(
    adj: Mapping[int, Sequence[int]],
    pattern: PatternGraph,
    anchor_map: Mapping[int, int],
    *,
    vertices: Optional[set[int]] = None,
    forbidden_source: frozenset[int] = frozenset(),
):
    """Injective embedding of `pattern` into discovered adjacency, or None.

    ``adj`` maps a vertex to its *known* out-neighbours; pattern edges must
    map onto known edges (subgraph semantics -- extra edges are fine).
    ``anchor_map`` sends a source-component index to a graph vertex that
    must lie somewhere inside that component's image.  Vertices in
    ``forbidden_source`` may not host any source-component pattern vertex.
    """
    h = pattern.h
    universe: set[int] = set(vertices) if vertices is not None else set(adj)
    if vertices is None:
        for row in adj.values():
            universe.update(row)
    anchors = dict(anchor_map)
    if len(set(anchors.values())) != len(anchors):
        raise ValueError("anchor vertices must be distinct")
    for c, a in anchors.items():
        if not 0 <= c < pattern.k:
            raise ValueError(f"anchor component {c} out of range")
        if a not in universe:
            return None

    rev: dict[int, list[int]] = {}
    for u, row in adj.items():
        for w in row:
            rev.setdefault(w, []).append(u)

    def known_edge(u: int, w: int) -> bool:
        return w in adj.get(u, ())

    src_set = pattern.source_vertices

    def consistent(p: int, cand: int, assign: dict[int, int]) -> bool:
        if p in src_set and cand in forbidden_source:
            return False
        for q in pattern.adj[p]:
            if q in assign and not known_edge(cand, assign[q]):
                return False
        for q in range(h):
            if q in assign and p in pattern.adj[q] and not known_edge(assign[q], cand):
                return False
        return True

    anchored_comps = sorted(anchors)
    # Branch over which member of each anchored component hosts the anchor.
    member_choices = [sorted(pattern.source_components[c]) for c in anchored_comps]
    for pre in product(*member_choices):
        if len(set(pre)) != len(pre):
            continue
        assign: dict[int, int] = {}
        ok = True
        for p, c in zip(pre, anchored_comps):
            a = anchors[c]
            if not consistent(p, a, assign):
                ok = False
                break
            assign[p] = a
        if not ok:
            continue

        # Deterministic order: spread out from the assigned seed through the
        # pattern's undirected adjacency, then any remaining vertices.
        order: list[int] = []
        seen = set(assign)
        queue = sorted(assign)
        while queue:
            p = queue.pop(0)
            for q in pattern._und[p]:
                if q not in seen:
                    seen.add(q)
                    order.append(q)
                    queue.append(q)
        for p in range(h):
            if p not in seen:
                seen.add(p)
                order.append(p)
                queue.append(p)
                while queue:
                    x = queue.pop(0)
                    for q in pattern._und[x]:
                        if q not in seen:
                            seen.add(q)
                            order.append(q)
                            queue.append(q)

        used = set(assign.values())

        def backtrack(pos: int) -> Optional[dict[int, int]]:
            if pos == len(order):
                return dict(assign)
            p = order[pos]
            candidates: Optional[Iterable[int]] = None
            for q in pattern.adj[p]:
                if q in assign:
                    candidates = rev.get(assign[q], ())
                    break
            if candidates is None:
                for q in range(h):
                    if q in assign and p in pattern.adj[q]:
                        candidates = adj.get(assign[q], ())
                        break
            if candidates is None:
                candidates = universe
            for cand in sorted(set(candidates)):
                if cand in used or cand not in universe:
                    continue
                if not consistent(p, cand, assign):
                    continue
                assign[p] = cand
                used.add(cand)
                res = backtrack(pos + 1)
                if res is not None:
                    return res
                del assign[p]
                used.discard(cand)
            return None

        res = backtrack(0)
        if res is not None:
            return res
    return None


def find_h_copy_through(
    view: OracleView,
    h: PatternGraph,
    anchors: Sequence[tuple[int, int]],
):
    """Search for a pattern copy through the given anchors, or None.

    ``anchors`` is a list of (graph vertex, source-component index) pairs
    assigning distinct vertices to distinct components.  Runs a depth-h BFS
    from each anchor through the (charged) oracle view and looks for an
    injective embedding of the full pattern inside the explored union, with
    each anchor inside its component's image.
    """
    if len(anchors) == 0:
        raise ValueError("at least one anchor required")
    verts = [a for a, _ in anchors]
    comps = [c for _, c in anchors]
    if len(set(verts)) != len(verts) or len(set(comps)) != len(comps):
        raise ValueError("anchors must assign distinct vertices to distinct components")
    merged_adj: dict[int, tuple[int, ...]] = {}
    merged_verts: set[int] = set()
    for a in verts:
        ball = bfs_limited(view, a, h.h)
        merged_verts |= ball.vertices
        merged_adj.update(ball.adj)
    return find_anchored_embedding(
        merged_adj, h, {c: a for a, c in anchors}, vertices=merged_verts
    )


def verify_embedding(
    g: BoundedOutDigraph,
    pattern: PatternGraph,
    embedding: Mapping[int, int],
    anchors: Optional[Sequence[tuple[int, int]]] = None,
) -> bool:
    """Independent witness check straight against the raw adjacency lists."""
    if len(embedding) != pattern.h:
        return False
    images = list(embedding.values())
    if len(set(images)) != len(images):
        return False
    if not all(0 <= v < g.n for v in images):
        return False
    for u, v in pattern.edges:
        if embedding[v] not in g.adj[embedding[u]]:
            return False
    if anchors:
        for vert, c in anchors:
            comp_image = {embedding[p] for p in pattern.source_components[c]}
            if vert not in comp_image:
                return False
    return True


def count_source_disjoint_copies(g: BoundedOutDigraph, h: PatternGraph) -> int:
    """Greedy lower bound on the number of source-disjoint pattern copies.

    Full-knowledge routine (no ledger).  Copies are accumulated greedily;
    only source-component vertices are marked as consumed, so later copies
    may reuse non-source vertices.
    """
    used: set[int] = set()
    count = 0
    adj_map = {v: g.adj[v] for v in range(g.n)}
    universe = set(range(g.n))
    for v in range(g.n):
        if v in used:
            continue
        for c in range(h.k):
            emb = find_anchored_embedding(
                adj_map,
                h,
                {c: v},
                vertices=universe,
                forbidden_source=frozenset(used),
            )
            if emb is not None:
                for p in h.source_vertices:
                    used.add(emb[p])
                count += 1
                break
    return count
