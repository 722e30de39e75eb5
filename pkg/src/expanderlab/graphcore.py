"""Immutable simple undirected graphs and the BFS primitives everything else uses.

Vertices are dense integers 0..n-1. Producers that carry richer labels (group
elements, product coordinates) keep them in side tables; the graph itself is
just sorted adjacency tuples. Edges are always normalized pairs (u, v) with
u < v; edge subsets elsewhere in the package are plain sets of such pairs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Iterator

#: Distance sentinel for vertices a BFS cannot reach.
UNREACHABLE = -1


@dataclass(frozen=True)
class EdgeList:
    """Serialization form of a graph: vertex count plus sorted (u, v) pairs, u < v."""

    n: int
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with strictly sorted adjacency tuples.

    Instances are immutable and hashable; construct via `from_edge_list` /
    `from_edges`, which validate the invariants (symmetry, no loops, no
    duplicate neighbors).
    """

    n: int
    adj: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield edges as (u, v) with u < v, in lexicographic order."""
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        a = self.adj[u]
        lo, hi = 0, len(a)
        while lo < hi:
            mid = (lo + hi) // 2
            if a[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(a) and a[lo] == v


def from_edge_list(el: EdgeList) -> Graph:
    """Build a Graph from an EdgeList, rejecting any invariant violation."""
    if el.n < 1:
        raise ValueError(f"vertex count must be >= 1, got {el.n}")
    nbrs: list[list[int]] = [[] for _ in range(el.n)]
    seen: set[tuple[int, int]] = set()
    for e in el.edges:
        u, v = e
        if u == v:
            raise ValueError(f"self-loop rejected: {e}")
        if not (0 <= u < v < el.n):
            raise ValueError(f"edge out of range or not (u < v): {e} with n={el.n}")
        if e in seen:
            raise ValueError(f"duplicate edge rejected: {e}")
        seen.add(e)
        nbrs[u].append(v)
        nbrs[v].append(u)
    return Graph(n=el.n, adj=tuple(tuple(sorted(a)) for a in nbrs))


def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Convenience constructor: normalizes pair order, then validates as from_edge_list."""
    norm = sorted((u, v) if u < v else (v, u) for u, v in edges)
    return from_edge_list(EdgeList(n=n, edges=tuple(norm)))


def to_edge_list(g: Graph) -> EdgeList:
    """Inverse of from_edge_list; edges come out lexicographically sorted."""
    return EdgeList(n=g.n, edges=tuple(g.edges()))


def bfs_distances(g: Graph, source: int) -> list[int]:
    """Exact unweighted distances from `source`; UNREACHABLE marks other components."""
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range for n={g.n}")
    adj = g.adj
    dist = [UNREACHABLE] * g.n
    dist[source] = 0
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist


def is_connected(g: Graph) -> bool:
    """True iff a BFS from vertex 0 reaches every vertex (single vertex counts)."""
    if g.n == 1:
        return True
    dist = bfs_distances(g, 0)
    return UNREACHABLE not in dist


def induced_subgraph(g: Graph, members: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Induced subgraph on `members`, relabeled 0..k-1 in ascending old order.

    Returns the subgraph and the old->new index map.
    """
    old = sorted(set(members))
    if not old:
        raise ValueError("empty vertex subset")
    for v in old:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range for n={g.n}")
    remap = {v: i for i, v in enumerate(old)}
    edges = []
    for u in old:
        for v in g.adj[u]:
            if u < v and v in remap:
                edges.append((remap[u], remap[v]))
    return from_edges(len(old), edges), remap


def induced_ball(g: Graph, center: int, r: int) -> tuple[Graph, dict[int, int]]:
    """Induced subgraph on all vertices within distance r of `center`."""
    if not 0 <= center < g.n:
        raise ValueError(f"center {center} out of range for n={g.n}")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    dist = bfs_distances(g, center)
    members = [v for v, d in enumerate(dist) if 0 <= d <= r]
    return induced_subgraph(g, members)


def edge_subgraph(g: Graph, keep: Iterable[tuple[int, int]]) -> Graph:
    """Spanning subgraph on exactly the edges in `keep` (vertex set untouched)."""
    kept = sorted({(u, v) if u < v else (v, u) for u, v in keep})
    for e in kept:
        if not g.has_edge(*e):
            raise ValueError(f"edge {e} not present in host graph")
    return from_edge_list(EdgeList(n=g.n, edges=tuple(kept)))


# Edge-list text format: line 1 is "n m", then m lines "u v" with u < v,
# ASCII decimal, single spaces, \n terminators. Lines starting with '#' are
# ignored. This is the interchange format for every CLI command.


def write_edge_list_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}\n"]
    lines.extend(f"{u} {v}\n" for u, v in g.edges())
    return "".join(lines)


def read_edge_list_text(text: str) -> Graph:
    """Parse the edge-list format; errors carry 1-based line numbers."""
    n = m = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field in {raw!r}") from None
        if n is None:
            n, m = a, b
        else:
            edges.append((a, b))
    if n is None:
        raise ValueError("empty edge-list file (no header line)")
    if len(edges) != m:
        raise ValueError(f"header declares m={m} edges but file has {len(edges)}")
    try:
        return from_edge_list(EdgeList(n=n, edges=tuple(edges)))
    except ValueError as exc:
        raise ValueError(f"invalid edge data: {exc}") from None


def save_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as f:
        f.write(write_edge_list_text(g))


def load_graph(path) -> Graph:
    with open(path, "r", encoding="ascii") as f:
        return read_edge_list_text(f.read())


def graph_fingerprint(g: Graph) -> str:
    """SHA-256 of the canonical edge-list text; identifies a host graph exactly."""
    return hashlib.sha256(write_edge_list_text(g).encode("ascii")).hexdigest()
