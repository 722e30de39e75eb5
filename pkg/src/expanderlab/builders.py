"""Graph family constructors and the FamilySpec mini-language.

Non-group families live here: uniform random regular graphs (configuration
model with whole-sample rejection), reference graphs (cycles, complete graphs,
Petersen), graph powers, and Cartesian products. Cayley families are built in
`matgroups`; this module only dispatches to them.

FamilySpec strings drive the CLI and the conjecture probe, e.g.

    random-regular:n=1024,d=4,seed=7
    power:k=2,inner=(cayley:recipe=elementary,p=5)
    product:inner=(cycle:n=3),inner2=(cycle:n=3)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .errors import ComputationRefused
from .graphcore import Graph, from_edges
from .rng import Stream, split

_REGULAR_RETRY_CAP = 10_000
_PRODUCT_SIZE_CAP = 4_000_000
_PHASE_MATCHING = 0x11


def random_regular(n: int, d: int, seed: int) -> Graph:
    """Uniform simple d-regular graph on n vertices (configuration model).

    Draws a uniform perfect matching on the n*d half-edge stubs and rejects
    the whole sample on any self-loop or duplicate edge, so accepted graphs
    are exactly uniform over simple d-regular graphs. Deterministic in seed.
    """
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if (n * d) % 2 != 0:
        raise ValueError(f"n*d must be even, got n={n}, d={d}")
    if d >= n:
        raise ValueError(f"need d < n, got n={n}, d={d}")
    stream = Stream(split(seed, _PHASE_MATCHING))
    stubs = [v for v in range(n) for _ in range(d)]
    for _ in range(_REGULAR_RETRY_CAP):
        stream.shuffle(stubs)
        edges: set[tuple[int, int]] = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            if u == v:
                ok = False
                break
            e = (u, v) if u < v else (v, u)
            if e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return from_edges(n, edges)
    raise ComputationRefused(
        f"configuration model rejected {_REGULAR_RETRY_CAP} samples for n={n}, d={d}"
    )


def graph_power(g: Graph, k: int) -> Graph:
    """G^k: same vertices, edge {u,v} iff 1 <= dist_g(u,v) <= k."""
    if k < 1:
        raise ValueError(f"power exponent must be >= 1, got {k}")
    if k == 1:
        return g
    edges = []
    for u in range(g.n):
        # truncated BFS to depth k
        dist = {u: 0}
        frontier = [u]
        for depth in range(1, k + 1):
            nxt = []
            for x in frontier:
                for y in g.adj[x]:
                    if y not in dist:
                        dist[y] = depth
                        nxt.append(y)
            frontier = nxt
        edges.extend((u, v) for v in dist if u < v)
    return from_edges(g.n, edges)


def cartesian_product(g: Graph, h: Graph, size_cap: int = _PRODUCT_SIZE_CAP) -> Graph:
    """Cartesian product: (u,a) ~ (v,b) iff u=v and a~b, or a=b and u~v.

    Vertices are indexed row-major: (u, a) -> u*h.n + a.
    """
    if g.n * h.n > size_cap:
        raise ComputationRefused(
            f"product size {g.n}*{h.n} exceeds cap {size_cap}"
        )
    hn = h.n
    edges = []
    for u in range(g.n):
        base = u * hn
        for a, b in h.edges():
            edges.append((base + a, base + b))
    for u, v in g.edges():
        for a in range(hn):
            edges.append((u * hn + a, v * hn + a))
    return from_edges(g.n * hn, edges)


def named_graph(kind: str, n: Optional[int] = None) -> Graph:
    """Reference instances: cycle C_n (n>=3), complete K_n (n>=1), Petersen."""
    if kind == "cycle":
        if n is None or n < 3:
            raise ValueError(f"cycle needs n >= 3, got {n}")
        return from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "complete":
        if n is None or n < 1:
            raise ValueError(f"complete needs n >= 1, got {n}")
        return from_edges(n, itertools.combinations(range(n), 2))
    if kind == "petersen":
        # Kneser graph K(5,2): vertices are 2-subsets of {0..4}, disjoint pairs adjacent
        subsets = list(itertools.combinations(range(5), 2))
        idx = {s: i for i, s in enumerate(subsets)}
        edges = [
            (idx[a], idx[b])
            for a, b in itertools.combinations(subsets, 2)
            if not set(a) & set(b)
        ]
        return from_edges(10, edges)
    raise ValueError(f"unknown named graph kind: {kind!r}")


# --- FamilySpec ---------------------------------------------------------

_KIND_ALIASES = {"power-of": "power", "product-of": "product"}
_KNOWN_KINDS = {"random-regular", "cycle", "complete", "petersen", "cayley", "power", "product"}

# canonical key order per kind, for byte-stable round-trips; also the set of
# keys a kind accepts
_KEY_ORDER = {
    "random-regular": ["n", "d", "seed"],
    "cycle": ["n"],
    "complete": ["n"],
    "petersen": [],
    "cayley": ["recipe", "p", "level"],
    "power": ["k"],
    "product": [],
}


@dataclass(frozen=True)
class FamilySpec:
    """Parsed family descriptor; `inner`/`inner2` hold nested specs."""

    kind: str
    params: dict = field(default_factory=dict)
    inner: Optional["FamilySpec"] = None
    inner2: Optional["FamilySpec"] = None


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced ')' in spec near {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ValueError(f"unbalanced '(' in spec {text!r}")
    if cur:
        parts.append("".join(cur))
    return parts


def parse_family_spec(text: str) -> FamilySpec:
    """Parse `kind:key=val,...` with parenthesized nesting for inner specs."""
    text = text.strip()
    if not text:
        raise ValueError("empty family spec")
    kind, _, rest = text.partition(":")
    kind = _KIND_ALIASES.get(kind.strip(), kind.strip())
    if kind not in _KNOWN_KINDS:
        raise ValueError(f"unknown family kind {kind!r} in spec {text!r}")
    params: dict = {}
    inner = inner2 = None
    for part in _split_top_level(rest) if rest else []:
        part = part.strip()
        if not part:
            continue
        key, eq, val = part.partition("=")
        key = key.strip()
        if not eq:
            raise ValueError(f"bad key=value pair {part!r} in spec {text!r}")
        val = val.strip()
        if key in ("inner", "inner2"):
            if not (val.startswith("(") and val.endswith(")")):
                raise ValueError(f"nested spec for {key} must be parenthesized: {part!r}")
            sub = parse_family_spec(val[1:-1])
            if key == "inner":
                inner = sub
            else:
                inner2 = sub
        elif key not in _KEY_ORDER[kind]:
            raise ValueError(f"unknown key {key!r} for family {kind!r}")
        elif key == "recipe":
            params[key] = val
        else:
            try:
                params[key] = int(val)
            except ValueError:
                raise ValueError(f"bad integer for key {key!r}: {val!r}") from None
    return FamilySpec(kind=kind, params=params, inner=inner, inner2=inner2)


def canonical_spec_string(spec: FamilySpec) -> str:
    """Round-trippable normalized form (fixed key order, defaults filled)."""
    parts = []
    for key in _KEY_ORDER[spec.kind]:
        if key in spec.params:
            parts.append(f"{key}={spec.params[key]}")
    if spec.inner is not None:
        parts.append(f"inner=({canonical_spec_string(spec.inner)})")
    if spec.inner2 is not None:
        parts.append(f"inner2=({canonical_spec_string(spec.inner2)})")
    return spec.kind + (":" + ",".join(parts) if parts else "")


def base_family_id(spec: FamilySpec) -> str:
    """Group id for probe reports: the spec with power wrappers stripped.

    A family and its graph powers share one id, so G-vs-G^2 comparison rows
    can be grouped.
    """
    while spec.kind == "power" and spec.inner is not None:
        spec = spec.inner
    return canonical_spec_string(spec)


@dataclass(frozen=True)
class BuildResult:
    graph: Graph
    labels: Optional[tuple[str, ...]] = None  # Cayley vertex labels, if any


def build_family(spec: FamilySpec) -> BuildResult:
    """Construct the graph a FamilySpec describes."""
    kind, p = spec.kind, spec.params
    if kind == "random-regular":
        _require(p, "n", "d", spec)
        return BuildResult(random_regular(p["n"], p["d"], p.get("seed", 0)))
    if kind in ("cycle", "complete"):
        _require(p, "n", None, spec)
        return BuildResult(named_graph(kind, p["n"]))
    if kind == "petersen":
        return BuildResult(named_graph("petersen"))
    if kind == "cayley":
        from . import matgroups

        _require(p, "p", None, spec)
        recipe = p.get("recipe", "elementary")
        level = p.get("level", 1)
        result = matgroups.cayley_from_recipe(recipe, p["p"], level)
        return BuildResult(result.graph, labels=result.labels)
    if kind == "power":
        if spec.inner is None:
            raise ValueError(f"power spec needs inner=(...): {spec}")
        _require(p, "k", None, spec)
        return BuildResult(graph_power(build_family(spec.inner).graph, p["k"]))
    if kind == "product":
        if spec.inner is None or spec.inner2 is None:
            raise ValueError(f"product spec needs inner=(...) and inner2=(...): {spec}")
        g = build_family(spec.inner).graph
        h = build_family(spec.inner2).graph
        return BuildResult(cartesian_product(g, h))
    raise ValueError(f"unknown family kind {kind!r}")


def _require(params: dict, key1: str, key2: Optional[str], spec: FamilySpec) -> None:
    for key in (key1, key2):
        if key is not None and key not in params:
            raise ValueError(f"family spec {spec.kind!r} missing required key {key!r}")
