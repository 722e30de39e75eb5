"""Bernoulli bond percolation with threshold coupling, plus component analytics.

One uniform is drawn per edge (in canonical edge order) from the seeded
stream; an edge is retained iff its uniform is below p. The draws do not
depend on p, so retained(p1) is a subset of retained(p2) whenever p1 <= p2 —
the monotone coupling the sweep relies on. Marginals are exactly Bernoulli(p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graphcore import Graph, graph_fingerprint
from .metrics import spectrum
from .rng import Stream, split

_PHASE_EDGES = 0x22
_PHASE_SWEEP = 0x33


class DisjointSet:
    """Union-find with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True


@dataclass(frozen=True)
class PercolationSample:
    p: float
    seed: int
    retained: frozenset[tuple[int, int]]
    host_ref: str  # fingerprint of the host graph


@dataclass(frozen=True)
class ComponentSummary:
    count: int
    sizes: tuple[int, ...]  # descending
    giant_fraction: float


def percolate(g: Graph, p: float, seed: int) -> PercolationSample:
    """Retain each edge independently with probability p (threshold coupling)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"retention probability must be in [0,1], got {p}")
    stream = Stream(split(seed, _PHASE_EDGES))
    retained = frozenset(e for e in g.edges() if stream.uniform() < p)
    return PercolationSample(p=p, seed=seed, retained=retained, host_ref=graph_fingerprint(g))


def component_summary(g: Graph, sample: PercolationSample) -> ComponentSummary:
    """Connected components of the retained subgraph (exact, union-find)."""
    if sample.host_ref != graph_fingerprint(g):
        raise ValueError("sample does not belong to this host graph")
    ds = DisjointSet(g.n)
    for u, v in sample.retained:
        ds.union(u, v)
    sizes = sorted((ds.size[v] for v in range(g.n) if ds.find(v) == v), reverse=True)
    return ComponentSummary(
        count=ds.count,
        sizes=tuple(sizes),
        giant_fraction=sizes[0] / g.n,
    )


@dataclass(frozen=True)
class ConditionCheck:
    value: float
    satisfied: bool


def condition_check(g: Graph, p: float) -> ConditionCheck:
    """The spectral retention condition rho_star(G) * d_G * p < 1.

    rho_star is the nontrivial spectral radius of the walk operator and d_G
    the maximum degree; the check only reports the value, it claims nothing
    about giant components.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"retention probability must be in [0,1], got {p}")
    value = spectrum(g).rho_star * g.max_degree * p
    return ConditionCheck(value=value, satisfied=value < 1.0)


@dataclass(frozen=True)
class SweepRow:
    p: float
    seed_count: int
    giant_mean: float
    giant_std: float
    condition_value: float
    condition_ok: bool


def percolation_sweep(
    g: Graph, grid, seeds_per_point: int, base_seed: int
) -> list[SweepRow]:
    """Monte Carlo giant-component table over a p grid.

    seed_i = split(base_seed, i) per replicate; the std is the population
    standard deviation over replicates.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty p grid")
    if seeds_per_point < 1:
        raise ValueError(f"need >= 1 seed per grid point, got {seeds_per_point}")
    rho_d = spectrum(g).rho_star * g.max_degree
    rows = []
    for p in grid:
        fractions = []
        for i in range(seeds_per_point):
            sample = percolate(g, p, split(base_seed, _PHASE_SWEEP, i))
            fractions.append(component_summary(g, sample).giant_fraction)
        mean = sum(fractions) / len(fractions)
        var = sum((x - mean) ** 2 for x in fractions) / len(fractions)
        value = rho_d * p
        rows.append(
            SweepRow(
                p=p,
                seed_count=seeds_per_point,
                giant_mean=mean,
                giant_std=math.sqrt(var),
                condition_value=value,
                condition_ok=value < 1.0,
            )
        )
    return rows
