"""Exact and spectral expansion measurements.

Covers the quantities the conjecture is stated over: the vertex-expansion
constant h (exact, by subset enumeration), edge conductance, eigenvalues of
the degree-normalized walk operator, girth, diameter, and per-vertex induced
ball profiles.

Conventions:
  - h minimizes |outer boundary(S)| / |S| over 0 < |S| < n/2, strictly below
    the midpoint (so for even n the half-size sets are excluded).
  - Girth is `math.inf` for forests; diameter is `math.inf` for disconnected
    graphs. Both encode as JSON null plus a boolean flag.
  - Exact subset enumerations refuse above `max_n` (default 24) instead of
    silently running for hours.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from fractions import Fraction
from statistics import median
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import ComputationRefused
from .graphcore import Graph, bfs_distances, induced_ball, is_connected

#: Sentinel for "no cycle" (girth) and "some pair unreachable" (diameter).
UNBOUNDED = math.inf

DEFAULT_EXACT_MAX = 24
_DENSE_EIGEN_LIMIT = 4096
_EIGEN_TOL = 1e-9
_EIGEN_MAX_ITER = 100_000


def _neighbor_masks(g: Graph) -> list[int]:
    masks = []
    for nbrs in g.adj:
        m = 0
        for v in nbrs:
            m |= 1 << v
        masks.append(m)
    return masks


def cheeger_exact_with_witness(g: Graph, max_n: int = DEFAULT_EXACT_MAX) -> tuple[Fraction, frozenset[int]]:
    """Exact vertex-expansion minimum and one optimal set.

    Minimizes |boundary(S)|/|S| over all S with 0 < |S| < n/2 (strict), where
    the boundary is the set of vertices outside S with a neighbor in S. Ties
    break toward smaller |S|, then the lexicographically smallest bitmask.
    """
    n = g.n
    if n < 3:
        raise ValueError(f"graph too small for vertex expansion (n={n} < 3)")
    if n > max_n:
        raise ComputationRefused(
            f"exact computation refused: n={n} exceeds max_n={max_n} (2^n subsets)"
        )
    nbr = _neighbor_masks(g)
    full = (1 << n) - 1
    # union_adj[S] = union of neighborhoods over members of S, built by
    # peeling the lowest bit (each mask extends a previously seen one).
    union_adj = array("Q", bytes(8 * (1 << n)))
    best_num = best_den = 0  # boundary / size as an integer pair; den 0 = unset
    best_size = n + 1
    best_mask = 0
    half = n  # admissible iff 2*|S| < n  <=>  2*size < n
    for mask in range(1, 1 << n):
        low = mask & -mask
        v = low.bit_length() - 1
        ua = union_adj[mask ^ low] | nbr[v]
        union_adj[mask] = ua
        size = mask.bit_count()
        if 2 * size >= half:
            continue
        boundary = (ua & ~mask & full).bit_count()
        # compare boundary/size < best_num/best_den by cross-multiplication
        if best_den == 0:
            better = True
        else:
            lhs = boundary * best_den
            rhs = best_num * size
            if lhs != rhs:
                better = lhs < rhs
            else:
                better = (size, mask) < (best_size, best_mask)
        if better:
            best_num, best_den = boundary, size
            best_size, best_mask = size, mask
    witness = frozenset(v for v in range(n) if best_mask >> v & 1)
    return Fraction(best_num, best_den), witness


def cheeger_exact(g: Graph, max_n: int = DEFAULT_EXACT_MAX) -> Fraction:
    """Exact h = min over admissible S of |boundary(S)|/|S| as a Fraction."""
    value, _ = cheeger_exact_with_witness(g, max_n)
    return value


def conductance_exact_with_witness(g: Graph, max_n: int = DEFAULT_EXACT_MAX) -> tuple[Fraction, frozenset[int]]:
    """Exact conductance and one optimal set.

    Minimizes e(S, S̄)/vol(S) over S with 0 < vol(S) <= vol(G)/2 (volume is
    the degree sum). Requires a connected graph with at least one edge.
    """
    n = g.n
    if n < 2:
        raise ValueError(f"graph too small for conductance (n={n} < 2)")
    if n > max_n:
        raise ComputationRefused(
            f"exact computation refused: n={n} exceeds max_n={max_n} (2^n subsets)"
        )
    if not is_connected(g):
        raise ValueError("conductance_exact requires a connected graph")
    nbr = _neighbor_masks(g)
    deg = [len(a) for a in g.adj]
    vol_total = sum(deg)
    vol = array("Q", bytes(8 * (1 << n)))
    e_in = array("Q", bytes(8 * (1 << n)))
    best_num = best_den = 0
    best_size = n + 1
    best_mask = 0
    for mask in range(1, 1 << n):
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        vs = vol[rest] + deg[v]
        es = e_in[rest] + (nbr[v] & rest).bit_count()
        vol[mask] = vs
        e_in[mask] = es
        if 2 * vs > vol_total:
            continue
        cut = vs - 2 * es
        if best_den == 0:
            better = True
        else:
            lhs = cut * best_den
            rhs = best_num * vs
            if lhs != rhs:
                better = lhs < rhs
            else:
                size = mask.bit_count()
                better = (size, mask) < (best_size, best_mask)
        if better:
            best_num, best_den = cut, vs
            best_size, best_mask = mask.bit_count(), mask
    if best_den == 0:
        raise ValueError("no admissible set (graph has no edges)")
    witness = frozenset(v for v in range(n) if best_mask >> v & 1)
    return Fraction(best_num, best_den), witness


def conductance_exact(g: Graph, max_n: int = DEFAULT_EXACT_MAX) -> Fraction:
    value, _ = conductance_exact_with_witness(g, max_n)
    return value


@dataclass(frozen=True)
class SpectrumResult:
    lambda2: float
    rho_star: float
    gap: float


def _walk_matrix_dense(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, nbrs in enumerate(g.adj):
        for v in nbrs:
            a[u, v] = 1.0
    dinv = 1.0 / np.sqrt(a.sum(axis=1))
    return a * dinv[:, None] * dinv[None, :]


def _extremes_dense(g: Graph) -> tuple[float, float]:
    w = np.linalg.eigvalsh(_walk_matrix_dense(g))
    return float(w[-2]), float(w[0])


def _extremes_iterative(g: Graph) -> tuple[float, float]:
    """Lanczos with exact deflation of the known principal eigenvector.

    The walk operator M = D^{-1/2} A D^{-1/2} has top eigenpair (1, D^{1/2}1).
    Shifting that pair to -1 via a rank-one update makes lambda2 the largest
    algebraic eigenvalue of the deflated operator, and lambda_n stays the
    smallest of M itself. Plain block orthogonal iteration was measured to
    contract too slowly here (the spectrum is dense near lambda2 on the big
    Cayley graphs), so the Krylov solver does the iteration work instead.
    """
    n = g.n
    rows, cols = [], []
    for u, nbrs in enumerate(g.adj):
        rows.extend([u] * len(nbrs))
        cols.extend(nbrs)
    a = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    deg = np.asarray(a.sum(axis=1)).ravel()
    dinv = 1.0 / np.sqrt(deg)
    v1 = np.sqrt(deg)
    v1 /= np.linalg.norm(v1)

    def mv(x: np.ndarray) -> np.ndarray:
        return dinv * (a @ (dinv * x))

    def mv_deflated(x: np.ndarray) -> np.ndarray:
        return mv(x) - 2.0 * v1 * (v1 @ x)

    v0 = np.full(n, 1.0 / math.sqrt(n))
    try:
        from scipy.sparse.linalg import LinearOperator, eigsh

        lam2 = float(
            eigsh(
                LinearOperator((n, n), matvec=mv_deflated, dtype=float),
                k=1, which="LA", tol=_EIGEN_TOL, v0=v0, ncv=64,
                maxiter=_EIGEN_MAX_ITER, return_eigenvectors=False,
            )[0]
        )
        lam_n = float(
            eigsh(
                LinearOperator((n, n), matvec=mv, dtype=float),
                k=1, which="SA", tol=_EIGEN_TOL, v0=v0, ncv=64,
                maxiter=_EIGEN_MAX_ITER, return_eigenvectors=False,
            )[0]
        )
    except sp.linalg.ArpackNoConvergence as exc:  # pragma: no cover
        raise ComputationRefused(f"eigensolver failed to converge: {exc}") from None
    return lam2, lam_n


def spectrum(g: Graph) -> SpectrumResult:
    """(lambda2, rho_star, gap) of the symmetrized walk operator D^{-1/2}AD^{-1/2}.

    lambda2 is the second-largest eigenvalue, rho_star = max(|lambda2|,
    |lambda_n|) is the nontrivial spectral radius, gap = 1 - lambda2. Dense
    symmetric solve up to n=4096, deflated orthogonal iteration above.
    Disconnected graphs are rejected (lambda2 = 1 would be ambiguous).
    """
    if g.n < 2:
        raise ValueError(f"spectrum needs n >= 2, got n={g.n}")
    if not is_connected(g):
        raise ValueError("spectrum requires a connected graph")
    if g.n <= _DENSE_EIGEN_LIMIT:
        lam2, lam_n = _extremes_dense(g)
    else:
        lam2, lam_n = _extremes_iterative(g)
    return SpectrumResult(
        lambda2=lam2, rho_star=max(abs(lam2), abs(lam_n)), gap=1.0 - lam2
    )


def girth(g: Graph):
    """Length of the shortest cycle, or UNBOUNDED (math.inf) for forests.

    BFS from every vertex with earliest cross/back-edge detection: an edge
    within a BFS layer closes a cycle of length 2d+1, an edge into the next
    layer one of length 2d+2. The search depth shrinks as better cycles are
    found, so the scan is fast once any short cycle exists.
    """
    n = g.n
    adj = g.adj
    best = UNBOUNDED
    depth_limit = n  # explore while current depth <= depth_limit
    token = [-1] * n
    dist = [0] * n
    for s in range(n):
        token[s] = s
        dist[s] = 0
        frontier = [s]
        du = 0
        while frontier and du <= depth_limit:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if token[v] != s:
                        token[v] = s
                        dist[v] = du + 1
                        nxt.append(v)
                    else:
                        dv = dist[v]
                        if dv < du:
                            continue  # mirror of a forward edge, seen from below
                        delta = 1 if dv == du else 0
                        length = 2 * du + 2 - delta
                        if length < best:
                            best = length
                            depth_limit = du - delta
            frontier = nxt
            du += 1
        if best == 3:
            break
    return best


def diameter(g: Graph):
    """Max BFS eccentricity; UNBOUNDED (math.inf) if the graph is disconnected."""
    worst = 0
    for s in range(g.n):
        dist = bfs_distances(g, s)
        if min(dist) < 0:  # some vertex unreachable
            return UNBOUNDED
        worst = max(worst, max(dist))
    return worst


@dataclass(frozen=True)
class BallProfileRow:
    vertex: int
    ball_size: int
    gap: Optional[float]
    h_exact: Optional[Fraction]


@dataclass(frozen=True)
class BallProfileSummary:
    radius: int
    min_gap: Optional[float]
    median_gap: Optional[float]
    min_h_exact: Optional[Fraction]


def ball_expansion_profile(
    g: Graph, r: int, exact_limit: int = 16
) -> tuple[list[BallProfileRow], BallProfileSummary]:
    """Expansion metrics of every radius-r induced ball.

    Each row reports the ball around one vertex: its size, spectral gap
    (None for single-vertex balls, where no spectrum exists), and exact h
    when the ball has between 3 and `exact_limit` vertices. The summary
    aggregates min/median gap and min h over the defined entries.
    """
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    rows = []
    for v in range(g.n):
        ball, _ = induced_ball(g, v, r)
        gap_v: Optional[float] = None
        if ball.n >= 2:
            gap_v = spectrum(ball).gap  # induced balls are connected
        h_v: Optional[Fraction] = None
        if 3 <= ball.n <= exact_limit:
            h_v = cheeger_exact(ball, max_n=exact_limit)
        rows.append(BallProfileRow(vertex=v, ball_size=ball.n, gap=gap_v, h_exact=h_v))
    gaps = [row.gap for row in rows if row.gap is not None]
    hs = [row.h_exact for row in rows if row.h_exact is not None]
    summary = BallProfileSummary(
        radius=r,
        min_gap=min(gaps) if gaps else None,
        median_gap=median(gaps) if gaps else None,
        min_h_exact=min(hs) if hs else None,
    )
    return rows, summary


@dataclass(frozen=True)
class MetricsReport:
    """Flat bundle of every whole-graph quantity the toolkit measures.

    Spectral fields are None for disconnected inputs (the walk spectrum is
    refused there); exact rationals are None when the size cap rules them out.
    """

    n: int
    m: int
    max_degree: int
    h_exact: Optional[Fraction]
    conductance: Optional[Fraction]
    lambda2: Optional[float]
    rho_star: Optional[float]
    gap: Optional[float]
    girth: object  # int or UNBOUNDED
    diameter: object  # int or UNBOUNDED


def measure(g: Graph, exact_max: int = DEFAULT_EXACT_MAX) -> MetricsReport:
    """Full MetricsReport; exact rationals only when n <= exact_max."""
    connected = is_connected(g)
    h: Optional[Fraction] = None
    if 3 <= g.n <= exact_max:
        h = cheeger_exact(g, max_n=exact_max)
    cond: Optional[Fraction] = None
    if connected and 2 <= g.n <= exact_max and g.m > 0:
        cond = conductance_exact(g, max_n=exact_max)
    lam2 = rho = gap = None
    if connected and g.n >= 2:
        spec = spectrum(g)
        lam2, rho, gap = spec.lambda2, spec.rho_star, spec.gap
    return MetricsReport(
        n=g.n,
        m=g.m,
        max_degree=g.max_degree,
        h_exact=h,
        conductance=cond,
        lambda2=lam2,
        rho_star=rho,
        gap=gap,
        girth=girth(g),
        diameter=diameter(g),
    )


def report_to_json_dict(rep: MetricsReport) -> dict:
    """Stable-key flat dict; girth/diameter sentinels become null + flag."""
    girth_unbounded = rep.girth == UNBOUNDED
    diameter_disconnected = rep.diameter == UNBOUNDED
    return {
        "n": rep.n,
        "m": rep.m,
        "max_degree": rep.max_degree,
        "h_exact_num": rep.h_exact.numerator if rep.h_exact is not None else None,
        "h_exact_den": rep.h_exact.denominator if rep.h_exact is not None else None,
        "conductance_num": rep.conductance.numerator if rep.conductance is not None else None,
        "conductance_den": rep.conductance.denominator if rep.conductance is not None else None,
        "lambda2": rep.lambda2,
        "rho_star": rep.rho_star,
        "gap": rep.gap,
        "girth": None if girth_unbounded else rep.girth,
        "girth_unbounded": girth_unbounded,
        "diameter": None if diameter_disconnected else rep.diameter,
        "diameter_disconnected": diameter_disconnected,
    }
