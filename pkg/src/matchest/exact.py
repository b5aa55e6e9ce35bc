"""Exact reference algorithms: the ground truth behind every estimate.

Maximum matching (augmenting BFS for bipartite inputs, blossom contraction
for general ones), deterministic greedy maximal matching under an explicit
rank function, capacity-constrained greedy b-matching, the two-pass
streaming baseline, and the fractional-matching bound checker.  Everything
here is pure given its inputs and safe to run concurrently on shared
graphs.

Capacity convention: the product k*b is irrational, so the b-side capacity
is ceil(k*b) and the same integer is used as the denominator in every
scoring formula.  That keeps the fractional certificates valid exactly (at
an O(1/k) cost on the guarantee side) instead of valid only up to
rounding.
"""

from __future__ import annotations

import math
import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import Graph
from .rng import RankCollisionError, RankFunction

B_VALUE = 1.0 + math.sqrt(2.0)


class NonBipartiteError(ValueError):
    """An operation requiring bipartite input received an odd cycle."""


def k_from_eps(eps: float) -> int:
    """Smallest integer k with k > 1 / (b * eps^3)."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.floor(1.0 / (B_VALUE * eps ** 3)) + 1


def kb_ceil(k: int) -> int:
    """Integer b-side capacity ceil(k * b), used consistently in formulas."""
    if k < 1:
        raise ValueError("k must be positive")
    return math.ceil(k * B_VALUE)


@dataclass(frozen=True)
class ApproxConstants:
    """Constants of the two-route guarantee analysis.

    `balance_residual` evaluates the defining balance equation
    beta/2 + (2 - sqrt(2)) (1 - beta) = (2 - sqrt(2)) beta, whose solution
    pins beta and the guarantee gamma > 0.5109.
    """

    b: float = B_VALUE
    beta: float = (12.0 + 2.0 * math.sqrt(2.0)) / 17.0
    gamma: float = 4.0 * (5.0 - 2.0 * math.sqrt(2.0)) / 17.0

    def balance_residual(self) -> float:
        a = 2.0 - math.sqrt(2.0)
        return self.beta / 2.0 + a * (1.0 - self.beta) - a * self.beta


# ---------------------------------------------------------------------------
# matchings
# ---------------------------------------------------------------------------

class Matching:
    """A validated set of vertex-disjoint edges with a partner index."""

    __slots__ = ("edges", "matched_of")

    def __init__(self, edges: Iterable[tuple[int, int]] = ()):
        self.edges: set[tuple[int, int]] = set()
        self.matched_of: dict[int, int] = {}
        for u, v in edges:
            self.add(u, v)

    def add(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("matching edge cannot be a loop")
        if u in self.matched_of or v in self.matched_of:
            raise ValueError(f"edge ({u}, {v}) shares an endpoint with the matching")
        e = (u, v) if u < v else (v, u)
        self.edges.add(e)
        self.matched_of[u] = v
        self.matched_of[v] = u

    @classmethod
    def from_partner_array(cls, partner: Sequence[int]) -> "Matching":
        m = cls()
        for v, p in enumerate(partner):
            if p >= 0 and v < p:
                m.add(v, int(p))
        return m

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, v: int) -> bool:
        return v in self.matched_of

    def partner_of(self, v: int) -> int | None:
        return self.matched_of.get(v)

    def vertices(self) -> set[int]:
        return set(self.matched_of)

    def is_maximal_in(self, g: Graph) -> bool:
        """No graph edge has both endpoints unmatched."""
        return all(u in self.matched_of or v in self.matched_of
                   for u, v in g.edges())

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Matching(size={len(self.edges)})"


class BMatching:
    """Edge multi-set with per-vertex capacity accounting."""

    __slots__ = ("multiplicity", "load", "capacity")

    def __init__(self, capacity: dict[int, int]):
        self.capacity = dict(capacity)
        self.multiplicity: dict[tuple[int, int], int] = {}
        self.load: dict[int, int] = {}

    def add(self, u: int, v: int, mult: int) -> None:
        if mult <= 0:
            return
        if (self.load.get(u, 0) + mult > self.capacity.get(u, 0)
                or self.load.get(v, 0) + mult > self.capacity.get(v, 0)):
            raise ValueError(f"adding {mult} copies of ({u}, {v}) exceeds capacity")
        e = (u, v) if u < v else (v, u)
        self.multiplicity[e] = self.multiplicity.get(e, 0) + mult
        self.load[u] = self.load.get(u, 0) + mult
        self.load[v] = self.load.get(v, 0) + mult

    @property
    def size(self) -> int:
        """Total multiplicity (the multi-set cardinality |B|)."""
        return sum(self.multiplicity.values())

    def residual(self, v: int) -> int:
        return self.capacity.get(v, 0) - self.load.get(v, 0)

    def simple_edges(self) -> list[tuple[int, int]]:
        """Distinct base edges, multiplicities collapsed."""
        return sorted(self.multiplicity)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"BMatching(size={self.size}, edges={len(self.multiplicity)})"


# ---------------------------------------------------------------------------
# exact maximum matching
# ---------------------------------------------------------------------------

def bipartition(g: Graph) -> list[int] | None:
    """2-coloring by BFS, or None when the graph has an odd cycle."""
    color = [-1] * g.n
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adjacency[u]:
                if color[w] < 0:
                    color[w] = color[u] ^ 1
                    queue.append(w)
                elif color[w] == color[u]:
                    return None
    return color


def _hopcroft_karp(g: Graph, color: Sequence[int]) -> list[int]:
    """Maximum bipartite matching by layered augmenting BFS/DFS."""
    n = g.n
    adj = g.adjacency
    match = [-1] * n
    left = [v for v in range(n) if color[v] == 0]
    INF = n + 1
    dist = [INF] * n

    def bfs() -> bool:
        queue = deque()
        for u in left:
            if match[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        reachable_free = False
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                m = match[w]
                if m == -1:
                    reachable_free = True
                elif dist[m] == INF:
                    dist[m] = dist[u] + 1
                    queue.append(m)
        return reachable_free

    def dfs(u: int) -> bool:
        for w in adj[u]:
            m = match[w]
            if m == -1 or (dist[m] == dist[u] + 1 and dfs(m)):
                match[u] = w
                match[w] = u
                return True
        dist[u] = INF
        return False

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 2 * n + 100))
    try:
        while bfs():
            for u in left:
                if match[u] == -1:
                    dfs(u)
    finally:
        sys.setrecursionlimit(old_limit)
    return match


def _blossom(g: Graph) -> list[int]:
    """Maximum matching in a general graph by blossom contraction (O(V^3))."""
    n = g.n
    adj = g.adjacency
    match = [-1] * n
    p = [-1] * n
    base = list(range(n))
    used = [False] * n

    def lca(a: int, b: int) -> int:
        seen = [False] * n
        x = a
        while True:
            x = base[x]
            seen[x] = True
            if match[x] == -1:
                break
            x = p[match[x]]
        y = b
        while True:
            y = base[y]
            if seen[y]:
                return y
            y = p[match[y]]

    def mark_path(v: int, b: int, child: int, in_blossom: list[bool]) -> None:
        while base[v] != b:
            in_blossom[base[v]] = True
            in_blossom[base[match[v]]] = True
            p[v] = child
            child = match[v]
            v = p[match[v]]

    def find_augmenting_path(root: int) -> bool:
        nonlocal p, base, used
        used = [False] * n
        p = [-1] * n
        base = list(range(n))
        used[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and p[match[to]] != -1):
                    # odd cycle: contract the blossom
                    cur_base = lca(v, to)
                    in_blossom = [False] * n
                    mark_path(v, cur_base, to, in_blossom)
                    mark_path(to, cur_base, v, in_blossom)
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = cur_base
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif p[to] == -1:
                    p[to] = v
                    if match[to] == -1:
                        # augment along the alternating path to the root
                        u = to
                        while u != -1:
                            pv = p[u]
                            nxt = match[pv]
                            match[u] = pv
                            match[pv] = u
                            u = nxt
                        return True
                    used[match[to]] = True
                    queue.append(match[to])
        return False

    for v in range(n):
        if match[v] == -1:
            find_augmenting_path(v)
    return match


def exact_max_matching(g: Graph) -> Matching:
    """A maximum matching of g.

    Bipartite inputs go through the augmenting-BFS route, general inputs
    through blossom contraction; both routes return identical sizes on
    bipartite graphs.
    """
    color = bipartition(g)
    match = _hopcroft_karp(g, color) if color is not None else _blossom(g)
    return Matching.from_partner_array(match)


def brute_force_max_matching(g: Graph) -> int:
    """Maximum matching size by exhaustive search; test oracle for n <= ~16."""
    if g.n > 24:
        raise ValueError("brute force is limited to small graphs")
    edges = list(g.edges())
    m = len(edges)
    best = 0

    def rec(i: int, used_mask: int, size: int) -> None:
        nonlocal best
        if size + (m - i) <= best:
            return
        if i == m:
            best = max(best, size)
            return
        u, v = edges[i]
        if not (used_mask >> u) & 1 and not (used_mask >> v) & 1:
            rec(i + 1, used_mask | (1 << u) | (1 << v), size + 1)
        rec(i + 1, used_mask, size)

    rec(0, 0, 0)
    return best


# ---------------------------------------------------------------------------
# greedy matchings under explicit ranks
# ---------------------------------------------------------------------------

def gmm(g: Graph, ranks: RankFunction) -> Matching:
    """The greedy maximal matching: scan edges by increasing rank, add an
    edge iff both endpoints are free.  Pure function of (g, ranks)."""
    ranked = sorted((ranks.rank_u64(u, v), u, v) for u, v in g.edges())
    for i in range(1, len(ranked)):
        if ranked[i][0] == ranked[i - 1][0]:
            raise RankCollisionError("duplicate ranks in edge permutation")
    matching = Matching()
    taken = set()
    for _, u, v in ranked:
        if u not in taken and v not in taken:
            matching.add(u, v)
            taken.add(u)
            taken.add(v)
    return matching


def maximal_bmatching(edges: Iterable[tuple[int, int]], a_side: set[int],
                      cap_a: int, cap_b: int, ranks: RankFunction) -> BMatching:
    """Greedy maximal b-matching over a bipartite edge set.

    Edges are scanned in increasing rank; each gets multiplicity equal to
    the smaller residual capacity of its endpoints (the saturating fill).
    Every edge must join `a_side` (capacity cap_a) to its complement
    (capacity cap_b); anything else raises NonBipartiteError.
    """
    if cap_a < 1 or cap_b < 1:
        raise ValueError("capacities must be positive")
    edge_list = []
    capacity: dict[int, int] = {}
    for u, v in edges:
        u_in, v_in = u in a_side, v in a_side
        if u_in == v_in:
            raise NonBipartiteError(f"edge ({u}, {v}) does not cross the bipartition")
        a, b = (u, v) if u_in else (v, u)
        capacity[a] = cap_a
        capacity[b] = cap_b
        edge_list.append((ranks.rank_u64(u, v), a, b))
    edge_list.sort()
    for i in range(1, len(edge_list)):
        if edge_list[i][0] == edge_list[i - 1][0]:
            raise RankCollisionError("duplicate ranks in b-matching edge order")
    bm = BMatching(capacity)
    for _, a, b in edge_list:
        mult = min(bm.residual(a), bm.residual(b))
        if mult > 0:
            bm.add(a, b, mult)
    return bm


# ---------------------------------------------------------------------------
# two-pass streaming baseline
# ---------------------------------------------------------------------------

class _ParityDSU:
    """Union-find with parity for streaming odd-cycle detection."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.parity = [0] * n  # parity of the edge to the parent
        self.rank = [0] * n

    def find(self, x: int) -> tuple[int, int]:
        """(root of x, parity of the path x -> root), with compression."""
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        acc = 0
        for y in reversed(path):
            acc ^= self.parity[y]
            self.parent[y] = root
            self.parity[y] = acc
        return root, (self.parity[path[0]] if path else 0)

    def union_check(self, u: int, v: int) -> bool:
        """Join u, v as opposite-side; False when this closes an odd cycle."""
        ru, pu = self.find(u)
        rv, pv = self.find(v)
        if ru == rv:
            return pu != pv
        if self.rank[ru] < self.rank[rv]:
            ru, rv = rv, ru
            pu, pv = pv, pu
        self.parent[rv] = ru
        self.parity[rv] = pu ^ pv ^ 1
        if self.rank[ru] == self.rank[rv]:
            self.rank[ru] += 1
        return True


@dataclass
class TwoPassResult:
    """Breakdown of a two-pass streaming run."""

    value: float
    matching_size: int
    bmatching_size: int
    k: int
    kb: int

    def __float__(self) -> float:  # pragma: no cover - convenience
        return self.value


def two_pass_streaming(stream: Iterable[tuple[int, int]], n: int, eps: float,
                       k: int | None = None, details: bool = False):
    """Two-pass streaming estimate for bipartite graphs.

    Pass 1 builds a greedy maximal matching M in stream order; pass 2
    builds a saturating b-matching B between V(M) (capacity k) and its
    complement (capacity ceil(k*b)) and returns
    (1 - 1/b) |M| + |B| / ceil(k*b).

    k defaults to the smallest integer above 1/(b eps^3).  A non-bipartite
    stream raises NonBipartiteError.
    """
    if k is None:
        k = k_from_eps(eps)
    kbc = kb_ceil(k)
    edges = list(stream)
    dsu = _ParityDSU(n)
    for u, v in edges:
        if not dsu.union_check(u, v):
            raise NonBipartiteError(f"stream edge ({u}, {v}) closes an odd cycle")
    # pass 1: greedy maximal matching in stream order
    matched: dict[int, int] = {}
    m_size = 0
    for u, v in edges:
        if u not in matched and v not in matched:
            matched[u] = v
            matched[v] = u
            m_size += 1
    # pass 2: saturating b-matching between V(M) and the rest
    load: dict[int, int] = {}
    b_size = 0
    for u, v in edges:
        u_in, v_in = u in matched, v in matched
        if u_in == v_in:
            continue
        a, bb = (u, v) if u_in else (v, u)
        mult = min(k - load.get(a, 0), kbc - load.get(bb, 0))
        if mult > 0:
            load[a] = load.get(a, 0) + mult
            load[bb] = load.get(bb, 0) + mult
            b_size += mult
    value = (1.0 - 1.0 / B_VALUE) * m_size + b_size / kbc
    if details:
        return TwoPassResult(value, m_size, b_size, k, kbc)
    return value


# ---------------------------------------------------------------------------
# fractional bound checker
# ---------------------------------------------------------------------------

@dataclass
class FractionalBoundReport:
    """Outcome of checking both route scores against the exact optimum."""

    mu: int
    score_route1: float
    score_route2: float
    slack1: float = field(init=False)
    slack2: float = field(init=False)
    violated: bool = field(init=False)
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        self.slack1 = self.mu - self.score_route1
        self.slack2 = self.mu - self.score_route2
        self.violated = min(self.slack1, self.slack2) < -1e-9

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "score_route1": self.score_route1,
            "score_route2": self.score_route2,
            "slack1": self.slack1,
            "slack2": self.slack2,
            "violated": self.violated,
            "witness": self.witness,
        }


def check_fractional_bound(m: Matching, m_prime: Matching, b1: BMatching,
                           b2: BMatching, g: Graph, kbc: int) -> FractionalBoundReport:
    """Verify both route scores are at most the true maximum matching size.

    Route 1: |M| + (1 - 1/b) |M'| + |B1| / kbc;
    route 2: (1 - 1/b) |M| + |B2| / kbc.  Requires bipartite g.  On
    violation the report carries the full witness state.
    """
    if bipartition(g) is None:
        raise NonBipartiteError("fractional bound check requires a bipartite graph")
    mu = len(exact_max_matching(g))
    one = 1.0 - 1.0 / B_VALUE
    s1 = len(m) + one * len(m_prime) + b1.size / kbc
    s2 = one * len(m) + b2.size / kbc
    report = FractionalBoundReport(mu=mu, score_route1=s1, score_route2=s2)
    if report.violated:
        report.witness = {
            "m": m.sorted_edges(),
            "m_prime": m_prime.sorted_edges(),
            "b1": dict(b1.multiplicity),
            "b2": dict(b2.multiplicity),
            "kbc": kbc,
        }
    return report
