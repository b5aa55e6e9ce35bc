"""Query-consistent local matching oracle over bounded-degree subgraphs.

The general-graph estimator needs the maximum matching size of H, a union
of a constant number of matchings and b-matchings presented only through
matched-edge oracles.  Since H has constant maximum degree, the connected
component of any query vertex can be explored with a bounded number of
layer-oracle calls; this module resolves each fully explored component to
a canonical maximum matching, so answers across queries jointly describe
one valid global matching of size exactly mu(H) (trivially within the
(1 - eps) contract).

When a component exceeds the exploration cap, the scope falls back to a
seeded greedy matching inside the truncated ball and counts a truncation
warning; consistency then only holds per query, which the cap (default
Delta ** ceil(1 / eps^2), astronomically large for small eps) makes
unreachable in practice.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .exact import Matching, exact_max_matching, gmm
from .graph import Graph
from .rng import RankFunction, Stream, derive_seed

_TAG_SAMPLES = 0x4C534D50
_TAG_BALL = 0x4C42414C


@dataclass
class LcaConfig:
    """Approximation target and exploration cap (in vertices)."""

    eps: float = 0.05
    radius: int | None = None

    def resolved_radius(self, delta_bound: int) -> int:
        if self.radius is not None:
            if self.radius < 1:
                raise ValueError("radius must be positive")
            return self.radius
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        return max(2, delta_bound) ** math.ceil(1.0 / self.eps ** 2)


class UnionSubgraphOracle:
    """Adjacency of H = union of matched-edge layers, queried locally.

    Each layer is a callable `v -> iterable of neighbors` (an explicit
    matching's partner, a lazy matching oracle's partner, a b-matching
    oracle's base partners).  Multi-edges collapse: copies of an edge never
    increase the matching size.  `on_touch`, when set, observes every
    vertex whose layers are queried (locality instrumentation).
    """

    def __init__(self, layers: Sequence[Callable[[int], Iterable[int]]],
                 universe: Sequence[int], delta_bound: int = 4,
                 on_touch: Callable[[int], None] | None = None):
        self.layers = list(layers)
        self.universe = list(universe)
        self.delta_bound = delta_bound
        self.on_touch = on_touch

    @property
    def universe_size(self) -> int:
        return len(self.universe)

    def neighbors(self, v: int) -> list[int]:
        if self.on_touch is not None:
            self.on_touch(v)
        out: set[int] = set()
        for layer in self.layers:
            out.update(layer(v))
        out.discard(v)
        return sorted(out)


class LcaScope:
    """One consistency scope: answers define a single global matching."""

    def __init__(self, h: UnionSubgraphOracle, cfg: LcaConfig, seed: int):
        self.h = h
        self.cfg = cfg
        self.seed = seed
        self.truncations = 0
        self._partner: dict[int, int] = {}

    # -- component machinery ------------------------------------------------
    def _explore(self, v: int) -> tuple[list[int], list[tuple[int, int]], bool]:
        """BFS the component of v up to the vertex cap.

        Returns (vertices, edges, complete).
        """
        cap = self.cfg.resolved_radius(self.h.delta_bound)
        seen = {v}
        frontier = deque([v])
        edges: set[tuple[int, int]] = set()
        complete = True
        while frontier:
            u = frontier.popleft()
            for w in self.h.neighbors(u):
                e = (u, w) if u < w else (w, u)
                edges.add(e)
                if w not in seen:
                    if len(seen) >= cap:
                        complete = False
                        continue
                    seen.add(w)
                    frontier.append(w)
        return sorted(seen), sorted(edges), complete

    def _resolve_component(self, v: int) -> None:
        verts, edges, complete = self._explore(v)
        index = {u: i for i, u in enumerate(verts)}
        local = Graph(len(verts), [(index[a], index[b]) for a, b in edges])
        if complete:
            matching = exact_max_matching(local)
        else:
            # truncated ball: seeded greedy, consistent per query only
            self.truncations += 1
            matching = gmm(local, RankFunction(derive_seed(self.seed, _TAG_BALL)))
        for u in verts:
            p = matching.partner_of(index[u])
            self._partner[u] = verts[p] if p is not None else -1

    # -- queries --------------------------------------------------------------
    def partner(self, v: int) -> int | None:
        if v not in self._partner:
            self._resolve_component(v)
        p = self._partner[v]
        return None if p < 0 else p

    def matched(self, v: int) -> bool:
        return self.partner(v) is not None


def lca_vertex_matched(h: UnionSubgraphOracle, cfg: LcaConfig, seed: int,
                       v: int) -> bool:
    """Is v matched in the implied (1 - eps)-approximate matching of H?"""
    return LcaScope(h, cfg, seed).matched(v)


def estimate_mu_union(h: UnionSubgraphOracle, cfg: LcaConfig, seed: int,
                      samples: int, exact_reference: bool = False,
                      offsets: bool = True,
                      scope: LcaScope | None = None) -> float:
    """Estimate mu(H) from matched-indicator samples over H's universe.

    Sampled form: (n' / 2r) * sum of indicators minus the additive offset
    n' / (2 ln n'), clamped at 0.  With `exact_reference`, H is materialized
    and the exact maximum matching size is returned instead.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    n_prime = h.universe_size
    if n_prime == 0:
        return 0.0
    if exact_reference:
        return float(len(exact_max_matching(materialize_union(h))))
    scope = scope or LcaScope(h, cfg, seed)
    rng = Stream(derive_seed(seed, _TAG_SAMPLES))
    hits = 0
    for _ in range(samples):
        if scope.matched(h.universe[rng.next_below(n_prime)]):
            hits += 1
    estimate = n_prime * hits / (2.0 * samples)
    if offsets and n_prime >= 2:
        estimate -= n_prime / (2.0 * math.log(n_prime))
    return max(estimate, 0.0)


def materialize_union(h: UnionSubgraphOracle) -> Graph:
    """Materialize H over its universe (test/exact-reference utility)."""
    index = {u: i for i, u in enumerate(h.universe)}
    edges: set[tuple[int, int]] = set()
    for u in h.universe:
        for w in h.neighbors(u):
            if w in index:
                edges.add((min(index[u], index[w]), max(index[u], index[w])))
    return Graph(len(h.universe), sorted(edges))
