"""Local oracle surface for the random greedy maximal matching.

`RgmmScope` is one memoization scope: all queries against it are answered
consistently with a single implied matching, fixed by the rank seed.
Because enumeration randomness is keyed per vertex, two scopes with the
same seeds give identical answers, so the one-shot helpers
(`vertex_matched`, `matched_edge`) agree with scoped queries.

On plain graphs the implied matching equals the materialized greedy
matching of `exact.gmm` under the same rank function, exactly; on induced
views the agreement is with high probability (see `_kernel._pykern`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .graph import Graph, OracleStats
from .rng import RankFunction, Stream, derive_seed

_TAG_ENUM = 0x454E554D
_TAG_PROFILE_PICK = 0x50494B45
_TAG_PROFILE_RANK = 0x5052464C


@dataclass
class OracleAnswer:
    """Answer to one vertex query: status, partner, and probe cost."""

    matched: bool
    partner: int | None
    probes_used: int


def _seed_of(ranks: RankFunction | int) -> int:
    return ranks.seed if isinstance(ranks, RankFunction) else int(ranks)


class RgmmScope:
    """Per-run oracle scope over a graph or view adapter.

    `mask`, when given, restricts queries to the induced subgraph of
    mask-true vertices.  Distinct scopes over the same inputs may run
    concurrently; a single scope is single-threaded.
    """

    def __init__(self, base, ranks: RankFunction | int,
                 stats: OracleStats | None = None, mask=None,
                 impl: str | None = None):
        seed_rank = _seed_of(ranks)
        self.stats = stats if stats is not None else OracleStats(base.n)
        self._oracle = engine.make_rgmm_oracle(
            base, seed_rank, derive_seed(seed_rank, _TAG_ENUM), self.stats,
            mask=mask, impl=impl)

    def vertex_matched(self, v: int) -> OracleAnswer:
        before = self.stats.probes()
        partner = self._oracle.partner_of(v)
        used = self.stats.probes() - before
        if partner < 0:
            return OracleAnswer(False, None, used)
        return OracleAnswer(True, int(partner), used)

    def matched_edge(self, v: int) -> tuple[int, int] | None:
        partner = self._oracle.partner_of(v)
        if partner < 0:
            return None
        return (v, int(partner)) if v < partner else (int(partner), v)

    def raw(self):
        """The underlying kernel oracle (estimator plumbing)."""
        return self._oracle


def vertex_matched(base, ranks: RankFunction | int, v: int,
                   stats: OracleStats | None = None,
                   mask=None, impl: str | None = None) -> OracleAnswer:
    """Is v matched in the implied greedy maximal matching?  One-shot."""
    return RgmmScope(base, ranks, stats, mask=mask, impl=impl).vertex_matched(v)


def matched_edge(base, ranks: RankFunction | int, v: int,
                 stats: OracleStats | None = None,
                 mask=None, impl: str | None = None) -> tuple[int, int] | None:
    """The matching edge at v, or None; consistent with `vertex_matched`."""
    return RgmmScope(base, ranks, stats, mask=mask, impl=impl).matched_edge(v)


def visit_profile(g: Graph, ranks: RankFunction | int, sample_count: int,
                  stats: OracleStats | None = None,
                  impl: str | None = None) -> np.ndarray:
    """Empirical per-vertex visit counts over random oracle starts.

    Each sample draws a fresh rank seed and a uniformly random start
    vertex, then answers one matched-query; the returned array accumulates
    how often each vertex's adjacency was sampled across all calls.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    stats = stats if stats is not None else OracleStats(g.n)
    if g.n == 0:
        return stats.per_vertex_visits.copy()
    seed = _seed_of(ranks)
    pick = Stream(derive_seed(seed, _TAG_PROFILE_PICK))
    for i in range(sample_count):
        scope = RgmmScope(g, derive_seed(seed, _TAG_PROFILE_RANK, i),
                          stats=stats, impl=impl)
        scope.vertex_matched(pick.next_below(g.n))
    return stats.per_vertex_visits.copy()
