"""Pure-Python query kernels: sparsifier loops and lazy matching oracles.

This module is the reference implementation of the package's hot paths.
`_ckern` (Cython) mirrors it instruction-for-instruction over CSR-backed
graphs; given the same seeds both produce identical answers and identical
probe counts, which `tests/test_kernel_parity.py` pins.

Determinism contract: every randomized loop draws from a `Stream` keyed by
(seed, purpose, vertex), so answers are a pure function of (graph, seeds)
and do not depend on query order, memo state, or interleaving.

The pure kernels work against *adapters*, objects exposing

    n           -- base vertex count
    degree(v)   -- exact base degree, charging the query-model lookup cost
    probe(v, i) -- i-th base neighbor (None past the degree), charging 1 probe

which lets the same oracle code run over the plain list oracle and over the
matrix-backed core graph.
"""

from __future__ import annotations

import math

from ..rng import RankCollisionError, Stream, derive_seed, mix64

TAG_ENUM = 0x656E756D  # default enumeration-seed derivation tag


def tau_log_for(n: int) -> int:
    """Integer log factor used by the stopping rule; >= 1."""
    return max(1, math.ceil(math.log(max(n, 3))))


def edge_key(u: int, v: int) -> int:
    return (u << 32) | v if u < v else (v << 32) | u


# ---------------------------------------------------------------------------
# sparsification
# ---------------------------------------------------------------------------

def sparsify_list(adapter, order, c: int, seed: int) -> list[int]:
    """Greedy sampling sparsifier over a list-oracle adapter.

    Processes vertices in `order`; every still-unmatched vertex draws up to
    `c` uniform samples (with replacement) from its full adjacency list and
    matches the first unmatched one.  Degree-0 vertices are skipped without
    consuming samples.  Returns the partner array (-1 for unmatched).
    Probe accounting happens inside the adapter.
    """
    n = adapter.n
    partner = [-1] * n
    for v in order:
        if partner[v] >= 0:
            continue
        d = adapter.degree(v)
        if d == 0:
            continue
        rng = Stream(derive_seed(seed, v))
        for _ in range(c):
            x = adapter.probe(v, rng.next_below(d))
            if x is not None and partner[x] < 0:
                partner[v] = x
                partner[x] = v
                break
    return partner


def sparsify_matrix(view, c: int, seed: int) -> list[int]:
    """Sparsifier over the matrix-backed auxiliary graph.

    Processes the secondary copies first, then the primary copies, and never
    processes unit-set vertices (they have degree 1 and exist to absorb the
    secondary class).  Returns the partner array over the 2n copy vertices;
    partners may be unit-set ids.  Each sample costs at most 1 matrix probe.
    """
    n = view.n
    core = view.core_size
    partner = [-1] * core

    def is_matched(x: int) -> bool:
        if x < core:
            return partner[x] >= 0
        # a unit vertex is matched iff its owning secondary copy took it
        return partner[n + view.unit_owner(x)] == x

    for vid in list(range(n, core)) + list(range(n)):
        if partner[vid] >= 0:
            continue
        d = view.degree_of(vid)
        if d == 0:
            continue
        rng = Stream(derive_seed(seed, vid))
        for _ in range(c):
            x = view.neighbor(vid, rng.next_below(d))
            if x is not None and not is_matched(x):
                partner[vid] = x
                if x < core:
                    partner[x] = vid
                break
    return partner


# ---------------------------------------------------------------------------
# lazy greedy-matching oracle over hash ranks
# ---------------------------------------------------------------------------

class RgmmOracle:
    """Vertex oracle for the greedy maximal matching under hash ranks.

    Resolves "is v matched / who is v's partner" without materializing the
    matching: v's incident edges are examined in increasing rank, and an
    edge belongs to the matching iff every adjacent edge of strictly lower
    rank does not.  The recursion is run iteratively on an explicit stack.

    Neighbor enumeration follows the sampling model of the query oracles:
    fresh uniform index draws with replacement plus a seen-set.  In plain
    mode (no mask) the adapter degree bounds the seen-set, so enumeration is
    exact and answers coincide with the materialized greedy matching for
    the same rank seed.  In induced mode (mask = membership array) the view
    degree is unknown; enumeration stops after `2 * deg * tau_log + 8`
    consecutive draws without a new member, which misses an existing member
    with probability < n**-2 per vertex.  Under a miss the implied matching
    can deviate from the materialized one, so induced-mode answers are
    exact only with high probability; all statistical consumers tolerate
    this.

    Memoization is scoped to the instance (one estimator run).  Because
    enumeration streams are keyed per vertex, answers are independent of
    call order even across separate instances with the same seeds.
    """

    def __init__(self, adapter, seed_rank: int, seed_enum: int, stats,
                 mask=None, tau_log: int = 1):
        self.adapter = adapter
        self.stats = stats
        self.mask = mask
        self.tau_log = tau_log
        self._rank_mixed = mix64(seed_rank)
        self.seed_enum = seed_enum
        self._incident: dict[int, list[tuple[int, int]]] = {}
        self._edge_memo: dict[int, bool] = {}
        self._partner: dict[int, int] = {}

    # -- ranks ----------------------------------------------------------
    def rank_u64(self, u: int, v: int) -> int:
        return mix64(edge_key(u, v) ^ self._rank_mixed)

    # -- neighborhood enumeration ----------------------------------------
    def incident_edges(self, v: int) -> list[tuple[int, int]]:
        """Sorted [(rank, neighbor), ...] of v's view-incident edges."""
        cached = self._incident.get(v)
        if cached is not None:
            return cached
        d = self.adapter.degree(v)
        seen: set[int] = set()
        if d > 0:
            rng = Stream(derive_seed(self.seed_enum, v))
            if self.mask is None:
                while len(seen) < d:
                    self.stats.count_visit(v)
                    x = self.adapter.probe(v, rng.next_below(d))
                    if x is not None:
                        seen.add(x)
            else:
                tau = 2 * d * self.tau_log + 8
                misses = 0
                while misses < tau:
                    self.stats.count_visit(v)
                    x = self.adapter.probe(v, rng.next_below(d))
                    if x is None or not self.mask[x] or x in seen:
                        misses += 1
                    else:
                        seen.add(x)
                        misses = 0
        incident = sorted((self.rank_u64(v, x), x) for x in seen)
        for i in range(1, len(incident)):
            if incident[i][0] == incident[i - 1][0]:
                raise RankCollisionError(
                    f"rank collision among edges incident to {v}")
        self._incident[v] = incident
        return incident

    # -- edge resolution --------------------------------------------------
    def edge_in_matching(self, u: int, v: int) -> bool:
        """Is the (view-)edge (u, v) in the implied greedy matching?"""
        memo = self._edge_memo
        root = edge_key(u, v)
        if root in memo:
            return memo[root]
        stack = [(u, v)]
        while stack:
            a, b = stack[-1]
            key = edge_key(a, b)
            if key in memo:
                stack.pop()
                continue
            r = self.rank_u64(a, b)
            verdict = True
            pushed = False
            for w, _ in ((a, b), (b, a)):
                for rr, x in self.incident_edges(w):
                    if rr >= r:
                        break
                    val = memo.get(edge_key(w, x))
                    if val is None:
                        stack.append((w, x))
                        pushed = True
                        break
                    if val:
                        verdict = False
                        break
                if pushed or not verdict:
                    break
            if pushed:
                continue
            memo[key] = verdict
            stack.pop()
        return memo[root]

    # -- vertex queries ---------------------------------------------------
    def partner_of(self, v: int) -> int:
        """Matched partner of v, or -1.  Consistent across all queries."""
        p = self._partner.get(v)
        if p is not None:
            return p
        p = -1
        for _, x in self.incident_edges(v):
            if self.edge_in_matching(v, x):
                p = x
                break
        self._partner[v] = p
        return p

    def matched(self, v: int) -> bool:
        return self.partner_of(v) >= 0


# ---------------------------------------------------------------------------
# lazy b-matching oracle over the capacity-duplicated view
# ---------------------------------------------------------------------------

class BMatchOracle:
    """Greedy-matching oracle on the capacity-duplicated bipartite view.

    The base layer consists of the base edges whose endpoints lie in the
    universe (optional mask) on opposite sides; side A carries `copies_a`
    virtual copies per vertex, side B `copies_b`.  The implied maximal
    matching on the duplicated view projects to a maximal b-matching on the
    base with capacities (copies_a, copies_b).

    Sides come either from an explicit 0/1 array (side_array[v] == 1 means
    side A; membership is O(1)) or from a nested `RgmmOracle` whose matched
    vertices form side A.  Nested side lookups are memoized here, so each
    base vertex pays the inner-oracle cost once per run.

    Neighbor enumeration collects the *base* members of a vertex by uniform
    draws with replacement (same stopping rule as the induced-mode
    `RgmmOracle`) and then expands virtual copies arithmetically -- the copy
    set of a member is determined, so no sampling over copies is needed.
    Virtual vertices are packed as `base * copies_max + copy`.
    """

    def __init__(self, adapter, seed_rank: int, seed_enum: int, stats,
                 copies_a: int, copies_b: int,
                 side_array=None, side_oracle: RgmmOracle | None = None,
                 universe=None, tau_log: int = 1):
        if (side_array is None) == (side_oracle is None):
            raise ValueError("exactly one of side_array / side_oracle required")
        self.adapter = adapter
        self.stats = stats
        self.copies_a = copies_a
        self.copies_b = copies_b
        self.cmax = max(copies_a, copies_b)
        if adapter.n * self.cmax >= 1 << 32:
            raise ValueError("virtual id space exceeds 32 bits")
        self.side_array = side_array
        self.side_oracle = side_oracle
        self.universe = universe
        self.tau_log = tau_log
        self._rank_mixed = mix64(seed_rank)
        self.seed_enum = seed_enum
        self._side_memo: dict[int, bool] = {}
        self._members: dict[int, list[int]] = {}
        self._incident: dict[int, list[tuple[int, int, int]]] = {}
        self._edge_memo: dict[int, bool] = {}
        self._partner: dict[int, int] = {}

    # -- structure ---------------------------------------------------------
    def in_universe(self, v: int) -> bool:
        return self.universe is None or bool(self.universe[v])

    def side_a(self, v: int) -> bool:
        """True when v belongs to side A (capacity copies_a)."""
        s = self._side_memo.get(v)
        if s is None:
            if self.side_array is not None:
                s = bool(self.side_array[v])
            else:
                s = self.side_oracle.matched(v)
            self._side_memo[v] = s
        return s

    def copies(self, v: int) -> int:
        if not self.in_universe(v):
            return 0
        return self.copies_a if self.side_a(v) else self.copies_b

    def vid(self, v: int, j: int) -> int:
        return v * self.cmax + j

    def rank_u64(self, vid_u: int, vid_v: int) -> int:
        return mix64(edge_key(vid_u, vid_v) ^ self._rank_mixed)

    # -- base-member enumeration -------------------------------------------
    def members_of(self, v: int) -> list[int]:
        """Base neighbors of v lying in the universe on the opposite side."""
        cached = self._members.get(v)
        if cached is not None:
            return cached
        d = self.adapter.degree(v)
        my_side = self.side_a(v)
        seen: set[int] = set()
        if d > 0:
            rng = Stream(derive_seed(self.seed_enum, v))
            tau = 2 * d * self.tau_log + 8
            misses = 0
            while misses < tau:
                self.stats.count_visit(v)
                x = self.adapter.probe(v, rng.next_below(d))
                if (x is None or x in seen or not self.in_universe(x)
                        or self.side_a(x) == my_side):
                    misses += 1
                else:
                    seen.add(x)
                    misses = 0
        members = sorted(seen)
        self._members[v] = members
        return members

    def incident_edges(self, v: int, j: int) -> list[tuple[int, int, int]]:
        """Sorted [(rank, base, copy), ...] incident to virtual (v, j)."""
        me = self.vid(v, j)
        cached = self._incident.get(me)
        if cached is not None:
            return cached
        members = self.members_of(v)
        # all members share the opposite side, hence one copy count
        other_copies = self.copies_b if self.side_a(v) else self.copies_a
        incident = sorted(
            (self.rank_u64(me, self.vid(x, i)), x, i)
            for x in members
            for i in range(other_copies)
        )
        for t in range(1, len(incident)):
            if incident[t][0] == incident[t - 1][0]:
                raise RankCollisionError(
                    f"rank collision among virtual edges at ({v}, {j})")
        self._incident[me] = incident
        return incident

    # -- resolution ----------------------------------------------------------
    def _edge_in_matching(self, u: int, ju: int, v: int, jv: int) -> bool:
        memo = self._edge_memo
        root = edge_key(self.vid(u, ju), self.vid(v, jv))
        if root in memo:
            return memo[root]
        stack = [(u, ju, v, jv)]
        while stack:
            a, ja, b, jb = stack[-1]
            key = edge_key(self.vid(a, ja), self.vid(b, jb))
            if key in memo:
                stack.pop()
                continue
            r = self.rank_u64(self.vid(a, ja), self.vid(b, jb))
            verdict = True
            pushed = False
            for w, jw in ((a, ja), (b, jb)):
                wid = self.vid(w, jw)
                for rr, x, i in self.incident_edges(w, jw):
                    if rr >= r:
                        break
                    val = memo.get(edge_key(wid, self.vid(x, i)))
                    if val is None:
                        stack.append((w, jw, x, i))
                        pushed = True
                        break
                    if val:
                        verdict = False
                        break
                if pushed or not verdict:
                    break
            if pushed:
                continue
            memo[key] = verdict
            stack.pop()
        return memo[root]

    # -- virtual-vertex queries ----------------------------------------------
    def virtual_partner(self, v: int, j: int) -> tuple[int, int] | None:
        """Matched partner of virtual (v, j) as (base, copy), or None."""
        if j >= self.copies(v):
            return None
        me = self.vid(v, j)
        p = self._partner.get(me)
        if p is None:
            p = -1
            for _, x, i in self.incident_edges(v, j):
                if self._edge_in_matching(v, j, x, i):
                    p = self.vid(x, i)
                    break
            self._partner[me] = p
        if p < 0:
            return None
        return (p // self.cmax, p % self.cmax)

    def virtual_matched(self, v: int, j: int) -> bool:
        return self.virtual_partner(v, j) is not None

    def base_partners(self, v: int) -> list[int]:
        """Distinct base partners over all copies of v (layer adjacency)."""
        out = set()
        for j in range(self.copies(v)):
            p = self.virtual_partner(v, j)
            if p is not None:
                out.add(p[0])
        return sorted(out)

    def base_partner_multiset(self, v: int) -> list[int]:
        """Base partners over all copies of v, with multiplicity."""
        out = []
        for j in range(self.copies(v)):
            p = self.virtual_partner(v, j)
            if p is not None:
                out.append(p[0])
        return sorted(out)
