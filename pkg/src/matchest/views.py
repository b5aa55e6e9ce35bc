"""Virtual graph views consumed by the sampling algorithms.

A view exposes a vertex universe and a single sampling primitive `draw`:
one uniformly random probe of the underlying oracle, filtered through the
view's membership rule.  A draw costs exactly one base probe (list or
matrix) and either returns a view-neighbor or reports a miss with None.
`random_neighbor` turns draws into the rejection-sampling operation with a
hard probe cap, so a violated precondition (no eligible neighbor) surfaces
as `ProbeBudgetExceeded` instead of spinning forever.

Views never materialize anything: the duplicated-bipartite and
matrix-backed views use arithmetic vertex encodings, keeping memory O(n)
regardless of the virtual vertex count.
"""

from __future__ import annotations

import math
from typing import Callable

from .graph import (
    Graph,
    GraphValidationError,
    OracleStats,
    ProbeBudgetExceeded,
    degree_via_binary_search,
    list_probe,
    matrix_probe,
)
from .rng import Stream

DEFAULT_CAP_FACTOR = 64


class ListOracleView:
    """The base graph seen through the adjacency-list oracle.

    Degrees are obtained by counted binary search once per vertex and
    cached, matching the query model's cost for uniform index sampling.
    """

    def __init__(self, g: Graph, stats: OracleStats | None = None):
        self.g = g
        self.stats = stats
        self._deg: dict[int, int] = {}

    @property
    def n(self) -> int:
        return self.g.n

    def contains(self, v: int) -> bool:
        return 0 <= v < self.g.n

    def degree(self, v: int) -> int:
        d = self._deg.get(v)
        if d is None:
            d = degree_via_binary_search(self.g, v, self.stats)
            self._deg[v] = d
        return d

    def probe(self, v: int, i: int) -> int | None:
        return list_probe(self.g, v, i, self.stats)

    def draw(self, v: int, rng: Stream) -> int | None:
        d = self.degree(v)
        if d == 0:
            return None
        return self.probe(v, rng.next_below(d))


class InducedSubgraphView:
    """Induced subgraph of base vertices satisfying a membership predicate.

    Typical predicate: "unmatched in the sparsifier matching".  Neighbors
    returned by a draw always satisfy the predicate; every draw charges the
    base counters with exactly the base probes used.
    """

    def __init__(self, base: ListOracleView, membership: Callable[[int], bool]):
        self.base = base
        self.membership = membership

    @property
    def n(self) -> int:
        return self.base.n

    def contains(self, v: int) -> bool:
        return self.base.contains(v) and self.membership(v)

    def degree(self, v: int) -> None:
        return None  # unknown without a full scan

    def draw(self, v: int, rng: Stream) -> int | None:
        x = self.base.draw(v, rng)
        if x is None or not self.membership(x):
            return None
        return x


class DuplicatedBipartiteView:
    """Capacity-duplicated view of a bipartite base layer.

    Base vertices on side A appear as `copies_a` virtual copies, side B as
    `copies_b` copies; the virtual edge ((u, i), (v, j)) exists iff the base
    edge (u, v) does and u, v lie on opposite sides.  A maximal matching on
    this view corresponds one-to-one to a maximal b-matching on the base
    with capacities copies_a / copies_b.

    `side_of(v)` returns True for side A, False for side B, or None when v
    is outside the base layer.  Virtual vertices are (base, copy) pairs.
    """

    def __init__(self, base, side_of: Callable[[int], bool | None],
                 copies_a: int, copies_b: int):
        if copies_a < 1 or copies_b < 1:
            raise ValueError("copy counts must be positive")
        self.base = base
        self.side_of = side_of
        self.copies_a = copies_a
        self.copies_b = copies_b

    def copies(self, v: int) -> int:
        side = self.side_of(v)
        if side is None:
            return 0
        return self.copies_a if side else self.copies_b

    def contains(self, vv: tuple[int, int]) -> bool:
        v, j = vv
        return 0 <= j < self.copies(v)

    def draw(self, vv: tuple[int, int], rng: Stream) -> tuple[int, int] | None:
        v, _ = vv
        my_side = self.side_of(v)
        if my_side is None:
            return None
        x = self.base.draw(v, rng)
        if x is None:
            return None
        x_side = self.side_of(x)
        if x_side is None or x_side == my_side:
            return None
        return (x, rng.next_below(self.copies(x)))

    def project(self, virtual_edges) -> dict[tuple[int, int], int]:
        """Collapse virtual matching edges to a base edge multi-set."""
        mult: dict[tuple[int, int], int] = {}
        for (u, _), (v, _) in virtual_edges:
            e = (min(u, v), max(u, v))
            mult[e] = mult.get(e, 0) + 1
        return mult


def random_neighbor(view, v, rng: Stream, cap: int | None = None):
    """Uniformly random view-neighbor of v by rejection sampling.

    Caps the number of base probes at `cap` (default 64 * base vertex
    count) and raises `ProbeBudgetExceeded` when exhausted, which signals
    that v has no eligible neighbor (a violated precondition).
    """
    if cap is None:
        cap = DEFAULT_CAP_FACTOR * max(view.n, 1)
    for _ in range(cap):
        x = view.draw(v, rng)
        if x is not None:
            return x
    raise ProbeBudgetExceeded(
        f"no view-neighbor of {v!r} found within {cap} probes")


def matrix_aux_unit_size(n: int) -> int:
    """Per-vertex unit-set size in the matrix reduction: n * ceil(ln(n)^2)."""
    if n <= 1:
        return 0
    return n * math.ceil(math.log(n) ** 2)


class MatrixToListView:
    """List-oracle facade over a matrix oracle via an auxiliary graph.

    The auxiliary graph has three vertex classes, encoded arithmetically:

      * primary copies  P = [0, n)          degree n
      * secondary copies S = [n, 2n)        degree n + unit_size
      * unit sets  U_j = [2n + j*unit_size, ...)  degree 1

    For id pairs (u, v) the auxiliary graph carries the edge inside the
    copy classes when (u, v) is a base edge and across the two classes
    otherwise, so every neighbor resolution needs at most one matrix probe;
    unit-set slots and out-of-range indices resolve with zero probes.
    """

    def __init__(self, g: Graph, stats: OracleStats | None = None):
        self.g = g
        self.stats = stats
        self.n = g.n
        self.unit_size = matrix_aux_unit_size(g.n)
        self.core_size = 2 * g.n
        self.total_size = 2 * g.n + g.n * self.unit_size

    # -- vertex classes ------------------------------------------------
    def klass(self, vid: int) -> str:
        if not (0 <= vid < self.total_size):
            raise GraphValidationError(f"virtual id {vid} out of range")
        if vid < self.n:
            return "primary"
        if vid < 2 * self.n:
            return "secondary"
        return "unit"

    def unit_owner(self, vid: int) -> int:
        """Base id j such that vid lies in U_j."""
        return (vid - 2 * self.n) // self.unit_size

    def degree_of(self, vid: int) -> int:
        """Class-determined degree; zero probes."""
        k = self.klass(vid)
        if k == "primary":
            return self.n
        if k == "secondary":
            return self.n + self.unit_size
        return 1

    # -- neighbor resolution -------------------------------------------
    def neighbor(self, vid: int, i: int) -> int | None:
        """i-th neighbor of vid (0-based) or None; at most 1 matrix probe."""
        k = self.klass(vid)
        if i < 0:
            raise ValueError("probe index must be non-negative")
        if i >= self.degree_of(vid):
            return None  # degree is determined by the class: certify free
        if k == "unit":
            return self.n + self.unit_owner(vid)
        if k == "secondary" and i >= self.n:
            return 2 * self.n + (vid - self.n) * self.unit_size + (i - self.n)
        base = vid if k == "primary" else vid - self.n
        if matrix_probe(self.g, base, i, self.stats):
            return i if k == "primary" else self.n + i
        return self.n + i if k == "primary" else i

    def draw(self, vid: int, rng: Stream) -> int | None:
        d = self.degree_of(vid)
        if d == 0:
            return None
        return self.neighbor(vid, rng.next_below(d))

    def contains(self, vid: int) -> bool:
        return 0 <= vid < self.total_size


class MatrixCoreAdapter:
    """The copy classes of a `MatrixToListView` as a 2n-vertex list graph.

    Restricting secondary copies to their first n slots drops the unit
    sets, which only exist to absorb the secondary class during
    sparsification.  Degrees are class-determined (zero probes); each
    neighbor resolution costs at most one matrix probe.
    """

    def __init__(self, view: MatrixToListView):
        self.view = view
        self.n = view.core_size

    def contains(self, vid: int) -> bool:
        return 0 <= vid < self.n

    def degree(self, vid: int) -> int:
        return self.view.n

    def probe(self, vid: int, i: int) -> int | None:
        if i >= self.view.n:
            return None
        return self.view.neighbor(vid, i)

    def draw(self, vid: int, rng: Stream) -> int | None:
        if self.view.n == 0:
            return None
        return self.probe(vid, rng.next_below(self.view.n))
