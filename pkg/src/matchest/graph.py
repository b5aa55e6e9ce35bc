"""Graph storage and the two query oracles with exact probe accounting.

A `Graph` is an immutable simple undirected graph over vertices 0..n-1.
Algorithms never touch the adjacency directly; they go through `list_probe`
(adjacency-list oracle: i-th neighbor of v, or None) and `matrix_probe`
(adjacency-matrix oracle: edge existence), both of which charge an
`OracleStats` instance.  Probe counts are the cost measure of this package;
wall time is reported but never asserted.
"""

from __future__ import annotations

import json
from typing import IO, Iterable, Iterator

import numpy as np


class GraphParseError(ValueError):
    """Malformed edge-list text."""


class GraphValidationError(ValueError):
    """Structurally invalid input: self-loop, bad id, or duplicate edge."""


class ProbeBudgetExceeded(RuntimeError):
    """A rejection-sampling loop hit its probe cap.

    Signals a violated precondition (e.g. sampling a random view-neighbor
    of a vertex that has none) rather than silent non-termination.
    """


class OracleStats:
    """Per-vertex and global counters of list probes, matrix probes, visits.

    One instance is created per algorithm run.  Counters only grow.  Within
    a run, a single thread owns the instance; concurrent runs each own their
    own and may be combined afterwards with `merge` (per-counter addition is
    linearizable under the GIL).  Snapshots taken mid-run are eventually
    consistent; after the run's final oracle call they are exact.

    Totals live in a 2-cell array so the compiled kernel can increment them
    in place: cell 0 holds list probes, cell 1 matrix probes.
    """

    __slots__ = ("n", "totals", "per_vertex_list_probes", "per_vertex_visits")

    def __init__(self, n: int):
        self.n = n
        self.totals = np.zeros(2, dtype=np.int64)
        self.per_vertex_list_probes = np.zeros(n, dtype=np.int64)
        self.per_vertex_visits = np.zeros(n, dtype=np.int64)

    @property
    def list_probes_total(self) -> int:
        return int(self.totals[0])

    @property
    def matrix_probes_total(self) -> int:
        return int(self.totals[1])

    def count_list_probe(self, v: int, amount: int = 1) -> None:
        self.totals[0] += amount
        self.per_vertex_list_probes[v] += amount

    def count_matrix_probe(self, amount: int = 1) -> None:
        self.totals[1] += amount

    def count_visit(self, v: int, amount: int = 1) -> None:
        self.per_vertex_visits[v] += amount

    def probes(self) -> int:
        """Combined list + matrix probe count."""
        return int(self.totals[0] + self.totals[1])

    def merge(self, other: "OracleStats") -> None:
        if other.n != self.n:
            raise ValueError("cannot merge stats over different vertex counts")
        self.totals += other.totals
        self.per_vertex_list_probes += other.per_vertex_list_probes
        self.per_vertex_visits += other.per_vertex_visits

    def snapshot(self, include_per_vertex: bool = True) -> dict:
        """JSON-serializable snapshot: {list_probes, matrix_probes, per_vertex}."""
        snap = {
            "list_probes": int(self.list_probes_total),
            "matrix_probes": int(self.matrix_probes_total),
        }
        if include_per_vertex:
            snap["per_vertex"] = [
                {"vertex": v,
                 "list_probes": int(self.per_vertex_list_probes[v]),
                 "visits": int(self.per_vertex_visits[v])}
                for v in range(self.n)
            ]
        return snap

    def to_json(self, include_per_vertex: bool = True) -> str:
        return json.dumps(self.snapshot(include_per_vertex))


class Graph:
    """Immutable vertex/edge store with ordered adjacency lists.

    Invariants (enforced on construction):
      * adjacency is symmetric: u in adj[v] iff v in adj[u];
      * no self-loops, no duplicate neighbors;
      * sum of degrees equals 2m.

    The list oracle exposes neighbors in stored order; a sorted copy backs
    the matrix oracle's membership test.  Instances are safe for concurrent
    readers.
    """

    __slots__ = ("n", "m", "adjacency", "_indptr", "_indices", "_sorted_indices")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        adjacency: list[list[int]] = [[] for _ in range(n)]
        seen: set[int] = set()
        m = 0
        for u, v in edges:
            self._check_vertex(u, n)
            self._check_vertex(v, n)
            if u == v:
                raise GraphValidationError(f"self-loop at vertex {u}")
            key = (min(u, v) << 32) | max(u, v)
            if key in seen:
                raise GraphValidationError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            adjacency[u].append(v)
            adjacency[v].append(u)
            m += 1
        self.n = n
        self.m = m
        self.adjacency = adjacency
        indptr = np.zeros(n + 1, dtype=np.int64)
        for v in range(n):
            indptr[v + 1] = indptr[v] + len(adjacency[v])
        indices = np.empty(2 * m, dtype=np.int64)
        for v in range(n):
            indices[indptr[v]:indptr[v + 1]] = adjacency[v]
        self._indptr = indptr
        self._indices = indices
        srt = indices.copy()
        for v in range(n):
            srt[indptr[v]:indptr[v + 1]].sort()
        self._sorted_indices = srt

    @staticmethod
    def _check_vertex(v: int, n: int) -> None:
        if not (0 <= v < n):
            raise GraphValidationError(f"vertex id {v} out of range [0, {n})")

    def degree(self, v: int) -> int:
        """Stored degree; free of probe cost (validation/reference use only)."""
        self._check_vertex(v, self.n)
        return len(self.adjacency[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        """All edges as (u, v) with u < v, in adjacency order."""
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u, self.n)
        self._check_vertex(v, self.n)
        lo, hi = self._indptr[u], self._indptr[u + 1]
        i = int(np.searchsorted(self._sorted_indices[lo:hi], v))
        return i < hi - lo and self._sorted_indices[lo + i] == v

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, indices, sorted_indices) arrays backing the kernels."""
        return self._indptr, self._indices, self._sorted_indices

    def average_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Graph(n={self.n}, m={self.m})"


def list_probe(g: Graph, v: int, i: int, stats: OracleStats | None = None) -> int | None:
    """Adjacency-list oracle: i-th neighbor of v or None if i >= degree(v).

    Every call, including out-of-range ones, increments the list-probe
    counters by exactly 1.
    """
    Graph._check_vertex(v, g.n)
    if i < 0:
        raise ValueError("probe index must be non-negative")
    if stats is not None:
        stats.count_list_probe(v)
    adj = g.adjacency[v]
    return adj[i] if i < len(adj) else None


def matrix_probe(g: Graph, u: int, v: int, stats: OracleStats | None = None) -> bool:
    """Adjacency-matrix oracle: does the edge (u, v) exist?  Costs 1 probe."""
    Graph._check_vertex(u, g.n)
    Graph._check_vertex(v, g.n)
    if stats is not None:
        stats.count_matrix_probe()
    return u != v and g.has_edge(u, v)


def degree_via_binary_search(g: Graph, v: int, stats: OracleStats | None = None) -> int:
    """Exact degree of v using O(log n) list probes.

    Uses the oracle invariant probe(v, i) is non-None iff degree(v) > i to
    binary-search the first None over [0, n].  Probe count is at most
    ceil(log2(n + 1)) <= ceil(log2 n) + 1.
    """
    lo, hi = 0, g.n  # degree lies in [lo, hi]
    while lo < hi:
        mid = (lo + hi) // 2
        if list_probe(g, v, mid, stats) is None:
            hi = mid
        else:
            lo = mid + 1
    return lo


def load_graph(source: str | IO[str]) -> Graph:
    """Parse the canonical edge-list text format.

    Format: a header line "n m" followed by m lines "u v" with
    0 <= u, v < n and u != v.  Blank lines are ignored.  Duplicate edges,
    self-loops and out-of-range ids are rejected.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = source
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise GraphParseError("empty input: missing 'n m' header")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphParseError(f"bad header {lines[0]!r}: expected 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphParseError(f"bad header {lines[0]!r}: {exc}") from None
    if n < 0 or m < 0:
        raise GraphParseError("header counts must be non-negative")
    if len(lines) - 1 != m:
        raise GraphParseError(f"header promises {m} edges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphParseError(f"bad edge line {ln!r}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphParseError(f"bad edge line {ln!r}: {exc}") from None
        edges.append((u, v))
    return Graph(n, edges)


def dump_graph(g: Graph) -> str:
    """Serialize to the same edge-list format `load_graph` reads."""
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(out) + "\n"
