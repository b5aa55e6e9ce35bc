"""Dispatch layer between algorithm code and the query kernels.

Algorithms ask for an oracle or a sparsifier run; this module picks the
compiled CSR kernel when the input is a plain `Graph` and the extension is
available, and the pure adapter-based kernel otherwise (always for
matrix-backed graphs).  `impl="pure"` / `impl="compiled"` force a side,
which the parity tests and the kernel benchmark rely on.

Every kernel object owns a private adapter, so the counted degree lookup
of a vertex is charged once per kernel object, identically on both sides.
"""

from __future__ import annotations

import numpy as np

from ._kernel import _pykern, compiled_available, compiled_module
from .graph import Graph, OracleStats
from .views import ListOracleView, MatrixCoreAdapter, MatrixToListView

tau_log_for = _pykern.tau_log_for


def _resolve_impl(impl: str | None, csr_capable: bool) -> str:
    if impl is None:
        return "compiled" if (csr_capable and compiled_available()) else "pure"
    if impl not in ("pure", "compiled"):
        raise ValueError(f"unknown kernel impl {impl!r}")
    if impl == "compiled" and not compiled_available():
        raise RuntimeError("compiled kernel requested but not available")
    if impl == "compiled" and not csr_capable:
        raise RuntimeError("compiled kernel only supports plain graphs")
    return impl


def _as_mask(mask, n: int):
    if mask is None:
        return None
    arr = np.asarray(mask, dtype=np.uint8)
    if arr.shape != (n,):
        raise ValueError("mask length must equal the base vertex count")
    return arr


def run_sparsify(g: Graph, order, c: int, seed: int, stats: OracleStats,
                 impl: str | None = None) -> np.ndarray:
    """Sparsifier over the list oracle; returns the partner array."""
    order = np.asarray(order, dtype=np.int64)
    which = _resolve_impl(impl, csr_capable=True)
    if which == "compiled":
        indptr, indices, _ = g.csr()
        return compiled_module().sparsify_list(
            indptr, indices, order, c, seed,
            stats.per_vertex_list_probes, stats.totals)
    adapter = ListOracleView(g, stats)
    return np.asarray(
        _pykern.sparsify_list(adapter, order, c, seed), dtype=np.int64)


def run_sparsify_matrix(view: MatrixToListView, c: int, seed: int,
                        impl: str | None = None) -> np.ndarray:
    """Sparsifier over the matrix-backed auxiliary graph (copy classes)."""
    which = _resolve_impl(impl, csr_capable=True)
    if which == "compiled":
        indptr, _, srt = view.g.csr()
        stats = view.stats if view.stats is not None else OracleStats(view.g.n)
        return compiled_module().sparsify_matrix(
            indptr, srt, view.n, view.unit_size, c, seed, stats.totals)
    return np.asarray(
        _pykern.sparsify_matrix(view, c, seed), dtype=np.int64)


def make_rgmm_oracle(base, seed_rank: int, seed_enum: int, stats: OracleStats,
                     mask=None, tau_log: int | None = None,
                     impl: str | None = None):
    """Lazy greedy-matching oracle over `base` (a Graph or an adapter).

    `mask` restricts the view to the induced subgraph of mask-true
    vertices; None means the plain graph (exact enumeration).
    """
    is_graph = isinstance(base, Graph)
    n = base.n
    mask_arr = _as_mask(mask, n)
    if tau_log is None:
        tau_log = tau_log_for(n)
    which = _resolve_impl(impl, csr_capable=is_graph)
    if which == "compiled":
        indptr, indices, _ = base.csr()
        return compiled_module().RgmmOracle(
            indptr, indices, seed_rank, seed_enum,
            stats.per_vertex_list_probes, stats.per_vertex_visits,
            stats.totals, mask=mask_arr, tau_log=tau_log)
    adapter = ListOracleView(base, stats) if is_graph else base
    return _pykern.RgmmOracle(adapter, seed_rank, seed_enum, stats,
                              mask=mask_arr, tau_log=tau_log)


def make_bmatch_oracle(base, seed_rank: int, seed_enum: int,
                       stats: OracleStats, copies_a: int, copies_b: int,
                       side_array=None, side_oracle=None, universe=None,
                       tau_log: int | None = None, impl: str | None = None):
    """Lazy b-matching oracle over the capacity-duplicated view of `base`.

    When sides come from a nested oracle (`side_oracle`), both oracles must
    live on the same implementation side; the factory enforces this by
    dispatching on the type of `side_oracle` if one is given.
    """
    is_graph = isinstance(base, Graph)
    n = base.n
    if tau_log is None:
        tau_log = tau_log_for(n)
    side_arr = None
    if side_array is not None:
        side_arr = np.asarray(side_array, dtype=np.uint8)
    universe_arr = _as_mask(universe, n)
    if side_oracle is not None:
        compiled = compiled_module()
        oracle_is_compiled = compiled is not None and isinstance(
            side_oracle, compiled.RgmmOracle)
        which = _resolve_impl(
            impl, csr_capable=is_graph and oracle_is_compiled)
        if which == "compiled" and not oracle_is_compiled:
            raise RuntimeError("compiled b-matching oracle needs a compiled inner oracle")
    else:
        which = _resolve_impl(impl, csr_capable=is_graph)
    if which == "compiled":
        indptr, indices, _ = base.csr()
        return compiled_module().BMatchOracle(
            indptr, indices, seed_rank, seed_enum,
            stats.per_vertex_list_probes, stats.per_vertex_visits,
            stats.totals, copies_a, copies_b,
            side_array=side_arr, side_oracle=side_oracle,
            universe=universe_arr, tau_log=tau_log)
    adapter = ListOracleView(base, stats) if is_graph else base
    return _pykern.BMatchOracle(adapter, seed_rank, seed_enum, stats,
                                copies_a, copies_b,
                                side_array=side_arr, side_oracle=side_oracle,
                                universe=universe_arr, tau_log=tau_log)


def matrix_core_adapter(view: MatrixToListView) -> MatrixCoreAdapter:
    return MatrixCoreAdapter(view)
