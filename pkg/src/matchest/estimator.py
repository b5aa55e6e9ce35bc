"""Top-level sublinear estimators for the maximum matching size.

Pipeline: sparsify to get an explicit matching M, then score two
augmentation routes and return the larger.

  route 1: |M| + (1 - 1/b) |M'| + |B1| / kbc, where M' is the lazy greedy
           matching of the residual graph (vertices unmatched in M) and B1
           a b-matching augmenting M' against the still-unmatched leftover;
  route 2: (1 - 1/b) |M| + |B2| / kbc, where B2 augments M directly.

Sampled mode estimates |M'|, |B1|, |B2| from matched-vertex indicators
with one-sided additive offsets; exact-reference mode materializes the
same objects on small graphs and uses their exact sizes, isolating the
route inequalities from sampling noise.  The general-graph mode replaces
the size formulas with matching sizes of the union subgraphs M' + B1 and
M + B2 through the local matching oracle; the multiplicative mode rescales
the sample count by the degree ratio and drops the offsets; the matrix
mode runs the pipeline over the matrix-backed auxiliary graph.

Sampling universes: vertex indicators are drawn uniformly over the view's
universe and scaled by its size.  For the duplicated views the sampler
draws from the padded universe (base x max copies) and treats out-of-range
copies as unmatched, which is unbiased without knowing the true side
split; the offset uses the padded size, which keeps the one-sided
concentration bracket intact.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import engine
from .exact import (
    B_VALUE,
    BMatching,
    Matching,
    bipartition,
    exact_max_matching,
    gmm,
    k_from_eps,
    kb_ceil,
    maximal_bmatching,
)
from .graph import Graph, OracleStats, degree_via_binary_search
from .lca import LcaConfig, UnionSubgraphOracle, estimate_mu_union
from .rng import RankCollisionError, RankFunction, Stream, derive_seed
from .sparsify import SparsifierConfig, default_sample_budget, sparsify
from .views import MatrixCoreAdapter, MatrixToListView

MODE_BIPARTITE = "bipartite-additive"
MODE_GENERAL = "general-additive"
MODE_MULTIPLICATIVE = "multiplicative"
MODE_MATRIX = "matrix"
MODES = (MODE_BIPARTITE, MODE_GENERAL, MODE_MULTIPLICATIVE, MODE_MATRIX)

# seed-derivation tags, one per independent randomness consumer
_TAG_SPARSIFY = 1
_TAG_PI1 = 2
_TAG_ENUM1 = 3
_TAG_B1 = 4
_TAG_B1_ENUM = 5
_TAG_B2 = 6
_TAG_B2_ENUM = 7
_TAG_X = 8
_TAG_Y = 9
_TAG_Z = 10
_TAG_LCA = 11
_TAG_PARALLEL = 12
_TAG_RETRY = 13


@dataclass
class EstimatorConfig:
    """Knobs of the estimation pipeline.

    k defaults to the smallest integer above 1/(b eps^3); r to
    ceil(6 ln^3 n).  The default eps keeps the duplicated-view copy counts
    small (k=4, kbc=10), which is what makes sampled runs affordable at
    desk scale; tighter eps values are meant for the exact-reference and
    two-pass paths.  `exact_reference` switches every sampled quantity to
    its materialized exact value (test mode, small graphs only).
    """

    eps: float = 0.5
    k: int | None = None
    r: int | None = None
    mode: str = MODE_BIPARTITE
    exact_reference: bool = False
    sparsify_c: int | None = None
    lca_eps: float = 0.05
    mult_sample_const: float = 6.0
    collision_retries: int = 2

    def resolved_k(self) -> int:
        return self.k if self.k is not None else k_from_eps(self.eps)

    def resolved_kbc(self) -> int:
        return kb_ceil(self.resolved_k())

    def resolved_r(self, n: int) -> int:
        if self.r is not None:
            if self.r < 1:
                raise ValueError("sample count must be at least 1")
            return self.r
        return max(1, math.ceil(6.0 * math.log(max(n, 2)) ** 3))

    def echo(self, n: int) -> dict:
        return {
            "eps": self.eps,
            "k": self.resolved_k(),
            "kb": self.resolved_kbc(),
            "r": self.resolved_r(n),
            "mode": self.mode,
            "exact_reference": self.exact_reference,
            "lca_eps": self.lca_eps,
        }


@dataclass
class EstimateSample:
    """One offset indicator-sum estimate: universe * hits / (2r) - offset."""

    hits: int
    draws: int
    universe: int
    offset: float

    @property
    def raw(self) -> float:
        if self.draws == 0:
            return 0.0
        return self.universe * self.hits / (2.0 * self.draws)

    @property
    def value(self) -> float:
        return self.raw - self.offset

    def to_dict(self) -> dict:
        return {"hits": self.hits, "draws": self.draws,
                "universe": self.universe, "offset": self.offset,
                "raw": self.raw, "value": self.value}


@dataclass
class EstimateReport:
    """Result of one estimator run; `estimate = max(mu1, mu2)` exactly."""

    estimate: float
    mu1: float
    mu2: float
    m_size: int
    mode: str
    seed: int
    config: dict
    probes: OracleStats
    samples: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    wall_time_ms: float = 0.0

    def to_dict(self, include_per_vertex: bool = False) -> dict:
        return {
            "estimate": self.estimate,
            "mu1": self.mu1,
            "mu2": self.mu2,
            "M_size": self.m_size,
            "probes": self.probes.snapshot(include_per_vertex),
            "mode": self.mode,
            "seed": self.seed,
            "config": self.config,
            "samples": self.samples,
            "extras": self.extras,
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self, include_per_vertex: bool = False) -> str:
        return json.dumps(self.to_dict(include_per_vertex))


def _offset(universe: int, n_base: int) -> float:
    """One-sided additive offset max(universe, n) / (2 ln n).

    Using the base vertex count inside the log (and as a floor on the
    numerator) keeps the offset at least as large as the sampling
    deviation at the r = 6 ln^3 n sample count, for shrunken and padded
    universes alike.
    """
    if n_base < 2:
        return 0.0
    return max(universe, n_base) / (2.0 * math.log(n_base))


def _clamp(x: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, x))


# ---------------------------------------------------------------------------
# sampled cases
# ---------------------------------------------------------------------------

def _sampled_case1(base, n_base: int, w_mask, w_ids, cfg: EstimatorConfig,
                   seed: int, stats: OracleStats, offsets: bool,
                   impl: str | None):
    """Residual-route samples: (residual matching est, its b-matching est,
    inner oracle, outer oracle)."""
    k, kbc = cfg.resolved_k(), cfg.resolved_kbc()
    r = cfg.resolved_r(n_base)
    inner = engine.make_rgmm_oracle(
        base, derive_seed(seed, _TAG_PI1), derive_seed(seed, _TAG_ENUM1),
        stats, mask=w_mask, impl=impl)
    nw = len(w_ids)
    hits_x = 0
    if nw > 0:
        xs = Stream(derive_seed(seed, _TAG_X))
        for _ in range(r):
            if inner.matched(int(w_ids[xs.next_below(nw)])):
                hits_x += 1
    sample_mp = EstimateSample(
        hits_x, r, nw, _offset(nw, n_base) if offsets else 0.0)

    outer = engine.make_bmatch_oracle(
        base, derive_seed(seed, _TAG_B1), derive_seed(seed, _TAG_B1_ENUM),
        stats, copies_a=k, copies_b=kbc, side_oracle=inner,
        universe=w_mask, impl=impl)
    n1 = nw * kbc
    hits_y = 0
    if n1 > 0:
        ys = Stream(derive_seed(seed, _TAG_Y))
        for _ in range(r):
            w = int(w_ids[ys.next_below(nw)])
            j = ys.next_below(kbc)
            if j < outer.copies(w) and outer.virtual_matched(w, j):
                hits_y += 1
    sample_b1 = EstimateSample(
        hits_y, r, n1, _offset(n1, n_base) if offsets else 0.0)
    return sample_mp, sample_b1, inner, outer


def _sampled_case2(base, n_base: int, a_mask, cfg: EstimatorConfig,
                   seed: int, stats: OracleStats, offsets: bool,
                   impl: str | None):
    """Direct-route sample: (b-matching est over matched vs unmatched,
    the oracle)."""
    k, kbc = cfg.resolved_k(), cfg.resolved_kbc()
    r = cfg.resolved_r(n_base)
    outer = engine.make_bmatch_oracle(
        base, derive_seed(seed, _TAG_B2), derive_seed(seed, _TAG_B2_ENUM),
        stats, copies_a=k, copies_b=kbc, side_array=a_mask,
        universe=None, impl=impl)
    n2 = n_base * kbc
    hits_z = 0
    if n2 > 0:
        zs = Stream(derive_seed(seed, _TAG_Z))
        for _ in range(r):
            v = zs.next_below(n_base)
            j = zs.next_below(kbc)
            if j < outer.copies(v) and outer.virtual_matched(v, j):
                hits_z += 1
    return EstimateSample(
        hits_z, r, n2, _offset(n2, n_base) if offsets else 0.0), outer


def case1_sample(g: Graph, m: Matching, cfg: EstimatorConfig, seed: int,
                 stats: OracleStats | None = None,
                 impl: str | None = None) -> tuple[float, float]:
    """Residual-route estimates (residual matching size, its b-matching size).

    Offsets included; values may be negative on small graphs -- callers
    clamp at 0.  In exact-reference mode returns the exact sizes instead.
    """
    stats = stats if stats is not None else OracleStats(g.n)
    w_mask, w_ids = _unmatched_of(g.n, m)
    if cfg.exact_reference:
        ww, _aw = _classify_edges(g.edges(), w_mask)
        m_prime, b1, _ = _exact_triplet(g.n, ww, [], m, cfg, seed,
                                        skip_b2=True)
        return float(len(m_prime)), float(b1.size)
    s_mp, s_b1, _, _ = _sampled_case1(g, g.n, w_mask, w_ids, cfg, seed,
                                      stats, offsets=True, impl=impl)
    return s_mp.value, s_b1.value


def case2_sample(g: Graph, m: Matching, cfg: EstimatorConfig, seed: int,
                 stats: OracleStats | None = None,
                 impl: str | None = None) -> float:
    """Direct-route estimate of the b-matching size against M."""
    stats = stats if stats is not None else OracleStats(g.n)
    w_mask, w_ids = _unmatched_of(g.n, m)
    if cfg.exact_reference:
        _ww, aw = _classify_edges(g.edges(), w_mask)
        _, _, b2 = _exact_triplet(g.n, [], aw, m, cfg, seed,
                                  skip_case1=True)
        return float(b2.size)
    a_mask = np.zeros(g.n, dtype=np.uint8)
    for v in m.vertices():
        a_mask[v] = 1
    sample, _ = _sampled_case2(g, g.n, a_mask, cfg, seed, stats,
                               offsets=True, impl=impl)
    return sample.value


# ---------------------------------------------------------------------------
# exact-reference pipeline
# ---------------------------------------------------------------------------

def _unmatched_of(n: int, m: Matching) -> tuple[np.ndarray, np.ndarray]:
    mask = np.ones(n, dtype=np.uint8)
    for v in m.vertices():
        mask[v] = 0
    return mask, np.flatnonzero(mask).astype(np.int64)


def _classify_edges(edges, w_mask):
    """Split edges into (both-unmatched, matched-vs-unmatched)."""
    ww, aw = [], []
    for u, v in edges:
        u_w = bool(w_mask[u])
        v_w = bool(w_mask[v])
        if u_w and v_w:
            ww.append((u, v))
        elif u_w != v_w:
            aw.append((u, v))
    return ww, aw


def _exact_triplet(n_core: int, edges_ww, edges_aw, m,
                   cfg: EstimatorConfig, seed: int,
                   skip_b2: bool = False, skip_case1: bool = False):
    """Materialized (M', B1, B2) with the run's derived rank functions."""
    k, kbc = cfg.resolved_k(), cfg.resolved_kbc()
    m_prime = Matching()
    b1 = BMatching({})
    b2 = BMatching({})
    if not skip_case1:
        residual = Graph(n_core, edges_ww)
        m_prime = gmm(residual, RankFunction(derive_seed(seed, _TAG_PI1)))
        a1 = m_prime.vertices()
        edges_b1 = [(u, v) for u, v in edges_ww if (u in a1) != (v in a1)]
        b1 = maximal_bmatching(edges_b1, a1, k, kbc,
                               RankFunction(derive_seed(seed, _TAG_B1)))
    if not skip_b2:
        b2 = maximal_bmatching(edges_aw, m.vertices(), k, kbc,
                               RankFunction(derive_seed(seed, _TAG_B2)))
    return m_prime, b1, b2


# ---------------------------------------------------------------------------
# the estimators
# ---------------------------------------------------------------------------

def _empty_report(cfg: EstimatorConfig, seed: int, n: int,
                  stats: OracleStats) -> EstimateReport:
    return EstimateReport(0.0, 0.0, 0.0, 0, cfg.mode, seed, cfg.echo(max(n, 1)),
                          stats)


def _prepare(g: Graph, cfg: EstimatorConfig, seed: int, stats: OracleStats,
             initial_matching: Matching | None, impl: str | None):
    if initial_matching is not None:
        m = initial_matching
    else:
        m, _ = sparsify(g, SparsifierConfig(c=cfg.sparsify_c),
                        derive_seed(seed, _TAG_SPARSIFY), stats=stats,
                        impl=impl)
    w_mask, w_ids = _unmatched_of(g.n, m)
    return m, w_mask, w_ids


def _combine_routes(n_half_cap: float, m_size: int, mu_mp: float,
                    mu_b1: float, mu_b2: float, kbc: int,
                    clamp: bool = True) -> tuple[float, float]:
    one = 1.0 - 1.0 / B_VALUE
    mu1 = m_size + one * max(mu_mp, 0.0) + max(mu_b1, 0.0) / kbc
    mu2 = one * m_size + max(mu_b2, 0.0) / kbc
    if clamp:
        mu1 = _clamp(mu1, 0.0, n_half_cap)
        mu2 = _clamp(mu2, 0.0, n_half_cap)
    return mu1, mu2


def _with_collision_retry(fn: Callable[[int], EstimateReport], seed: int,
                          retries: int) -> EstimateReport:
    """Re-run with a derived seed if a rank collision is ever detected."""
    attempt_seed = seed
    for attempt in range(retries + 1):
        try:
            return fn(attempt_seed)
        except RankCollisionError:
            if attempt == retries:
                raise
            attempt_seed = derive_seed(seed, _TAG_RETRY, attempt)
    raise AssertionError("unreachable")


def estimate_bipartite(g: Graph, cfg: EstimatorConfig | None = None,
                       seed: int = 0, stats: OracleStats | None = None,
                       initial_matching: Matching | None = None,
                       impl: str | None = None) -> EstimateReport:
    """Two-route estimate for bipartite graphs (additive guarantee).

    The caller asserts bipartiteness; the report flags the cheap 2-coloring
    check result in `extras["bipartite"]` without failing, since scaling
    studies deliberately run this estimator on arbitrary inputs.
    """
    cfg = cfg or EstimatorConfig()
    return _with_collision_retry(
        lambda s: _estimate_bipartite_once(g, cfg, s, stats,
                                           initial_matching, impl),
        seed, cfg.collision_retries)


def _estimate_bipartite_once(g, cfg, seed, stats, initial_matching, impl):
    t0 = time.perf_counter()
    stats = stats if stats is not None else OracleStats(g.n)
    n = g.n
    if n == 0:
        return _empty_report(cfg, seed, n, stats)
    kbc = cfg.resolved_kbc()
    m, w_mask, w_ids = _prepare(g, cfg, seed, stats, initial_matching, impl)
    if cfg.exact_reference:
        ww, aw = _classify_edges(g.edges(), w_mask)
        m_prime, b1, b2 = _exact_triplet(n, ww, aw, m, cfg, seed)
        mu_mp, mu_b1, mu_b2 = float(len(m_prime)), float(b1.size), float(b2.size)
        samples = {"mu_mp": mu_mp, "mu_b1": mu_b1, "mu_b2": mu_b2,
                   "m_prime_size": len(m_prime), "b1_size": b1.size,
                   "b2_size": b2.size}
        extras = {"exact_objects": (m, m_prime, b1, b2)}
    else:
        s_mp, s_b1, _, _ = _sampled_case1(g, n, w_mask, w_ids, cfg, seed,
                                          stats, offsets=True, impl=impl)
        s_b2, _ = _sampled_case2(g, n, 1 - w_mask, cfg, seed, stats,
                                 offsets=True, impl=impl)
        mu_mp, mu_b1, mu_b2 = s_mp.value, s_b1.value, s_b2.value
        samples = {"mu_mp": s_mp.to_dict(), "mu_b1": s_b1.to_dict(),
                   "mu_b2": s_b2.to_dict()}
        extras = {}
    mu1, mu2 = _combine_routes(n / 2.0, len(m), mu_mp, mu_b1, mu_b2, kbc)
    extras["bipartite"] = bipartition(g) is not None
    report = EstimateReport(max(mu1, mu2), mu1, mu2, len(m), cfg.mode, seed,
                            cfg.echo(n), stats, samples, extras,
                            (time.perf_counter() - t0) * 1000.0)
    return report


def estimate_general(g: Graph, cfg: EstimatorConfig | None = None,
                     seed: int = 0, stats: OracleStats | None = None,
                     initial_matching: Matching | None = None,
                     impl: str | None = None) -> EstimateReport:
    """Two-route estimate for general graphs.

    Route scores use maximum matching sizes of the union subgraphs
    (residual matching + its b-matching; M + its b-matching), obtained
    through the local matching oracle over the layer edge-oracles.
    """
    cfg = cfg or EstimatorConfig()
    if cfg.mode == MODE_BIPARTITE:
        cfg = replace(cfg, mode=MODE_GENERAL)
    return _with_collision_retry(
        lambda s: _estimate_general_once(g, cfg, s, stats, initial_matching,
                                         impl),
        seed, cfg.collision_retries)


def _estimate_general_once(g, cfg, seed, stats, initial_matching, impl):
    t0 = time.perf_counter()
    stats = stats if stats is not None else OracleStats(g.n)
    n = g.n
    if n == 0:
        return _empty_report(cfg, seed, n, stats)
    m, w_mask, w_ids = _prepare(g, cfg, seed, stats, initial_matching, impl)
    lca_cfg = LcaConfig(eps=cfg.lca_eps)
    r = cfg.resolved_r(n)
    if cfg.exact_reference:
        ww, aw = _classify_edges(g.edges(), w_mask)
        m_prime, b1, b2 = _exact_triplet(n, ww, aw, m, cfg, seed)
        h1 = Graph(n, sorted(set(m_prime.edges) | set(b1.simple_edges())))
        h2 = Graph(n, sorted(set(m.edges) | set(b2.simple_edges())))
        mu_h1 = float(len(exact_max_matching(h1)))
        mu_h2 = float(len(exact_max_matching(h2)))
        samples = {"mu_h1": mu_h1, "mu_h2": mu_h2,
                   "m_prime_size": len(m_prime), "b1_size": b1.size,
                   "b2_size": b2.size}
        extras = {"exact_objects": (m, m_prime, b1, b2)}
    else:
        k, kbc = cfg.resolved_k(), cfg.resolved_kbc()
        inner = engine.make_rgmm_oracle(
            g, derive_seed(seed, _TAG_PI1), derive_seed(seed, _TAG_ENUM1),
            stats, mask=w_mask, impl=impl)
        outer1 = engine.make_bmatch_oracle(
            g, derive_seed(seed, _TAG_B1), derive_seed(seed, _TAG_B1_ENUM),
            stats, copies_a=k, copies_b=kbc, side_oracle=inner,
            universe=w_mask, impl=impl)
        outer2 = engine.make_bmatch_oracle(
            g, derive_seed(seed, _TAG_B2), derive_seed(seed, _TAG_B2_ENUM),
            stats, copies_a=k, copies_b=kbc,
            side_array=1 - w_mask, universe=None, impl=impl)

        def m_prime_layer(v: int) -> list[int]:
            p = inner.partner_of(v)
            return [int(p)] if p >= 0 else []

        def m_layer(v: int) -> list[int]:
            p = m.partner_of(v)
            return [p] if p is not None else []

        h1 = UnionSubgraphOracle([m_prime_layer, outer1.base_partners],
                                 w_ids.tolist(), delta_bound=1 + max(k, kbc))
        h2 = UnionSubgraphOracle([m_layer, outer2.base_partners],
                                 list(range(n)), delta_bound=1 + max(k, kbc))
        mu_h1 = estimate_mu_union(h1, lca_cfg, derive_seed(seed, _TAG_LCA, 1),
                                  r, offsets=True)
        mu_h2 = estimate_mu_union(h2, lca_cfg, derive_seed(seed, _TAG_LCA, 2),
                                  r, offsets=True)
        samples = {"mu_h1": mu_h1, "mu_h2": mu_h2}
        extras = {}
    mu1 = _clamp(len(m) + max(mu_h1, 0.0), 0.0, n / 2.0)
    mu2 = _clamp(max(mu_h2, 0.0), 0.0, n / 2.0)
    report = EstimateReport(max(mu1, mu2), mu1, mu2, len(m), cfg.mode, seed,
                            cfg.echo(n), stats, samples, extras,
                            (time.perf_counter() - t0) * 1000.0)
    return report


def estimate_multiplicative(g: Graph, cfg: EstimatorConfig | None = None,
                            seed: int = 0, stats: OracleStats | None = None,
                            impl: str | None = None) -> EstimateReport:
    """Multiplicative-guarantee variant: degree-ratio-scaled sample count.

    Reads every degree by counted binary search to obtain the maximum and
    average degree, raises the sample count to
    ceil(a * (max/avg) * ln^3 n / eps^2) with a = `mult_sample_const`, and
    drops the additive offsets (estimates are unclamped scaled means).
    Returns 0 on edgeless graphs.
    """
    cfg = cfg or EstimatorConfig()
    if cfg.mode != MODE_MULTIPLICATIVE:
        cfg = replace(cfg, mode=MODE_MULTIPLICATIVE)
    return _with_collision_retry(
        lambda s: _estimate_multiplicative_once(g, cfg, s, stats, impl),
        seed, cfg.collision_retries)


def _estimate_multiplicative_once(g, cfg, seed, stats, impl):
    t0 = time.perf_counter()
    stats = stats if stats is not None else OracleStats(g.n)
    n = g.n
    if n == 0:
        return _empty_report(cfg, seed, n, stats)
    degrees = [degree_via_binary_search(g, v, stats) for v in range(n)]
    delta = max(degrees)
    dbar = sum(degrees) / n
    if delta == 0:
        report = _empty_report(cfg, seed, n, stats)
        report.extras.update({"delta": 0, "dbar": 0.0, "r_mult": 0})
        return report
    r_mult = math.ceil(cfg.mult_sample_const * (delta / dbar)
                       * math.log(max(n, 2)) ** 3 / cfg.eps ** 2)
    run_cfg = replace(cfg, r=r_mult)
    kbc = run_cfg.resolved_kbc()
    m, w_mask, w_ids = _prepare(g, run_cfg, seed, stats, None, impl)
    s_mp, s_b1, _, _ = _sampled_case1(g, n, w_mask, w_ids, run_cfg, seed,
                                      stats, offsets=False, impl=impl)
    s_b2, _ = _sampled_case2(g, n, 1 - w_mask, run_cfg, seed, stats,
                             offsets=False, impl=impl)
    mu1, mu2 = _combine_routes(n / 2.0, len(m), s_mp.value, s_b1.value,
                               s_b2.value, kbc, clamp=False)
    report = EstimateReport(max(mu1, mu2), mu1, mu2, len(m), cfg.mode, seed,
                            cfg.echo(n), stats,
                            {"mu_mp": s_mp.to_dict(), "mu_b1": s_b1.to_dict(),
                             "mu_b2": s_b2.to_dict()},
                            {"delta": delta, "dbar": dbar, "r_mult": r_mult},
                            (time.perf_counter() - t0) * 1000.0)
    return report


def _core_has_edge(g: Graph, a: int, b: int) -> bool:
    """Edge rule of the matrix-backed core graph over copy ids."""
    n = g.n
    a_primary, b_primary = a < n, b < n
    ab, bb = a if a_primary else a - n, b if b_primary else b - n
    if a_primary == b_primary:
        return ab != bb and g.has_edge(ab, bb)
    return not g.has_edge(ab, bb) if ab != bb else True


def estimate_matrix(g: Graph, cfg: EstimatorConfig | None = None,
                    seed: int = 0, stats: OracleStats | None = None,
                    impl: str | None = None) -> EstimateReport:
    """Estimate under the adjacency-matrix oracle.

    Runs the sparsifier over the matrix-backed auxiliary graph (secondary
    copies first, so they absorb into their unit sets), drops the unit
    sets, excludes the absorbed matching edges from the score, runs the
    list-model pipeline on the 2n-vertex copy graph, and subtracts the
    n / ln n correction for the secondary copies that escaped.
    """
    cfg = cfg or EstimatorConfig()
    if cfg.mode != MODE_MATRIX:
        cfg = replace(cfg, mode=MODE_MATRIX)
    return _with_collision_retry(
        lambda s: _estimate_matrix_once(g, cfg, s, stats, impl),
        seed, cfg.collision_retries)


def _estimate_matrix_once(g, cfg, seed, stats, impl):
    t0 = time.perf_counter()
    n = g.n
    stats = stats if stats is not None else OracleStats(n)
    if n == 0:
        return _empty_report(cfg, seed, n, stats)
    view = MatrixToListView(g, stats)
    core = view.core_size
    c = cfg.sparsify_c if cfg.sparsify_c is not None else default_sample_budget(n)
    partner = engine.run_sparsify_matrix(
        view, c, derive_seed(seed, _TAG_SPARSIFY), impl=impl)
    m_core = Matching((int(v), int(partner[v])) for v in range(core)
                      if 0 <= partner[v] < core and v < partner[v])
    v2_escapes = int(sum(1 for v in range(n, core) if 0 <= partner[v] < core))
    w_mask = (np.asarray(partner) < 0).astype(np.uint8)
    w_ids = np.flatnonzero(w_mask).astype(np.int64)
    kbc = cfg.resolved_kbc()
    matched_mask = 1 - w_mask

    if cfg.exact_reference:
        ww, aw = [], []
        w_set = set(w_ids.tolist())
        for x in sorted(w_set):
            for y in range(core):
                if y == x or not _core_has_edge(g, x, y):
                    continue
                if y in w_set:
                    if x < y:
                        ww.append((x, y))
                else:
                    aw.append((y, x))
        m_prime, b1, b2 = _exact_triplet(core, ww, aw,
                                         _CoreMatchedSet(partner, core),
                                         cfg, seed)
        mu_mp, mu_b1, mu_b2 = float(len(m_prime)), float(b1.size), float(b2.size)
        samples = {"mu_mp": mu_mp, "mu_b1": mu_b1, "mu_b2": mu_b2}
    else:
        adapter = MatrixCoreAdapter(view)
        run_cfg = cfg
        s_mp, s_b1, _, _ = _sampled_case1(adapter, core, w_mask, w_ids,
                                          run_cfg, seed, stats, offsets=True,
                                          impl="pure")
        s_b2, _ = _sampled_case2(adapter, core, matched_mask, run_cfg, seed,
                                 stats, offsets=True, impl="pure")
        mu_mp, mu_b1, mu_b2 = s_mp.value, s_b1.value, s_b2.value
        samples = {"mu_mp": s_mp.to_dict(), "mu_b1": s_b1.to_dict(),
                   "mu_b2": s_b2.to_dict()}
    mu1, mu2 = _combine_routes(n / 2.0, len(m_core), mu_mp, mu_b1, mu_b2, kbc,
                               clamp=False)
    correction = n / math.log(n) if n >= 2 else 0.0
    estimate = _clamp(max(mu1, mu2) - correction, 0.0, n / 2.0)
    mu1 = _clamp(mu1, 0.0, core / 2.0)
    mu2 = _clamp(mu2, 0.0, core / 2.0)
    report = EstimateReport(estimate, mu1, mu2, len(m_core), cfg.mode, seed,
                            cfg.echo(n), stats, samples,
                            {"v2_escapes": v2_escapes,
                             "unit_size": view.unit_size,
                             "correction": correction},
                            (time.perf_counter() - t0) * 1000.0)
    return report


class _CoreMatchedSet:
    """Matched-vertex set over the core partner array (duck-typed Matching)."""

    def __init__(self, partner, core: int):
        self._matched = {int(v) for v in range(core) if partner[v] >= 0}

    def vertices(self) -> set[int]:
        return self._matched


# ---------------------------------------------------------------------------
# dispatch and the parallel runner
# ---------------------------------------------------------------------------

_RUNNERS: dict[str, Callable] = {}


def estimate(g: Graph, cfg: EstimatorConfig | None = None, seed: int = 0,
             stats: OracleStats | None = None,
             impl: str | None = None) -> EstimateReport:
    """Run the estimator selected by cfg.mode."""
    cfg = cfg or EstimatorConfig()
    if cfg.mode not in _RUNNERS:
        raise ValueError(f"unknown mode {cfg.mode!r}; expected one of {MODES}")
    return _RUNNERS[cfg.mode](g, cfg, seed, stats=stats, impl=impl)


_RUNNERS[MODE_BIPARTITE] = estimate_bipartite
_RUNNERS[MODE_GENERAL] = estimate_general
_RUNNERS[MODE_MULTIPLICATIVE] = estimate_multiplicative
_RUNNERS[MODE_MATRIX] = estimate_matrix


def run_parallel_instances(g: Graph, cfg: EstimatorConfig | None = None,
                           seed: int = 0, count: int = 1,
                           impl: str | None = None) -> EstimateReport:
    """Launch independent instances with derived seeds; first one wins.

    Each instance is a complete, unbiased run with its own stats and memo
    scopes, so the result distribution matches a single instance.  Losing
    instances are abandoned (queued ones cancelled; running ones finish in
    the background).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    cfg = cfg or EstimatorConfig()
    seeds = [derive_seed(seed, _TAG_PARALLEL, i) for i in range(count)]
    if count == 1:
        return estimate(g, cfg, seeds[0], impl=impl)
    executor = ThreadPoolExecutor(max_workers=count)
    futures = [executor.submit(estimate, g, cfg, s, impl=impl) for s in seeds]
    errors: list[BaseException] = []
    pending = set(futures)
    try:
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                exc = fut.exception()
                if exc is None:
                    return fut.result()
                errors.append(exc)
        raise RuntimeError(f"all {count} instances failed: {errors!r}")
    finally:
        executor.shutdown(wait=False, cancel_futures=True)
