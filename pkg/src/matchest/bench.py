"""Experiment runner, query-scaling studies, and the kernel benchmark.

Probe counts are the primary metric everywhere: they are deterministic
given seeds and immune to machine noise.  Wall time is recorded in the CSV
but never asserted, and can be omitted entirely to make re-runs
byte-identical.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .estimator import (
    MODE_BIPARTITE,
    MODE_GENERAL,
    MODE_MATRIX,
    MODE_MULTIPLICATIVE,
    EstimatorConfig,
    estimate,
)
from .exact import bipartition, exact_max_matching, two_pass_streaming
from .generators import GeneratorSpec, generate
from .graph import Graph, OracleStats, list_probe
from .rng import derive_seed
from .sparsify import SparsifierConfig, sparsify

CSV_HEADER = ["family", "n", "seed", "mode", "trial", "estimate", "exact_mu",
              "ratio", "list_probes", "matrix_probes", "wall_time_ms",
              "status", "error"]

CLI_MODES = {
    "bipartite": MODE_BIPARTITE,
    "general": MODE_GENERAL,
    "multiplicative": MODE_MULTIPLICATIVE,
    "matrix": MODE_MATRIX,
    "twopass": "twopass",
    "exact": "exact",
}

DEFAULT_EXACT_CAP_BIPARTITE = 5000
DEFAULT_EXACT_CAP_GENERAL = 2000


@dataclass
class ExperimentRow:
    """One (spec, mode, trial) measurement."""

    family: str
    n: int
    seed: int
    mode: str
    trial: int
    estimate: float | None = None
    exact_mu: int | None = None
    ratio: float | None = None
    list_probes: int = 0
    matrix_probes: int = 0
    wall_time_ms: float = 0.0
    status: str = "ok"
    error: str = ""

    def as_csv(self, include_timing: bool = True) -> list:
        return [
            self.family, self.n, self.seed, self.mode, self.trial,
            "" if self.estimate is None else f"{self.estimate:.6f}",
            "" if self.exact_mu is None else self.exact_mu,
            "" if self.ratio is None else f"{self.ratio:.6f}",
            self.list_probes, self.matrix_probes,
            f"{self.wall_time_ms:.3f}" if include_timing else "",
            self.status, self.error,
        ]


def _run_one(g: Graph, mode_key: str, cfg: EstimatorConfig, seed: int):
    """(estimate, stats, wall_ms) for one mode run."""
    t0 = time.perf_counter()
    if mode_key == "twopass":
        stats = OracleStats(g.n)
        value = two_pass_streaming(g.edges(), g.n, cfg.eps, k=cfg.k)
        return float(value), stats, (time.perf_counter() - t0) * 1000.0
    if mode_key == "exact":
        stats = OracleStats(g.n)
        value = float(len(exact_max_matching(g)))
        return value, stats, (time.perf_counter() - t0) * 1000.0
    from dataclasses import replace
    report = estimate(g, replace(cfg, mode=CLI_MODES[mode_key]), seed)
    return report.estimate, report.probes, report.wall_time_ms


def run_experiment(specs, modes, trials: int, out_path=None,
                   cfg: EstimatorConfig | None = None,
                   exact_cap_bipartite: int = DEFAULT_EXACT_CAP_BIPARTITE,
                   exact_cap_general: int = DEFAULT_EXACT_CAP_GENERAL,
                   include_timing: bool = True) -> list[ExperimentRow]:
    """One row per (spec, mode, trial); optionally written as RFC-4180 CSV.

    The exact optimum is computed when n is at or below the per-kind cap
    and joins each row as `exact_mu` with `ratio = estimate / exact_mu`.
    Per-row failures are recorded and the run continues.  With
    `include_timing=False`, re-running with the same seeds produces a
    byte-identical file.
    """
    cfg = cfg or EstimatorConfig()
    rows: list[ExperimentRow] = []
    for spec in specs:
        g = generate(spec)
        is_bip = bipartition(g) is not None
        cap = exact_cap_bipartite if is_bip else exact_cap_general
        exact_mu = len(exact_max_matching(g)) if g.n <= cap else None
        for mode_key in modes:
            if mode_key not in CLI_MODES:
                raise ValueError(f"unknown mode {mode_key!r}")
            mode_index = sorted(CLI_MODES).index(mode_key)
            for trial in range(trials):
                seed = derive_seed(spec.seed, mode_index, trial)
                row = ExperimentRow(spec.family, spec.n, spec.seed,
                                    mode_key, trial)
                try:
                    est, stats, wall = _run_one(g, mode_key, cfg, seed)
                    row.estimate = est
                    row.exact_mu = exact_mu
                    if exact_mu:
                        row.ratio = est / exact_mu
                    row.list_probes = stats.list_probes_total
                    row.matrix_probes = stats.matrix_probes_total
                    row.wall_time_ms = wall
                except Exception as exc:  # per-row failures recorded
                    row.status = "error"
                    row.error = f"{type(exc).__name__}: {exc}"
                rows.append(row)
    if out_path is not None:
        write_rows_csv(rows, out_path, include_timing=include_timing)
    return rows


def write_rows_csv(rows, out_path, include_timing: bool = True) -> None:
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_csv(include_timing))


# ---------------------------------------------------------------------------
# query-scaling studies
# ---------------------------------------------------------------------------

SCALING_ALGORITHMS = ("estimator", "sparsify", "dummy")


@dataclass
class SlopeReport:
    """Least-squares fit of log(total list probes) against log(n)."""

    family: str
    algorithm: str
    slope: float
    intercept: float
    points: list[tuple[int, float]]
    residuals: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"family": self.family, "algorithm": self.algorithm,
                "slope": self.slope, "intercept": self.intercept,
                "points": self.points, "residuals": self.residuals}


def _scaling_spec(family: str, n: int, seed: int) -> GeneratorSpec:
    """Size-parameterized spec for scaling runs (sparse regime)."""
    if family == "erdos-renyi":
        return GeneratorSpec(family, n, seed, p=min(1.0, 8.0 / max(n, 1)))
    if family == "random-bipartite":
        return GeneratorSpec(family, n, seed, p=min(1.0, 8.0 / max(n, 1)))
    if family == "d-regular":
        return GeneratorSpec(family, n, seed, d=6)
    if family == "hard-dense":
        return GeneratorSpec(family, n, seed, eps_h=0.1)
    if family in ("disjoint-matching", "star", "path", "cycle"):
        return GeneratorSpec(family, n, seed)
    raise ValueError(f"no scaling parameterization for family {family!r}")


def _probes_for(g: Graph, algorithm: str, cfg: EstimatorConfig,
                seed: int) -> int:
    if algorithm == "estimator":
        report = estimate(g, cfg, seed)
        return report.probes.list_probes_total
    if algorithm == "sparsify":
        _, stats = sparsify(g, SparsifierConfig(c=cfg.sparsify_c), seed)
        return stats.list_probes_total
    if algorithm == "dummy":
        # constant-probe calibration control
        stats = OracleStats(g.n)
        for i in range(100):
            list_probe(g, 0, i, stats)
        return stats.list_probes_total
    raise ValueError(f"unknown scaling algorithm {algorithm!r}")


def scaling_study(family: str, sizes, trials: int,
                  algorithm: str = "estimator",
                  cfg: EstimatorConfig | None = None, base_seed: int = 0,
                  csv_out=None) -> SlopeReport:
    """Fit the probe-growth exponent over strictly increasing sizes.

    Uses per-size medians over `trials` seeded runs and ordinary least
    squares on the log-log points.  At least 4 sizes are required.
    """
    sizes = list(sizes)
    if len(sizes) < 4:
        raise ValueError("scaling study needs at least 4 sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    if algorithm not in SCALING_ALGORITHMS:
        raise ValueError(f"unknown scaling algorithm {algorithm!r}")
    cfg = cfg or EstimatorConfig(mode=MODE_BIPARTITE)
    points: list[tuple[int, float]] = []
    for n in sizes:
        runs = []
        for trial in range(trials):
            spec = _scaling_spec(family, n, derive_seed(base_seed, n, trial))
            g = generate(spec)
            runs.append(_probes_for(g, algorithm, cfg,
                                    derive_seed(base_seed, n, trial, 7)))
        points.append((n, float(statistics.median(runs))))
    xs = np.log([p[0] for p in points])
    ys = np.log([max(p[1], 1.0) for p in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    residuals = list(ys - (slope * xs + intercept))
    report = SlopeReport(family, algorithm, float(slope), float(intercept),
                         points, [float(r) for r in residuals])
    if csv_out is not None:
        with open(csv_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "median_list_probes"])
            for n, med in points:
                writer.writerow([n, f"{med:.1f}"])
            writer.writerow([])
            writer.writerow(["slope", f"{report.slope:.4f}"])
    return report


# ---------------------------------------------------------------------------
# kernel benchmark (compiled vs pure)
# ---------------------------------------------------------------------------

def kernel_benchmark(sizes, trials: int = 3, base_seed: int = 0) -> list[dict]:
    """Median wall time of both kernel implementations on the same work.

    Phases: the sparsifier and a batch of lazy-matching oracle queries.
    Returns one record per (phase, n) with pure/compiled times and the
    speedup; compiled entries are None when the extension is unavailable.
    """
    from ._kernel import compiled_available
    from .engine import make_rgmm_oracle, run_sparsify

    impls = ["pure"] + (["compiled"] if compiled_available() else [])
    records = []
    for n in sizes:
        spec = GeneratorSpec("erdos-renyi", n, base_seed,
                             p=min(1.0, 8.0 / max(n, 1)))
        g = generate(spec)
        order = np.arange(n, dtype=np.int64)
        c = SparsifierConfig().resolved_c(n)
        record: dict = {"phase": "sparsify", "n": n}
        for impl in impls:
            times = []
            for t in range(trials):
                stats = OracleStats(n)
                t0 = time.perf_counter()
                run_sparsify(g, order, c, derive_seed(base_seed, n, t), stats,
                             impl=impl)
                times.append(time.perf_counter() - t0)
            record[impl] = statistics.median(times)
        records.append(record)
        record = {"phase": "oracle", "n": n}
        queries = max(1, n // 4)
        for impl in impls:
            times = []
            for t in range(trials):
                stats = OracleStats(n)
                seed = derive_seed(base_seed, n, t, 11)
                oracle = make_rgmm_oracle(g, seed, derive_seed(seed, 1), stats,
                                          impl=impl)
                t0 = time.perf_counter()
                for q in range(queries):
                    oracle.matched(q % n)
                times.append(time.perf_counter() - t0)
            record[impl] = statistics.median(times)
        records.append(record)
    for record in records:
        if "compiled" in record and record.get("pure"):
            record["speedup"] = record["pure"] / max(record["compiled"], 1e-12)
    return records
