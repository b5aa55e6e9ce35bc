"""Seeded graph generators for experiments and validation.

Every family is deterministic given its spec (parameters + seed) and
returns a validated `Graph`.  The hard-dense family is the adversarial
instance for residual-degree reduction: a clique on one half plus a sparse
regular bipartite layer to the other half, so a greedy matching tends to
live inside the clique and leave a dense residual without sparsification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import Graph
from .rng import Stream, derive_seed


class InfeasibleSpecError(ValueError):
    """Generator parameters admit no valid graph."""


FAMILIES = ("random-bipartite", "erdos-renyi", "d-regular",
            "disjoint-matching", "star", "hard-dense", "path", "cycle")


@dataclass(frozen=True)
class GeneratorSpec:
    """Family name, size, seed, and family-specific parameters."""

    family: str
    n: int
    seed: int = 0
    p: float | None = None
    d: int | None = None
    eps_h: float | None = None

    def label(self) -> str:
        parts = [f"n={self.n}"]
        if self.p is not None:
            parts.append(f"p={self.p:g}")
        if self.d is not None:
            parts.append(f"d={self.d}")
        if self.eps_h is not None:
            parts.append(f"eps_h={self.eps_h:g}")
        return f"{self.family}({', '.join(parts)})"

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "GeneratorSpec":
        """Parse 'family:key=value,key=value' (e.g. 'erdos-renyi:n=100,p=0.1')."""
        family, _, rest = text.partition(":")
        family = family.strip()
        if family not in FAMILIES:
            raise InfeasibleSpecError(
                f"unknown family {family!r}; expected one of {FAMILIES}")
        kwargs: dict = {"seed": seed}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, _, value = item.partition("=")
            key = key.strip()
            if key == "n":
                kwargs["n"] = int(value)
            elif key == "seed":
                kwargs["seed"] = int(value)
            elif key == "p":
                kwargs["p"] = float(value)
            elif key == "d":
                kwargs["d"] = int(value)
            elif key == "eps_h":
                kwargs["eps_h"] = float(value)
            else:
                raise InfeasibleSpecError(f"unknown generator parameter {key!r}")
        if "n" not in kwargs:
            raise InfeasibleSpecError("generator spec needs n")
        return cls(family=family, **kwargs)


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise InfeasibleSpecError(message)


def _random_bipartite(n: int, p: float, seed: int) -> Graph:
    half = n // 2
    rng = Stream(derive_seed(seed, 0xB1))
    edges = [(a, b)
             for a in range(half)
             for b in range(half, n)
             if rng.next_unit() < p]
    return Graph(n, edges)


def _erdos_renyi(n: int, p: float, seed: int) -> Graph:
    rng = Stream(derive_seed(seed, 0xE2))
    edges = [(u, v)
             for u in range(n)
             for v in range(u + 1, n)
             if rng.next_unit() < p]
    return Graph(n, edges)


def _d_regular(n: int, d: int, seed: int) -> Graph:
    _check(0 <= d < n, "d-regular needs 0 <= d < n")
    _check(n * d % 2 == 0, "d-regular needs n*d even")
    if d == 0:
        return Graph(n, [])
    for attempt in range(500):
        rng = Stream(derive_seed(seed, 0xD3, attempt))
        stubs = [v for v in range(n) for _ in range(d)]
        for i in range(len(stubs) - 1, 0, -1):  # seeded Fisher-Yates
            j = rng.next_below(i + 1)
            stubs[i], stubs[j] = stubs[j], stubs[i]
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            if u == v or (min(u, v), max(u, v)) in edges:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if ok:
            return Graph(n, sorted(edges))
    raise InfeasibleSpecError(
        f"pairing model failed to produce a simple {d}-regular graph on {n} vertices")


def _disjoint_matching(n: int) -> Graph:
    return Graph(n, [(2 * i, 2 * i + 1) for i in range(n // 2)])


def _star(n: int) -> Graph:
    return Graph(n, [(0, v) for v in range(1, n)])


def _hard_dense(n: int, eps_h: float, seed: int) -> Graph:
    _check(n % 2 == 0, "hard-dense needs even n")
    _check(0 < eps_h <= 1, "hard-dense needs eps_h in (0, 1]")
    half = n // 2
    cross_deg = math.ceil(eps_h * half)
    _check(cross_deg <= half, "hard-dense cross degree exceeds half size")
    edges = [(a, b) for a in range(half) for b in range(a + 1, half)]
    # distinct seeded circulant shifts give a simple cross_deg-regular layer
    rng = Stream(derive_seed(seed, 0x4D))
    shifts: list[int] = []
    pool = list(range(half))
    for _ in range(cross_deg):
        i = rng.next_below(len(pool))
        shifts.append(pool.pop(i))
    for j in range(half):
        for s in shifts:
            edges.append(((j + s) % half, half + j))
    return Graph(n, edges)


def _path(n: int) -> Graph:
    return Graph(n, [(v, v + 1) for v in range(n - 1)])


def _cycle(n: int) -> Graph:
    _check(n == 0 or n >= 3, "cycle needs n >= 3")
    if n == 0:
        return Graph(0, [])
    return Graph(n, [(v, (v + 1) % n) for v in range(n)])


def generate(spec: GeneratorSpec) -> Graph:
    """Build the seeded-deterministic graph described by `spec`."""
    _check(spec.n >= 0, "n must be non-negative")
    fam = spec.family
    if fam == "random-bipartite":
        _check(spec.p is not None and 0 <= spec.p <= 1, "needs p in [0, 1]")
        return _random_bipartite(spec.n, spec.p, spec.seed)
    if fam == "erdos-renyi":
        _check(spec.p is not None and 0 <= spec.p <= 1, "needs p in [0, 1]")
        return _erdos_renyi(spec.n, spec.p, spec.seed)
    if fam == "d-regular":
        _check(spec.d is not None, "needs d")
        return _d_regular(spec.n, spec.d, spec.seed)
    if fam == "disjoint-matching":
        return _disjoint_matching(spec.n)
    if fam == "star":
        _check(spec.n >= 1, "star needs n >= 1")
        return _star(spec.n)
    if fam == "hard-dense":
        _check(spec.eps_h is not None, "needs eps_h")
        return _hard_dense(spec.n, spec.eps_h, spec.seed)
    if fam == "path":
        return _path(spec.n)
    if fam == "cycle":
        return _cycle(spec.n)
    raise InfeasibleSpecError(f"unknown family {fam!r}")
