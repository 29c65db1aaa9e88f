"""Seeded random-graph generators and density-band rejection sampling.

Five generator kinds: Erdos-Renyi ("er"), stochastic block model ("sbm"),
Newman-Watts small world ("nws"), random geometric ("geometric") and
preferential attachment ("ba"). Every generator is a pure function of
(parameters, seed, stream); see rng.py for the seeding policy.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import SamplingError
from .graphs import Graph, _graph_from_canonical
from .rng import derived_stream, graph_rng

KINDS = ("er", "sbm", "nws", "geometric", "ba")


def vertex_pairs(n: int) -> np.ndarray:
    """All unordered vertex pairs in lexicographic order, shape (C(n,2), 2)."""
    iu, iv = np.triu_indices(n, k=1)
    return np.column_stack([iu, iv]).astype(np.int32)


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


# ---------------------------------------------------------------------------
# generator spec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    """Fully parameterized description of one generator configuration.

    ``params`` is kind-specific and JSON-native:
      er:        p
      sbm:       blocks (count), probs (symmetric blocks x blocks matrix)
      nws:       k (even ring degree), p_s (shortcut probability)
      geometric: radius (in (0, sqrt(2)])
      ba:        m (attachment count, 1 <= m < n)
    """

    kind: str
    n: int
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("vertex count must be positive")
        self.validate()

    def validate(self) -> None:
        p = self.params
        if self.kind == "er":
            _check_prob(p["p"], "p")
        elif self.kind == "sbm":
            blocks = int(p["blocks"])
            if blocks < 1:
                raise ValueError("sbm needs at least one block")
            probs = np.asarray(p["probs"], dtype=np.float64)
            if probs.shape != (blocks, blocks):
                raise ValueError(
                    f"sbm probability matrix must be {blocks}x{blocks}, "
                    f"got {probs.shape}")
            if np.abs(probs - probs.T).max(initial=0.0) > 1e-12:
                raise ValueError("sbm probability matrix must be symmetric")
            if probs.min(initial=0.0) < 0 or probs.max(initial=0.0) > 1:
                raise ValueError("sbm probabilities must lie in [0, 1]")
        elif self.kind == "nws":
            k = int(p["k"])
            if k % 2 != 0 or not (2 <= k < self.n):
                raise ValueError(f"nws ring degree must be even and in "
                                 f"[2, n), got k={k} for n={self.n}")
            _check_prob(p["p_s"], "p_s")
        elif self.kind == "geometric":
            r = float(p["radius"])
            if not (0 < r <= math.sqrt(2.0)):
                raise ValueError(f"radius must lie in (0, sqrt(2)], got {r}")
        elif self.kind == "ba":
            m = int(p["m"])
            if not (1 <= m < self.n):
                raise ValueError(f"ba attachment count must satisfy "
                                 f"1 <= m < n, got m={m} for n={self.n}")

    def with_params(self, **updates) -> "GeneratorSpec":
        merged = dict(self.params)
        merged.update(updates)
        return GeneratorSpec(self.kind, self.n, merged)

    def to_config(self) -> dict:
        return {"kind": self.kind, "n": self.n, "params": dict(self.params)}

    @classmethod
    def from_config(cls, cfg: Mapping) -> "GeneratorSpec":
        return cls(cfg["kind"], int(cfg["n"]), dict(cfg.get("params", {})))

    def to_json(self) -> str:
        return json.dumps(self.to_config(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        return cls.from_config(json.loads(text))


def _check_prob(value, name: str) -> None:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def equal_blocks(n: int, blocks: int) -> np.ndarray:
    """Block labels for n vertices split into near-equal contiguous blocks;
    the first n % blocks blocks get the extra vertex."""
    if blocks < 1 or blocks > n:
        raise ValueError("block count must lie in [1, n]")
    base, extra = divmod(n, blocks)
    sizes = [base + 1 if i < extra else base for i in range(blocks)]
    return np.repeat(np.arange(blocks, dtype=np.int32), sizes)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_er(n: int, p: float, seed: int, stream: int = 0) -> Graph:
    """Each of the C(n,2) pairs included independently with probability p,
    drawn in lexicographic pair order."""
    _check_prob(p, "p")
    rng = graph_rng(seed, stream)
    pairs = vertex_pairs(n)
    mask = rng.random(pairs.shape[0]) < p
    return _graph_from_canonical(n, pairs[mask])


def gen_sbm(n: int, block_assignment, probs, seed: int, stream: int = 0
            ) -> Graph:
    """Pair (u, v) with u in block i and v in block j is included with
    probability probs[i][j]. Draw order matches gen_er, so a single block
    with probs [[p]] reproduces gen_er(n, p) exactly."""
    assignment = np.asarray(block_assignment, dtype=np.int64)
    probs = np.asarray(probs, dtype=np.float64)
    if assignment.shape != (n,):
        raise ValueError(f"block assignment must have length {n}")
    blocks = probs.shape[0]
    if probs.ndim != 2 or probs.shape != (blocks, blocks):
        raise ValueError("probability matrix must be square")
    if assignment.min(initial=0) < 0 or assignment.max(initial=0) >= blocks:
        raise ValueError("block labels out of range for probability matrix")
    if np.abs(probs - probs.T).max(initial=0.0) > 1e-12:
        raise ValueError("probability matrix must be symmetric")
    if probs.min() < 0 or probs.max() > 1:
        raise ValueError("probabilities must lie in [0, 1]")
    rng = graph_rng(seed, stream)
    pairs = vertex_pairs(n)
    pvals = probs[assignment[pairs[:, 0]], assignment[pairs[:, 1]]]
    mask = rng.random(pairs.shape[0]) < pvals
    return _graph_from_canonical(n, pairs[mask])


def gen_nws(n: int, k: int, p_s: float, seed: int, stream: int = 0) -> Graph:
    """Newman-Watts small world: ring lattice joining each vertex to k/2
    neighbors on each side, then every lattice edge spawns, with
    probability p_s, a shortcut between a uniformly random currently
    non-adjacent pair. No edges are removed."""
    if k % 2 != 0 or not (2 <= k < n):
        raise ValueError(f"ring degree must be even and in [2, n), got {k}")
    _check_prob(p_s, "p_s")
    rng = graph_rng(seed, stream)
    lattice = set()
    for j in range(1, k // 2 + 1):
        for i in range(n):
            u, v = i, (i + j) % n
            lattice.add((u, v) if u < v else (v, u))
    edge_set = set(lattice)
    max_edges = pair_count(n)
    for _ in sorted(lattice):
        if rng.random() >= p_s:
            continue
        if len(edge_set) >= max_edges:
            continue  # already complete, no non-adjacent pair exists
        while True:
            u = int(rng.integers(n))
            v = int(rng.integers(n))
            if u == v:
                continue
            e = (u, v) if u < v else (v, u)
            if e not in edge_set:
                edge_set.add(e)
                break
    edges = np.array(sorted(edge_set), dtype=np.int32).reshape(-1, 2)
    return _graph_from_canonical(n, edges)


def gen_geometric(n: int, radius: float, seed: int, stream: int = 0) -> Graph:
    """n points uniform on the unit square; edge iff Euclidean distance
    <= radius."""
    radius = float(radius)
    if not (0 < radius <= math.sqrt(2.0)):
        raise ValueError(f"radius must lie in (0, sqrt(2)], got {radius}")
    rng = graph_rng(seed, stream)
    pts = rng.random((n, 2))
    pairs = vertex_pairs(n)
    diff = pts[pairs[:, 0]] - pts[pairs[:, 1]]
    mask = np.einsum("ij,ij->i", diff, diff) <= radius * radius
    return _graph_from_canonical(n, pairs[mask])


def gen_ba(n: int, m: int, seed: int, stream: int = 0) -> Graph:
    """Preferential attachment: start from m isolated vertices; each
    arriving vertex attaches m distinct edges to existing vertices chosen
    with probability proportional to current degree (uniformly when all
    existing degrees are zero). Degrees are snapshotted per arrival, so
    the final edge count is always m * (n - m)."""
    if not (1 <= m < n):
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = graph_rng(seed, stream)
    degrees = np.zeros(n, dtype=np.int64)
    edges = []
    for t in range(m, n):
        weights = degrees[:t].astype(np.float64)
        total = weights.sum()
        chosen: set = set()
        while len(chosen) < m:
            if total <= 0:
                target = int(rng.integers(t))
            else:
                r = rng.random() * total
                target = int(np.searchsorted(np.cumsum(weights), r,
                                             side="right"))
                target = min(target, t - 1)
            if target in chosen:
                continue
            chosen.add(target)
        for target in sorted(chosen):
            edges.append((target, t))
            degrees[target] += 1
            degrees[t] += 1
    edges_arr = np.array(sorted(edges), dtype=np.int32).reshape(-1, 2)
    return _graph_from_canonical(n, edges_arr)


def generate(spec: GeneratorSpec, seed: int, stream: int = 0) -> Graph:
    """Dispatch a GeneratorSpec to its generator."""
    p = spec.params
    if spec.kind == "er":
        return gen_er(spec.n, float(p["p"]), seed, stream)
    if spec.kind == "sbm":
        assignment = equal_blocks(spec.n, int(p["blocks"]))
        return gen_sbm(spec.n, assignment, p["probs"], seed, stream)
    if spec.kind == "nws":
        return gen_nws(spec.n, int(p["k"]), float(p["p_s"]), seed, stream)
    if spec.kind == "geometric":
        return gen_geometric(spec.n, float(p["radius"]), seed, stream)
    if spec.kind == "ba":
        return gen_ba(spec.n, int(p["m"]), seed, stream)
    raise ValueError(f"unknown generator kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# density targeting
# ---------------------------------------------------------------------------

def _simpson(f, lo: float, hi: float, steps: int = 2048) -> float:
    xs = np.linspace(lo, hi, steps + 1)
    fx = f(xs)
    weights = np.ones(steps + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float((hi - lo) / steps / 3.0 * np.sum(weights * fx))


def expected_geometric_density(radius: float) -> float:
    """P(|X - Y| <= radius) for X, Y uniform on the unit square.

    The per-axis absolute coordinate difference has density 2(1-t) on
    [0, 1], so the probability is a 1-d integral. Substituting
    x = r sin(theta) removes the square-root endpoint singularity and a
    fixed-grid Simpson rule is then accurate to ~1e-12 (deterministic).
    """
    r = float(radius)
    if r <= 0:
        return 0.0
    if r >= math.sqrt(2.0):
        return 1.0

    def g(theta):
        x = r * np.sin(theta)
        u = np.minimum(r * np.cos(theta), 1.0)
        return 2.0 * (1.0 - x) * (2.0 * u - u * u) * r * np.cos(theta)

    if r <= 1.0:
        return _simpson(g, 0.0, math.pi / 2.0)
    # for r > 1 the x-range is [0, 1]; below x0 = sqrt(r^2 - 1) the other
    # axis is unconstrained (u = 1), above it u = sqrt(r^2 - x^2)
    x0 = math.sqrt(r * r - 1.0)
    head = 2.0 * x0 - x0 * x0
    return head + _simpson(g, math.asin(x0 / r), math.asin(1.0 / r))


@functools.lru_cache(maxsize=None)
def _solve_geometric_radius(center: float) -> float:
    lo, hi = 1e-9, math.sqrt(2.0)
    if center >= 1.0:
        return hi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if expected_geometric_density(mid) < center:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tune_to_density(spec: GeneratorSpec, center: float) -> GeneratorSpec:
    """Retarget the free density parameter of a spec so the expected
    density is (as close as possible to) ``center``.

    er: p := center. sbm: off-diagonal entries solved from the diagonal
    so the expected overall density hits center (clipped to [0, 1]).
    nws: p_s solved from the ring density (clipped). geometric: radius
    solved from the pair-distance distribution. ba: integer m minimizing
    |m(n-m)/C(n,2) - center|.
    """
    n = spec.n
    if spec.kind == "er":
        return spec.with_params(p=center)
    if spec.kind == "sbm":
        blocks = int(spec.params["blocks"])
        probs = np.asarray(spec.params["probs"], dtype=np.float64).copy()
        sizes = np.bincount(equal_blocks(n, blocks), minlength=blocks)
        diag_pairs = sizes * (sizes - 1) // 2
        cross_pairs = pair_count(n) - diag_pairs.sum()
        if cross_pairs > 0:
            need = center * pair_count(n) - float(
                np.sum(diag_pairs * np.diag(probs)))
            q = min(1.0, max(0.0, need / cross_pairs))
            off = np.full((blocks, blocks), q)
            np.fill_diagonal(off, np.diag(probs))
            probs = off
        return spec.with_params(probs=probs.tolist())
    if spec.kind == "nws":
        k = int(spec.params["k"])
        p_s = min(1.0, max(0.0, center * (n - 1) / k - 1.0))
        return spec.with_params(p_s=p_s)
    if spec.kind == "geometric":
        return spec.with_params(radius=_solve_geometric_radius(center))
    if spec.kind == "ba":
        target = center * pair_count(n)
        disc = n * n - 4.0 * target
        if disc < 0:
            candidates = {n // 2}
        else:
            root = (n - math.sqrt(disc)) / 2.0
            candidates = {math.floor(root), math.ceil(root)}
        candidates = {min(n - 1, max(1, int(c))) for c in candidates}
        best = min(sorted(candidates),
                   key=lambda m: abs(m * (n - m) / pair_count(n) - center))
        return spec.with_params(m=best)
    raise ValueError(f"unknown generator kind {spec.kind!r}")


def sample_in_density_band(spec: GeneratorSpec, band_low: float,
                           band_high: float, max_tries: int, seed: int,
                           base_stream: int = 0) -> Graph:
    """Draw until density lands in the open band and the graph is
    connected; the free density parameter is first retargeted to the band
    center. Try i uses stream ``base_stream ^ i``.

    Raises SamplingError (carrying the attempt count) when the budget is
    exhausted.
    ."""
    if not (0.0 <= band_low < band_high <= 1.0):
        raise ValueError(f"need 0 <= low < high <= 1, got "
                         f"({band_low}, {band_high})")
    if max_tries < 1:
        raise ValueError("max_tries must be positive")
    from .graphs import is_connected  # local import avoids cycle at module load

    tuned = tune_to_density(spec, 0.5 * (band_low + band_high))
    possible = pair_count(spec.n)
    for i in range(max_tries):
        g = generate(tuned, seed, derived_stream(base_stream, i))
        density = g.m / possible if possible else 0.0
        if band_low < density < band_high and is_connected(g):
            return g
    raise SamplingError(
        f"no {spec.kind} graph with density in ({band_low}, {band_high}) "
        f"after {max_tries} tries", attempts=max_tries)
