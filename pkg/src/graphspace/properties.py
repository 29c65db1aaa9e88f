"""The twelve normalized graph properties and their assembly into vectors.

All properties are defined for connected graphs only; disconnected input
raises DisconnectedGraphError. Everything except degree assortativity is
normalized into [0, 1]:

  gcc   global clustering: 3 * triangles / connected triples
  ascc  mean square clustering (Lind et al. per-vertex ratio)
  apl   average path length over ordered pairs, divided by (n+1)/3,
        the path-graph maximum among connected graphs
  r     degree assortativity (Pearson over edge endpoints, both
        orientations); in [-1, 1], 0 with a degeneracy flag for
        regular graphs
  den   2|E| / (n(n-1))
  diam  eccentricity maximum divided by n-1
  ce    edge connectivity divided by n-1
  cc/cb/cei  Freeman centralization of closeness / betweenness /
        eigenvector scores, each divided by the same sum evaluated on
        the star graph of the same order
  rg    (n-1) / R with R = n * sum of reciprocal nonzero Laplacian
        eigenvalues
  rho   spectral radius of the adjacency matrix divided by n-1
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import _kernels
from .errors import DisconnectedGraphError
from .graphs import Graph, all_pairs_distances, build_graph
from .numerics import dominant_eigenpair, pearson, symmetric_eigen

PROPERTY_NAMES: Tuple[str, ...] = (
    "gcc", "ascc", "apl", "r", "den", "diam",
    "ce", "cc", "cb", "cei", "rg", "rho",
)

CENTRALIZATION_KINDS = ("closeness", "betweenness", "eigenvector")

_ALGEBRAIC_CONNECTIVITY_FLOOR = 1e-9


@dataclass(frozen=True)
class PropertyVector:
    """The twelve normalized property values of one graph."""

    n: int
    gcc: float
    ascc: float
    apl: float
    r: float
    den: float
    diam: float
    ce: float
    cc: float
    cb: float
    cei: float
    rg: float
    rho: float
    r_degenerate: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in PROPERTY_NAMES])

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in PROPERTY_NAMES}


@dataclass(frozen=True)
class NormalizationContext:
    """Freeman centralization denominators: the centralization sums of the
    star graph on n vertices, which attains the maximum for the scores
    used here. Evaluating the star instead of hard-coding closed forms is
    self-validating (the star itself normalizes to exactly 1) and covers
    eigenvector centralization, which has no textbook closed form."""

    n: int
    star_closeness_denominator: float
    star_betweenness_denominator: float
    star_eigenvector_denominator: float


def star_graph(n: int) -> Graph:
    return build_graph(n, [(0, i) for i in range(1, n)])


def _freeman_sum(scores: np.ndarray) -> float:
    return float(np.sum(scores.max() - scores))


def _closeness_scores(g: Graph, dist: np.ndarray) -> np.ndarray:
    return (g.n - 1) / dist.sum(axis=1, dtype=np.float64)


def _betweenness_scores(g: Graph) -> np.ndarray:
    return _kernels.betweenness_scores(g.indptr, g.indices, g.n)


def _eigenvector_scores(g: Graph) -> np.ndarray:
    _, vec = dominant_eigenpair(g.adjacency_matrix())
    return vec


@functools.lru_cache(maxsize=None)
def normalization_context(n: int) -> NormalizationContext:
    if n < 3:
        raise ValueError(f"centralization needs n >= 3, got {n}")
    star = star_graph(n)
    dist = all_pairs_distances(star)
    return NormalizationContext(
        n=n,
        star_closeness_denominator=_freeman_sum(_closeness_scores(star, dist)),
        star_betweenness_denominator=_freeman_sum(_betweenness_scores(star)),
        star_eigenvector_denominator=_freeman_sum(_eigenvector_scores(star)),
    )


def _require_connected(g: Graph, dist: np.ndarray | None = None) -> np.ndarray:
    if dist is None:
        dist = all_pairs_distances(g)
    if dist[0].min() < 0:
        raise DisconnectedGraphError(
            "properties are defined for connected graphs only")
    return dist


# ---------------------------------------------------------------------------
# individual properties
# ---------------------------------------------------------------------------

def gcc(g: Graph) -> float:
    """Global clustering coefficient; 0 when no connected triples exist."""
    if g.n < 3:
        raise ValueError("gcc needs n >= 3")
    _require_connected(g)
    return _gcc(g, g.adjacency_matrix())


def _gcc(g: Graph, adjacency: np.ndarray) -> float:
    deg = g.degrees.astype(np.int64)
    triples = int(np.sum(deg * (deg - 1) // 2))
    if triples == 0:
        return 0.0
    common = adjacency @ adjacency
    triangles = int(round(common[g.edges[:, 0], g.edges[:, 1]].sum())) // 3
    return 3.0 * triangles / triples


def ascc(g: Graph) -> float:
    """Mean square clustering over all vertices (degree < 2 or zero
    denominator contributes 0)."""
    _require_connected(g)
    adjacency = g.adjacency_matrix()
    return _ascc(g, adjacency @ adjacency)


def _ascc(g: Graph, common: np.ndarray) -> float:
    return float(_kernels.square_clustering_mean(
        g.indptr, g.indices, g.degrees.astype(np.int64), common))


def apl_norm(g: Graph) -> float:
    """Average path length over ordered pairs, divided by the path-graph
    maximum (n+1)/3."""
    if g.n < 2:
        raise ValueError("average path length needs n >= 2")
    dist = _require_connected(g)
    return _apl_norm(g.n, dist)


def _apl_raw(n: int, dist: np.ndarray) -> float:
    return float(dist.sum(dtype=np.float64) / (n * (n - 1)))


def _apl_norm(n: int, dist: np.ndarray) -> float:
    return _apl_raw(n, dist) * 3.0 / (n + 1)


def assortativity(g: Graph) -> Tuple[float, bool]:
    """Degree assortativity: Pearson correlation of endpoint degrees over
    all 2|E| ordered edge endpoints. Returns (value, degenerate); the
    value is 0 with the degeneracy flag set when the endpoint-degree
    variance is zero (regular graphs)."""
    if g.m < 1:
        raise ValueError("assortativity needs at least one edge")
    _require_connected(g)
    return _assortativity(g)


def _assortativity(g: Graph) -> Tuple[float, bool]:
    deg = g.degrees.astype(np.float64)
    x = deg[g.edges[:, 0]]
    y = deg[g.edges[:, 1]]
    r = pearson(np.concatenate([x, y]), np.concatenate([y, x]))
    if r is None:
        return 0.0, True
    return r, False


def density(g: Graph) -> float:
    if g.n < 2:
        raise ValueError("density needs n >= 2")
    _require_connected(g)
    return 2.0 * g.m / (g.n * (g.n - 1))


def diameter_norm(g: Graph) -> float:
    if g.n < 2:
        raise ValueError("diameter needs n >= 2")
    dist = _require_connected(g)
    return float(dist.max()) / (g.n - 1)


def edge_connectivity_norm(g: Graph) -> float:
    """Global edge connectivity (min over targets t != 0 of the
    unit-capacity max-flow from 0 to t), divided by n-1."""
    if g.n < 2:
        raise ValueError("edge connectivity needs n >= 2")
    _require_connected(g)
    return _kernels.edge_connectivity(g.indptr, g.indices, g.n) / (g.n - 1)


def centralization(g: Graph, kind: str) -> float:
    """Freeman centralization of the given per-vertex score, normalized by
    the same sum evaluated on the star graph of the same order."""
    if kind not in CENTRALIZATION_KINDS:
        raise ValueError(f"kind must be one of {CENTRALIZATION_KINDS}")
    if g.n < 3:
        raise ValueError("centralization needs n >= 3")
    dist = _require_connected(g)
    ctx = normalization_context(g.n)
    if kind == "closeness":
        return _freeman_sum(_closeness_scores(g, dist)) / \
            ctx.star_closeness_denominator
    if kind == "betweenness":
        return _freeman_sum(_betweenness_scores(g)) / \
            ctx.star_betweenness_denominator
    return _freeman_sum(_eigenvector_scores(g)) / \
        ctx.star_eigenvector_denominator


def effective_resistance_norm(g: Graph) -> float:
    """(n-1) / R with R = n * sum of reciprocal nonzero Laplacian
    eigenvalues (the analytically-zero smallest eigenvalue is dropped)."""
    _require_connected(g)
    w, _ = symmetric_eigen(g.laplacian_matrix())
    return _resistance_norm_from_spectrum(g.n, w)


def _resistance_norm_from_spectrum(n: int, w_desc: np.ndarray) -> float:
    if n < 2:
        raise ValueError("effective resistance needs n >= 2")
    nonzero = w_desc[:-1]
    if nonzero[-1] < _ALGEBRAIC_CONNECTIVITY_FLOOR:
        raise DisconnectedGraphError(
            "second-smallest Laplacian eigenvalue is numerically zero")
    resistance = n * float(np.sum(1.0 / nonzero))
    return (n - 1) / resistance


def spectral_radius_norm(g: Graph) -> float:
    """max |eigenvalue| of the adjacency matrix, divided by n-1."""
    if g.n < 2:
        raise ValueError("spectral radius needs n >= 2")
    _require_connected(g)
    w, _ = symmetric_eigen(g.adjacency_matrix())
    return _spectral_radius(w) / (g.n - 1)


def _spectral_radius(w_desc: np.ndarray) -> float:
    return float(max(abs(w_desc[0]), abs(w_desc[-1])))


# ---------------------------------------------------------------------------
# full vector
# ---------------------------------------------------------------------------

def compute_property_vector(g: Graph) -> PropertyVector:
    """All twelve properties of a connected graph with n >= 3.

    Shared intermediates (distance matrix, adjacency, its square) are
    computed once; the result is identical to calling each property
    function separately.
    """
    if g.n < 3:
        raise ValueError("property vectors need n >= 3")
    dist = _require_connected(g)
    n = g.n
    adjacency = g.adjacency_matrix()
    common = adjacency @ adjacency
    ctx = normalization_context(n)

    r_value, r_degenerate = _assortativity(g)
    lap_w, _ = symmetric_eigen(g.laplacian_matrix())
    adj_w, _ = symmetric_eigen(adjacency)

    return PropertyVector(
        n=n,
        gcc=_gcc(g, adjacency),
        ascc=_ascc(g, common),
        apl=_apl_norm(n, dist),
        r=r_value,
        den=2.0 * g.m / (n * (n - 1)),
        diam=float(dist.max()) / (n - 1),
        ce=_kernels.edge_connectivity(g.indptr, g.indices, n) / (n - 1),
        cc=_freeman_sum(_closeness_scores(g, dist)) /
        ctx.star_closeness_denominator,
        cb=_freeman_sum(_betweenness_scores(g)) /
        ctx.star_betweenness_denominator,
        cei=_freeman_sum(_eigenvector_scores(g)) /
        ctx.star_eigenvector_denominator,
        rg=_resistance_norm_from_spectrum(n, lap_w),
        rho=_spectral_radius(adj_w) / (n - 1),
        r_degenerate=r_degenerate,
    )
