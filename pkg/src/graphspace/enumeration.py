"""Exact iteration over all labeled graphs on 4..7 vertices.

Graphs are encoded as C(n,2)-bit masks: bit b set means the b-th
lexicographic vertex pair is an edge. The full pass over n = 7
(2,097,152 masks, 1,866,256 of them connected) is chunked by mask range
and can run on a worker pool; chunk results are merged in fixed order so
the outcome is identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from . import _kernels
from .generators import pair_count, vertex_pairs
from .graphs import Graph, _graph_from_canonical
from .properties import PROPERTY_NAMES, compute_property_vector

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)

_CHUNK = 1 << 15


def _check_n(n: int) -> None:
    if not 4 <= n <= 7:
        raise ValueError(f"exact enumeration supports 4 <= n <= 7, got {n}")


@dataclass(frozen=True)
class GraphCode:
    """Bit-mask encoding of one labeled graph."""

    n: int
    mask: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.mask < (1 << pair_count(self.n)):
            raise ValueError("mask out of range for this vertex count")

    def to_graph(self) -> Graph:
        return _graph_from_mask(self.n, self.mask)

    @classmethod
    def from_graph(cls, g: Graph) -> "GraphCode":
        pairs = vertex_pairs(g.n)
        index = {(int(u), int(v)): b for b, (u, v) in enumerate(pairs)}
        mask = 0
        for u, v in g.edges:
            mask |= 1 << index[(int(u), int(v))]
        return cls(g.n, mask)


def _graph_from_mask(n: int, mask: int) -> Graph:
    pairs = vertex_pairs(n)
    bits = (mask >> np.arange(pairs.shape[0])) & 1
    return _graph_from_canonical(n, pairs[bits.astype(bool)])


def enumerate_labeled(n: int, filter_connected: bool = False
                      ) -> Iterator[Graph]:
    """Yield every labeled graph on n vertices exactly once, in increasing
    mask order, optionally keeping only connected ones."""
    _check_n(n)
    pairs = vertex_pairs(n)
    pu = np.ascontiguousarray(pairs[:, 0], dtype=np.int64)
    pv = np.ascontiguousarray(pairs[:, 1], dtype=np.int64)
    total = 1 << pair_count(n)
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        if filter_connected:
            flags = _kernels.connected_mask_flags(n, pu, pv, start, stop)
            for off in np.nonzero(flags)[0]:
                yield _graph_from_mask(n, start + int(off))
        else:
            for mask in range(start, stop):
                yield _graph_from_mask(n, mask)


def connected_count(n: int) -> int:
    """Number of connected labeled graphs on n vertices (exact)."""
    _check_n(n)
    pairs = vertex_pairs(n)
    pu = np.ascontiguousarray(pairs[:, 0], dtype=np.int64)
    pv = np.ascontiguousarray(pairs[:, 1], dtype=np.int64)
    return int(_kernels.count_connected_masks(n, pu, pv, 0,
                                              1 << pair_count(n)))


def connected_probability(n: int) -> float:
    """Exact probability that an ER(n, 1/2) draw is connected."""
    return connected_count(n) / (1 << pair_count(n))


# ---------------------------------------------------------------------------
# full property scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropertySummary:
    name: str
    count: int
    mean: float
    variance: float
    minimum: float
    maximum: float
    quantiles: Tuple[Tuple[float, float], ...]


@dataclass
class LabeledSpaceScan:
    """Aggregated property vectors of all connected labeled graphs."""

    n: int
    count: int
    values: np.ndarray      # float32 (count, 12), mask order
    sums: np.ndarray        # float64 (12,)
    cross: np.ndarray       # float64 (12, 12), sum of outer products
    minima: np.ndarray
    maxima: np.ndarray

    def means(self) -> np.ndarray:
        return self.sums / self.count

    def variances(self) -> np.ndarray:
        m = self.means()
        return np.maximum(np.diag(self.cross) / self.count - m * m, 0.0)

    def property_stats(self) -> List[PropertySummary]:
        means = self.means()
        variances = self.variances()
        out = []
        for i, name in enumerate(PROPERTY_NAMES):
            col = self.values[:, i].astype(np.float64)
            qs = tuple((q, float(np.quantile(col, q))) for q in QUANTILES)
            out.append(PropertySummary(
                name=name, count=self.count, mean=float(means[i]),
                variance=float(variances[i]), minimum=float(self.minima[i]),
                maximum=float(self.maxima[i]), quantiles=qs))
        return out

    def correlation_matrix(self) -> np.ndarray:
        m = self.means()
        cov = self.cross / self.count - np.outer(m, m)
        std = np.sqrt(np.maximum(np.diag(cov), 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = cov / np.outer(std, std)
        corr[(std < 1e-15), :] = np.nan
        corr[:, (std < 1e-15)] = np.nan
        defined = ~np.isnan(corr)
        corr[defined] = np.clip(corr[defined], -1.0, 1.0)
        np.fill_diagonal(corr, np.where(std < 1e-15, np.nan, 1.0))
        return corr


def _scan_chunk(args) -> tuple:
    n, start, stop = args
    pairs = vertex_pairs(n)
    pu = np.ascontiguousarray(pairs[:, 0], dtype=np.int64)
    pv = np.ascontiguousarray(pairs[:, 1], dtype=np.int64)
    flags = _kernels.connected_mask_flags(n, pu, pv, start, stop)
    rows = []
    for off in np.nonzero(flags)[0]:
        g = _graph_from_mask(n, start + int(off))
        rows.append(compute_property_vector(g).as_array())
    if rows:
        block = np.array(rows)
    else:
        block = np.zeros((0, len(PROPERTY_NAMES)))
    return (block.shape[0], block.sum(axis=0), block.T @ block,
            block.min(axis=0, initial=np.inf),
            block.max(axis=0, initial=-np.inf),
            block.astype(np.float32))


def scan_labeled_space(n: int, workers: int = 1) -> LabeledSpaceScan:
    """Compute the property vector of every connected labeled graph on n
    vertices; deterministic for any worker count."""
    _check_n(n)
    total = 1 << pair_count(n)
    chunks = [(n, start, min(start + _CHUNK, total))
              for start in range(0, total, _CHUNK)]
    if workers > 1 and len(chunks) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            parts = pool.map(_scan_chunk, chunks)
    else:
        parts = [_scan_chunk(c) for c in chunks]

    k = len(PROPERTY_NAMES)
    count = 0
    sums = np.zeros(k)
    cross = np.zeros((k, k))
    minima = np.full(k, np.inf)
    maxima = np.full(k, -np.inf)
    blocks = []
    for c, s, x, mn, mx, vals in parts:
        count += c
        sums += s
        cross += x
        minima = np.minimum(minima, mn)
        maxima = np.maximum(maxima, mx)
        if c:
            blocks.append(vals)
    values = np.concatenate(blocks) if blocks else np.zeros((0, k), np.float32)
    return LabeledSpaceScan(n=n, count=count, values=values, sums=sums,
                            cross=cross, minima=minima, maxima=maxima)


def exact_property_stats(n: int, workers: int = 1) -> List[PropertySummary]:
    """Distribution summary of each property over all connected labeled
    graphs on n vertices."""
    return scan_labeled_space(n, workers=workers).property_stats()


def exact_correlation_matrix(n: int, workers: int = 1) -> np.ndarray:
    """Pearson correlation matrix of the twelve properties over all
    connected labeled graphs on n vertices; degenerate columns are NaN."""
    return scan_labeled_space(n, workers=workers).correlation_matrix()
