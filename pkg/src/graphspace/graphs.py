"""Labeled undirected simple graphs: construction, traversal, isomorphism.

Vertices are dense 0-indexed integers. Two labeled graphs are equal iff
their vertex counts and edge sets coincide. Graphs are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Tuple

import numpy as np

from . import _kernels
from .errors import SizeLimitError

UNREACHABLE = np.int32(-1)

_EDGE_DTYPE = np.int32


class Graph:
    """Immutable labeled simple graph.

    ``edges`` is an (m, 2) int32 array with each row (u, v), u < v, rows
    sorted lexicographically. ``indptr``/``indices`` is the symmetric CSR
    adjacency with neighbor lists sorted ascending.
    """

    __slots__ = ("n", "edges", "indptr", "indices")

    def __init__(self, n: int, edges: np.ndarray, indptr: np.ndarray,
                 indices: np.ndarray):
        self.n = n
        self.edges = edges
        self.indptr = indptr
        self.indices = indices

    # -- basic accessors ----------------------------------------------------

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def degree_sequence(self) -> Tuple[int, ...]:
        return tuple(sorted(int(d) for d in self.degrees))

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        k = np.searchsorted(nb, v)
        return k < nb.shape[0] and nb[k] == v

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        if self.m:
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def laplacian_matrix(self) -> np.ndarray:
        a = self.adjacency_matrix()
        lap = -a
        np.fill_diagonal(lap, self.degrees.astype(np.float64))
        return lap

    def edge_set(self) -> frozenset:
        return frozenset((int(u), int(v)) for u, v in self.edges)

    # -- identity -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and self.edges.shape == other.edges.shape
                and bool(np.array_equal(self.edges, other.edges)))

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _csr_from_edges(n: int, edges: np.ndarray):
    deg = np.zeros(n, dtype=np.int64)
    if edges.shape[0]:
        np.add.at(deg, edges[:, 0], 1)
        np.add.at(deg, edges[:, 1], 1)
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(int(indptr[-1]), dtype=np.int32)
    fill = indptr[:-1].copy()
    for u, v in edges:
        indices[fill[u]] = v
        fill[u] += 1
        indices[fill[v]] = u
        fill[v] += 1
    for u in range(n):
        indices[indptr[u]:indptr[u + 1]].sort()
    return indptr, indices


def _graph_from_canonical(n: int, edges: np.ndarray) -> Graph:
    """Fast path for edges already validated, u < v, lexicographically sorted."""
    edges = np.ascontiguousarray(edges, dtype=_EDGE_DTYPE).reshape(-1, 2)
    indptr, indices = _csr_from_edges(n, edges)
    return Graph(n, edges, indptr, indices)


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Validate an edge list and build a graph.

    Rejects out-of-range vertices, self-loops and duplicate edges
    (duplicates compared as unordered pairs).
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"vertex count must be a positive integer, got {n!r}")
    pairs = []
    for e in edge_list:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        pairs.append((u, v) if u < v else (v, u))
    if len(set(pairs)) != len(pairs):
        raise ValueError("duplicate edge in edge list")
    pairs.sort()
    edges = np.array(pairs, dtype=_EDGE_DTYPE).reshape(-1, 2)
    return _graph_from_canonical(int(n), edges)


# ---------------------------------------------------------------------------
# traversal
# ---------------------------------------------------------------------------

def all_pairs_distances(g: Graph) -> np.ndarray:
    """BFS hop counts between all vertex pairs; UNREACHABLE (-1) marks
    disconnected pairs. int32, symmetric, zero diagonal."""
    return _kernels.all_pairs_bfs(g.indptr, g.indices, g.n)


def is_connected(g: Graph) -> bool:
    """True iff a BFS from vertex 0 reaches every vertex."""
    return _kernels.bfs_reach_count(g.indptr, g.indices, g.n) == g.n


# ---------------------------------------------------------------------------
# isomorphism
# ---------------------------------------------------------------------------

DEFAULT_ISO_CAP = 12


def _signatures(g: Graph):
    deg = g.degrees
    return [(int(deg[v]), tuple(sorted(int(deg[w]) for w in g.neighbors(v))))
            for v in range(g.n)]


def are_isomorphic(a: Graph, b: Graph, max_n: int = DEFAULT_ISO_CAP) -> bool:
    """Exact isomorphism test by backtracking over vertex assignments,
    pruned by (degree, neighbor-degree multiset) signatures.

    Intended for small graphs; raises SizeLimitError above ``max_n``.
    """
    if a.n != b.n or a.m != b.m:
        return False
    if a.degree_sequence() != b.degree_sequence():
        return False
    if a.n > max_n:
        raise SizeLimitError(
            f"isomorphism test capped at n={max_n}, got n={a.n}")
    if a.n == 0:
        return True

    sig_a = _signatures(a)
    sig_b = _signatures(b)
    if sorted(sig_a) != sorted(sig_b):
        return False

    # assign rarest signatures first
    rarity = {}
    for s in sig_a:
        rarity[s] = rarity.get(s, 0) + 1
    order = sorted(range(a.n), key=lambda v: (rarity[sig_a[v]], sig_a[v], v))

    n = a.n
    mapping = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=bool)

    def extend(i: int) -> bool:
        if i == n:
            return True
        va = order[i]
        for vb in range(n):
            if used[vb] or sig_b[vb] != sig_a[va]:
                continue
            ok = True
            for j in range(i):
                ua = order[j]
                if a.has_edge(va, ua) != b.has_edge(vb, int(mapping[ua])):
                    ok = False
                    break
            if ok:
                mapping[va] = vb
                used[vb] = True
                if extend(i + 1):
                    return True
                mapping[va] = -1
                used[vb] = False
        return False

    return extend(0)


# ---------------------------------------------------------------------------
# edge-list text format: first line "n m", then m lines "u v" with u < v
# ---------------------------------------------------------------------------

def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edges:
            fh.write(f"{int(u)} {int(v)}\n")


def read_edge_list(path) -> Graph:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("edge-list file must start with a line 'n m'")
        n, m = int(header[0]), int(header[1])
        pairs = []
        for _ in range(m):
            parts = fh.readline().split()
            if len(parts) != 2:
                raise ValueError("truncated edge-list file")
            u, v = int(parts[0]), int(parts[1])
            if not u < v:
                raise ValueError(f"edge lines must satisfy u < v, got {u} {v}")
            pairs.append((u, v))
    return build_graph(n, pairs)
