"""
Graph Core
Immutable simple undirected graphs in compressed adjacency form, plus the
combinatorial primitives the other modules consume: cuts, neighbourhoods,
balls, connectivity and shortest paths.

Vertices are dense 0-indexed integers. Neighbour lists are sorted, and every
tie is broken towards the lowest vertex id, so each deterministic operation
is reproducible bit-for-bit.
"""
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Tuple

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .errors import GraphError, NoPathError

logger = logging.getLogger(__name__)

VertexSet = FrozenSet[int]


class Graph:
    """
    Simple undirected graph stored as CSR arrays.

    indptr/indices follow scipy's CSR layout: the neighbours of v are
    indices[indptr[v]:indptr[v + 1]], sorted ascending.
    """

    __slots__ = ('n', 'm', 'indptr', 'indices', 'degrees', '_matrix')

    def __init__(self, n, indptr, indices):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.degrees = np.diff(self.indptr)
        self.m = int(self.degrees.sum()) // 2
        for array in (self.indptr, self.indices, self.degrees):
            array.flags.writeable = False
        self._matrix = None

    @classmethod
    def from_matrix(cls, matrix):
        """Build from a symmetric 0/1 scipy sparse matrix"""
        csr = scipy.sparse.csr_matrix(matrix)
        csr.sum_duplicates()
        csr.sort_indices()
        return cls(csr.shape[0], csr.indptr, csr.indices)

    @property
    def max_degree(self):
        return int(self.degrees.max()) if self.n else 0

    @property
    def min_degree(self):
        return int(self.degrees.min()) if self.n else 0

    def is_regular(self):
        return self.n > 0 and self.max_degree == self.min_degree

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u, v):
        row = self.neighbors(u)
        pos = np.searchsorted(row, v)
        return bool(pos < len(row) and row[pos] == v)

    def adjacency(self):
        """0/1 adjacency as a scipy CSR matrix (cached)"""
        if self._matrix is None:
            data = np.ones(len(self.indices), dtype=np.float64)
            self._matrix = scipy.sparse.csr_matrix(
                (data, self.indices, self.indptr), shape=(self.n, self.n))
        return self._matrix

    def edges(self):
        """Iterate edges as (u, v) with u < v, in lexicographic order"""
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    yield u, int(v)

    def edge_array(self):
        rows = np.repeat(np.arange(self.n), self.degrees)
        keep = rows < self.indices
        return np.column_stack((rows[keep], self.indices[keep]))

    def __repr__(self):
        return f'<Graph n={self.n} m={self.m} d={self.max_degree}>'


@dataclass(frozen=True)
class Path:
    """Ordered vertices of a simple path in some host graph"""
    vertices: Tuple[int, ...]

    @property
    def length(self):
        return len(self.vertices) - 1

    def is_valid(self, graph):
        if len(set(self.vertices)) != len(self.vertices):
            return False
        return all(graph.has_edge(u, v) for u, v in zip(self.vertices, self.vertices[1:]))


def as_vertex_set(graph, vertices: Iterable[int]) -> VertexSet:
    """Normalise an iterable of ids to a frozenset, rejecting ids outside [0, n)"""
    members = frozenset(int(v) for v in vertices)
    for v in members:
        if v < 0 or v >= graph.n:
            raise GraphError(f'vertex {v} out of range [0, {graph.n})', vertex=v)
    return members


def _index_array(members):
    return np.fromiter(sorted(members), dtype=np.int64, count=len(members))


def _mask(graph, members):
    mask = np.zeros(graph.n, dtype=bool)
    if members:
        mask[_index_array(members)] = True
    return mask


def _neighbor_entries(graph, idx):
    """Concatenated neighbour lists of idx (in order) and the row each entry came from"""
    rows = graph.adjacency()[idx]
    owners = np.repeat(np.arange(len(idx)), np.diff(rows.indptr))
    return rows.indices.astype(np.int64), owners


def build_graph(n: int, edges) -> Graph:
    """
    Build a Graph from an edge list.

    Raises GraphError naming the offending pair for an endpoint out of
    range, a self-loop or a duplicate edge.
    """
    if n < 0:
        raise GraphError(f'vertex count must be non-negative, got {n}')
    pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)

    bad = np.flatnonzero((pairs < 0).any(axis=1) | (pairs >= n).any(axis=1))
    if len(bad):
        pair = tuple(int(x) for x in pairs[bad[0]])
        raise GraphError(f'endpoint out of range [0, {n}) in edge {pair}', pair=pair)

    loops = np.flatnonzero(pairs[:, 0] == pairs[:, 1])
    if len(loops):
        pair = tuple(int(x) for x in pairs[loops[0]])
        raise GraphError(f'self-loop {pair}', pair=pair)

    canon = np.sort(pairs, axis=1)
    if len(canon) and len(np.unique(canon, axis=0)) < len(canon):
        seen = set()
        for u, v in canon.tolist():
            if (u, v) in seen:
                raise GraphError(f'duplicate edge {(u, v)}', pair=(u, v))
            seen.add((u, v))

    rows = np.concatenate((canon[:, 0], canon[:, 1]))
    cols = np.concatenate((canon[:, 1], canon[:, 0]))
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    graph = Graph(n, indptr, cols)
    logger.debug(f'Built {graph}')
    return graph


def external_neighborhood(graph, vertices) -> VertexSet:
    """N(S): vertices outside S adjacent to some vertex of S"""
    members = as_vertex_set(graph, vertices)
    if not members:
        return frozenset()
    entries, _ = _neighbor_entries(graph, _index_array(members))
    mask = _mask(graph, members)
    outside = np.unique(entries[~mask[entries]])
    return frozenset(outside.tolist())


def edge_cut(graph, vertices) -> int:
    """e(S, V \\ S)"""
    members = as_vertex_set(graph, vertices)
    if not members:
        return 0
    entries, _ = _neighbor_entries(graph, _index_array(members))
    mask = _mask(graph, members)
    return int(np.count_nonzero(~mask[entries]))


def edges_between(graph, first, second) -> int:
    """e(A, B) for disjoint A and B"""
    a = as_vertex_set(graph, first)
    b = as_vertex_set(graph, second)
    overlap = a & b
    if overlap:
        raise GraphError(f'sets overlap at vertex {min(overlap)}', vertex=min(overlap))
    if not a or not b:
        return 0
    entries, _ = _neighbor_entries(graph, _index_array(a))
    return int(np.count_nonzero(_mask(graph, b)[entries]))


def ball(graph, vertices, radius: int) -> VertexSet:
    """B(U, i): vertices within distance i of U, by breadth-first layers"""
    members = as_vertex_set(graph, vertices)
    if not members:
        raise GraphError('ball centre set is empty')
    if radius < 0:
        raise GraphError(f'radius must be non-negative, got {radius}')
    visited = _mask(graph, members)
    frontier = _index_array(members)
    for _ in range(radius):
        if not len(frontier):
            break
        entries, _ = _neighbor_entries(graph, frontier)
        frontier = np.unique(entries[~visited[entries]])
        visited[frontier] = True
    return frozenset(np.flatnonzero(visited).tolist())


def bfs_tree(graph, sources, allowed=None):
    """
    Multi-source breadth-first search.

    Returns (dist, parent) arrays with -1 for unreached vertices. A vertex's
    parent is its lowest-id neighbour in the previous layer; sources have
    parent -1. When `allowed` (a boolean mask) is given the search stays
    inside it.
    """
    dist = np.full(graph.n, -1, dtype=np.int64)
    parent = np.full(graph.n, -1, dtype=np.int64)
    frontier = np.unique(np.asarray(list(sources), dtype=np.int64))
    if allowed is not None:
        frontier = frontier[allowed[frontier]]
    dist[frontier] = 0
    layer = 0
    while len(frontier):
        layer += 1
        entries, owners = _neighbor_entries(graph, frontier)
        fresh = dist[entries] < 0
        if allowed is not None:
            fresh &= allowed[entries]
        entries, owners = entries[fresh], owners[fresh]
        # frontier is sorted, so the first occurrence has the lowest-id parent
        reached, first = np.unique(entries, return_index=True)
        dist[reached] = layer
        parent[reached] = frontier[owners[first]]
        frontier = reached
    return dist, parent


def trace_back(parent, vertex):
    """Follow parent pointers from vertex to its BFS source"""
    chain = [int(vertex)]
    while parent[chain[-1]] >= 0:
        chain.append(int(parent[chain[-1]]))
    return chain


def is_connected_set(graph, vertices) -> bool:
    """True iff G[S] is connected; the empty set counts as connected"""
    members = as_vertex_set(graph, vertices)
    if len(members) <= 1:
        return True
    allowed = _mask(graph, members)
    dist, _ = bfs_tree(graph, [min(members)], allowed=allowed)
    return bool((dist[allowed] >= 0).all())


def induced_subgraph(graph, vertices):
    """
    G[S] relabelled to 0..|S|-1.

    Returns (subgraph, labels) where labels[i] is the original id of new
    vertex i; labels is increasing, so S = V gives the identity.
    """
    members = as_vertex_set(graph, vertices)
    if not members:
        raise GraphError('cannot induce a subgraph on the empty set')
    labels = _index_array(members)
    sub = graph.adjacency()[labels][:, labels]
    return Graph.from_matrix(sub), labels


def components(graph, allowed=None):
    """Connected components (as sorted id arrays) ordered by lowest member"""
    ids = np.arange(graph.n) if allowed is None else np.flatnonzero(allowed)
    if not len(ids):
        return []
    matrix = graph.adjacency() if allowed is None else graph.adjacency()[ids][:, ids]
    count, labels = connected_components(matrix, directed=False)
    order = np.argsort(labels, kind='stable')
    bounds = np.cumsum(np.bincount(labels, minlength=count))[:-1]
    groups = np.split(ids[order], bounds)
    return sorted(groups, key=lambda group: int(group[0]))


def shortest_path_between_sets(graph, first, second) -> Path:
    """
    A minimum-length path from A to B.

    Among endpoints at minimum distance the lowest-id vertex of B is used, and
    each step back follows the lowest-id parent. Raises NoPathError when no
    vertex of B is reachable from A.
    """
    a = as_vertex_set(graph, first)
    b = as_vertex_set(graph, second)
    if not a or not b:
        raise GraphError('path endpoints must be non-empty sets')
    common = a & b
    if common:
        return Path((min(common),))
    dist, parent = bfs_tree(graph, a)
    targets = _index_array(b)
    reached = targets[dist[targets] >= 0]
    if not len(reached):
        raise NoPathError(f'no path between sets of sizes {len(a)} and {len(b)}')
    best = dist[reached].min()
    end = int(reached[dist[reached] == best].min())
    return Path(tuple(reversed(trace_back(parent, end))))


def vertex_expansion_bound(h, max_degree, size):
    """Guaranteed |N(X)| for |X| <= n/2 given h(G): h|X|/d"""
    return h * size / max_degree


def ball_growth_bound(h, max_degree, n, size, radius):
    """Guaranteed |B(U, i)|: min(n/2, |U|(1 + h/d)^i)"""
    return min(n / 2, size * (1 + h / max_degree) ** radius)


__all__ = [
    'Graph', 'Path', 'VertexSet', 'as_vertex_set', 'build_graph',
    'external_neighborhood', 'edge_cut', 'edges_between', 'ball', 'bfs_tree',
    'trace_back', 'is_connected_set', 'induced_subgraph', 'components',
    'shortest_path_between_sets', 'vertex_expansion_bound', 'ball_growth_bound',
]
