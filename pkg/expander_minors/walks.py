"""
Lazy Random Walks
Transition and stationary sampling on reproducible RNG streams, walk traces,
the closed-form miss and stay bounds, and the connected covering-set
constructor the minor engine uses to tie new branch sets to old ones.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .config import Config
from .errors import CoveringFailure, DisconnectedGraphError, EdgelessGraphError, GraphError, IsolatedVertexError
from .graph_core import as_vertex_set, bfs_tree, trace_back

logger = logging.getLogger(__name__)

STATIONARY = 'stationary'


@dataclass
class RngStream:
    """
    Stateful PCG64 stream keyed by (seed, stream, path).

    Two streams built from the same key produce identical draws; derive()
    gives an independent child stream, e.g. one per covering retry.
    """
    seed: int
    stream: int = 0
    path: Tuple[int, ...] = ()
    _generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *self.path))
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def derive(self, index: int) -> 'RngStream':
        return RngStream(self.seed, self.stream, self.path + (int(index),))


@dataclass
class WalkTrace:
    vertices: List[int]

    @property
    def visited(self):
        return frozenset(self.vertices)

    @property
    def steps(self):
        return len(self.vertices) - 1

    def is_valid(self, graph):
        return all(a == b or graph.has_edge(a, b) for a, b in zip(self.vertices, self.vertices[1:]))


def lazy_step(graph, v, rng: RngStream) -> int:
    """Stay with probability 1/2, else move to a uniform neighbour"""
    deg = int(graph.degrees[v])
    if deg == 0:
        raise IsolatedVertexError(v)
    gen = rng.generator
    if gen.random() < 0.5:
        return int(v)
    return int(graph.neighbors(v)[int(gen.random() * deg)])


def _stationary_table(graph):
    if graph.m == 0:
        raise EdgelessGraphError('stationary sampling needs at least one edge')
    return np.cumsum(graph.degrees)


def sample_stationary(graph, rng: RngStream, table=None) -> int:
    """Vertex drawn with probability deg(v)/2m"""
    table = _stationary_table(graph) if table is None else table
    return int(np.searchsorted(table, rng.generator.random() * table[-1], side='right'))


def run_walk(graph, steps, rng: RngStream, start=STATIONARY) -> WalkTrace:
    """
    Lazy walk of `steps` steps from `start` (a vertex, or 'stationary').

    Coins and neighbour choices are drawn in bulk after the start vertex, so a
    trace depends only on the stream and the step count.
    """
    if steps < 0:
        raise GraphError(f'step count must be non-negative, got {steps}')
    if start == STATIONARY:
        v = sample_stationary(graph, rng)
    else:
        v = int(start)
        if not 0 <= v < graph.n:
            raise GraphError(f'start vertex {v} out of range', vertex=v)
    if steps and graph.degrees[v] == 0:
        raise IsolatedVertexError(v)
    coins = rng.generator.random(steps) < 0.5
    picks = rng.generator.random(steps)
    indptr, indices, degrees = graph.indptr, graph.indices, graph.degrees
    trace = np.empty(steps + 1, dtype=np.int64)
    trace[0] = v
    for i in range(steps):
        if not coins[i]:
            v = indices[indptr[v] + int(picks[i] * degrees[v])]
        trace[i + 1] = v
    return WalkTrace(trace.tolist())


def miss_probability_bound(h, d, u_size, n, steps) -> float:
    """exp(-(h^3/8d^3) |U| steps / n): chance a stationary walk never visits U"""
    if h <= 0 or d <= 0 or u_size <= 0 or n <= 0 or steps < 0:
        raise GraphError('miss bound needs positive h, d, |U|, n and non-negative steps')
    if h > d:
        raise GraphError(f'h={h} cannot exceed d={d}')
    return math.exp(-(h ** 3) / (8 * d ** 3) * u_size * steps / n)


def stay_probability_bound(pi_a, gap, steps) -> float:
    """pi(A)(1 - gap(1 - pi(A)))^steps: chance a stationary walk stays inside A throughout"""
    if not 0 <= pi_a <= 1 or not 0 <= gap <= 1 or steps < 0:
        raise GraphError('stay bound needs pi(A), gap in [0, 1] and non-negative steps')
    return pi_a * (1 - gap * (1 - pi_a)) ** steps


def _padded_count(n, s, q):
    # dummy targets of size s make q*s >= 2n; they never need to be hit
    return max(q, math.ceil(2 * n / s))


def walk_length(eps, n, s, q, coef=None) -> int:
    """ceil(coef (n/s) ln(q s/n)) with coef = 16/eps^3 unless given"""
    coef = 16 / eps ** 3 if coef is None else coef
    q = _padded_count(n, s, q)
    return math.ceil(coef * (n / s) * math.log(q * s / n))


def covering_size_bound(K, n, s, q) -> float:
    """K (n/s) ln(q s/n), the size a covering set is allowed to reach"""
    q = _padded_count(n, s, q)
    return K * (n / s) * math.log(q * s / n)


def _first_hits(trace, targets, n):
    first_visit = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    visited, first = np.unique(trace, return_index=True)
    first_visit[visited] = first
    return np.array([first_visit[target].min() for target in targets], dtype=np.int64)


def _attach(graph, base, targets, pending):
    """base plus a shortest path from base to each pending target"""
    dist, parent = bfs_tree(graph, base)
    chosen = set(base)
    for i in pending:
        target = targets[i]
        reach = dist[target]
        if (reach < 0).all():
            raise DisconnectedGraphError(f'target {i} is unreachable from the walk')
        best = reach[reach >= 0].min()
        end = int(target[(reach == best)].min())
        chosen.update(trace_back(parent, end))
    return frozenset(chosen)


def covering_set(graph, targets, s, eps, K, retries, rng: RngStream, *,
                 ell_coef=None, max_size=None, min_hits=None, trim=True, steps=None):
    """
    Connected set meeting every target (or at least `min_hits` of them).

    Each attempt runs one stationary lazy walk of walk_length(...) steps on a
    derived stream, keeps the shortest walk prefix that already meets the
    required targets, and joins every remaining target to the visited set by
    a shortest path from one multi-source BFS (trim=False keeps the whole
    walk). `steps` fixes the walk length instead of walk_length(...). The
    first attempt by retry index within the size cap wins; otherwise
    CoveringFailure carries the smallest set seen.
    """
    if not targets:
        raise GraphError('covering set needs at least one target')
    n = graph.n
    target_arrays = []
    for i, target in enumerate(targets):
        members = as_vertex_set(graph, target)
        if not members:
            raise GraphError(f'target {i} is empty')
        target_arrays.append(np.fromiter(sorted(members), dtype=np.int64, count=len(members)))
    q = len(target_arrays)
    need = q if min_hits is None else min(q, max(0, int(min_hits)))
    s = max(1, min(s, n))
    if steps is None:
        steps = walk_length(eps, n, s, q, coef=ell_coef)
    elif steps < 0:
        raise GraphError(f'step count must be non-negative, got {steps}')
    cap = max_size if max_size is not None else math.floor(covering_size_bound(K, n, s, q))
    table = _stationary_table(graph)

    best = None
    for attempt in range(retries):
        stream = rng.derive(attempt)
        start = sample_stationary(graph, stream, table)
        trace = np.asarray(run_walk(graph, steps, stream, start=start).vertices, dtype=np.int64)
        first = _first_hits(trace, target_arrays, n)
        order = np.argsort(first, kind='stable')
        hit = int(np.count_nonzero(first < len(trace)))
        if hit >= need:
            if trim:
                stop = int(first[order[need - 1]]) + 1 if need else 1
                covering = frozenset(trace[:stop].tolist())
            else:
                covering = frozenset(trace.tolist())
        else:
            missing = [int(i) for i in order[hit:need]]
            covering = _attach(graph, frozenset(trace.tolist()), target_arrays, missing)
        logger.debug(f'covering attempt {attempt}: walk {steps} steps, {hit}/{q} hit, |T|={len(covering)}, cap {cap}')
        if len(covering) <= cap:
            return covering
        if best is None or len(covering) < len(best):
            best = covering
    logger.warning(f'covering set: all {retries} attempts exceeded cap {cap} (best {len(best) if best else None})')
    raise CoveringFailure(best, cap, retries)


def default_retries(n) -> int:
    """ceil(C ln n) covering attempts"""
    return max(1, math.ceil(Config.RETRY_COEFFICIENT * math.log(max(n, 2))))


__all__ = [
    'STATIONARY', 'RngStream', 'WalkTrace', 'lazy_step', 'sample_stationary', 'run_walk',
    'miss_probability_bound', 'stay_probability_bound', 'walk_length', 'covering_size_bound',
    'covering_set', 'default_retries',
]
