"""
Instance Generators
Random regular and binomial random graphs on reproducible streams, named
deterministic fixtures, and the (p, beta)-jumbledness checker.
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import FrozenSet, Optional

import numpy as np

from .config import Config
from .errors import GenerationError, GraphError
from .graph_core import build_graph
from .spectral import subset_tables
from .walks import RngStream

logger = logging.getLogger(__name__)

FAMILIES = ('regular', 'gnp', 'cycle', 'complete', 'complete-bipartite', 'petersen', 'two-triangles')

# Above this degree plain rejection almost never yields a simple graph
# (acceptance ~ exp(-(d^2 - 1)/4)), so the pairing falls back to Steger-Wormald.
REJECTION_MAX_DEGREE = 4


def _rejection_attempt(n, d, gen):
    """One uniform pairing of the nd stubs; None when it has a loop or a repeated edge"""
    stubs = gen.permutation(np.repeat(np.arange(n), d)).reshape(-1, 2)
    pairs = np.sort(stubs, axis=1)
    if (pairs[:, 0] == pairs[:, 1]).any():
        return None
    if len(np.unique(pairs, axis=0)) < len(pairs):
        return None
    return pairs


def _suitable(edges, potential):
    if not potential:
        return True
    nodes = sorted(potential)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if (a, b) not in edges:
                return True
    return False


def _steger_wormald_attempt(n, d, gen):
    """Pair stubs while skipping loops and repeats, re-pairing the leftovers until none remain"""
    edges = set()
    stubs = np.repeat(np.arange(n), d)
    while len(stubs):
        potential = defaultdict(int)
        for a, b in gen.permutation(stubs).reshape(-1, 2).tolist():
            if a > b:
                a, b = b, a
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                potential[a] += 1
                potential[b] += 1
        if not _suitable(edges, potential):
            return None
        stubs = np.array([v for v, count in sorted(potential.items()) for _ in range(count)], dtype=np.int64)
    return sorted(edges)


def random_regular(n, d, rng: RngStream, attempts=None, method='auto'):
    """
    Simple d-regular graph on n vertices.

    method='rejection' draws uniform stub pairings and rejects any with loops
    or repeated edges (exactly uniform over simple graphs). method=
    'steger-wormald' repairs collisions by re-pairing (asymptotically uniform).
    'auto' uses rejection up to REJECTION_MAX_DEGREE.
    """
    attempts = Config.REGULAR_RETRIES if attempts is None else attempts
    if (n * d) % 2:
        raise GenerationError(f'n*d must be even (n={n}, d={d})')
    if not 3 <= d < n:
        raise GenerationError(f'need 3 <= d < n (n={n}, d={d})')
    if method == 'auto':
        method = 'rejection' if d <= REJECTION_MAX_DEGREE else 'steger-wormald'
    attempt_fn = {'rejection': _rejection_attempt, 'steger-wormald': _steger_wormald_attempt}.get(method)
    if attempt_fn is None:
        raise GenerationError(f'unknown method {method!r}')
    gen = rng.generator
    for attempt in range(attempts):
        edges = attempt_fn(n, d, gen)
        if edges is not None:
            graph = build_graph(n, edges)
            if not graph.is_regular() or graph.max_degree != d:
                raise GenerationError(f'generated graph is not {d}-regular')
            logger.debug(f'{d}-regular graph on {n} vertices after {attempt + 1} attempts ({method})')
            return graph
        logger.debug(f'{method} attempt {attempt + 1} rejected')
    raise GenerationError(
        f'no simple {d}-regular graph on {n} vertices in {attempts} attempts; '
        f'near-regular gnp fallbacks are not provided')


def gnp(n, p, rng: RngStream):
    """Binomial random graph: each pair independently with probability p"""
    if not 0 <= p <= 1:
        raise GenerationError(f'p must lie in [0, 1], got {p}')
    if n < 0:
        raise GenerationError(f'n must be non-negative, got {n}')
    gen = rng.generator
    chunks = []
    for u in range(n - 1):
        row = np.flatnonzero(gen.random(n - u - 1) < p) + u + 1
        if len(row):
            chunks.append(np.column_stack((np.full(len(row), u), row)))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return build_graph(n, edges)


def cycle(n):
    if n < 3:
        raise GenerationError(f'cycle needs n >= 3, got {n}')
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    if n < 1:
        raise GenerationError(f'complete graph needs n >= 1, got {n}')
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a, b):
    """K_{a,b} with the first side 0..a-1"""
    if a < 1 or b < 1:
        raise GenerationError(f'complete bipartite graph needs a, b >= 1, got ({a}, {b})')
    return build_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(10, outer + spokes + inner)


def two_triangles():
    """Two triangles {0,1,2} and {3,4,5} joined by the bridge 2-3"""
    return build_graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


def named_fixture(family, **params):
    builders = {
        'cycle': lambda: cycle(params['n']),
        'complete': lambda: complete(params['n']),
        'complete-bipartite': lambda: complete_bipartite(params['a'], params['b']),
        'petersen': petersen,
        'two-triangles': two_triangles,
    }
    if family not in builders:
        raise GenerationError(f'unknown fixture {family!r}; expected one of {sorted(builders)}')
    try:
        return builders[family]()
    except KeyError as e:
        raise GenerationError(f'fixture {family!r} is missing parameter {e.args[0]!r}')


@dataclass
class GenSpec:
    family: str
    n: Optional[int] = None
    d: Optional[int] = None
    p: Optional[float] = None
    a: Optional[int] = None
    b: Optional[int] = None
    seed: int = 0

    def validate(self):
        if self.family not in FAMILIES:
            raise GenerationError(f'unknown family {self.family!r}; expected one of {FAMILIES}')
        if self.family == 'regular':
            if self.n is None or self.d is None:
                raise GenerationError('regular family needs n and d')
            if (self.n * self.d) % 2:
                raise GenerationError(f'n*d must be even (n={self.n}, d={self.d})')
        if self.family == 'gnp':
            if self.n is None or self.p is None:
                raise GenerationError('gnp family needs n and p')
            if not 0 <= self.p <= 1:
                raise GenerationError(f'p must lie in [0, 1], got {self.p}')
        return self

    def generate(self, stream=0):
        self.validate()
        rng = RngStream(self.seed, stream)
        if self.family == 'regular':
            return random_regular(self.n, self.d, rng)
        if self.family == 'gnp':
            return gnp(self.n, self.p, rng)
        params = {key: value for key, value in (('n', self.n), ('a', self.a), ('b', self.b)) if value is not None}
        return named_fixture(self.family, **params)

    @property
    def label(self):
        parts = [self.family]
        for key in ('n', 'd', 'p', 'a', 'b'):
            value = getattr(self, key)
            if value is not None:
                parts.append(f'{key}={value}')
        return ':'.join(parts)


@dataclass
class JumbledReport:
    """
    jumbled is True/False in exact mode. Sampling mode can only refute:
    jumbled is False when a violation turned up and None otherwise.
    """
    jumbled: Optional[bool]
    exact: bool
    worst: FrozenSet[int] = frozenset()
    excess: float = 0.0
    checked: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def verdict(self):
        if self.jumbled is None:
            return 'no violation found'
        return 'jumbled' if self.jumbled else 'violated'


def jumbledness_check(graph, p, beta, rng: Optional[RngStream] = None, samples=None, limit=None):
    """
    Test |e(X) - p C(|X|, 2)| <= beta |X| for subsets X. Exact over all
    subsets when n is within the exhaustive limit, otherwise by sampling
    subsets with geometrically spread sizes. `worst` maximises
    |e(X) - p C(|X|, 2)| - beta |X|.
    """
    limit = Config.EXHAUSTIVE_LIMIT if limit is None else limit
    if not 0 <= p <= 1 or beta < 0:
        raise GraphError(f'need p in [0, 1] and beta >= 0, got p={p}, beta={beta}')
    if graph.n <= limit:
        sizes, cuts, vols = subset_tables(graph, limit)
        inside = (vols - cuts) // 2
        excess = np.abs(inside - p * sizes * (sizes - 1) / 2) - beta * sizes
        worst = int(np.argmax(excess))
        members = frozenset(v for v in range(graph.n) if worst >> v & 1)
        return JumbledReport(bool(excess[worst] <= 1e-12), True, members, float(excess[worst]), len(excess))

    samples = Config.JUMBLED_SAMPLES if samples is None else samples
    rng = rng if rng is not None else RngStream(0)
    gen = rng.generator
    size_grid = np.unique(np.geomspace(1, graph.n, num=min(64, graph.n)).astype(np.int64))
    adjacency = graph.adjacency()
    worst, worst_excess = frozenset(), -math.inf
    for i in range(samples):
        size = int(size_grid[i % len(size_grid)])
        members = np.sort(gen.choice(graph.n, size=size, replace=False))
        inside = adjacency[members][:, members].nnz // 2
        excess = abs(inside - p * size * (size - 1) / 2) - beta * size
        if excess > worst_excess:
            worst, worst_excess = frozenset(members.tolist()), excess
    violated = worst_excess > 1e-12
    return JumbledReport(False if violated else None, False, worst, float(worst_excess), samples)


__all__ = [
    'FAMILIES', 'random_regular', 'gnp', 'cycle', 'complete', 'complete_bipartite', 'petersen',
    'two_triangles', 'named_fixture', 'GenSpec', 'JumbledReport', 'jumbledness_check',
]
