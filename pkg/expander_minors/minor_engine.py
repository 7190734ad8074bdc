"""
Minor Engine
Grows disjoint connected branch sets inside an expander until they form a
complete (or dense) minor. The state is an ordered partition
V = D + T_1 + ... + T_q + U: D collects discarded vertices, the T_i are the
branch sets found so far and U is the shrinking pool the next set is cut from.
Each iteration fires exactly one rule, in priority order:

  1. recycle a branch set that lost its grip on U into D
  2. move a vertex with too few U-neighbours into D
  3. if G[U] has a sparse cut (small normalised-Laplacian eigenvalue), move
     the sweep side into D
  4. otherwise build a connected covering set T touching every N(T_i) in U
  5. grow T into a new branch set with large external neighbourhood (or move
     the obstruction found on the way into D); constant-degree mode skips the
     growth and pads T by BFS inside G[U] to t vertices

Witnesses are checked by verify_witness before a run reports success.
"""
import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from .config import Config
from .errors import (
    ConfigError, CoveringFailure, DisconnectedGraphError, EngineInvariantError,
    ExhaustiveLimitError, GraphError, RegimeError,
)
from .graph_core import (
    as_vertex_set, bfs_tree, components, external_neighborhood, induced_subgraph, is_connected_set,
)
from .spectral import normalized_fiedler, sweep_cut
from .walks import RngStream, covering_set, walk_length

logger = logging.getLogger(__name__)

SPARSE = 'sparse'
CONSTANT_DEGREE = 'constant-degree'
INTERMEDIATE = 'intermediate'
MODES = (SPARSE, CONSTANT_DEGREE, INTERMEDIATE)
MODE_ALIASES = {'constd': CONSTANT_DEGREE, 'sparse': SPARSE, 'intermediate': INTERMEDIATE,
                'constant-degree': CONSTANT_DEGREE}

DESK = 'desk'
LITERAL = 'literal'
PROFILES = (DESK, LITERAL)

PAIR_FRACTION = 0.1

# Event names recorded in RunReport.history
RECYCLED = 'T_i-recycled'
VERTEX_MOVED = 'vertex-moved'
COMPONENT_MOVED = 'component-moved'
SWEEP_MOVED = 'sweep-moved'
COVERING_BUILT = 'covering-built'
EXPANDER_GROWN = 'expander-grown'
COVERING_ADDED = 'covering-added'
S_MOVED = 'S-moved'

SUCCESS = 'success'
FAILURE = 'failure'
TIMEOUT = 'timeout'


def normalize_mode(mode):
    try:
        return MODE_ALIASES[mode]
    except KeyError:
        raise ConfigError(f'unknown mode {mode!r}; expected one of {sorted(MODE_ALIASES)}')


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EngineParams:
    n: int
    d: int
    eps: float
    zeta: float
    K: float
    t: int
    r: int
    ell: int
    ell_coef: float
    cover_eps: float
    C: float
    mode: str
    profile: str
    branch_cap: int
    cover_cap: int

    @property
    def neighbour_threshold(self):
        """t(1/2 + 2 zeta)d: external neighbours a branch set must keep in U"""
        return self.t * (0.5 + 2 * self.zeta) * self.d

    @property
    def edge_threshold(self):
        """eps t d: edges into U a constant-degree branch set must keep (strictly)"""
        return self.eps * self.t * self.d

    @property
    def growth_threshold(self):
        return (0.5 + 3 * self.zeta) * self.d

    @property
    def min_u_degree(self):
        return self.zeta * self.d

    @property
    def covering_size(self):
        if self.mode == CONSTANT_DEGREE:
            return max(1.0, self.eps * self.t)
        return max(1.0, self.zeta * self.t * self.d)

    @property
    def retries(self):
        return max(1, math.ceil(self.C * math.log(max(self.n, 2))))

    def to_dict(self):
        return dataclasses.asdict(self)


def _profile_constants(n, d, eps, zeta, mode, profile):
    if profile == LITERAL:
        # The walks run in G[U], whose certified edge expansion is only
        # zeta^3/4 (not zeta), so the covering constants are taken at
        # cover_eps = zeta^3/4: K = 32/cover_eps^3, not 32/zeta^3.
        cover_eps = zeta ** 3 / 4
        K = 32 / cover_eps ** 3
        ell_coef = 16 / cover_eps ** 3
        if mode == CONSTANT_DEGREE:
            t = math.ceil(math.sqrt(n))
            r = math.floor(zeta ** 2 * eps * math.sqrt(n) / 2)
        else:
            argument = zeta ** 3 * eps * d
            if argument <= math.e:
                raise RegimeError(f'zeta^3 eps d > e (got {argument:.4g})')
            t = math.ceil(math.sqrt((2 * K / zeta ** 2) * n * math.log(argument) / d))
            r = math.floor(zeta ** 2 * eps * n / (2 * t))
        cover_cap = math.floor(zeta * t)
        return dict(cover_eps=cover_eps, K=K, ell_coef=ell_coef, t=t, r=r, cover_cap=cover_cap,
                    branch_cap=math.floor((1 + zeta) * t))

    log_d = math.log(d)
    if mode == SPARSE:
        t = math.ceil(0.5 * math.sqrt(n * log_d / d))
        r = math.floor(math.sqrt(n * d / log_d) / 8)
    elif mode == CONSTANT_DEGREE:
        # every branch set is padded to t vertices, so r t stays below n/4
        t = math.ceil(math.sqrt(n))
        r = max(1, math.floor(math.sqrt(n) / 4))
    else:
        t = math.ceil(math.sqrt(n / d))
        r = math.floor(math.sqrt(n * d) / 8)
    if mode != CONSTANT_DEGREE:
        room = math.floor(eps * n / (4 * d))
        if room >= 1:
            t = min(t, room)
    return dict(cover_eps=eps, K=4.0, ell_coef=1.0, t=t, r=r, cover_cap=2 * t, branch_cap=3 * t)


def compute_params(n, d, eps, mode=SPARSE, profile=DESK, **overrides) -> EngineParams:
    """
    Derive t, r, walk length and caps for an (n, d, eps) instance.

    `profile` picks the constants: 'literal' uses the proof's constants verbatim,
    'desk' keeps the asymptotic shapes with leading constants that give
    non-degenerate parameters on graphs of a few thousand vertices; in the
    sparse and intermediate modes it clamps t to floor(eps n/(4d)). Any field
    can be overridden by keyword; `ell` then caps every covering walk. Raises
    RegimeError naming the violated inequality when the instance is too small.
    """
    mode = normalize_mode(mode)
    if profile not in PROFILES:
        raise ConfigError(f'unknown profile {profile!r}; expected one of {PROFILES}')
    unknown = set(overrides) - {f.name for f in dataclasses.fields(EngineParams)}
    if unknown:
        raise ConfigError(f'unknown parameter overrides: {sorted(unknown)}')
    if not 0 < eps < 0.5:
        raise RegimeError(f'0 < eps < 1/2 (got {eps})')
    if d < 3:
        raise RegimeError(f'd >= 3 (got {d})')
    if n < 2:
        raise RegimeError(f'n >= 2 (got {n})')

    zeta = overrides.get('zeta', eps / 8)
    values = _profile_constants(n, d, eps, zeta, mode, profile)
    if 'cover_cap' in overrides and 'branch_cap' not in overrides:
        values['branch_cap'] = overrides.get('t', values['t']) + overrides['cover_cap']
    values.update({key: value for key, value in overrides.items() if key != 'ell'})
    t, r = values['t'], values['r']

    if r < 1:
        raise RegimeError(f'r >= 1 (got r={r} with t={t})')
    if t < 1:
        raise RegimeError(f't >= 1 (got {t})')
    if mode != CONSTANT_DEGREE and t > eps * n / (4 * d):
        raise RegimeError(f't <= eps n/(4d) (got t={t} > {eps * n / (4 * d):.4g})')

    params = EngineParams(
        n=n, d=d, eps=eps, zeta=zeta, K=values['K'], t=t, r=r, ell=0,
        ell_coef=values['ell_coef'], cover_eps=values['cover_eps'],
        C=overrides.get('C', Config.RETRY_COEFFICIENT), mode=mode, profile=profile,
        branch_cap=values['branch_cap'], cover_cap=values['cover_cap'],
    )
    ell = overrides.get('ell', walk_length(params.cover_eps, n, params.covering_size, r, coef=params.ell_coef))
    params = dataclasses.replace(params, ell=ell)
    logger.debug(f'params for n={n} d={d} eps={eps} {mode}/{profile}: t={t} r={r} ell={ell}')
    return params


# ---------------------------------------------------------------------------
# State and reports
# ---------------------------------------------------------------------------

@dataclass
class Partition:
    D: FrozenSet[int]
    branch_sets: List[FrozenSet[int]]
    U: FrozenSet[int]
    pair_edges: FrozenSet[Tuple[int, int]] = frozenset()

    @property
    def q(self):
        return len(self.branch_sets)

    @classmethod
    def initial(cls, graph):
        return cls(D=frozenset(), branch_sets=[], U=frozenset(range(graph.n)))

    def to_dict(self):
        return {'D': sorted(self.D), 'branch_sets': [sorted(s) for s in self.branch_sets],
                'U': sorted(self.U), 'pair_edges': sorted(self.pair_edges)}


@dataclass
class MinorWitness:
    branch_sets: List[FrozenSet[int]]
    kind: str = 'complete'
    threshold: Optional[float] = None

    @property
    def order(self):
        return len(self.branch_sets)

    def to_dict(self):
        return {'kind': self.kind, 'threshold': self.threshold, 'order': self.order,
                'branch_sets': [sorted(s) for s in self.branch_sets]}


@dataclass
class Verification:
    """Outcome of a witness or partition check; violations are data, not errors"""
    violations: List[Tuple[str, tuple, str]] = field(default_factory=list)
    order: int = 0

    @property
    def valid(self):
        return not self.violations

    @property
    def condition(self):
        return self.violations[0][0] if self.violations else None

    @property
    def indices(self):
        return self.violations[0][1] if self.violations else ()

    @property
    def message(self):
        return self.violations[0][2] if self.violations else 'valid'

    def add(self, condition, indices, message):
        self.violations.append((condition, tuple(indices), message))

    def to_dict(self):
        return {'valid': self.valid, 'condition': self.condition, 'indices': list(self.indices),
                'message': self.message, 'order': self.order}


@dataclass
class Event:
    iteration: int
    rule: str
    size: int
    d_size: int
    q: int
    u_size: int

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class RunReport:
    outcome: str
    reason: Optional[str]
    witness: Optional[MinorWitness]
    iterations: int
    history: List[Event]
    partition: Partition
    params: EngineParams
    wall_time_s: float = 0.0

    @property
    def q(self):
        return self.partition.q

    @property
    def order(self):
        return self.witness.order if self.witness is not None else 0

    def to_dict(self, history=True):
        data = {'outcome': self.outcome, 'reason': self.reason, 'order': self.order,
                'q': self.q, 'iterations': self.iterations, 'params': self.params.to_dict(),
                'witness': self.witness.to_dict() if self.witness else None,
                'wall_time_s': self.wall_time_s}
        if history:
            data['history'] = [event.to_dict() for event in self.history]
        return data


# ---------------------------------------------------------------------------
# Growth
# ---------------------------------------------------------------------------

@dataclass
class Growth:
    vertices: FrozenSet[int]
    obstruction: bool


def grow_connected_expander(graph, v, s, threshold) -> Growth:
    """
    Connected X containing v with |X| = s and |N(X)| >= s(threshold - 1).

    X grows one vertex at a time from {v}. The added vertex is the neighbour
    with the most new external neighbours (lowest id on ties), provided the
    running bound |N(X)| >= |X|(threshold - 1) still holds. When no neighbour
    keeps it, the obstruction X + N(X) is returned instead; it sends fewer
    than |X + N(X)| * threshold edges to the rest of the graph.
    """
    if s < 1:
        raise GraphError(f'target size must be at least 1, got {s}')
    if s > graph.n:
        raise GraphError(f'target size {s} exceeds n={graph.n}')
    if not 0 <= v < graph.n:
        raise GraphError(f'vertex {v} out of range', vertex=v)

    inside = np.zeros(graph.n, dtype=bool)
    border = np.zeros(graph.n, dtype=bool)
    inside[v] = True
    border[graph.neighbors(v)] = True
    size = 1

    def obstruction():
        return Growth(frozenset(np.flatnonzero(inside | border).tolist()), True)

    if np.count_nonzero(border) < threshold - 1:
        return obstruction()
    while size < s:
        candidates = np.flatnonzero(border)
        if not len(candidates):
            return obstruction()
        fresh = np.array([np.count_nonzero(~(inside | border)[graph.neighbors(w)]) for w in candidates])
        w = int(candidates[int(np.argmax(fresh))])
        new_border = np.count_nonzero(border) - 1 + int(fresh.max())
        if new_border < (size + 1) * (threshold - 1):
            return obstruction()
        inside[w] = True
        border[w] = False
        nbrs = graph.neighbors(w)
        border[nbrs[~inside[nbrs]]] = True
        size += 1
    return Growth(frozenset(np.flatnonzero(inside).tolist()), False)


def pad_connected(graph, vertices, size) -> FrozenSet[int]:
    """
    `vertices` plus the closest other vertices, in BFS order with the lowest
    id first on ties, until the set has `size` vertices.

    Every added vertex has a BFS parent one layer closer, so a connected
    input stays connected. Stops early when the component runs out.
    """
    members = as_vertex_set(graph, vertices)
    if not members:
        raise GraphError('cannot pad an empty set')
    if len(members) >= size:
        return members
    dist, _ = bfs_tree(graph, members)
    reached = np.flatnonzero(dist >= 0)
    order = reached[np.lexsort((reached, dist[reached]))]
    return frozenset(order[:size].tolist())


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

IN_D = -2
IN_U = -1


class _Stop(Exception):
    def __init__(self, outcome, reason):
        super().__init__(reason)
        self.outcome = outcome
        self.reason = reason


class _EngineState:
    """Mutable partition with incrementally maintained U-degrees and per-set counts"""

    def __init__(self, graph, params):
        self.graph = graph
        self.params = params
        self.owner = np.full(graph.n, IN_U, dtype=np.int64)
        self.in_u = np.ones(graph.n, dtype=bool)
        self.deg_in_u = graph.degrees.copy()
        self.sets: List[np.ndarray] = []
        self.nbr_u: List[int] = []   # |N(T_i) in U|
        self.edges_u: List[int] = []  # e(T_i, U)
        self.pairs = set()
        self.d_size = 0
        self.e_du = 0
        self.u_version = 0
        self._spectral = None

    @property
    def q(self):
        return len(self.sets)

    @property
    def u_size(self):
        return int(np.count_nonzero(self.in_u))

    def _rows(self, vertices):
        matrix = self.graph.adjacency()[vertices]
        owners = np.repeat(vertices, np.diff(matrix.indptr))
        return matrix.indices.astype(np.int64), owners

    def leave_u(self, vertices, into_d):
        vertices = np.asarray(sorted(vertices), dtype=np.int64)
        if not self.in_u[vertices].all():
            raise EngineInvariantError('moving vertices that are not in U')
        self.in_u[vertices] = False
        entries, owners = self._rows(vertices)
        np.subtract.at(self.deg_in_u, entries, 1)
        labels = self.owner[entries]
        in_set = labels >= 0
        for i, count in zip(*np.unique(labels[in_set], return_counts=True)):
            self.edges_u[i] -= int(count)
        touched = np.unique(np.stack((owners[in_set], labels[in_set])), axis=1)[1] if in_set.any() else []
        for i, count in zip(*np.unique(touched, return_counts=True)):
            self.nbr_u[i] -= int(count)
        self.e_du -= int(np.count_nonzero(labels == IN_D))
        if into_d:
            self.e_du += int(np.count_nonzero(self.in_u[entries]))
            self.owner[vertices] = IN_D
            self.d_size += len(vertices)
        self.u_version += 1
        return vertices

    def recycle(self, i):
        members = self.sets.pop(i)
        self.e_du += self.edges_u.pop(i)
        self.nbr_u.pop(i)
        self.owner[members] = IN_D
        shift = self.owner > i
        self.owner[shift] -= 1
        self.pairs = {(a - (a > i), b - (b > i)) for a, b in self.pairs if i not in (a, b)}
        self.d_size += len(members)
        return members

    def add_set(self, vertices):
        members = self.leave_u(vertices, into_d=False)
        i = len(self.sets)
        self.owner[members] = i
        self.sets.append(members)
        entries, _ = self._rows(members)
        outside = entries[self.owner[entries] != i]
        self.nbr_u.append(int(len(np.unique(outside[self.in_u[outside]]))))
        self.edges_u.append(int(np.count_nonzero(self.in_u[entries])))
        for j in np.unique(self.owner[outside]):
            if 0 <= j < i:
                self.pairs.add((int(j), i))
        return members

    def snapshot(self):
        return Partition(
            D=frozenset(np.flatnonzero(self.owner == IN_D).tolist()),
            branch_sets=[frozenset(s.tolist()) for s in self.sets],
            U=frozenset(np.flatnonzero(self.in_u).tolist()),
            pair_edges=frozenset(self.pairs),
        )


class _Engine:
    def __init__(self, graph, params, rng, eigen_tol, engine_tol):
        self.graph = graph
        self.params = params
        self.rng = rng
        self.eigen_tol = eigen_tol
        self.engine_tol = engine_tol
        self.state = _EngineState(graph, params)
        self.history: List[Event] = []
        self.iteration = 0

    def record(self, rule, size):
        s = self.state
        event = Event(self.iteration, rule, int(size), s.d_size, s.q, s.u_size)
        self.history.append(event)
        logger.debug(f'iteration {self.iteration}: {rule} ({size}) |D|={s.d_size} q={s.q} |U|={s.u_size}')

    def step(self):
        p, s = self.params, self.state

        # 1. recycle weak branch sets
        for i in range(s.q):
            weak = (s.edges_u[i] <= p.edge_threshold if p.mode == CONSTANT_DEGREE
                    else s.nbr_u[i] < p.neighbour_threshold)
            if weak:
                members = s.recycle(i)
                return self.record(RECYCLED, len(members))

        # 2. low-degree vertices of U
        low = np.flatnonzero(s.in_u & (s.deg_in_u < p.min_u_degree))
        if len(low):
            s.leave_u([int(low[0])], into_d=True)
            return self.record(VERTEX_MOVED, 1)

        # 3. spectral test on G[U]
        if s._spectral is None or s._spectral[0] != s.u_version:
            parts = components(self.graph, allowed=s.in_u)
            if len(parts) > 1:
                keep = max(range(len(parts)), key=lambda k: (len(parts[k]), -int(parts[k][0])))
                moved = np.concatenate([part for k, part in enumerate(parts) if k != keep])
                s.leave_u(moved.tolist(), into_d=True)
                return self.record(COMPONENT_MOVED, len(moved))
            sub, labels = induced_subgraph(self.graph, np.flatnonzero(s.in_u).tolist())
            fiedler = normalized_fiedler(sub, self.eigen_tol)
            s._spectral = (s.u_version, sub, labels, fiedler)
        _, sub, labels, fiedler = s._spectral

        cutoff = p.zeta ** 2 / 2
        if fiedler.value <= cutoff + self.engine_tol:
            side, _ = sweep_cut(sub, self.eigen_tol, fiedler=fiedler)
            if len(side) > sub.n / 2:
                side = frozenset(range(sub.n)) - side
            side_ids = np.asarray(sorted(side), dtype=np.int64)
            mask = np.zeros(sub.n, dtype=bool)
            mask[side_ids] = True
            rows = sub.adjacency()[side_ids]
            cut = int(np.count_nonzero(~mask[rows.indices]))
            allowed = len(side_ids) * p.d * math.sqrt(2 * (cutoff + self.engine_tol)) + 1e-9
            if cut > allowed:
                raise EngineInvariantError(f'sweep set cut {cut} exceeds {allowed:.4g}')
            s.leave_u(labels[side_ids].tolist(), into_d=True)
            return self.record(SWEEP_MOVED, len(side_ids))

        # 4. covering set
        if s.q == 0:
            targets = [range(sub.n)]
            need = None
        else:
            targets = []
            for members in s.sets:
                entries, _ = s._rows(members)
                hood = np.unique(entries[s.in_u[entries]])
                targets.append(np.searchsorted(labels, hood).tolist())
            need = min(s.q, math.ceil(2 * PAIR_FRACTION * (s.q + 1))) if p.mode == INTERMEDIATE else None
        size = min(max(min(len(target) for target in targets), p.covering_size), sub.n)
        # ell caps every walk; the local length is usually far shorter
        steps = min(p.ell, walk_length(p.cover_eps, sub.n, size, len(targets), coef=p.ell_coef))
        try:
            cover = covering_set(sub, targets, size, p.cover_eps, p.K, p.retries,
                                 self.rng.derive(self.iteration), ell_coef=p.ell_coef,
                                 max_size=p.cover_cap, min_hits=need, trim=p.mode != CONSTANT_DEGREE,
                                 steps=steps)
        except CoveringFailure as e:
            logger.info(f'covering failed at q={s.q}: {e}')
            raise _Stop(FAILURE, 'covering')
        self.record(COVERING_BUILT, len(cover))

        # 5. expander growth (constant-degree: pad the cover to t vertices instead)
        if p.mode == CONSTANT_DEGREE:
            new = pad_connected(sub, cover, min(p.t, sub.n))
        else:
            growth = grow_connected_expander(sub, min(cover), min(p.t, sub.n), p.growth_threshold)
            if growth.obstruction:
                s.leave_u(labels[sorted(growth.vertices)].tolist(), into_d=True)
                return self.record(S_MOVED, len(growth.vertices))
            new = cover | growth.vertices
        new_ids = labels[sorted(new)]

        if len(new_ids) > p.branch_cap or not self._keeps_neighbourhood(new_ids):
            s.leave_u(new_ids.tolist(), into_d=True)
            return self.record(S_MOVED, len(new_ids))
        s.add_set(new_ids.tolist())
        return self.record(COVERING_ADDED if p.mode == CONSTANT_DEGREE else EXPANDER_GROWN, len(new_ids))

    def _keeps_neighbourhood(self, ids):
        if self.params.mode == CONSTANT_DEGREE:
            return True
        s = self.state
        inside = np.zeros(self.graph.n, dtype=bool)
        inside[ids] = True
        entries, _ = s._rows(np.asarray(ids, dtype=np.int64))
        hood = np.unique(entries[s.in_u[entries] & ~inside[entries]])
        return len(hood) >= self.params.neighbour_threshold

    def monitor(self):
        """Hypothesis-dependent constraints on D"""
        p, s = self.params, self.state
        n = self.graph.n
        if s.d_size > 2 * n / 3:
            raise _Stop(FAILURE, 'constraint-c')
        if s.d_size == 0:
            return
        d_size, e_du = s.d_size, s.e_du
        if p.mode == CONSTANT_DEGREE:
            ok = e_du < p.eps * d_size * p.d
        elif d_size <= p.eps * n:
            ok = e_du <= d_size * (0.5 + 3 * p.zeta) * p.d
        else:
            ok = e_du <= 3 * p.zeta * d_size * p.d
        if not ok:
            raise _Stop(FAILURE, 'constraint-d')


def find_minor(graph, params: EngineParams, rng: RngStream, *, max_iter=None, check_invariants=False,
               deadline=None, eigen_tol=None, engine_tol=None) -> RunReport:
    """
    Run the partition state machine until q = r or a stop condition.

    `max_iter` defaults to 2n. `deadline` is a wall-clock budget in seconds.
    With `check_invariants` the full partition is re-verified after every
    iteration and a broken structural invariant raises EngineInvariantError.
    """
    if graph.n != params.n:
        raise GraphError(f'params were computed for n={params.n}, graph has n={graph.n}')
    if graph.max_degree > params.d:
        raise GraphError(f'graph max degree {graph.max_degree} exceeds params d={params.d}')
    if len(components(graph)) > 1:
        raise DisconnectedGraphError(f'{graph} is disconnected')
    max_iter = 2 * graph.n if max_iter is None else max_iter
    eigen_tol = Config.EIGEN_TOL if eigen_tol is None else eigen_tol
    engine_tol = Config.ENGINE_TOL if engine_tol is None else engine_tol

    engine = _Engine(graph, params, rng, eigen_tol, engine_tol)
    state = engine.state
    started = time.monotonic()
    outcome, reason = SUCCESS, None
    try:
        while state.q < params.r:
            if deadline is not None and time.monotonic() - started > deadline:
                raise _Stop(TIMEOUT, 'timeout')
            if engine.iteration >= max_iter:
                raise _Stop(FAILURE, 'max-iterations')
            if state.u_size < graph.n / 2:
                raise _Stop(FAILURE, 'u-underflow')
            engine.iteration += 1
            engine.step()
            engine.monitor()
            if check_invariants:
                report = verify_partition(graph, state.snapshot(), params)
                fatal = [v for v in report.violations if v[0] in ('partition', 'a', 'b')]
                if fatal:
                    raise EngineInvariantError(f'iteration {engine.iteration}: {fatal[0][2]}')
        if params.mode == INTERMEDIATE and len(state.pairs) < PAIR_FRACTION * state.q ** 2:
            raise _Stop(FAILURE, 'pair-deficit')
    except _Stop as stop:
        outcome, reason = stop.outcome, stop.reason

    partition = state.snapshot()
    witness = None
    if outcome == SUCCESS:
        kind = 'pair-fraction' if params.mode == INTERMEDIATE else 'complete'
        threshold = PAIR_FRACTION if params.mode == INTERMEDIATE else None
        witness = MinorWitness(list(partition.branch_sets), kind=kind, threshold=threshold)
        check = verify_witness(graph, witness)
        if not check.valid:
            raise EngineInvariantError(f'engine produced an invalid witness: {check.message}')
    elapsed = time.monotonic() - started
    logger.info(f'find_minor on {graph}: {outcome}{f" ({reason})" if reason else ""}, '
                f'q={partition.q}/{params.r} after {engine.iteration} iterations')
    return RunReport(outcome, reason, witness, engine.iteration, engine.history, partition, params,
                     wall_time_s=elapsed)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def _labels(graph, sets):
    """owner label per vertex, -1 for unassigned; None plus the first clash on overlap"""
    owner = np.full(graph.n, -1, dtype=np.int64)
    for i, members in enumerate(sets):
        ids = np.asarray(sorted(members), dtype=np.int64)
        clash = owner[ids] >= 0
        if clash.any():
            return None, (int(owner[ids[clash][0]]), i)
        owner[ids] = i
    return owner, None


def _adjacent_pairs(graph, owner):
    edges = graph.edge_array()
    a, b = owner[edges[:, 0]], owner[edges[:, 1]]
    keep = (a >= 0) & (b >= 0) & (a != b)
    pairs = np.sort(np.stack((a[keep], b[keep]), axis=1), axis=1)
    return {(int(i), int(j)) for i, j in np.unique(pairs, axis=0)} if len(pairs) else set()


def verify_witness(graph, witness: MinorWitness) -> Verification:
    """Check nonemptiness, disjointness, connectivity and the adjacency requirement"""
    report = Verification(order=witness.order)
    sets = witness.branch_sets
    for i, members in enumerate(sets):
        if not members:
            report.add('nonempty', (i,), f'branch set {i} is empty')
            return report
        try:
            as_vertex_set(graph, members)
        except GraphError as e:
            report.add('range', (i,), str(e))
            return report
    owner, clash = _labels(graph, sets)
    if owner is None:
        report.add('disjointness', clash, f'branch sets {clash[0]} and {clash[1]} overlap')
        return report
    for i, members in enumerate(sets):
        if not is_connected_set(graph, members):
            report.add('connectivity', (i,), f'branch set {i} is not connected')
            return report
    adjacent = _adjacent_pairs(graph, owner)
    q = len(sets)
    if witness.kind == 'complete':
        for i in range(q):
            for j in range(i + 1, q):
                if (i, j) not in adjacent:
                    report.add('adjacency', (i, j), f'no edge between branch sets {i} and {j}')
                    return report
    elif witness.kind == 'pair-fraction':
        threshold = witness.threshold if witness.threshold is not None else PAIR_FRACTION
        if len(adjacent) < threshold * q ** 2:
            report.add('pair-fraction', (), f'{len(adjacent)} adjacent pairs < {threshold} q^2 = {threshold * q ** 2:g}')
    else:
        report.add('kind', (), f'unknown witness kind {witness.kind!r}')
    return report


def verify_partition(graph, partition: Partition, params: EngineParams) -> Verification:
    """
    Check the mode's partition constraints. Conditions: 'partition' (cover and
    disjointness of D, U and the branch sets), 'a' (size, connectivity,
    neighbourhood), 'b' (branch sets disjoint and pairwise adjacent, or
    recorded pairs really adjacent), 'b-pairs' (pair count in
    intermediate mode), 'c' (|D| <= 2n/3) and 'd' (edges from D into U).
    """
    report = Verification(order=partition.q)
    n = graph.n
    sets = list(partition.branch_sets)
    set_owner, clash = _labels(graph, sets)
    if set_owner is None:
        report.add('b', clash, f'branch sets {clash[0]} and {clash[1]} overlap')
        return report
    blocks = [partition.D, *sets, partition.U]
    owner, clash = _labels(graph, blocks)
    if owner is None:
        report.add('partition', clash, f'blocks {clash[0]} and {clash[1]} overlap')
        return report
    if (owner < 0).any():
        missing = int(np.flatnonzero(owner < 0)[0])
        report.add('partition', (missing,), f'vertex {missing} is in no block')
        return report

    u_mask = np.zeros(n, dtype=bool)
    u_mask[sorted(partition.U)] = True
    for i, members in enumerate(sets):
        if not members or len(members) > params.branch_cap:
            report.add('a', (i,), f'branch set {i} has size {len(members)} outside [1, {params.branch_cap}]')
        elif not is_connected_set(graph, members):
            report.add('a', (i,), f'branch set {i} is not connected')
        elif params.mode != CONSTANT_DEGREE:
            hood = len(external_neighborhood(graph, members))
            if hood < params.neighbour_threshold:
                report.add('a', (i,), f'branch set {i} has {hood} neighbours < {params.neighbour_threshold:g}')

    adjacent = _adjacent_pairs(graph, set_owner)
    if params.mode == INTERMEDIATE:
        bogus = sorted(set(partition.pair_edges) - adjacent)
        if bogus:
            report.add('b', bogus[0], f'recorded pair {bogus[0]} is not adjacent')
        if len(partition.pair_edges) < PAIR_FRACTION * partition.q ** 2:
            report.add('b-pairs', (), f'{len(partition.pair_edges)} pairs < 0.1 q^2')
    else:
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                if (i, j) not in adjacent:
                    report.add('b', (i, j), f'no edge between branch sets {i} and {j}')
                    break
            else:
                continue
            break

    d_size = len(partition.D)
    if d_size > 2 * n / 3:
        report.add('c', (), f'|D| = {d_size} > 2n/3')
    if d_size:
        d_ids = np.asarray(sorted(partition.D), dtype=np.int64)
        rows = graph.adjacency()[d_ids]
        e_du = int(np.count_nonzero(u_mask[rows.indices]))
        if params.mode == CONSTANT_DEGREE:
            ok = e_du < params.eps * d_size * params.d
        elif d_size <= params.eps * n:
            ok = e_du <= d_size * (0.5 + 3 * params.zeta) * params.d
        else:
            ok = e_du <= 3 * params.zeta * d_size * params.d
        if not ok:
            report.add('d', (), f'e(D, U) = {e_du} too large for |D| = {d_size}')
    return report


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

def _mask_connected(mask, nbr):
    seen = frontier = mask & -mask
    while frontier:
        grow = 0
        rest = frontier
        while rest:
            low = rest & -rest
            grow |= nbr[low.bit_length() - 1]
            rest ^= low
        frontier = grow & mask & ~seen
        seen |= frontier
    return seen == mask


def brute_force_ccl(graph, limit=None) -> int:
    """
    Contraction clique number by exhaustive search: vertices are assigned to
    'deleted' or to branch sets in restricted-growth order, pruning states that
    cannot beat the best order found.
    """
    limit = Config.CCL_LIMIT if limit is None else limit
    n = graph.n
    if n > limit:
        raise ExhaustiveLimitError(n, limit)
    if n == 0:
        return 0
    nbr = [0] * n
    for u, v in graph.edges():
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    upper = min(n, math.floor((1 + math.sqrt(1 + 8 * graph.m)) / 2))
    best = 1
    blocks: List[int] = []

    def valid(blocks):
        if not all(_mask_connected(b, nbr) for b in blocks):
            return False
        hoods = []
        for b in blocks:
            hood = 0
            rest = b
            while rest:
                low = rest & -rest
                hood |= nbr[low.bit_length() - 1]
                rest ^= low
            hoods.append(hood)
        return all(hoods[i] & blocks[j] for i in range(len(blocks)) for j in range(i + 1, len(blocks)))

    def search(v):
        nonlocal best
        if best >= upper or len(blocks) + (n - v) <= best:
            return
        if v == n:
            if valid(blocks):
                best = len(blocks)
            return
        bit = 1 << v
        blocks.append(bit)
        search(v + 1)
        blocks.pop()
        for i in range(len(blocks)):
            blocks[i] |= bit
            search(v + 1)
            blocks[i] ^= bit
        search(v + 1)

    search(0)
    return best


def bipartite_ccl_upper_bound(a, b) -> int:
    """ccl(K_{a,b}) <= min(a, b) + 1: all but one branch set need a vertex of the smaller side"""
    return min(a, b) + 1


__all__ = [
    'SPARSE', 'CONSTANT_DEGREE', 'INTERMEDIATE', 'MODES', 'DESK', 'LITERAL', 'PROFILES',
    'EngineParams', 'compute_params', 'normalize_mode', 'Partition', 'MinorWitness', 'Verification',
    'Event', 'RunReport', 'Growth', 'grow_connected_expander', 'pad_connected', 'find_minor', 'verify_witness',
    'verify_partition', 'brute_force_ccl', 'bipartite_ccl_upper_bound',
]
