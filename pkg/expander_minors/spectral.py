"""
Spectral and Exact Expansion Metrics
Brute-force h(G), h_k(G), h'(G) and conductance for small graphs, iterative
eigenvalues of the normalised Laplacian and the adjacency matrix, the Fiedler
sweep cut, and the hypothesis gate that predicts whether the minor engine
should succeed.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .config import Config
from .errors import (
    ConvergenceError, DisconnectedGraphError, EdgelessGraphError, ExhaustiveLimitError,
    GraphError, IsolatedVertexError, MinorsError,
)
from .graph_core import as_vertex_set, ball_growth_bound, components, vertex_expansion_bound

logger = logging.getLogger(__name__)

EXACT = 'exact'
CERTIFIED = 'certified-bound'
ESTIMATE = 'iterative-estimate'

# Below this size the power iteration alone is fast; above it ARPACK is tried first.
LANCZOS_MIN_N = 64


def volume(graph, vertices) -> int:
    """vol(S): sum of degrees over S"""
    members = as_vertex_set(graph, vertices)
    if not members:
        return 0
    return int(graph.degrees[sorted(members)].sum())


def stationary_measure(graph, vertices) -> float:
    """pi(S) = vol(S) / 2e(G)"""
    if graph.m == 0:
        raise EdgelessGraphError('stationary distribution needs at least one edge')
    return volume(graph, vertices) / (2 * graph.m)


# ---------------------------------------------------------------------------
# Exhaustive metrics
# ---------------------------------------------------------------------------

def subset_tables(graph, limit):
    """size, cut and volume of every subset, indexed by bitmask (bit v = vertex v)"""
    n = graph.n
    if n > limit:
        raise ExhaustiveLimitError(n, limit)
    total = 1 << n
    masks = np.arange(total, dtype=np.int64)
    sizes = np.bitwise_count(masks).astype(np.int64)
    cuts = np.zeros(total, dtype=np.int64)
    vols = np.zeros(total, dtype=np.int64)
    for v in range(n):
        nbr_mask = 0
        for u in graph.neighbors(v):
            nbr_mask |= 1 << int(u)
        lo, hi = 1 << v, 1 << (v + 1)
        shared = np.bitwise_count(masks[:lo] & nbr_mask).astype(np.int64)
        deg = int(graph.degrees[v])
        cuts[lo:hi] = cuts[:lo] + deg - 2 * shared
        vols[lo:hi] = vols[:lo] + deg
    return sizes, cuts, vols


def _members(mask):
    members = []
    v = 0
    while mask:
        if mask & 1:
            members.append(v)
        mask >>= 1
        v += 1
    return members


def _exact_argmin(numer, denom, candidates):
    """
    Exact minimum of numer/denom over candidate masks.
    Ties go to the smaller set, then the lexicographically smaller one.
    """
    if not len(candidates):
        raise GraphError('no admissible subset')
    values = numer[candidates] / denom[candidates]
    near = candidates[values <= values.min() + 1e-9]
    exact = {int(i): Fraction(int(numer[i]), int(denom[i])) for i in near}
    best = min(exact.values())
    tied = [_members(i) for i, value in exact.items() if value == best]
    winner = min(tied, key=lambda members: (len(members), members))
    return best, frozenset(winner)


def cheeger_exact(graph, k, limit=None):
    """
    h_k(G) = min e(S, V \\ S)/|S| over nonempty S with |S| <= k, with a minimiser.
    h(G) is the case k = floor(n/2).
    """
    limit = Config.EXHAUSTIVE_LIMIT if limit is None else limit
    if k < 1 or k > graph.n // 2:
        raise GraphError(f'size bound k={k} outside [1, {graph.n // 2}]')
    sizes, cuts, _ = subset_tables(graph, limit)
    candidates = np.flatnonzero((sizes >= 1) & (sizes <= k))
    return _exact_argmin(cuts, sizes, candidates)


def edge_expansion_exact(graph, limit=None):
    """h(G) with a minimiser"""
    return cheeger_exact(graph, graph.n // 2, limit=limit)


def h_prime_exact(graph, limit=None):
    """h'(G) = min e(S, V \\ S) / min(vol S, vol V \\ S) over proper nonempty S"""
    limit = Config.EXHAUSTIVE_LIMIT if limit is None else limit
    if graph.m == 0:
        raise EdgelessGraphError("h'(G) is undefined on an edgeless graph")
    sizes, cuts, vols = subset_tables(graph, limit)
    denom = np.minimum(vols, 2 * graph.m - vols)
    candidates = np.flatnonzero((sizes >= 1) & (sizes < graph.n) & (denom > 0))
    return _exact_argmin(cuts, denom, candidates)


def conductance_exact(graph, limit=None):
    """Phi(G) = min e(S, V \\ S) / (2 vol S) over S with 0 < pi(S) <= 1/2"""
    limit = Config.EXHAUSTIVE_LIMIT if limit is None else limit
    if graph.m == 0:
        raise EdgelessGraphError('conductance is undefined on an edgeless graph')
    if len(components(graph)) > 1:
        raise DisconnectedGraphError('conductance of a disconnected graph is 0')
    sizes, cuts, vols = subset_tables(graph, limit)
    candidates = np.flatnonzero((vols > 0) & (vols <= graph.m))
    value, _ = _exact_argmin(cuts, 2 * vols, candidates)
    return value


# ---------------------------------------------------------------------------
# Iterative eigensolvers
# ---------------------------------------------------------------------------

@dataclass
class EigenResult:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int
    connected: bool = True


def _project(x, basis):
    for b in basis:
        x -= (b @ x) * b
    return x


def _power_iteration(matvec, n, basis, tol, max_iter, start=None):
    """
    Top eigenpair of a PSD operator restricted to the complement of `basis`.
    Stops on the residual ||Bx - mu x|| <= tol (x unit).
    """
    if start is None:
        x = np.random.default_rng(0).standard_normal(n)
    else:
        x = np.array(start, dtype=np.float64)
    x = _project(x, basis)
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ConvergenceError(0, float('inf'))
    x /= norm
    residual = float('inf')
    for iteration in range(1, max_iter + 1):
        y = _project(matvec(x), basis)
        mu = float(x @ y)
        residual = float(np.linalg.norm(y - mu * x))
        if residual <= tol:
            return mu, x, residual, iteration
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0, x, 0.0, iteration
        x = y / norm
    raise ConvergenceError(max_iter, residual)


def _top_eigenpair(matvec, n, basis, tol, max_iter):
    """ARPACK first on larger operators, always finished by the residual-checked power iteration"""
    start = None
    if n >= LANCZOS_MIN_N:
        operator = scipy.sparse.linalg.LinearOperator(
            (n, n), matvec=lambda x: _project(matvec(np.asarray(x, dtype=np.float64).ravel()), basis),
            dtype=np.float64)
        try:
            _, vectors = scipy.sparse.linalg.eigsh(operator, k=1, which='LA', tol=tol / 10)
            start = vectors[:, 0]
        except scipy.sparse.linalg.ArpackError as e:
            logger.warning(f'ARPACK failed ({e}); falling back to power iteration')
    return _power_iteration(matvec, n, basis, tol, max_iter, start=start)


def _canonical_sign(x):
    pivot = int(np.argmax(np.abs(x)))
    return -x if x[pivot] < 0 else x


def _require_no_isolated(graph):
    if graph.n and graph.min_degree == 0:
        raise IsolatedVertexError(int(np.argmin(graph.degrees)))


def normalized_fiedler(graph, tol=None, max_iter=None) -> EigenResult:
    """
    Second-smallest eigenpair of the normalised Laplacian L = I - D^-1/2 A D^-1/2.

    Works on B = 2I - L (spectrum in [0, 2]) with the kernel direction sqrt(deg)
    deflated. A disconnected graph gives value 0 with connected=False and a
    vector separating the first component from the rest.
    """
    tol = Config.EIGEN_TOL if tol is None else tol
    max_iter = Config.EIGEN_MAX_ITER if max_iter is None else max_iter
    if tol <= 0:
        raise GraphError(f'tolerance must be positive, got {tol}')
    _require_no_isolated(graph)
    if graph.n < 2:
        raise GraphError('normalised Laplacian needs at least two vertices')
    sqrt_deg = np.sqrt(graph.degrees.astype(np.float64))
    kernel = sqrt_deg / np.linalg.norm(sqrt_deg)

    parts = components(graph)
    if len(parts) > 1:
        x = np.zeros(graph.n)
        x[parts[0]] = sqrt_deg[parts[0]]
        x = _project(x, [kernel])
        x /= np.linalg.norm(x)
        logger.debug(f'{graph} is disconnected ({len(parts)} components); lambda = 0')
        return EigenResult(0.0, x, 0.0, 0, connected=False)

    inv_sqrt = 1.0 / sqrt_deg
    adjacency = graph.adjacency()

    def matvec(x):
        return x + inv_sqrt * (adjacency @ (inv_sqrt * x))

    mu, x, residual, iterations = _top_eigenpair(matvec, graph.n, [kernel], tol, max_iter)
    value = min(2.0, max(0.0, 2.0 - mu))
    logger.debug(f'lambda(G) = {value:.10f} for {graph} after {iterations} iterations')
    return EigenResult(value, _canonical_sign(x), residual, iterations)


def lambda_normalized(graph, tol=None, max_iter=None) -> float:
    """lambda(G): second-smallest normalised-Laplacian eigenvalue (0 when disconnected)"""
    return normalized_fiedler(graph, tol, max_iter).value


def _adjacency_spectrum_edges(graph, tol, max_iter):
    """(lambda_1, lambda_2, lambda_n) of the adjacency matrix"""
    if graph.n < 2:
        raise GraphError('adjacency spectrum needs at least two vertices')
    if len(components(graph)) > 1:
        raise DisconnectedGraphError(f'{graph} is disconnected')
    d = float(graph.max_degree)
    adjacency = graph.adjacency()

    def shifted(x):
        return adjacency @ x + d * x

    if graph.is_regular():
        top = np.ones(graph.n) / math.sqrt(graph.n)
        lambda_1 = d
    else:
        mu, top, _, _ = _top_eigenpair(shifted, graph.n, [], tol, max_iter)
        lambda_1 = mu - d
    mu, _, _, _ = _top_eigenpair(shifted, graph.n, [top], tol, max_iter)
    lambda_2 = mu - d
    mu, _, _, _ = _top_eigenpair(lambda x: d * x - adjacency @ x, graph.n, [], tol, max_iter)
    lambda_n = d - mu
    return lambda_1, lambda_2, lambda_n


def lambda2_adjacency(graph, tol=None, max_iter=None) -> float:
    """Second-largest adjacency eigenvalue (signed)"""
    tol = Config.EIGEN_TOL if tol is None else tol
    max_iter = Config.EIGEN_MAX_ITER if max_iter is None else max_iter
    return _adjacency_spectrum_edges(graph, tol, max_iter)[1]


def lambda2_absolute(graph, tol=None, max_iter=None) -> float:
    """max(|lambda_2|, |lambda_n|), the convention of the cited random-graph results"""
    tol = Config.EIGEN_TOL if tol is None else tol
    max_iter = Config.EIGEN_MAX_ITER if max_iter is None else max_iter
    _, lambda_2, lambda_n = _adjacency_spectrum_edges(graph, tol, max_iter)
    return max(abs(lambda_2), abs(lambda_n))


def lazy_walk_spectral_gap(graph, limit=2000) -> float:
    """
    1 - lambda_2(P) for the lazy walk P = (I + D^-1 A)/2, by dense
    eigendecomposition of its symmetric conjugate.
    """
    if graph.n > limit:
        raise ExhaustiveLimitError(graph.n, limit)
    _require_no_isolated(graph)
    inv_sqrt = 1.0 / np.sqrt(graph.degrees.astype(np.float64))
    sym = 0.5 * (np.eye(graph.n) + inv_sqrt[:, None] * graph.adjacency().toarray() * inv_sqrt[None, :])
    eigenvalues = np.linalg.eigvalsh(sym)
    return float(1.0 - eigenvalues[-2])


def certified_cheeger_lower_bound(graph, tol=None) -> float:
    """
    Lower bound on h(G) from the spectrum: h >= min_degree * h' >= min_degree * lambda/2
    (for |S| <= n/2 both sides of the cut have volume >= min_degree |S|).
    """
    tol = Config.EIGEN_TOL if tol is None else tol
    value = lambda_normalized(graph, tol)
    return graph.min_degree * max(0.0, value - tol) / 2


# ---------------------------------------------------------------------------
# Sweep cut
# ---------------------------------------------------------------------------

def sweep_cut(graph, tol=None, fiedler: Optional[EigenResult] = None):
    """
    Fiedler sweep: sort vertices by x_v/sqrt(deg v) and return the prefix (or its
    complement, whichever has the smaller volume) minimising
    e(S, V \\ S)/vol(S). Guarantees vol(S) <= vol(V)/2 and
    e(S, V \\ S) <= vol(S) sqrt(2 lambda).

    Returns (S, cut_ratio).
    """
    tol = Config.EIGEN_TOL if tol is None else tol
    result = fiedler if fiedler is not None else normalized_fiedler(graph, tol)
    degrees = graph.degrees
    total = int(degrees.sum())

    if not result.connected:
        parts = components(graph)
        lightest = min(parts, key=lambda part: (int(degrees[part].sum()), int(part[0])))
        return frozenset(lightest.tolist()), 0.0

    y = result.vector / np.sqrt(degrees.astype(np.float64))
    order = np.lexsort((np.arange(graph.n), y))
    in_prefix = np.zeros(graph.n, dtype=bool)
    cut = vol = 0
    best_ratio, best_k, best_vol = math.inf, 0, 0
    for k, v in enumerate(order[:-1], start=1):
        nbrs = graph.neighbors(v)
        cut += int(degrees[v]) - 2 * int(np.count_nonzero(in_prefix[nbrs]))
        vol += int(degrees[v])
        in_prefix[v] = True
        ratio = cut / min(vol, total - vol)
        if ratio < best_ratio:
            best_ratio, best_k, best_vol = ratio, k, vol

    prefix = order[:best_k]
    if best_vol <= total / 2:
        chosen = frozenset(prefix.tolist())
    else:
        chosen = frozenset(order[best_k:].tolist())

    x = result.vector
    rayleigh = float(x @ (x - (1.0 / np.sqrt(degrees)) * (graph.adjacency() @ (x / np.sqrt(degrees)))))
    bound = math.sqrt(2 * max(rayleigh, result.value) + 2 * tol)
    if best_ratio > bound + 1e-9:
        raise MinorsError(f'sweep ratio {best_ratio:.6g} exceeds sqrt(2 lambda) = {bound:.6g}')
    return chosen, best_ratio


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class Metric:
    value: Optional[float]
    method: str

    def to_dict(self):
        return {'value': self.value, 'method': self.method}


@dataclass
class ExpansionReport:
    n: int
    m: int
    max_degree: int
    connected: bool
    h: Metric
    h_k: Metric
    k: Optional[int]
    h_prime: Metric
    phi: Metric
    lambda_norm: Metric
    lambda2_adj: Metric
    abs_lambda2: Metric
    vertex_expansion: Metric
    half_ball_radius: Metric

    def to_dict(self):
        data = {'n': self.n, 'm': self.m, 'max_degree': self.max_degree,
                'connected': self.connected, 'k': self.k}
        for name in ('h', 'h_k', 'h_prime', 'phi', 'lambda_norm', 'lambda2_adj', 'abs_lambda2',
                     'vertex_expansion', 'half_ball_radius'):
            data[name] = getattr(self, name).to_dict()
        return data


def analyze(graph, k=None, tol=None, limit=None) -> ExpansionReport:
    """
    Every expansion metric of G, exact where n is within the exhaustive limit.

    From h(G) it also derives the guaranteed vertex expansion |N(X)|/|X| >= h/d
    and the radius at which a ball around any vertex must reach n/2.
    """
    tol = Config.EIGEN_TOL if tol is None else tol
    limit = Config.EXHAUSTIVE_LIMIT if limit is None else limit
    connected = graph.n > 0 and len(components(graph)) == 1
    small = graph.n <= limit
    unknown = Metric(None, CERTIFIED)
    d = graph.max_degree

    lam = Metric(None, ESTIMATE)
    lam2 = Metric(None, ESTIMATE)
    abs2 = Metric(None, ESTIMATE)
    if graph.n >= 2 and graph.min_degree > 0:
        lam = Metric(lambda_normalized(graph, tol), ESTIMATE)
        if connected:
            _, l2, ln = _adjacency_spectrum_edges(graph, tol, Config.EIGEN_MAX_ITER)
            lam2 = Metric(l2, ESTIMATE)
            abs2 = Metric(max(abs(l2), abs(ln)), ESTIMATE)

    if small and graph.n >= 2 and graph.m > 0:
        h = Metric(float(edge_expansion_exact(graph, limit)[0]), EXACT)
        h_prime = Metric(float(h_prime_exact(graph, limit)[0]), EXACT)
        phi = Metric(float(conductance_exact(graph, limit)), EXACT) if connected else Metric(0.0, EXACT)
    elif lam.value is not None:
        h_prime = Metric(max(0.0, lam.value - tol) / 2, CERTIFIED)
        h = Metric(graph.min_degree * h_prime.value, CERTIFIED)
        phi = Metric(h.value / (2 * d), CERTIFIED)
    else:
        h = h_prime = phi = unknown

    h_k = Metric(None, EXACT)
    if k is not None and small and 1 <= k <= graph.n // 2:
        h_k = Metric(float(cheeger_exact(graph, k, limit)[0]), EXACT)
    vertex = radius = unknown
    if h.value and connected:
        vertex = Metric(vertex_expansion_bound(h.value, d, 1), CERTIFIED)
        radius = Metric(_half_ball_radius(h.value, d, graph.n), CERTIFIED)
    return ExpansionReport(graph.n, graph.m, d, connected, h, h_k, k, h_prime, phi, lam, lam2, abs2,
                           vertex, radius)


def _half_ball_radius(h, d, n):
    """Smallest i for which the ball-growth guarantee from one vertex reaches n/2"""
    radius = max(0, math.ceil(math.log(n / 2) / math.log1p(h / d)))
    while radius > 0 and ball_growth_bound(h, d, n, 1, radius - 1) >= n / 2:
        radius -= 1
    while ball_growth_bound(h, d, n, 1, radius) < n / 2:
        radius += 1
    return radius


@dataclass
class GateReport:
    """Which route (if any) certifies the hypotheses of the main theorem"""
    eps: float
    route: str
    exact_certified: Optional[bool] = None
    eigenvalue_certified: Optional[bool] = None
    details: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.route != 'uncertified'

    def to_dict(self):
        return {'eps': self.eps, 'route': self.route, 'exact_certified': self.exact_certified,
                'eigenvalue_certified': self.eigenvalue_certified, 'details': self.details}


def gate_theorem_hypotheses(graph, eps, tol=None, limit=None) -> GateReport:
    """
    Evaluate both certification routes:

    exact       h(G) >= eps d and h_k(G) >= (1/2 + eps) d with k = ceil(eps n) (capped at n/2),
                by brute force (n within the exhaustive limit);
    eigenvalue  G d-regular with lambda_2 < (1/2 - eps) d, which implies h(G) >= d/4 and
                h_{eps n/4}(G) >= (1/2 + eps/2) d.

    The route is the first certified one in that order, else 'uncertified'.
    A small graph that passes both (the Petersen graph at eps = 0.1) is
    reported as 'exact'; `eigenvalue_certified` still records the second test.
    """
    if not 0 < eps < 0.5:
        raise GraphError(f'eps must lie in (0, 1/2), got {eps}')
    tol = Config.EIGEN_TOL if tol is None else tol
    limit = Config.EXHAUSTIVE_LIMIT if limit is None else limit
    report = GateReport(eps=eps, route='uncertified')
    if graph.n < 2 or graph.m == 0:
        report.details['reason'] = 'no edges'
        return report
    d = graph.max_degree
    connected = len(components(graph)) == 1
    report.details['max_degree'] = d
    report.details['connected'] = connected

    if graph.n <= limit:
        h, _ = edge_expansion_exact(graph, limit)
        k = min(max(1, math.ceil(eps * graph.n)), graph.n // 2)
        h_k, _ = cheeger_exact(graph, k, limit)
        report.exact_certified = bool(float(h) >= eps * d - 1e-12 and float(h_k) >= (0.5 + eps) * d - 1e-12)
        report.details.update({'h': float(h), 'k': k, 'h_k': float(h_k)})

    if graph.is_regular() and connected:
        lambda_2 = lambda2_adjacency(graph, tol)
        report.eigenvalue_certified = bool(lambda_2 + tol < (0.5 - eps) * d)
        report.details['lambda2'] = lambda_2
        if report.eigenvalue_certified:
            report.details['implied_h'] = d / 4
            report.details['implied_h_k'] = (0.5 + eps / 2) * d
            report.details['implied_k'] = eps * graph.n / 4

    if report.exact_certified:
        report.route = 'exact'
    elif report.eigenvalue_certified:
        report.route = 'eigenvalue'
    logger.info(f'Hypothesis gate for {graph} at eps={eps}: {report.route}')
    return report


__all__ = [
    'EXACT', 'CERTIFIED', 'ESTIMATE', 'subset_tables', 'volume', 'stationary_measure', 'cheeger_exact',
    'edge_expansion_exact', 'h_prime_exact', 'conductance_exact', 'EigenResult',
    'normalized_fiedler', 'lambda_normalized', 'lambda2_adjacency', 'lambda2_absolute',
    'lazy_walk_spectral_gap', 'certified_cheeger_lower_bound', 'sweep_cut', 'Metric',
    'ExpansionReport', 'analyze', 'GateReport', 'gate_theorem_hypotheses',
]
