"""
Exception hierarchy
Every failure the library can signal derives from MinorsError so callers
(the CLI and the experiment harness) can catch one type per cell.
"""


class MinorsError(Exception):
    """Base class for all library errors"""


class GraphError(MinorsError):
    """Invalid graph input: bad endpoint, self-loop, duplicate edge, bad vertex set"""

    def __init__(self, message, pair=None, vertex=None):
        super().__init__(message)
        self.pair = pair
        self.vertex = vertex


class NoPathError(MinorsError):
    """The two vertex sets lie in different components"""


class ExhaustiveLimitError(MinorsError):
    """Brute-force query on a graph above the configured vertex limit"""

    def __init__(self, n, limit):
        super().__init__(f'n={n} exceeds exhaustive limit {limit}; use certified bounds instead')
        self.n = n
        self.limit = limit


class EdgelessGraphError(MinorsError):
    """Operation needs at least one edge"""


class IsolatedVertexError(MinorsError):
    """Operation needs every vertex (or the given vertex) to have a neighbour"""

    def __init__(self, vertex):
        super().__init__(f'vertex {vertex} is isolated')
        self.vertex = vertex


class DisconnectedGraphError(MinorsError):
    """Operation needs a connected graph"""


class ConvergenceError(MinorsError):
    """Iterative eigensolver exhausted its budget"""

    def __init__(self, iterations, residual):
        super().__init__(f'no convergence after {iterations} iterations (residual {residual:.3e})')
        self.iterations = iterations
        self.residual = residual


class RegimeError(MinorsError):
    """Parameters fall outside the regime where the construction is meaningful"""

    def __init__(self, inequality):
        super().__init__(f'degenerate regime: {inequality}')
        self.inequality = inequality


class CoveringFailure(MinorsError):
    """Every covering retry exceeded the size bound"""

    def __init__(self, best, bound, attempts):
        size = len(best) if best is not None else None
        super().__init__(f'covering set: {attempts} attempts, best size {size} > bound {bound}')
        self.best = best
        self.bound = bound
        self.attempts = attempts


class EngineInvariantError(MinorsError):
    """The engine broke a partition invariant it guarantees by construction"""


class GenerationError(MinorsError):
    """Instance generation failed (parity, parameters, retry budget)"""


class ConfigError(MinorsError):
    """Invalid experiment configuration"""
