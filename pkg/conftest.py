"""Shared fixture graphs"""
import pytest

from expander_minors.generators import complete, complete_bipartite, cycle, petersen, two_triangles
from expander_minors.graph_core import build_graph


@pytest.fixture
def k2():
    return build_graph(2, [(0, 1)])


@pytest.fixture
def k4():
    return complete(4)


@pytest.fixture
def k5():
    return complete(5)


@pytest.fixture
def c4():
    return cycle(4)


@pytest.fixture
def c6():
    return cycle(6)


@pytest.fixture
def c12():
    return cycle(12)


@pytest.fixture
def petersen_graph():
    return petersen()


@pytest.fixture
def bridged_triangles():
    return two_triangles()


@pytest.fixture
def k33():
    return complete_bipartite(3, 3)


@pytest.fixture
def k35():
    return complete_bipartite(3, 5)


@pytest.fixture
def star():
    """K_{1,3} with centre 0"""
    return complete_bipartite(1, 3)


@pytest.fixture
def c20():
    return cycle(20)


@pytest.fixture
def barbell():
    """Two K10 (0..9 and 10..19) joined by the edge 9-10"""
    edges = [(u, v) for side in (0, 10) for u in range(side, side + 10) for v in range(u + 1, side + 10)]
    return build_graph(20, edges + [(9, 10)])
