import pytest

from eigenwl.graphs import (
    complete_graph,
    cycle_graph,
    disjoint_union,
    enumerate_graphs,
    path_graph,
)


@pytest.fixture(scope="session")
def corpus_n5():
    """All graphs on up to 5 vertices, one per isomorphism class."""
    out = []
    for n in range(1, 6):
        out.extend(enumerate_graphs(n))
    return out


@pytest.fixture(scope="session")
def connected_n6():
    out = []
    for n in range(1, 7):
        out.extend(enumerate_graphs(n, connected_only=True))
    return out


@pytest.fixture(scope="session")
def connected_n7():
    out = []
    for n in range(1, 8):
        out.extend(enumerate_graphs(n, connected_only=True))
    return out


@pytest.fixture(scope="session")
def c6():
    return cycle_graph(6)


@pytest.fixture(scope="session")
def two_triangles():
    return disjoint_union(cycle_graph(3), cycle_graph(3))


@pytest.fixture(scope="session")
def k2():
    return complete_graph(2)


@pytest.fixture(scope="session")
def p3():
    return path_graph(3)
