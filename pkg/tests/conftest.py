import pytest

from nilspec.graphs import Graph, edgeless_graph, path_graph
from nilspec.twostep import build_graph_group


@pytest.fixture(scope="session")
def heis():
    return build_graph_group(edgeless_graph(2))


@pytest.fixture(scope="session")
def p3():
    return build_graph_group(path_graph(3))


@pytest.fixture(scope="session")
def p4():
    return build_graph_group(path_graph(4))


@pytest.fixture(scope="session")
def free3():
    return build_graph_group(edgeless_graph(3))


@pytest.fixture(scope="session")
def square():
    # 4-cycle a-b-c-d is the join {a,c} * {b,d}
    return build_graph_group(Graph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
