import pytest

from twicemarked.assembly import ChainSpec, build_chain
from twicemarked.graph import Graph, MarkedGraph, cycle_graph, marked_cycle, path_graph

# criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "run_last: run after every other test")


def pytest_collection_modifyitems(items):
    items.sort(key=lambda item: item.get_closest_marker("run_last") is not None)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def c7():
    return marked_cycle(1, 6)


@pytest.fixture
def c3():
    return marked_cycle(1, 2)


@pytest.fixture
def double_edge():
    return MarkedGraph(cycle_graph(2), 0, 1)


@pytest.fixture
def path4():
    return MarkedGraph(path_graph(4), 0, 3)


@pytest.fixture
def k4():
    return Graph(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def chain33():
    return build_chain(ChainSpec.uniform(3, 3))
