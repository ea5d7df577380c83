import itertools

import pytest

from sgclust.graph import Graph
from sgclust.solver import get_backend

ACCEPTANCE = {}  # criterion number -> (passed, detail), filled by test_acceptance


def complete(n, w=1):
    return Graph(n, tuple((i, j, w) for i, j in itertools.combinations(range(n), 2)))


def two_triangles(w=1):
    return Graph(6, ((0, 1, w), (0, 2, w), (1, 2, w), (3, 4, w), (3, 5, w), (4, 5, w)))


def barbell():
    """Two unit K4s, {0..3} and {4..7}, joined by the bridge (3, 4)."""
    left = [(i, j, 1) for i, j in itertools.combinations(range(4), 2)]
    right = [(i, j, 1) for i, j in itertools.combinations(range(4, 8), 2)]
    return Graph(8, tuple(left + right + [(3, 4, 1)]))


@pytest.fixture(params=["cbc", "highs"])
def backend(request):
    return get_backend(request.param)


@pytest.fixture
def cbc():
    return get_backend("cbc")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
