"""Shared fixtures and the acceptance-criterion reporter."""
import numpy as np
import pytest

from l1geo import Dictionary, ProblemInstance
from l1geo.dictionaries import (complete_graph_edges, difference_dict,
                                incidence_dict)

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, label): acceptance criterion test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        num, label = marker.args
        status = "PASS" if report.passed else "FAIL"
        # a parametrized criterion fails as a whole if any case fails
        if _CRITERIA.get(num, (None, "PASS"))[1] == "FAIL":
            status = "FAIL"
        _CRITERIA[num] = (label, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        label, status = _CRITERIA[num]
        terminalreporter.write_line(f"[criterion {num:02d}] {status} - {label}")


@pytest.fixture(scope="session")
def tv3_dict() -> Dictionary:
    """Atoms of the length-3 total-variation penalty: columns (-1,1,0), (0,-1,1)."""
    return Dictionary(difference_dict(3))


@pytest.fixture(scope="session")
def k4_dict() -> Dictionary:
    """Incidence dictionary of the complete graph on 4 vertices (6 atoms)."""
    return Dictionary(incidence_dict(complete_graph_edges(4), 4))


@pytest.fixture(scope="session")
def bench3d() -> ProblemInstance:
    """Small 3-d benchmark with a segment solution set.

    Analysis rows (1,1,0), (1,0,1), (2,1,1) (the third is the sum of the
    first two, so the lineality of the penalty is span{(1,-1,-1)}), a 3x3
    Phi of rank 2 with kernel span{(0,1,-1)}, y = (1,1,0), lam = 1/2.  The
    solution set is the segment from (0,1/2,0) to (0,0,1/2); every solution
    has Phi x = (1/2,1/2,0), penalty value 1, and objective 3/4.
    """
    Dstar = np.array([[1.0, 1.0, 0.0],
                      [1.0, 0.0, 1.0],
                      [2.0, 1.0, 1.0]])
    Phi = np.array([[1.0, 1.0, 1.0],
                    [3.0, 1.0, 1.0],
                    [np.sqrt(2.0), 0.0, 0.0]])
    return ProblemInstance(dictionary=Dictionary(Dstar.T), Phi=Phi,
                           y=np.array([1.0, 1.0, 0.0]), lam=0.5)
