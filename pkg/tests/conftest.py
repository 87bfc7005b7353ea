import sys
from pathlib import Path

import pytest
from hypothesis import settings

from ncmsreach import FiniteTS, LabelSpace, TimeGrid, Trajectory, TrajectorySet, ts_to_ncms

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None)
settings.load_profile("default")

MODELS = Path(__file__).resolve().parent.parent / "demos" / "models"


def lset(horizon, *runs, step=1, labels="abcd"):
    """Label trajectory set from ``("[0,2]", "abc")`` pairs."""
    return TrajectorySet(
        TimeGrid(step, horizon),
        LabelSpace(frozenset(labels)),
        [Trajectory(d, tuple(v)) for d, v in runs],
    )


@pytest.fixture
def chain_ts():
    return FiniteTS(("a", "b", "c"), frozenset({("a", "b"), ("b", "c")}), frozenset({"a"}))


@pytest.fixture
def chain_sink_ts():
    return FiniteTS(
        ("a", "b", "c", "d"),
        frozenset({("a", "b"), ("b", "c"), ("d", "d")}),
        frozenset({"a"}),
    )


@pytest.fixture
def chain(chain_ts):
    return ts_to_ncms(chain_ts, TimeGrid(1, 2))


@pytest.fixture
def chain_sink(chain_sink_ts):
    return ts_to_ncms(chain_sink_ts, TimeGrid(1, 2))


@pytest.fixture
def models():
    return MODELS


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS.values():
            terminalreporter.write_line(line)
