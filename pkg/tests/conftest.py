import pytest

from variantscan.event_log import parse_csv
from variantscan.synthgen import StepGenConfig, generate_step_log

# three cases, integer epoch-second timestamps
EXAMPLE_CSV = b"""case_id,activity,timestamp
c1,a,13
c1,b,23
c2,a,14
c2,b,16
c2,c,20
c3,a,17
c3,b,20
c3,c,35
"""

A = ("a", "b", "c", "d")
B = ("a", "x", "y", "d")  # levenshtein_norm(A, B) == 0.5


@pytest.fixture
def example_log():
    return parse_csv(EXAMPLE_CSV)


def step_log(regions, **kw):
    return generate_step_log(StepGenConfig(tuple(regions), **kw))


@pytest.fixture
def aba_log():
    return step_log([(A, 70), (B, 30), (A, 50)])


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
