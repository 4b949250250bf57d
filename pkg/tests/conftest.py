import pytest
from hypothesis import HealthCheck, settings

from bvexplicit.arith_tables import build_lambda_table, build_moebius_table
from bvexplicit.bounds import compute_constants
from bvexplicit.verifier import Workspace

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def table():
    return build_lambda_table(10 ** 4)


@pytest.fixture(scope="session")
def mu():
    return build_moebius_table(10 ** 4)


@pytest.fixture(scope="session")
def consts():
    return compute_constants()


@pytest.fixture(scope="session")
def ws(consts):
    return Workspace(10 ** 4, consts)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
