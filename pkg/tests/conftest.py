import pytest

from mcfpga import devicelab, tasks
from mcfpga.payoffs import OptionTask, PayoffSpec
from mcfpga.simcore import GbmParams, HestonParams


@pytest.fixture(scope="session")
def bundled_tasks():
    return tasks.load_tasks()


@pytest.fixture(scope="session")
def table():
    return devicelab.load_measurements()


@pytest.fixture
def control_task():
    return OptionTask(
        designation="bs-eu-control",
        model=GbmParams(s0=100.0, sigma=0.2, r=0.05),
        payoff=PayoffSpec("european-call", strike=100.0),
        maturity=1.0,
        paths=10_000,
        steps=16,
    )


@pytest.fixture
def heston():
    return HestonParams(s0=100.0, v0=0.04, kappa=2.0, theta=0.04, xi=0.3, rho=-0.7, r=0.05)


_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and (report.when == "call" or report.failed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        if report.outcome != "passed" or doc not in _ACCEPTANCE:
            _ACCEPTANCE[doc] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for doc, outcome in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  criterion {doc}")
