import time

import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def verdict(request):
    """verdict(label, ok, detail) records one PASS/FAIL line for the end-of-run summary."""
    lines = request.config.stash[_LINES_KEY]

    def record(label, ok, detail=""):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def basket_run():
    from qmcpricing.bench import BasketExperimentConfig, run_basket_experiment
    start = time.perf_counter()
    report = run_basket_experiment(BasketExperimentConfig(), workers=1)
    return report, time.perf_counter() - start


@pytest.fixture(scope="session")
def asian_run():
    from qmcpricing.bench import AsianExperimentConfig, run_asian_experiment
    start = time.perf_counter()
    report = run_asian_experiment(AsianExperimentConfig(), workers=1)
    return report, time.perf_counter() - start
