import pytest

from fracbinom import ProcessParams


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run Monte Carlo acceptance checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo check, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def table_params():
    """Parameters of the estimator study tables."""
    return ProcessParams(lam=0.3, mu=0.5, nu=0.8, capacity=500, initial=30)


@pytest.fixture
def figure_params():
    """Parameters of the fractional sample-path figure."""
    return ProcessParams(lam=0.015, mu=0.05, nu=0.8, capacity=500, initial=300)
