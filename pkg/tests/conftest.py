import numpy as np
import pytest

from c2plus import Config, preprocess


def uniform_points(rng, n, scale=1.0):
    return rng.random((n, 2)) * scale


def clustered_points(rng, n, n_clusters=4, spread=0.03):
    centers = rng.random((n_clusters, 2))
    lab = rng.integers(0, n_clusters, size=n)
    pts = centers[lab] + spread * rng.normal(size=(n, 2))
    return np.unique(pts, axis=0)


def generator_values(E, kind=0):
    x, y = E[:, 0], E[:, 1]
    if kind == 0:
        return (1.0 + x * y) ** 2
    if kind == 1:
        return x * x + y * y
    if kind == 2:
        return np.sin(3.0 * x) ** 2 + 0.5 * (y - 0.5) ** 2
    return np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) * 4.0)


def dataset(seed, n, clustered=False, kind=None):
    rng = np.random.default_rng(seed)
    E = clustered_points(rng, n) if clustered else uniform_points(rng, n)
    return E, generator_values(E, seed % 4 if kind is None else kind)


@pytest.fixture(scope="session")
def small_state():
    E, f = dataset(7, 60)
    return preprocess(E), f


@pytest.fixture(scope="session")
def medium_state():
    E, f = dataset(11, 200, kind=0)
    return preprocess(E), f


@pytest.fixture(scope="session")
def config():
    return Config()


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow; pass --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
