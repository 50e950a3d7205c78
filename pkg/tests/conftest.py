import os
from importlib import resources

import numpy as np
import pytest

from plspath.ingest import Dataset, default_registry, impute_missing, load_dataset, standardize
from plspath.modelspec import default_model

FIXTURE_CSV = str(resources.files("plspath").joinpath("data/eu27_fixture.csv"))


def pytest_collection_modifyitems(config, items):
    if os.environ.get("PLSPATH_LIVE") == "1":
        return
    skip = pytest.mark.skip(reason="live network test; set PLSPATH_LIVE=1 to run")
    for item in items:
        if "live" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def fixture_data(registry):
    return load_dataset(FIXTURE_CSV, registry)


@pytest.fixture(scope="session")
def fixture_x(fixture_data):
    return standardize(impute_missing(fixture_data))


def make_dataset(values, columns=None, countries=None):
    values = np.asarray(values, dtype=float)
    n, p = values.shape
    columns = columns or [f"V{j}" for j in range(p)]
    countries = countries or [f"C{i:03d}" for i in range(n)]
    return Dataset(countries, columns, values, np.isnan(values))


ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def check(name, ok, detail=""):
        ACCEPTANCE.append((name, bool(ok), detail))
        print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'} | {name} | {detail}")
        assert ok, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
