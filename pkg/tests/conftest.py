import pytest


def pytest_addoption(parser):
    parser.addoption("--full", action="store_true", default=False, help="Also run the exhaustive enumerations")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--full"):
        return
    skip_slow = pytest.mark.skip(reason="exhaustive enumeration, run with --full")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
