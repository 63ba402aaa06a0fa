import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from farey_spectra.config import ToolkitConfig, set_config  # noqa: E402

collect_ignore = ["examples"]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: heavy grids (K=80 spectra, level-25 growth); still run by default")


@pytest.fixture(autouse=True)
def toolkit_config():
    """Deterministic settings for every test, independent of the caller's environment and .env."""
    config = ToolkitConfig(quiet=True)
    set_config(config)
    yield config
    set_config(None)
