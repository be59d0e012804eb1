"""Shared fixtures: one default-config protocol run reused across tests."""

import pytest

from xmodal import default_config, run_protocol


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def rs(cfg):
    # The full factorial run is cheap (~0.1 s) but many tests want it;
    # session scope keeps the suite fast and guarantees they all see the
    # exact same records.
    return run_protocol(cfg)
