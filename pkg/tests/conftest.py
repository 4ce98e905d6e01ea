import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from orbita.poisson import WeightVector

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

#: acceptance outcomes, filled by tests/test_acceptance.py and printed at the end
ACCEPTANCE = {}


@pytest.fixture
def pv60():
    return WeightVector(60.0, 20.0, 0.0)


@pytest.fixture
def swapped_orbit_pair():
    return WeightVector.from_lam_mu(50, 15, 100), WeightVector.from_lam_mu(15, 50, 100)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[k]
        tr.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {line}")
