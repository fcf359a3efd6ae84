import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fuzzylabel import _kernels

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=_kernels.available_backends())
def backend(request, monkeypatch):
    """Route every kernel call through one backend for the duration of a test."""
    impl = _kernels.get_backend(request.param)
    for name in ("pairwise_sq_dists", "knn_indices", "fcm_memberships", "propagate"):
        monkeypatch.setattr(_kernels, name, getattr(impl, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
