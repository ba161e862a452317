import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def quad1d():
    from smco.core import Objective

    return Objective(lambda x: -float((x[0] - 1.0) ** 2), 1)
