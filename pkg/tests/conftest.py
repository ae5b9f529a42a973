# Hypothesis profile shared by the property suites
from hypothesis import settings
settings.register_profile("fpi", max_examples=40, deadline=None)
settings.load_profile("fpi")

import pytest

from app.schemas.config import DualIterConfig, PrimalIterConfig
from tests.factories import scalar_instance


@pytest.fixture
def scalar():
    return scalar_instance()


@pytest.fixture
def scalar_infeasible():
    return scalar_instance(gamma=3.0)


@pytest.fixture
def tight_dual():
    return DualIterConfig(tol=1e-13)


@pytest.fixture
def tight_primal():
    return PrimalIterConfig(tol=1e-13)


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "out"
    path.mkdir()
    return path
