"""
Shared pytest fixtures.
"""
import factory.random
import numpy as np
import pytest

from apps.limits import LimitSpec

from .factories import DiskGridFactory, RectangleGridFactory


@pytest.fixture(autouse=True)
def _reseed_factories():
    factory.random.reseed_random(1234)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def square():
    """(-1, 1)^2 on a 17 x 17 grid, spacing 1/8."""
    return RectangleGridFactory()


@pytest.fixture
def disk():
    return DiskGridFactory()


@pytest.fixture
def half_spec():
    """gamma = 1/2, Q = 1 on the unit disk: limit value 2."""
    return LimitSpec(gamma=0.5, Q=1.0, R=1.0)


@pytest.fixture
def results_dir(tmp_path):
    return tmp_path / 'results'
