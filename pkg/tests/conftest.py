import numpy as np
import pytest

from Service.group_service import GroupService


def system(text, depth=None):
    return GroupService.parse_radix_spec(text, depth)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def dyadic3():
    return GroupService.dyadic(3)


@pytest.fixture
def mixed():
    """(2, 3, 4, 2, 3), M_N = 144"""
    return system("2,3,4", 5)
