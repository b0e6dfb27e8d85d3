import pytest

from psop import finite_type_space, infinite_type_space
from psop.classify import GridParams


@pytest.fixture(scope="session")
def fin():
    """Finite-type space over alpha_n = n."""
    return finite_type_space()


@pytest.fixture(scope="session")
def inf():
    """Infinite-type space over alpha_n = n."""
    return infinite_type_space()


@pytest.fixture(scope="session")
def small_grid():
    return GridParams(N=64, K=16, P=4, Q=8)
