import pytest

from models import PhysicalParams, PotentialParams, dimension_reduce


@pytest.fixture
def phys():
    return PhysicalParams()


@pytest.fixture
def dim3():
    return dimension_reduce(3, 0)


@pytest.fixture
def p1_params():
    """a=1, c=0.5, M=3 puts b=1 on the constraint surface."""
    return PotentialParams(a=1.0, b=1.0, c=0.5)


@pytest.fixture
def p2():
    """M=5 member of the family: a=1, c=0.5 -> b=0.5."""
    return PotentialParams(a=1.0, b=0.5, c=0.5), dimension_reduce(5, 0)


@pytest.fixture
def hydrogen():
    return PotentialParams(a=1.0)
