import pytest

from necklace.quiver import a_n, double, jordan_quiver, kronecker, loop_quiver


@pytest.fixture
def Q1():
    return double(jordan_quiver())


@pytest.fixture
def Q2():
    return double(loop_quiver(2))


@pytest.fixture
def A2():
    return double(a_n(2))


@pytest.fixture
def K3():
    return double(kronecker(3))


@pytest.fixture
def free2():
    return loop_quiver(2)
