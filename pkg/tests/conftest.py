import pytest

from pipphase.dag import Dag, transitive_closure


@pytest.fixture
def path3():
    return Dag(3, [(1, 2), (2, 3)])


@pytest.fixture
def diamond():
    return Dag(4, [(1, 2), (1, 3), (2, 4), (3, 4)])


@pytest.fixture
def path3_closure(path3):
    return transitive_closure(path3)
