import pytest

from toricsim import lattice


@pytest.fixture(scope="session")
def geo22():
    return lattice.build_lattice(2, 2)


@pytest.fixture(scope="session")
def geo23():
    return lattice.build_lattice(2, 3)


@pytest.fixture(scope="session")
def geo33():
    return lattice.build_lattice(3, 3)
