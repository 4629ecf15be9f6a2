import pytest

from sldkit import build_basis, compute_structure_constants


@pytest.fixture(scope="session")
def basis2():
    return build_basis(2)


@pytest.fixture(scope="session")
def basis3():
    return build_basis(3)


@pytest.fixture(scope="session")
def constants2(basis2):
    return compute_structure_constants(basis2)


@pytest.fixture(scope="session")
def constants3(basis3):
    return compute_structure_constants(basis3)
