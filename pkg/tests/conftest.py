import pytest

from qpweyl import make_family


@pytest.fixture(scope="session")
def d5():
    return make_family("D5")


@pytest.fixture(scope="session")
def e6():
    return make_family("E6")


@pytest.fixture(scope="session")
def e7():
    return make_family("E7")


@pytest.fixture(scope="session")
def families(d5, e6, e7):
    return {"D5": d5, "E6": e6, "E7": e7}
