import pytest

from projconn.catalog import builtin


@pytest.fixture(scope="session")
def euclidean3():
    return builtin("euclidean3").spec


@pytest.fixture(scope="session")
def cylinder():
    return builtin("cylinder_s2xr").spec


@pytest.fixture(scope="session")
def gssf1():
    return builtin("gssf_c1").spec


@pytest.fixture(scope="session")
def gssf4():
    return builtin("gssf_c4").spec


@pytest.fixture(scope="session")
def sphere():
    return builtin("sphere3_bad_xi").spec
