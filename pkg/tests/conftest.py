import pytest

from kmfactor import Evaluator, validate_gcm


@pytest.fixture(scope="session")
def a1():
    return validate_gcm([[2]], "A1")


@pytest.fixture(scope="session")
def a2():
    return validate_gcm([[2, -1], [-1, 2]], "A2")


@pytest.fixture(scope="session")
def b2():
    return validate_gcm([[2, -1], [-2, 2]], "B2")


@pytest.fixture(scope="session")
def g2():
    return validate_gcm([[2, -1], [-3, 2]], "G2")


@pytest.fixture(scope="session")
def affine(request):
    return validate_gcm([[2, -2], [-2, 2]], "affine-rank2")


@pytest.fixture(scope="session")
def hyperbolic():
    return validate_gcm([[2, -3], [-3, 2]], "hyperbolic-rank2")


@pytest.fixture(scope="session")
def a3():
    return validate_gcm([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], "A3")


@pytest.fixture(scope="session")
def affine_a2():
    return validate_gcm([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], "affine-rank3")


@pytest.fixture(scope="session")
def rank3_free():
    # all products of generator pairs have infinite order: free product of
    # three order-2 groups, length counts 3 * 2^(k-1)
    return validate_gcm([[2, -2, -2], [-2, 2, -2], [-2, -2, 2]], "rank3-free")


@pytest.fixture(scope="session")
def ev_a1(a1):
    return Evaluator(a1, height=12, max_length=8)


@pytest.fixture(scope="session")
def ev_a2(a2):
    return Evaluator(a2, height=14, max_length=10)


@pytest.fixture(scope="session")
def ev_affine(affine):
    return Evaluator(affine, height=40, max_length=20)
