import pytest

from privrepair.field import make_field
from privrepair.rs import make_code

# Moduli fixed to the conventions the golden vectors assume:
# GF(8) uses x^3+x^2+1 (the usual x^3+x+1 would silently change them).


@pytest.fixture(scope="session")
def gf4():
    return make_field(2, 2, 2, [1, 1, 1])


@pytest.fixture(scope="session")
def gf8():
    return make_field(2, 2, 3, [1, 0, 1, 1])


@pytest.fixture(scope="session")
def gf16():
    return make_field(2, 2, 4, [1, 1, 0, 0, 1])


@pytest.fixture(scope="session")
def gf9():
    return make_field(3, 3, 2, [1, 0, 1])


@pytest.fixture(scope="session")
def gf16_over_f4():
    # same 16-element field, viewed as a degree-2 extension of GF(4)
    return make_field(2, 4, 2, [1, 1, 0, 0, 1])


@pytest.fixture(scope="session")
def code4(gf4):
    return make_code(gf4, k=2)


@pytest.fixture(scope="session")
def code8(gf8):
    return make_code(gf8, k=5)


@pytest.fixture(scope="session")
def code8_k3(gf8):
    return make_code(gf8, k=3)


@pytest.fixture(scope="session")
def code16(gf16):
    return make_code(gf16, k=8)
