import os

import pytest

from hypothesis import HealthCheck, Verbosity, settings

from lab.fields import FieldSpec
from lab.quiver_core import Quiver

settings.register_profile(
    "fast", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("debugger", max_examples=5, deadline=None, verbosity=Verbosity.verbose)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def make(vertices, arrows, name=""):
    return Quiver.from_arrows(vertices, arrows, name)


@pytest.fixture
def a2():
    return make(["1", "2"], [("1", "2")], "a2")


@pytest.fixture
def a3():
    return make(["1", "2", "3"], [("1", "2"), ("2", "3")], "a3")


@pytest.fixture
def a3_alternating():
    return make(["1", "2", "3"], [("1", "2"), ("3", "2")], "a3-alt")


@pytest.fixture
def d4():
    return make(["c", "x", "y", "z"], [("x", "c"), ("y", "c"), ("z", "c")], "d4")


@pytest.fixture
def kronecker():
    return make(["0", "1"], [("0", "1"), ("0", "1")], "kronecker")


@pytest.fixture
def c2():
    return make(["0", "1"], [("0", "1"), ("1", "0")], "c2")


@pytest.fixture
def c3():
    return make(["0", "1", "2"], [("0", "1"), ("1", "2"), ("2", "0")], "c3")


@pytest.fixture
def jordan():
    return make(["0"], [("0", "0")], "jordan")


@pytest.fixture
def a12():
    """ A(1)_2 with a non-cyclic orientation """
    return make(["0", "1", "2"], [("0", "1"), ("1", "2"), ("0", "2")], "a12")


@pytest.fixture
def d4_affine():
    return make(
        ["c", "a", "b", "d", "e"],
        [("a", "c"), ("b", "c"), ("d", "c"), ("e", "c")],
        "d4-affine",
    )


@pytest.fixture
def d5_affine():
    return make(
        ["a", "b", "u", "v", "d", "e"],
        [("a", "u"), ("b", "u"), ("u", "v"), ("d", "v"), ("e", "v")],
        "d5-affine",
    )


@pytest.fixture
def e6_affine():
    return make(
        ["c", "a1", "a2", "b1", "b2", "d1", "d2"],
        [("a2", "a1"), ("a1", "c"), ("b2", "b1"), ("b1", "c"), ("d2", "d1"), ("d1", "c")],
        "e6-affine",
    )


@pytest.fixture
def gf2():
    return FieldSpec.prime(2)


@pytest.fixture
def gf3():
    return FieldSpec.prime(3)


@pytest.fixture
def qq():
    return FieldSpec.rationals()
