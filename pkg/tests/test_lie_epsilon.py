from fractions import Fraction

import pytest

from hypothesis import given, strategies as st

from lab.errors import CapExceeded, ClassificationError, ShapeError
from lab.quiver_core import Quiver
from lab.lie_epsilon import (
    ImClass, LieElement, RealRoot, cyclic_closed_form, eta_check, integral_form_check,
    kronecker_closed_form, make_algebra, twist_compare, verify_jacobi, verify_serre, xi,
)


def test_a2_basis(a2):
    alg = make_algebra(a2)
    assert [s.name for s in alg.basis] == ["e(0,1)", "e(1,0)", "e(1,1)"]
    assert alg.cap == 0


def test_a2_bracket_sign(a2):
    alg = make_algebra(a2)
    e1, e2 = alg.generator("1"), alg.generator("2")
    assert alg.bracket(e1, e2) == -alg.e((1, 1))
    assert alg.bracket(e2, e1) == alg.e((1, 1))
    assert alg.bracket(e1, e1).is_zero


def test_bracket_off_the_roots_is_zero(a2):
    alg = make_algebra(a2)
    assert alg.bracket(alg.e((1, 1)), alg.e((1, 1))).is_zero


@pytest.mark.parametrize("name", ["a3", "a3_alternating", "d4"])
def test_finite_checks(request, name):
    alg = make_algebra(request.getfixturevalue(name))
    assert verify_serre(alg)["passed"]
    assert verify_jacobi(alg)["passed"]


def test_sampled_jacobi(d4):
    report = verify_jacobi(make_algebra(d4), 30)
    assert report["passed"]
    assert report["triples"] <= 30


def test_affine_needs_cap(kronecker):
    with pytest.raises(CapExceeded):
        make_algebra(kronecker, cap=0)


def test_wild_quiver_has_no_algebra():
    q = Quiver.from_arrows(["0", "1"], [("0", "1")] * 3)
    with pytest.raises(ClassificationError):
        make_algebra(q)


def test_unknown_variant(a2):
    with pytest.raises(ValueError):
        make_algebra(a2, "hall")


def test_kronecker_basis_and_classes(kronecker):
    alg = make_algebra(kronecker, cap=2)
    grades = alg.grades()
    assert (1, 1) in grades and (2, 2) in grades
    assert alg.basis_at((1, 1)) == [ImClass((0, 1), 1)]
    assert alg.h((1, 0), 1) == -alg.h((0, 1), 1)


def test_kronecker_closed_form(kronecker):
    assert kronecker_closed_form(make_algebra(kronecker, cap=3))["passed"]


def test_kronecker_real_bracket_lands_in_h(kronecker):
    alg = make_algebra(kronecker, cap=1)
    value = alg.bracket(alg.e((1, 0)), alg.e((0, 1)))
    assert value.grade == (1, 1)
    assert value.terms[0][0] == ImClass((0, 1), 1)


def test_bracket_beyond_cap(kronecker):
    alg = make_algebra(kronecker, cap=1)
    with pytest.raises(CapExceeded):
        alg.bracket(alg.e((2, 1)), alg.e((1, 2)))


def test_affine_checks(a12):
    alg = make_algebra(a12, cap=1)
    assert verify_serre(alg)["passed"]
    assert verify_jacobi(alg, 40)["passed"]
    assert integral_form_check(alg)["passed"]


def test_twist_intertwines(a12):
    euler, twisted = make_algebra(a12, "euler", 1), make_algebra(a12, "twisted", 1)
    report = twist_compare(euler, twisted)
    assert report["passed"]
    assert report["xi"]["1,1,1"] == 1


def test_xi_on_imaginary_grades(kronecker):
    assert xi(kronecker, (1, 1)) == 1
    assert xi(kronecker, (2, 2)) == -1
    assert xi(kronecker, (3, 0)) == 1


def test_eta_is_an_isomorphism(c2, kronecker):
    report = eta_check(make_algebra(c2, cap=2), make_algebra(kronecker, cap=2))
    assert report["passed"]


def test_eta_needs_the_right_pair(a12, kronecker):
    with pytest.raises(ClassificationError):
        eta_check(make_algebra(a12, cap=1), make_algebra(kronecker, cap=1))


def test_element_grades_must_agree():
    x = LieElement((1, 0), ((RealRoot((1, 0)), Fraction(1)),))
    y = LieElement((0, 1), ((RealRoot((0, 1)), Fraction(1)),))
    with pytest.raises(ShapeError):
        x + y


@given(st.integers(min_value=-4, max_value=4), st.integers(min_value=-4, max_value=4))
def test_bracket_is_bilinear(a, b):
    q = Quiver.from_arrows(["1", "2", "3"], [("1", "2"), ("2", "3")])
    alg = make_algebra(q)
    x, y = alg.generator("1"), alg.e((0, 1, 1))
    assert alg.bracket(a * x, b * y) == (a * b) * alg.bracket(x, y)
    assert alg.bracket(y, x) == -alg.bracket(x, y)


@pytest.mark.parametrize("cap", [1, 2, pytest.param(3, marks=pytest.mark.slow)])
def test_kronecker_jacobi_and_skew(kronecker, cap):
    report = verify_jacobi(make_algebra(kronecker, cap=cap))
    assert report["passed"]
    assert report["triples"] > 0


@pytest.mark.parametrize("cap, sample", [
    (1, "all"),
    pytest.param(2, "all", marks=pytest.mark.slow),
    pytest.param(3, 200, marks=pytest.mark.slow),
])
def test_affine_jacobi_and_skew(a12, cap, sample):
    assert verify_jacobi(make_algebra(a12, cap=cap), sample)["passed"]


@pytest.mark.parametrize("name", ["kronecker", "c2", "a12"])
def test_integral_form(request, name):
    report = integral_form_check(make_algebra(request.getfixturevalue(name), cap=2))
    assert report["passed"]
    assert report["grades"]


@pytest.mark.parametrize("name", ["c2", "c3"])
def test_cyclic_closed_form(request, name):
    assert cyclic_closed_form(make_algebra(request.getfixturevalue(name), cap=2))["passed"]


def test_closed_form_needs_a_cycle(a2):
    with pytest.raises(ClassificationError):
        cyclic_closed_form(make_algebra(a2))
