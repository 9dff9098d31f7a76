import random

from fractions import Fraction

import pytest

from hypothesis import given, strategies as st

from lab.errors import NonNilpotent, ParseError, ShapeError
from lab.rep_lab import (
    CyclicLabel, ExceptionalLabel, KronLabel, Representation, RootLabel, TubeLabel, build_label,
    catalogue, direct_sum, ext1_by_cokernel, ext1_dim, generic_form, hom_dim, identify, parse_label,
    quotient, random_representation, reflection_apply, simple, spec, subrepresentation, validate,
)
from lab.fields import FieldSpec
from lab.quiver_core import Quiver

small_dims = st.lists(st.integers(min_value=0, max_value=2), min_size=3, max_size=3)


def test_shape_is_checked(a2, qq):
    with pytest.raises(ShapeError):
        Representation.from_matrices(a2, qq, (1, 1), [[[1, 0]]])


def test_from_dict_by_edge_name(a2, gf3):
    rep = Representation.from_dict(a2, {"field": "GF(3)", "dims": [1, 1], "maps": {"1->2": [[2]]}})
    assert rep.field == gf3
    assert rep.to_dict()["maps"] == [[[2]]]


def test_hom_and_ext_between_simples(a2, qq):
    s1, s2 = simple(a2, "1", qq), simple(a2, "2", qq)
    assert hom_dim(s1, s2) == 0
    assert hom_dim(s1, s1) == 1
    assert ext1_dim(s1, s2) == 1
    assert ext1_by_cokernel(s1, s2) == 1
    assert ext1_dim(s2, s1) == 0


def test_jordan_block_is_not_nilpotent(jordan, qq):
    rep = Representation.from_matrices(jordan, qq, (1,), [[[1]]])
    with pytest.raises(NonNilpotent):
        validate(rep)


def test_nilpotent_jordan_passes(jordan, qq):
    rep = Representation.from_matrices(jordan, qq, (2,), [[[0, 1], [0, 0]]])
    assert validate(rep) is rep


def test_sub_and_quotient(a2, qq):
    rep = build_label(a2, parse_label("P(1,1)"), qq)
    W = [[], [[qq(1)]]]
    assert subrepresentation(rep, W).dims == (0, 1)
    assert quotient(rep, W).dims == (1, 0)
    with pytest.raises(ShapeError):
        subrepresentation(rep, [[[qq(1)]], []])


def test_identify_direct_sum(a2, gf2):
    rep = direct_sum(simple(a2, "1", gf2), simple(a2, "2", gf2))
    assert identify(rep).name == "P(0,1)+P(1,0)"


def test_identify_indecomposable(a3, gf3):
    rep = build_label(a3, parse_label("P(1,1,0)"), gf3)
    assert identify(rep).name == "P(1,1,0)"


def test_d4_maximal_root_is_a_brick(d4, gf3):
    rep = catalogue(d4).build(RootLabel((2, 1, 1, 1)), gf3)
    assert rep.dims == (2, 1, 1, 1)
    assert hom_dim(rep, rep) == 1


def test_reflection_at_a_sink(a2, qq):
    rep = build_label(a2, parse_label("P(1,1)"), qq)
    assert reflection_apply("2", rep).dims == (1, 0)
    assert reflection_apply("2", simple(a2, "2", qq)).dims == (0, 0)


def test_reflection_at_a_source(a2, qq):
    rep = build_label(a2, parse_label("P(1,1)"), qq)
    assert reflection_apply("1", rep).dims == (0, 1)


def test_parse_label_names():
    assert parse_label("2*P(0,1)+P(1,0)").name == "2*P(0,1)+P(1,0)"
    assert parse_label("T*_2").single == TubeLabel(2)
    assert parse_label("T(1:0)_2").single == TubeLabel(2, (Fraction(1), Fraction(0)))
    assert parse_label("U1_3").single == KronLabel(1, 3)
    assert parse_label("P0_3").single == CyclicLabel(0, 3)
    assert parse_label("R1_0_2").name == "R1_0_2"
    with pytest.raises(ParseError):
        parse_label("Q(1)")


def test_kronecker_dims(kronecker):
    cat = catalogue(kronecker)
    assert cat.dims(KronLabel(0, 1)) == (2, 1)
    assert cat.dims(KronLabel(1, 1)) == (1, 2)
    assert cat.dims(TubeLabel(2)) == (2, 2)


def test_kronecker_identify(kronecker, gf2, gf3):
    rep = build_label(kronecker, parse_label("U0_0+U1_0"), gf2)
    assert identify(rep).name == "U0_0+U1_0"
    tube = build_label(kronecker, parse_label("T(1:0)_1"), gf3)
    assert identify(tube).name == "T(1:0)_1"


def test_kronecker_spectrum(kronecker, qq):
    cat = catalogue(kronecker)
    assert spec(cat.build(TubeLabel(1, (1, 0)), qq)).points == ((1, 0),)
    assert spec(cat.build(TubeLabel(1, (0, 1)), qq)).points == ((0, 1),)
    assert not spec(cat.build(KronLabel(0, 1), qq)).regular


def test_cyclic_modules(c3, gf2):
    cat = catalogue(c3)
    rep = cat.build(CyclicLabel(0, 3), gf2)
    assert rep.dims == (1, 1, 1)
    assert identify(rep).name == "P0_3"
    assert len(cat.labels_at((1, 1, 1), gf2)) == 3


def test_single_exceptional_tube(a12, gf3):
    cat = catalogue(a12)
    assert len(cat.exceptional_points(gf3)) == 1
    assert len(cat.points(gf3)) == 3




def test_generic_slots_parse_and_print():
    label = parse_label("T*1_2")
    assert label.single == TubeLabel(2, None, 1)
    assert label.name == "T*1_2"
    assert parse_label("T*_1+T*1_1").slots == [0, 1]


def test_generic_form_keeps_shared_points():
    apart = generic_form(parse_label("T(1:0)_1+T(0:1)_2"))
    assert apart == parse_label("T*_2+T*1_1")
    together = generic_form(parse_label("T(1:0)_1+T(1:0)_2"))
    assert together == parse_label("T*_1+T*_2")
    assert generic_form(parse_label("U0_0+U1_0")) == parse_label("U0_0+U1_0")


def test_representatives_use_distinct_points(kronecker, gf3):
    cat = catalogue(kronecker)
    label = parse_label("T*_1+T*1_1")
    reps = cat.representatives(label, gf3)
    assert len(reps) == 3
    assert {generic_form(identify(rep)) for rep in reps} == {label}
    assert cat.points_needed(label) == 2


@pytest.mark.parametrize("name", ["a12", pytest.param("d4_affine", marks=pytest.mark.slow)])
def test_regular_simples_are_bricks(request, name, gf3):
    cat = catalogue(request.getfixturevalue(name))
    for tube, length in enumerate(cat.table.orbit_lengths, start=1):
        for j in range(length):
            rep = cat.build(ExceptionalLabel(tube, j, 1), gf3)
            assert rep.dims == cat.table.root(tube, j)
            assert hom_dim(rep, rep) == 1


@given(small_dims, st.integers(min_value=0, max_value=10**6))
def test_ext_two_ways(dims, seed):
    q = Quiver.from_arrows(["1", "2", "3"], [("1", "2"), ("3", "2")])
    rng = random.Random(seed)
    M = random_representation(q, FieldSpec.prime(3), dims, rng)
    N = random_representation(q, FieldSpec.prime(3), dims[::-1], rng)
    assert ext1_dim(M, N) == ext1_by_cokernel(M, N)
