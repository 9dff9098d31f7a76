from fractions import Fraction

import pytest

from lab.errors import CapExceeded, InterpolationError, OracleError, ShapeError, UnsupportedFamily
from lab.fields import FieldSpec
from lab.hall_engine import (
    ConstructibleFn, HallEngine, associativity_check, count_subreps, cyclic_products_check,
    degree_bound, first_primes, fit_polynomial, generate_nstar, hall_number, integral_nstar_check,
    kronecker_products_check, make_engine, mu_pushforward, riedtmann_check,
    structure_constants_check, verify_affine, xi_check,
)
from lab.rep_lab import CyclicLabel, build_label, parse_label
from utils.config import Config


def test_degree_bound():
    assert degree_bound((0, 1), (1, 1)) == 0
    assert degree_bound((1, 1), (2, 2)) == 2


def test_first_primes():
    assert first_primes(4) == [2, 3, 5, 7]
    assert first_primes(3, start=3) == [3, 5, 7]


def test_fit_polynomial():
    coefficients, chi = fit_polynomial([(2, Fraction(3)), (3, Fraction(4)), (5, Fraction(6))], 1)
    assert coefficients == [1, 1]
    assert chi == 2


def test_fit_rejects_non_polynomial_counts():
    with pytest.raises(InterpolationError):
        fit_polynomial([(2, Fraction(1)), (3, Fraction(5)), (5, Fraction(2))], 1)


def test_fit_needs_a_held_out_prime():
    with pytest.raises(InterpolationError):
        fit_polynomial([(2, Fraction(1)), (3, Fraction(1))], 1)


def test_count_subreps_a2(a2, gf2):
    rep = build_label(a2, parse_label("P(1,1)"), gf2)
    found = count_subreps(rep, (0, 1))
    assert dict(found) == {(parse_label("P(0,1)"), parse_label("P(1,0)")): 1}
    assert not count_subreps(rep, (1, 0))


def test_count_subreps_lines_in_the_sink(kronecker, gf2):
    rep = build_label(kronecker, parse_label("U1_1"), gf2)
    assert sum(count_subreps(rep, (0, 1)).values()) == 3


def test_count_subreps_caps(a2, gf2, qq):
    rep = build_label(a2, parse_label("P(1,1)"), gf2)
    with pytest.raises(CapExceeded):
        count_subreps(rep, (0, 1), max_total_dim=1)
    with pytest.raises(UnsupportedFamily):
        count_subreps(build_label(a2, parse_label("P(1,1)"), qq), (0, 1))


def test_hall_numbers_a2(a2):
    P11, S1, S2 = parse_label("P(1,1)"), parse_label("P(1,0)"), parse_label("P(0,1)")
    assert hall_number(a2, S2, S1, P11).chi == 1
    assert hall_number(a2, S1, S2, P11).chi == 0
    count = hall_number(a2, S2, S1, P11)
    assert count.to_dict()["primes"] == [2, 3]
    assert count.held_out == (3,)


def test_hall_number_shape_mismatch(a2):
    with pytest.raises(ShapeError):
        hall_number(a2, parse_label("P(1,0)"), parse_label("P(1,0)"), parse_label("P(1,1)"))


def test_kronecker_hall_number(kronecker):
    count = hall_number(kronecker, parse_label("U1_0"), parse_label("U0_0"), parse_label("T(1:0)_1"))
    assert count.chi == 1


def test_generic_tube_needs_star(kronecker):
    with pytest.raises(UnsupportedFamily):
        hall_number(kronecker, parse_label("U1_0"), parse_label("U0_0"), parse_label("T*_1"))


def test_a2_bracket(a2):
    engine = HallEngine(a2)
    value = engine.bracket(engine.generator("1"), engine.generator("2"))
    assert value == -1 * engine.characteristic((1, 1))


def test_a2_classes(a2):
    names = sorted(c.name for c in HallEngine(a2).classes((1, 1)))
    assert names == ["P(0,1)+P(1,0)", "P(1,1)"]


def test_generate_nstar_a2(a2):
    nstar = generate_nstar(HallEngine(a2))
    assert nstar.passed
    assert nstar.dimensions() == {(0, 1): 1, (1, 0): 1, (1, 1): 1}


def test_finite_type_tables(a3):
    engine = HallEngine(a3)
    assert structure_constants_check(engine)["passed"]
    simples = [engine.generator(i) for i in range(3)]
    assert associativity_check(engine, simples)["passed"]


def test_kronecker_classes_include_decomposables(kronecker):
    engine = HallEngine(kronecker)
    assert set(engine.classes((1, 1))) == {parse_label("T*_1"), parse_label("U0_0+U1_0")}
    assert engine.indecomposable_classes((1, 1)) == [parse_label("T*_1")]
    classes = set(engine.classes((2, 2)))
    assert parse_label("2*T*_1") in classes
    assert parse_label("T*_1+T*1_1") in classes
    assert parse_label("T*_2") in classes


def test_kronecker_star_keeps_decomposable_values(kronecker):
    engine = HallEngine(kronecker)
    source, sink = engine.characteristic((1, 0)), engine.characteristic((0, 1))
    value = engine.star(source, sink)
    assert value.value(parse_label("U0_0+U1_0")) == 1
    assert value.value(parse_label("T*_1")) == 0
    reverse = engine.star(sink, source)
    assert reverse.value(parse_label("U0_0+U1_0")) == 1
    assert reverse.value(parse_label("T*_1")) == 1


def test_kronecker_associativity(kronecker):
    engine = HallEngine(kronecker, max_total_dim=3)
    simples = [engine.generator(i) for i in range(2)]
    report = associativity_check(engine, simples)
    assert report["passed"]
    assert report["triples"] == 8


def test_cyclic_associativity(c2):
    engine = HallEngine(c2, max_total_dim=3)
    simples = [engine.generator(i) for i in range(2)]
    assert associativity_check(engine, simples)["passed"]


@pytest.mark.slow
def test_star_refuses_inexact_products(kronecker):
    engine = HallEngine(kronecker)
    decomposable = engine.indicator(parse_label("2*U0_0+2*U1_0"))
    with pytest.raises(OracleError):
        engine.star(engine.generator("1"), decomposable)


def test_brackets_stay_on_indecomposables(kronecker):
    nstar = generate_nstar(HallEngine(kronecker), cap=1)
    support = next(c for c in nstar.checks if c["check"] == "indecomposable-support")
    assert support["passed"]


def test_constructible_arithmetic(a2):
    engine = HallEngine(a2)
    f = engine.characteristic((1, 1))
    assert (f - f).is_zero
    assert (2 * f).value(parse_label("P(1,1)")) == 2
    assert f.is_integral
    assert not (Fraction(1, 2) * f).is_integral
    with pytest.raises(ShapeError):
        f + engine.generator("1")


def test_tube_points_collapse_to_generic():
    label = parse_label("T(1:0)_1")
    f = ConstructibleFn.build((1, 1), [(label, 1)])
    assert f.value(parse_label("T*_1")) == 1
    assert f.generic_value == 1


def test_mu_pushforward_cyclic(c3):
    engine = HallEngine(c3)
    f = engine.indicator(CyclicLabel(0, 3)) - engine.indicator(CyclicLabel(1, 3))
    report = mu_pushforward(engine, f)
    assert report["points"] == {"0": "0"}
    assert report["constant"]


def test_mu_pushforward_kronecker(kronecker):
    engine = HallEngine(kronecker)
    report = mu_pushforward(engine, engine.characteristic((1, 1)))
    assert report["points"] == {"generic": "1"}
    with pytest.raises(ShapeError):
        mu_pushforward(engine, engine.characteristic((1, 0)))


def test_make_engine_reads_config(a2):
    config = Config.from_dict(QUIVERLAB_PRIMES="2,3,5", QUIVERLAB_MAX_PRIME="7", QUIVERLAB_WORKERS="1")
    engine = make_engine(a2, config)
    assert engine.primes == [2, 3, 5]
    assert engine.max_prime == 7
    assert engine.workers == 1


def test_too_few_configured_primes(a2):
    engine = HallEngine(a2, primes=[2])
    with pytest.raises(InterpolationError):
        engine.hall_number(parse_label("P(0,1)"), parse_label("P(1,0)"), parse_label("P(1,1)"))


def test_prime_cap(kronecker):
    engine = HallEngine(kronecker, max_prime=3)
    with pytest.raises(CapExceeded):
        engine.star(engine.characteristic((1, 1)), engine.characteristic((1, 1)))


@pytest.mark.slow
def test_xi_check_kronecker(kronecker):
    assert xi_check(HallEngine(kronecker), cap=1)["passed"]


@pytest.mark.slow
@pytest.mark.parametrize("n_max", [1, 2, 3])
def test_kronecker_products(kronecker, n_max):
    report = kronecker_products_check(HallEngine(kronecker), n_max=n_max)
    assert report["passed"]
    assert report["identities"] == 8 * n_max


@pytest.mark.slow
def test_cyclic_products(c2):
    assert cyclic_products_check(HallEngine(c2), max_len=3)["passed"]


@pytest.mark.slow
@pytest.mark.parametrize("name", ["a3", "d4", "kronecker", "c2", "a12"])
def test_riedtmann(request, name):
    engine = HallEngine(request.getfixturevalue(name), max_total_dim=4)
    report = riedtmann_check(engine, pairs=20, seed=1)
    assert report["passed"]
    assert len(report["pairs"]) == 20


@pytest.mark.slow
def test_verify_affine_kronecker(kronecker):
    reports = verify_affine(HallEngine(kronecker), cap=1)
    assert {r["check"] for r in reports} >= {"grade-dimensions", "indecomposable-support", "xi", "kronecker-products"}
    assert all(r["passed"] for r in reports)


@pytest.mark.slow
def test_verify_affine_cyclic(c2):
    assert all(r["passed"] for r in verify_affine(HallEngine(c2), cap=1))


@pytest.mark.slow
@pytest.mark.parametrize("name", ["kronecker", "c2", "a12"])
def test_integral_nstar(request, name):
    report = integral_nstar_check(HallEngine(request.getfixturevalue(name)), cap=1)
    assert report["passed"]
    assert report["generators"]


def test_label_field_for_affine_quivers(a12):
    assert HallEngine(a12).label_field == FieldSpec.prime(3)
