import pytest

from hypothesis import given, strategies as st

from lab.errors import ParseError, QuiverError
from lab.quiver_core import (
    Quiver, cartan_datum, cartan_pairing, classify, coxeter_apply, coxeter_element, cycle_order,
    euler_cocycle, euler_form, reflect, reflect_quiver, sink_order, source_order,
)

vectors = st.lists(st.integers(min_value=-3, max_value=3), min_size=3, max_size=3).map(tuple)


def test_from_dict_reads_edges():
    q = Quiver.from_dict({"vertices": [1, 2], "edges": [{"out": 1, "in": 2}]})
    assert q.vertices == ("1", "2")
    assert q.arrows == ((0, 1),)


def test_malformed_spec_is_a_parse_error():
    with pytest.raises(ParseError):
        Quiver.from_dict({"edges": []})


def test_undeclared_vertex():
    with pytest.raises(QuiverError):
        Quiver.from_arrows(["1"], [("1", "2")])


def test_euler_form_a2(a2):
    assert euler_form(a2, (1, 0), (0, 1)) == -1
    assert euler_form(a2, (0, 1), (1, 0)) == 0
    assert euler_cocycle(a2, (1, 0), (0, 1)) == -1
    assert cartan_pairing(a2, (1, 0), (0, 1)) == -1


def test_classify_tags(a2, a3, d4, kronecker, c2, c3, jordan, a12):
    assert classify(a2).tag == "FiniteIrreducible(A2)"
    assert classify(a3).family == "finite"
    assert classify(d4).type == "D4"
    assert classify(kronecker).family == "kronecker"
    assert classify(c2).cyclic == 2
    assert classify(c3).family == "cyclic"
    assert classify(jordan).jordan
    assert classify(a12).family == "affine"
    assert classify(a12).type == "A(1)2"


def test_classify_reducible():
    q = Quiver.from_arrows(["1", "2", "3"], [("1", "2")])
    dynkin = classify(q)
    assert dynkin.kind == "finite-reducible"
    assert dynkin.components == ("A2", "A1")


def test_wild_quiver_is_other():
    q = Quiver.from_arrows(["0", "1"], [("0", "1")] * 3)
    assert classify(q).family == "other"


def test_loops_only_on_jordan():
    q = Quiver.from_arrows(["0", "1"], [("0", "0"), ("0", "1")])
    with pytest.raises(QuiverError):
        classify(q)


def test_reflection_at_sink(a2):
    assert reflect(a2, "2", (1, 1)) == (1, 0)
    flipped = reflect_quiver(a2, "2")
    assert flipped.edges == (("2", "1"),)


def test_reflection_needs_admissible_vertex(a3):
    with pytest.raises(QuiverError):
        reflect_quiver(a3, "2")


def test_sink_and_source_orders(a3):
    assert sink_order(a3) == ["3", "2", "1"]
    assert source_order(a3) == ["1", "2", "3"]


def test_coxeter_on_a2_has_order_three(a2):
    a = (1, 0)
    assert coxeter_apply(a2, a, 3) == a
    assert coxeter_apply(a2, coxeter_apply(a2, a), -1) == a


def test_cycle_order(c3):
    assert cycle_order(c3) == [0, 1, 2]


def test_cartan_of_kronecker(kronecker):
    cartan = cartan_datum(kronecker)
    assert cartan.matrix == ((2, -2), (-2, 2))


@given(vectors, vectors, vectors)
def test_euler_form_is_bilinear(a, b, c):
    q = Quiver.from_arrows(["1", "2", "3"], [("1", "2"), ("3", "2")])
    total = tuple(x + y for x, y in zip(a, b))
    assert euler_form(q, total, c) == euler_form(q, a, c) + euler_form(q, b, c)
    assert euler_cocycle(q, total, c) == euler_cocycle(q, a, c) * euler_cocycle(q, b, c)


@given(vectors, vectors)
def test_cartan_pairing_is_symmetric(a, b):
    q = Quiver.from_arrows(["1", "2", "3"], [("1", "2"), ("2", "3"), ("1", "3")])
    assert cartan_pairing(q, a, b) == cartan_pairing(q, b, a)


@st.composite
def acyclic_quivers(draw):
    """ Random orientations of a multigraph along a random vertex ranking """
    n = draw(st.integers(min_value=1, max_value=5))
    rank = draw(st.permutations(range(n)))
    pairs = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
        max_size=6,
    ))
    arrows = [(a, b) if rank[a] < rank[b] else (b, a) for a, b in pairs]
    return Quiver.from_arrows(range(n), arrows)


@given(acyclic_quivers(), st.data())
def test_reflecting_twice_is_the_identity(q, data):
    vertex = data.draw(st.sampled_from(q.sinks + q.sources))
    assert reflect_quiver(reflect_quiver(q, vertex), vertex) == q


@given(acyclic_quivers())
def test_reflecting_along_the_coxeter_word_returns_the_quiver(q):
    current = q
    for vertex in reversed(coxeter_element(q).letters):
        current = reflect_quiver(current, vertex)
    assert current == q


def test_jordan_cocycle_is_trivial(jordan):
    for a in range(4):
        for b in range(4):
            assert euler_cocycle(jordan, (a,), (b,)) == 1
