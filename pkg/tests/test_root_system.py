import pytest

from lab.errors import ClassificationError
from lab.root_system import (
    cyclic_roots, extending_vertices, first_imaginary_root, imaginary_degree, is_root,
    level, nu_isometry_check, positive_roots, real_roots_to_level, regular_position,
    verify_lattice_presentation,
)


def test_finite_root_counts(a2, a3, d4):
    assert len(positive_roots(a2)) == 3
    assert len(positive_roots(a3)) == 6
    assert len(positive_roots(d4)) == 12


def test_positive_roots_refuse_affine(kronecker):
    with pytest.raises(ClassificationError):
        positive_roots(kronecker)


def test_delta(kronecker, c3, d4_affine, e6_affine):
    assert first_imaginary_root(kronecker) == (1, 1)
    assert first_imaginary_root(c3) == (1, 1, 1)
    assert first_imaginary_root(d4_affine) == (2, 1, 1, 1, 1)
    assert first_imaginary_root(e6_affine) == (3, 2, 1, 2, 1, 2, 1)


def test_kronecker_real_roots(kronecker):
    roots = {r.vector for r in real_roots_to_level(kronecker, 3)}
    expected = {(n + 1, n) for n in range(4)} | {(n, n + 1) for n in range(4)}
    assert roots == expected


def test_imaginary_roots(kronecker):
    assert is_root(kronecker, (2, 2))
    assert imaginary_degree(kronecker, (3, 3)) == 3
    assert imaginary_degree(kronecker, (3, 2)) == 0
    assert not is_root(kronecker, (3, 1))
    assert level(kronecker, (3, 2)) == 2


def test_extending_vertices(d4_affine):
    assert extending_vertices(d4_affine) == ["a", "b", "d", "e"]


@pytest.mark.parametrize("name, lengths", [
    ("d4_affine", [2, 2, 2]),
    ("d5_affine", [2, 2, 3]),
    ("e6_affine", [2, 3, 3]),
])
def test_orbit_lengths(request, name, lengths):
    q = request.getfixturevalue(name)
    table = cyclic_roots(q)
    assert sorted(table.orbit_lengths) == lengths
    assert sum(n - 1 for n in table.orbit_lengths) == len(q) - 2
    assert table.invariant_failures() == []


def test_a12_has_one_exceptional_tube(a12):
    table = cyclic_roots(a12)
    assert table.orbit_lengths == (2,)
    assert sum(map(sum, zip(*table.orbit(1)))) == 3


def test_cyclic_roots_refuse_kronecker(kronecker):
    with pytest.raises(ClassificationError):
        cyclic_roots(kronecker)


def test_lattice_presentation_d4(d4_affine):
    report = verify_lattice_presentation(cyclic_roots(d4_affine))
    assert report["passed"], report["failures"]
    assert report["relations"] == 3


def test_nu_isometry_d4():
    from lab.quiver_core import Quiver

    # extending vertices have to be sinks here
    q = Quiver.from_arrows(["c", "a", "b", "d", "e"], [("c", "a"), ("c", "b"), ("c", "d"), ("c", "e")])
    report = nu_isometry_check(cyclic_roots(q))
    assert report["passed"], report["failures"]
    assert abs(report["determinant"]) == 1


def test_regular_position_of_a_cyclic_root(d4_affine):
    table = cyclic_roots(d4_affine)
    a = table.root(1, 0)
    assert regular_position(table, a) == (1, 0, 1)
    assert regular_position(table, tuple(map(sum, zip(*table.orbit(1)))))[2] == 2
