import logging

from dataclasses import dataclass, field
from functools import cache
from math import gcd, lcm

import networkx as nx
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from lab.errors import AssumptionViolated, ClassificationError
from lab.quiver_core import (
    DimVector, Quiver, cartan_datum, cartan_pairing, classify,
    coxeter_apply, euler_form, require_affine,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Root:
    vector: DimVector
    kind: str = "real"
    defect: int | None = None

    @property
    def is_real(self) -> bool:
        return self.kind == "real"

    def to_dict(self) -> dict:
        return {"vector": list(self.vector), "kind": self.kind, "defect": self.defect}


def norm(q: Quiver, a) -> int:
    return cartan_pairing(q, a, a)


def _grow(q: Quiver, bound: DimVector | None, limit: int) -> list[DimVector]:
    """ Add simple roots one at a time while the quadratic form stays <= limit """
    n = len(q)
    frontier = [q.simple(i) for i in range(n) if norm(q, q.simple(i)) <= limit]
    found = set(frontier)
    while frontier:
        fresh = []
        for v in frontier:
            for i in range(n):
                w = tuple(x + (k == i) for k, x in enumerate(v))
                if w in found:
                    continue
                if bound is not None and any(x > b for x, b in zip(w, bound)):
                    continue
                if norm(q, w) <= limit:
                    found.add(w)
                    fresh.append(w)
        frontier = fresh
    return sorted(found, key=lambda v: (sum(v), v))


@cache
def positive_roots(q: Quiver) -> tuple[Root, ...]:
    """ All positive roots of a finite-type quiver """
    dynkin = classify(q)
    if not dynkin.is_finite:
        raise ClassificationError(f"{dynkin.tag} is not of finite type, use roots_up_to")
    return tuple(Root(v, "real") for v in _grow(q, None, 2))


@cache
def first_imaginary_root(q: Quiver) -> DimVector:
    require_affine(q)
    kernel = Matrix(cartan_datum(q).matrix).nullspace()
    if len(kernel) != 1:
        raise ClassificationError("radical of the Cartan form is not one-dimensional")
    column = list(kernel[0])
    scale = lcm(*(int(x.q) for x in column))
    ints = [int(x * scale) for x in column]
    divisor = gcd(*ints)
    ints = [x // divisor for x in ints]
    if ints[0] < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def level(q: Quiver, a) -> int:
    """ Largest n with a - n*delta still nonnegative """
    delta = first_imaginary_root(q)
    return min(x // d for x, d in zip(a, delta))


@cache
def roots_up_to(q: Quiver, n: int) -> tuple[Root, ...]:
    """ Positive roots of an affine quiver with a <= n*delta coordinatewise """
    if n < 1:
        raise ValueError("n must be positive")
    delta = first_imaginary_root(q)
    bound = tuple(n * d for d in delta)
    roots = []
    for v in _grow(q, bound, 2):
        kind = "imaginary" if norm(q, v) == 0 else "real"
        roots.append(Root(v, kind, euler_form(q, delta, v)))
    logger.debug("%d roots below %d*delta", len(roots), n)
    return tuple(roots)


def real_roots_to_level(q: Quiver, cap: int) -> tuple[Root, ...]:
    return tuple(
        r for r in roots_up_to(q, cap + 1)
        if r.is_real and level(q, r.vector) <= cap
    )


def is_root(q: Quiver, a) -> bool:
    a = tuple(a)
    if any(x < 0 for x in a) or not any(a):
        return False
    dynkin = classify(q)
    if dynkin.is_finite:
        return norm(q, a) == 2
    if dynkin.is_affine:
        value = norm(q, a)
        if value == 2:
            return True
        delta = first_imaginary_root(q)
        return value == 0 and all(x * delta[0] == delta[k] * a[0] for k, x in enumerate(a))
    raise ClassificationError(f"{dynkin.tag} has no supported root system")


def imaginary_degree(q: Quiver, a) -> int:
    """ n when a = n*delta, else 0 """
    delta = first_imaginary_root(q)
    n = a[0] // delta[0]
    return n if n > 0 and tuple(n * d for d in delta) == tuple(a) else 0


def extending_vertices(q: Quiver) -> list[str]:
    delta = first_imaginary_root(q)
    found = []
    for vertex, d in zip(q.vertices, delta):
        if d != 1:
            continue
        if len(q) > 1 and not classify(q.remove_vertices([vertex])).is_finite:
            raise ClassificationError(f"removing {vertex} does not leave a finite-type quiver")
        found.append(vertex)
    return found


@dataclass(frozen=True)
class CyclicRootTable:
    quiver: Quiver
    orbit_lengths: tuple[int, ...]
    cyclic_roots: dict = field(compare=False)
    alpha0: DimVector = ()
    extending_vertex: str = ""
    sink_assumption: bool = True

    @property
    def orbit_count(self) -> int:
        return len(self.orbit_lengths)

    def root(self, i: int, j: int) -> DimVector:
        return self.cyclic_roots[(i, j % self.orbit_lengths[i - 1])]

    def orbit(self, i: int) -> list[DimVector]:
        return [self.cyclic_roots[(i, j)] for j in range(self.orbit_lengths[i - 1])]

    def position(self, a) -> tuple[int, int] | None:
        """ (i, j) of a cyclic root """
        a = tuple(a)
        for key, value in self.cyclic_roots.items():
            if value == a:
                return key
        return None

    def invariant_failures(self) -> list[str]:
        q = self.quiver
        delta = first_imaginary_root(q)
        failures = []
        for i in range(1, self.orbit_count + 1):
            orbit = self.orbit(i)
            total = tuple(map(sum, zip(*orbit)))
            if total != delta:
                failures.append(f"orbit {i} sums to {total}, not delta")
            for j, a in enumerate(orbit):
                if coxeter_apply(q, a) != self.root(i, j + 1):
                    failures.append(f"c(alpha_{i},{j}) != alpha_{i},{j + 1}")
        if sum(n - 1 for n in self.orbit_lengths) != len(q) - 2:
            failures.append("sum of (N_i - 1) differs from |I| - 2")
        return failures

    def to_dict(self) -> dict:
        return {
            "L": self.orbit_count,
            "N": list(self.orbit_lengths),
            "cyclic_roots": [
                {"i": i, "j": j, "vector": list(v)}
                for (i, j), v in sorted(self.cyclic_roots.items())
            ],
            "alpha0": list(self.alpha0),
            "extending_vertex": self.extending_vertex,
            "sink_assumption": self.sink_assumption,
        }


@cache
def cyclic_roots(q: Quiver) -> CyclicRootTable:
    """ Lowest finite Coxeter orbits of regular roots below delta """
    dynkin = require_affine(q)
    if dynkin.kronecker or dynkin.cyclic:
        raise ClassificationError(f"{dynkin.tag} has no cyclic-root table")
    delta = first_imaginary_root(q)
    below = [
        r.vector for r in roots_up_to(q, 1)
        if r.is_real and r.defect == 0 and r.vector != delta
    ]
    regular = set(below)
    sums = {tuple(x + y for x, y in zip(a, b)) for a in below for b in below}

    orbits, seen = [], set()
    for start in sorted(below):
        if start in seen:
            continue
        orbit, current = [start], coxeter_apply(q, start)
        while current != start and current in regular:
            orbit.append(current)
            current = coxeter_apply(q, current)
        seen.update(orbit)
        if current != start or any(a in sums for a in orbit):
            continue
        orbits.append(orbit)

    table = {}
    for i, orbit in enumerate(sorted(orbits), start=1):
        for j, vector in enumerate(orbit):
            table[(i, j)] = vector

    candidates = extending_vertices(q)
    sinks = [v for v in candidates if q.is_sink(v)]
    p = min(sinks) if sinks else min(candidates)
    alpha0 = tuple(d - (v == p) for v, d in zip(q.vertices, delta))
    logger.info("cyclic roots: L=%d N=%s p=%s", len(orbits), [len(o) for o in sorted(orbits)], p)
    return CyclicRootTable(
        q, tuple(len(o) for o in sorted(orbits)), table, alpha0, p, bool(sinks)
    )


def _snf_diagonal(columns: list[DimVector], rows: int) -> list[int]:
    if not columns:
        return []
    matrix = Matrix(rows, len(columns), lambda r, c: columns[c][r])
    snf = smith_normal_form(matrix, domain=ZZ)
    return [abs(int(snf[k, k])) for k in range(min(snf.shape)) if snf[k, k] != 0]


def verify_lattice_presentation(t: CyclicRootTable) -> dict:
    q = t.quiver
    delta = first_imaginary_root(q)
    keys = sorted(t.cyclic_roots)
    generators = [t.cyclic_roots[k] for k in keys] + [t.alpha0, delta]
    names = [f"alpha_{i},{j}" for i, j in keys] + ["alpha_0", "delta"]
    failures = []

    image = _snf_diagonal(generators, len(q))
    if len(image) != len(q) or any(d != 1 for d in image):
        failures.append(f"generators do not span Z[I]: invariant factors {image}")

    relations = []
    for i in range(1, t.orbit_count + 1):
        rel = tuple(
            1 if name.startswith(f"alpha_{i},") else (-1 if name == "delta" else 0)
            for name in names
        )
        relations.append(rel)
        value = tuple(sum(c * g[r] for c, g in zip(rel, generators)) for r in range(len(q)))
        if any(value):
            failures.append(f"relation for orbit {i} does not vanish")
    kernel_rank = len(generators) - len(image)
    if kernel_rank != len(relations):
        failures.append(f"kernel has rank {kernel_rank}, expected {len(relations)} relations")
    saturation = _snf_diagonal(relations, len(generators))
    if any(d != 1 for d in saturation):
        failures.append(f"relation lattice is not saturated: {saturation}")
    if sum(n - 1 for n in t.orbit_lengths) != len(q) - 2:
        failures.append("sum of (N_i - 1) differs from |I| - 2")

    return {
        "check": "lattice-presentation",
        "generators": names,
        "rank": len(image),
        "invariant_factors": image,
        "relations": len(relations),
        "relation_invariant_factors": saturation,
        "failures": failures,
        "passed": not failures,
    }


def star_of_chains(t: CyclicRootTable) -> tuple[Quiver, dict[str, DimVector], dict]:
    """ The star-shaped quiver of the table, with the images of its vertices in Z[I'] """
    q = t.quiver
    p = q.index(t.extending_vertex)
    n_index, m_index = {}, {}
    for i in range(1, t.orbit_count + 1):
        hits = [j for j, a in enumerate(t.orbit(i)) if a[p] == 1]
        if len(hits) != 1:
            raise AssumptionViolated("one cyclic root per orbit meets the extending vertex", f"orbit {i}: {hits}")
        n_index[i] = hits[0]
        m_index[i] = (hits[0] - 1) % t.orbit_lengths[i - 1]

    def drop(a):
        return tuple(x for k, x in enumerate(a) if k != p)

    vertices, images, edges = [], {}, []
    for i in range(1, t.orbit_count + 1):
        for j in range(t.orbit_lengths[i - 1]):
            if j == n_index[i]:
                continue
            name = f"a{i}_{j}"
            vertices.append(name)
            images[name] = drop(t.root(i, j))
            previous = (j - 1) % t.orbit_lengths[i - 1]
            if previous != n_index[i]:
                edges.append((f"a{i}_{previous}", name))
        edges.append((f"a{i}_{m_index[i]}", "spade"))
    vertices.append("spade")
    images["spade"] = tuple(-x for x in drop(t.alpha0))
    hat = Quiver(tuple(vertices), tuple(edges), "star-of-chains")
    return hat, images, {"n": n_index, "m": m_index}


def nu_isometry_check(t: CyclicRootTable) -> dict:
    q = t.quiver
    if not t.sink_assumption:
        raise AssumptionViolated("delta - alpha_0 is an extending sink", f"vertex {t.extending_vertex} is not a sink")
    p = t.extending_vertex
    reduced = q.remove_vertices([p])
    hat, images, indices = star_of_chains(t)
    failures = []

    for a in hat.vertices:
        for b in hat.vertices:
            left = euler_form(reduced, images[a], images[b])
            right = euler_form(hat, hat.simple(a), hat.simple(b))
            if left != right:
                failures.append(f"e({a},{b}): {left} on Q' vs {right} on the star quiver")

    nu = Matrix(len(reduced), len(hat), lambda r, c: images[hat.vertices[c]][r])
    determinant = int(nu.det()) if nu.shape[0] == nu.shape[1] else 0
    if abs(determinant) != 1:
        failures.append(f"nu is not a lattice isomorphism (det {determinant})")

    relations = []
    minus_alpha0 = tuple(-x for x in t.alpha0)
    for i in range(1, t.orbit_count + 1):
        m = indices["m"][i]
        for j in range(t.orbit_lengths[i - 1]):
            a = t.root(i, j)
            forward = euler_form(q, a, minus_alpha0)
            backward = euler_form(q, minus_alpha0, a)
            if j == m:
                expected = (-1, 0)
            elif j == indices["n"][i]:
                continue
            else:
                expected = (0, 0)
            relations.append({"i": i, "j": j, "e(alpha,-alpha0)": forward, "e(-alpha0,alpha)": backward})
            if (forward, backward) != expected:
                failures.append(f"pairing of alpha_{i},{j} with -alpha_0 is {(forward, backward)}, expected {expected}")

    same_graph = nx.is_isomorphic(nx.Graph(hat.graph()), nx.Graph(reduced.graph()))
    if not same_graph:
        failures.append("underlying graphs of Q' and the star quiver differ")

    return {
        "check": "nu-isometry",
        "star_quiver": hat.to_dict(),
        "images": {k: list(v) for k, v in images.items()},
        "determinant": determinant,
        "pairings": relations,
        "same_dynkin_graph": same_graph,
        "failures": failures,
        "passed": not failures,
    }


def regular_position(t: CyclicRootTable, a) -> tuple[int, int, int]:
    """ (i, j, l) with a = alpha_{i,j} + ... + alpha_{i,j+l-1} """
    a = tuple(a)
    for i in range(1, t.orbit_count + 1):
        for j in range(t.orbit_lengths[i - 1]):
            total = tuple(0 for _ in a)
            for length in range(1, sum(a) + 1):
                total = tuple(x + y for x, y in zip(total, t.root(i, j + length - 1)))
                if total == a:
                    return i, j, length
                if any(x > y for x, y in zip(total, a)):
                    break
    raise ClassificationError(f"{a} is not a regular root of an exceptional tube")
