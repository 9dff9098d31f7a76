import json
import logging

from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
from sympy import Matrix

from lab.errors import ClassificationError, ParseError, QuiverError, ShapeError

logger = logging.getLogger(__name__)

DimVector = tuple[int, ...]


@dataclass(frozen=True)
class Quiver:
    """
    Vertices are opaque string ids; their declared order fixes the
    coordinate order of every dimension vector. Edges are (source, target).
    """
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.vertices:
            raise QuiverError("a quiver needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex ids")
        known = set(self.vertices)
        for source, target in self.edges:
            if source not in known or target not in known:
                raise QuiverError(f"edge {source}->{target} uses an undeclared vertex")

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "Quiver":
        try:
            vertices = tuple(str(v) for v in data["vertices"])
            edges = tuple((str(e["out"]), str(e["in"])) for e in data.get("edges", []))
        except (KeyError, TypeError) as err:
            raise ParseError(f"malformed quiver spec: {err}") from err
        return cls(vertices, edges, name or data.get("name", ""))

    @classmethod
    def from_file(cls, filename: str) -> "Quiver":
        try:
            with open(filename, encoding="utf8") as data:
                return cls.from_dict(json.load(data), name=filename)
        except json.JSONDecodeError as err:
            raise ParseError(f"{filename}: {err}") from err

    @classmethod
    def from_arrows(cls, vertices, arrows, name: str = "") -> "Quiver":
        return cls(tuple(map(str, vertices)), tuple((str(a), str(b)) for a, b in arrows), name)

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"out": s, "in": t} for s, t in self.edges],
        }

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def _position(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.vertices)}

    def index(self, vertex: str) -> int:
        try:
            return self._position[str(vertex)]
        except KeyError:
            raise QuiverError(f"unknown vertex {vertex!r}") from None

    @cached_property
    def arrows(self) -> tuple[tuple[int, int], ...]:
        """ Edges as (source index, target index) """
        return tuple((self.index(s), self.index(t)) for s, t in self.edges)

    def check(self, a) -> DimVector:
        a = tuple(int(x) for x in a)
        if len(a) != len(self.vertices):
            raise ShapeError(f"vector {a} has length {len(a)}, expected {len(self.vertices)}")
        return a

    def simple(self, vertex) -> DimVector:
        i = vertex if isinstance(vertex, int) else self.index(vertex)
        return tuple(1 if k == i else 0 for k in range(len(self)))

    @property
    def loops(self) -> list[int]:
        return [s for s, t in self.arrows if s == t]

    def is_sink(self, vertex: str) -> bool:
        return all(s != vertex for s, _ in self.edges)

    def is_source(self, vertex: str) -> bool:
        return all(t != vertex for _, t in self.edges)

    @property
    def sinks(self) -> list[str]:
        return [v for v in self.vertices if self.is_sink(v)]

    @property
    def sources(self) -> list[str]:
        return [v for v in self.vertices if self.is_source(v)]

    def remove_vertices(self, vertices) -> "Quiver":
        gone = set(vertices)
        return Quiver(
            tuple(v for v in self.vertices if v not in gone),
            tuple((s, t) for s, t in self.edges if s not in gone and t not in gone),
        )

    def has_cycles(self) -> bool:
        current = self
        while True:
            if current.loops:
                return True
            sinks = current.sinks
            if not sinks:
                return True
            if len(sinks) == len(current.vertices):
                return False
            current = current.remove_vertices(sinks)

    def graph(self) -> nx.MultiGraph:
        """ Underlying undirected multigraph """
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class CartanDatum:
    matrix: tuple[tuple[int, ...], ...]

    def __getitem__(self, key):
        i, j = key
        return self.matrix[i][j]

    def pairing(self, a, b) -> int:
        return sum(a[i] * self.matrix[i][j] * b[j] for i in range(len(a)) for j in range(len(b)) if a[i] and b[j])


@dataclass(frozen=True)
class DynkinClass:
    kind: str
    type: str
    components: tuple[str, ...] = ()
    kronecker: bool = False
    cyclic: int = 0
    jordan: bool = False

    @property
    def is_finite(self) -> bool:
        return self.kind in ("finite", "finite-reducible")

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"

    @property
    def family(self) -> str:
        """ finite | kronecker | cyclic | affine | other """
        if self.is_finite:
            return "finite"
        if self.kronecker:
            return "kronecker"
        if self.cyclic:
            return "cyclic"
        return "affine" if self.is_affine else "other"

    @property
    def tag(self) -> str:
        if self.jordan:
            return "Jordan(C_1)"
        if self.kind == "finite":
            return f"FiniteIrreducible({self.type})"
        if self.kind == "finite-reducible":
            return f"FiniteReducible({', '.join(self.components)})"
        if self.kind == "affine":
            flags = [f"Affine({self.type})"]
            if self.kronecker:
                flags.append("Kronecker")
            if self.cyclic:
                flags.append(f"CyclicOrientation(C_{self.cyclic})")
            return " ".join(flags)
        return "Other"

    def to_dict(self) -> dict:
        return {
            "tag": self.tag, "kind": self.kind, "type": self.type,
            "components": list(self.components), "kronecker": self.kronecker,
            "cyclic": self.cyclic, "jordan": self.jordan,
        }


@dataclass(frozen=True)
class WeylWord:
    """ Letters are applied right-to-left as simple reflections """
    letters: tuple[str, ...]

    def apply(self, q: Quiver, a) -> DimVector:
        a = q.check(a)
        for letter in reversed(self.letters):
            a = reflect(q, letter, a)
        return a

    def __str__(self) -> str:
        return " ".join(f"s{v}" for v in self.letters) or "1"


def euler_form(q: Quiver, a, b) -> int:
    a, b = q.check(a), q.check(b)
    return sum(x * y for x, y in zip(a, b)) - sum(a[s] * b[t] for s, t in q.arrows)


def euler_cocycle(q: Quiver, a, b) -> int:
    return -1 if euler_form(q, a, b) % 2 else 1


def cartan_pairing(q: Quiver, a, b) -> int:
    return euler_form(q, a, b) + euler_form(q, b, a)


def cartan_datum(q: Quiver) -> CartanDatum:
    n = len(q)
    return CartanDatum(tuple(
        tuple(cartan_pairing(q, q.simple(i), q.simple(j)) for j in range(n))
        for i in range(n)
    ))


def _arms(g: nx.Graph, centre) -> list[int]:
    lengths = []
    for start in g.neighbors(centre):
        length, previous, current = 1, centre, start
        while True:
            onward = [v for v in g.neighbors(current) if v != previous]
            if not onward:
                break
            previous, current = current, onward[0]
            length += 1
        lengths.append(length)
    return sorted(lengths)


def _name_finite(g: nx.MultiGraph) -> str:
    n = g.number_of_nodes()
    degrees = dict(nx.Graph(g).degree())
    branch = [v for v, d in degrees.items() if d >= 3]
    if not branch:
        return f"A{n}"
    arms = _arms(nx.Graph(g), branch[0])
    if arms[:2] == [1, 1]:
        return f"D{n}"
    return {(1, 2, 2): "E6", (1, 2, 3): "E7", (1, 2, 4): "E8"}.get(tuple(arms), "?")


def _name_affine(g: nx.MultiGraph) -> str:
    n = g.number_of_nodes()
    simple = nx.Graph(g)
    if n == 2:
        return "A(1)1"
    degrees = dict(simple.degree())
    if all(d == 2 for d in degrees.values()):
        return f"A(1){n - 1}"
    branch = [v for v, d in degrees.items() if d >= 3]
    if len(branch) == 2 or max(degrees.values()) == 4:
        return f"D(1){n - 1}"
    arms = tuple(_arms(simple, branch[0]))
    return {(2, 2, 2): "E(1)6", (1, 3, 3): "E(1)7", (1, 2, 5): "E(1)8"}.get(arms, "?")


def _is_directed_cycle(q: Quiver) -> bool:
    outgoing = [0] * len(q)
    incoming = [0] * len(q)
    for s, t in q.arrows:
        outgoing[s] += 1
        incoming[t] += 1
    return all(o == 1 for o in outgoing) and all(i == 1 for i in incoming) and q.has_cycles()


def classify(q: Quiver) -> DynkinClass:
    """ Dynkin class of the underlying graph, decided by (semi)definiteness of the Cartan matrix """
    if q.loops:
        if len(q) == 1 and len(q.edges) == 1:
            return DynkinClass("affine", "A(1)0", ("C1",), cyclic=1, jordan=True)
        raise QuiverError("loops are only allowed on the one-vertex Jordan quiver")

    g = q.graph()
    matrix = Matrix(cartan_datum(q).matrix)
    if matrix.is_positive_definite:
        names = []
        for component in sorted(nx.connected_components(g), key=lambda c: min(q.index(v) for v in c)):
            names.append(_name_finite(g.subgraph(component)))
        if len(names) == 1:
            return DynkinClass("finite", names[0], tuple(names))
        return DynkinClass("finite-reducible", "+".join(names), tuple(names))

    if nx.is_connected(g) and matrix.is_positive_semidefinite:
        name = _name_affine(g)
        if name == "A(1)1":
            same_direction = len(set(q.edges)) == 1
            return DynkinClass("affine", name, (name,), kronecker=same_direction, cyclic=0 if same_direction else 2)
        cyclic = len(q) if name.startswith("A(1)") and _is_directed_cycle(q) else 0
        return DynkinClass("affine", name, (name,), cyclic=cyclic)

    logger.debug("quiver %s is neither finite nor affine", q.name or q.vertices)
    return DynkinClass("other", "", ())


def require_affine(q: Quiver) -> DynkinClass:
    dynkin = classify(q)
    if not dynkin.is_affine:
        raise ClassificationError(f"{dynkin.tag} is not affine")
    return dynkin


def defect(q: Quiver, a) -> int:
    """ e(delta, a) """
    from lab.root_system import first_imaginary_root

    return euler_form(q, first_imaginary_root(q), a)


def reflect(q: Quiver, vertex: str, a) -> DimVector:
    i = q.index(vertex)
    a = q.check(a)
    pairing = cartan_pairing(q, q.simple(i), a)
    return tuple(x - pairing if k == i else x for k, x in enumerate(a))


def is_admissible(q: Quiver, vertex: str) -> bool:
    q.index(vertex)
    return q.is_sink(vertex) or q.is_source(vertex)


def reflect_quiver(q: Quiver, vertex: str) -> Quiver:
    if not is_admissible(q, vertex):
        raise QuiverError(f"vertex {vertex} is neither a source nor a sink")
    return Quiver(
        q.vertices,
        tuple((t, s) if vertex in (s, t) else (s, t) for s, t in q.edges),
        q.name,
    )


def sink_order(q: Quiver) -> list[str]:
    """ Repeatedly peel the lexicographically smallest current sink """
    if q.has_cycles():
        raise QuiverError("a quiver with oriented cycles has no Coxeter element")
    order, current = [], q
    while len(order) < len(q):
        sink = min(current.sinks)
        order.append(sink)
        if len(order) < len(q):
            current = current.remove_vertices([sink])
    return order


def coxeter_element(q: Quiver) -> WeylWord:
    return WeylWord(tuple(reversed(sink_order(q))))


def coxeter_apply(q: Quiver, a, power: int = 1) -> DimVector:
    word = coxeter_element(q)
    a = q.check(a)
    if power < 0:
        word = WeylWord(tuple(reversed(word.letters)))
    for _ in range(abs(power)):
        a = word.apply(q, a)
    return a


def opposite(q: Quiver) -> Quiver:
    return Quiver(q.vertices, tuple((t, s) for s, t in q.edges), q.name)


def source_order(q: Quiver) -> list[str]:
    """ Repeatedly peel the lexicographically smallest current source """
    return sink_order(opposite(q))


def cycle_order(q: Quiver) -> list[int]:
    """ Vertex indices of an oriented cycle, following the arrows from the first vertex """
    following = {s: t for s, t in q.arrows}
    order = [0]
    while len(order) < len(q):
        order.append(following[order[-1]])
    return order
