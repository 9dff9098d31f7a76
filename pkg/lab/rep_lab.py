"""
Explicit nilpotent quiver representations over GF(p) or QQ.

A representation stores one matrix per edge, of shape
dims[target] x dims[source], with entries in the field's sympy domain.
"""
import json
import logging
import random
import re

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from itertools import product

from sympy import Matrix, Poly, QQ, Rational, Symbol

from lab import linalg
from lab.errors import (
    AssumptionViolated, CapExceeded, ClassificationError, NonNilpotent, OracleError,
    ParseError, ShapeError, UnsupportedFamily,
)
from lab.fields import FieldSpec
from lab.quiver_core import (
    DimVector, Quiver, classify, cycle_order, defect, euler_form,
    reflect, reflect_quiver, sink_order, source_order,
)
from lab.root_system import (
    cyclic_roots, extending_vertices, first_imaginary_root,
    imaginary_degree, is_root, regular_position,
)

logger = logging.getLogger(__name__)

Morphism = tuple[linalg.Matrix, ...]


@dataclass(frozen=True, eq=False)
class Representation:
    quiver: Quiver
    field: FieldSpec
    dims: DimVector
    maps: tuple[linalg.Matrix, ...]

    def __post_init__(self):
        q = self.quiver
        object.__setattr__(self, "dims", q.check(self.dims))
        if any(d < 0 for d in self.dims):
            raise ShapeError(f"negative dimension in {self.dims}")
        if len(self.maps) != len(q.edges):
            raise ShapeError(f"{len(self.maps)} matrices given for {len(q.edges)} edges")
        for (s, t), edge, x in zip(q.arrows, q.edges, self.maps):
            if len(x) != self.dims[t] or any(len(row) != self.dims[s] for row in x):
                raise ShapeError(
                    f"edge {edge[0]}->{edge[1]} needs a {self.dims[t]}x{self.dims[s]} matrix"
                )

    @property
    def K(self):
        return self.field.domain

    @property
    def total(self) -> int:
        return sum(self.dims)

    @classmethod
    def from_matrices(cls, q: Quiver, field: FieldSpec, dims, maps) -> "Representation":
        """ Build from plain python numbers (ints, Fractions or 'a/b' strings) """
        return cls(q, field, tuple(dims), tuple(
            tuple(tuple(field(x) for x in row) for row in x) for x in maps
        ))

    @classmethod
    def from_dict(cls, q: Quiver, data: dict, field: FieldSpec | None = None) -> "Representation":
        try:
            field = field or FieldSpec.parse(data.get("field", "QQ"))
            dims = q.check(data["dims"])
            maps = data["maps"]
            if isinstance(maps, dict):
                maps = [maps[f"{s}->{t}"] for s, t in q.edges]
            maps = [
                x if x else [[] for _ in range(dims[t])]
                for x, (s, t) in zip(maps, q.arrows)
            ]
        except (KeyError, TypeError, ValueError) as err:
            raise ParseError(f"malformed representation: {err}") from err
        return cls.from_matrices(q, field, dims, maps)

    @classmethod
    def from_file(cls, q: Quiver, filename: str, field: FieldSpec | None = None) -> "Representation":
        try:
            with open(filename, encoding="utf8") as data:
                return cls.from_dict(q, json.load(data), field)
        except json.JSONDecodeError as err:
            raise ParseError(f"{filename}: {err}") from err

    def to_dict(self) -> dict:
        return {
            "field": self.field.name,
            "dims": list(self.dims),
            "maps": [
                [[self.field.to_json(v) for v in row] for row in x]
                for x in self.maps
            ],
        }


def zero_representation(q: Quiver, field: FieldSpec, dims) -> Representation:
    dims = q.check(dims)
    K = field.domain
    return Representation(q, field, dims, tuple(linalg.zeros(dims[t], dims[s], K) for s, t in q.arrows))


def simple(q: Quiver, vertex, field: FieldSpec) -> Representation:
    return zero_representation(q, field, q.simple(vertex))


def random_representation(q: Quiver, field: FieldSpec, dims, rng: random.Random) -> Representation:
    dims = q.check(dims)
    values = field.elements() if field.is_prime else [field(k) for k in range(-2, 3)]
    return Representation(q, field, dims, tuple(
        tuple(tuple(rng.choice(values) for _ in range(dims[s])) for _ in range(dims[t]))
        for s, t in q.arrows
    ))


def validate(rep: Representation) -> Representation:
    """ Nilpotency: images along all paths of length total dim vanish """
    q = rep.quiver
    if not q.has_cycles():
        return rep
    K = rep.K
    spans = [[list(row) for row in linalg.identity(d, K)] for d in rep.dims]
    for _ in range(rep.total):
        fresh = [[] for _ in rep.dims]
        for h, (s, t) in enumerate(q.arrows):
            for v in spans[s]:
                fresh[t].append(linalg.apply(rep.maps[h], v, K))
        spans = [linalg.rref(rows, d, K)[0] for rows, d in zip(fresh, rep.dims)]
        if not any(spans):
            return rep
    raise NonNilpotent(f"representation of dims {rep.dims} is not nilpotent")


def _same_setting(M: Representation, N: Representation) -> None:
    if M.quiver != N.quiver:
        raise ShapeError("representations live on different quivers")
    if M.field != N.field:
        raise ShapeError(f"fields differ: {M.field} and {N.field}")


def _hom_system(M: Representation, N: Representation) -> tuple[list[list], int, list[int]]:
    """
    Rows of the map phi -> (phi_t x_h - y_h phi_s)_h. The unknown phi_i[r][c]
    sits at offsets[i] + r * dim M_i + c.
    """
    _same_setting(M, N)
    K = M.K
    offsets, total = [], 0
    for m, n in zip(M.dims, N.dims):
        offsets.append(total)
        total += m * n
    rows = []
    for h, (s, t) in enumerate(M.quiver.arrows):
        X, Y = M.maps[h], N.maps[h]
        for r in range(N.dims[t]):
            for c in range(M.dims[s]):
                row = [K.zero] * total
                for k in range(M.dims[t]):
                    row[offsets[t] + r * M.dims[t] + k] += X[k][c]
                for k in range(N.dims[s]):
                    row[offsets[s] + k * M.dims[s] + c] -= Y[r][k]
                rows.append(row)
    return rows, total, offsets


def _as_morphism(vector, M: Representation, N: Representation, offsets: list[int]) -> Morphism:
    return tuple(
        tuple(tuple(vector[off + r * m + c] for c in range(m)) for r in range(n))
        for off, m, n in zip(offsets, M.dims, N.dims)
    )


def hom_basis(M: Representation, N: Representation) -> list[Morphism]:
    rows, total, offsets = _hom_system(M, N)
    return [_as_morphism(v, M, N, offsets) for v in linalg.nullspace(rows, total, M.K)]


def hom_dim(M: Representation, N: Representation) -> int:
    rows, total, _ = _hom_system(M, N)
    return total - linalg.rank(rows, total, M.K)


def ext1_dim(M: Representation, N: Representation) -> int:
    return hom_dim(M, N) - euler_form(M.quiver, M.dims, N.dims)


def ext1_by_cokernel(M: Representation, N: Representation) -> int:
    """ Ext^1 as the cokernel of the same map, without the Euler form """
    rows, total, _ = _hom_system(M, N)
    return len(rows) - linalg.rank(rows, total, M.K)


def direct_sum(M: Representation, N: Representation) -> Representation:
    _same_setting(M, N)
    K = M.K
    maps = []
    for h, (s, t) in enumerate(M.quiver.arrows):
        maps.append(linalg.block(
            [
                [M.maps[h], linalg.zeros(M.dims[t], N.dims[s], K)],
                [linalg.zeros(N.dims[t], M.dims[s], K), N.maps[h]],
            ],
            [M.dims[t], N.dims[t]], [M.dims[s], N.dims[s]], K,
        ))
    dims = tuple(a + b for a, b in zip(M.dims, N.dims))
    return Representation(M.quiver, M.field, dims, tuple(maps))


def _subspaces(M: Representation, W) -> list[tuple[list[list], tuple[int, ...]]]:
    if len(W) != len(M.dims):
        raise ShapeError("one subspace per vertex is needed")
    return [linalg.rref(rows, d, M.K) for rows, d in zip(W, M.dims)]


def is_stable(M: Representation, W) -> bool:
    spaces = _subspaces(M, W)
    for h, (s, t) in enumerate(M.quiver.arrows):
        basis, pivots = spaces[t]
        for w in spaces[s][0]:
            if not linalg.in_span(linalg.apply(M.maps[h], w, M.K), basis, pivots, M.K):
                return False
    return True


def subrepresentation(M: Representation, W) -> Representation:
    """ (W, x|W) in the rref bases of the W_i """
    spaces = _subspaces(M, W)
    if not is_stable(M, W):
        raise ShapeError("subspace is not stable under the edge maps")
    maps = []
    for h, (s, t) in enumerate(M.quiver.arrows):
        images = [linalg.apply(M.maps[h], w, M.K) for w in spaces[s][0]]
        maps.append(tuple(
            tuple(image[p] for image in images) for p in spaces[t][1]
        ))
    dims = tuple(len(basis) for basis, _ in spaces)
    return Representation(M.quiver, M.field, dims, tuple(maps))


def quotient(M: Representation, W) -> Representation:
    """ M/W on the images of the non-pivot coordinate vectors """
    spaces = _subspaces(M, W)
    if not is_stable(M, W):
        raise ShapeError("subspace is not stable under the edge maps")
    free = [
        [c for c in range(d) if c not in pivots]
        for d, (_, pivots) in zip(M.dims, spaces)
    ]
    maps = []
    for h, (s, t) in enumerate(M.quiver.arrows):
        basis, pivots = spaces[t]
        columns = [
            linalg.reduce_vector([row[c] for row in M.maps[h]], basis, pivots)
            for c in free[s]
        ]
        maps.append(tuple(
            tuple(column[r] for column in columns) for r in free[t]
        ))
    dims = tuple(len(f) for f in free)
    return Representation(M.quiver, M.field, dims, tuple(maps))


def graded_subspaces(C: Representation, target: DimVector):
    """
    Every x-stable graded subspace of C with the given dims, as per-vertex
    rref bases. Vertices are fixed in index order: W_v has to contain the
    images of the chosen W_s (s -> v) and map into the chosen W_t (v -> t).
    """
    q, K = C.quiver, C.K
    elements = C.field.elements()
    n = len(q)
    incoming = {v: [(h, s) for h, (s, t) in enumerate(q.arrows) if t == v and s != v] for v in range(n)}
    outgoing = {v: [(h, t) for h, (s, t) in enumerate(q.arrows) if s == v and t != v] for v in range(n)}
    loops = {v: [h for h, (s, t) in enumerate(q.arrows) if s == t == v] for v in range(n)}
    chosen: list = [None] * n

    def stable_under_loops(v, basis, pivots) -> bool:
        for h in loops[v]:
            for w in basis:
                if not linalg.in_span(linalg.apply(C.maps[h], w, K), basis, pivots, K):
                    return False
        return True

    def extend(v):
        if v == n:
            yield [list(c[0]) for c in chosen]
            return
        d, size = target[v], C.dims[v]
        images = [
            linalg.apply(C.maps[h], w, K)
            for h, s in incoming[v] if chosen[s] is not None
            for w in chosen[s][0]
        ]
        U, u_pivots = linalg.rref(images, size, K)
        constraints = []
        for h, t in outgoing[v]:
            if chosen[t] is None:
                continue
            X = C.maps[h]
            for y in linalg.nullspace(chosen[t][0], C.dims[t], K):
                constraints.append([
                    sum((y[r] * X[r][c] for r in range(C.dims[t])), K.zero) for c in range(size)
                ])
        if constraints:
            T = linalg.nullspace(constraints, size, K)
        else:
            T = [list(row) for row in linalg.identity(size, K)]
        if len(U) > d or len(T) < d:
            return
        T, t_pivots = linalg.rref(T, size, K)
        if any(not linalg.in_span(u, T, t_pivots, K) for u in U):
            return
        complement, _ = linalg.rref(
            [linalg.reduce_vector(t, U, u_pivots) for t in T], size, K,
        )
        for g in linalg.grassmannian(d - len(U), len(complement), K, elements):
            extra = [
                [sum((c * row[k] for c, row in zip(coefficients, complement)), K.zero) for k in range(size)]
                for coefficients in g
            ]
            basis, pivots = linalg.rref(U + extra, size, K)
            if loops[v] and not stable_under_loops(v, basis, pivots):
                continue
            chosen[v] = (basis, pivots)
            yield from extend(v + 1)
            chosen[v] = None

    yield from extend(0)


def reflection_apply(vertex: str, M: Representation) -> Representation:
    """
    Reflection functor at an admissible vertex: the kernel construction at a
    sink, the cokernel construction at a source. Simple summands at the
    vertex are annihilated.
    """
    q, K = M.quiver, M.K
    i = q.index(vertex)
    target = reflect_quiver(q, vertex)
    dims, maps = list(M.dims), list(M.maps)
    touching = [h for h, (s, t) in enumerate(q.arrows) if i in (s, t)]

    if q.is_sink(vertex):
        ends = [q.arrows[h][0] for h in touching]
        width = sum(M.dims[e] for e in ends)
        stacked = [
            [x for h in touching for x in M.maps[h][r]]
            for r in range(M.dims[i])
        ]
        kernel = linalg.nullspace(stacked, width, K)
        dims[i] = len(kernel)
        offset = 0
        for h, e in zip(touching, ends):
            maps[h] = tuple(
                tuple(vector[offset + r] for vector in kernel) for r in range(M.dims[e])
            )
            offset += M.dims[e]
    else:
        ends = [q.arrows[h][1] for h in touching]
        height = sum(M.dims[e] for e in ends)
        stacked = [row for h in touching for row in M.maps[h]]
        cokernel = linalg.left_nullspace(stacked, height, M.dims[i], K)
        dims[i] = len(cokernel)
        offset = 0
        for h, e in zip(touching, ends):
            maps[h] = tuple(
                tuple(functional[offset + c] for c in range(M.dims[e])) for functional in cokernel
            )
            offset += M.dims[e]

    logger.debug("reflected %s at %s: %s -> %s", q.name or q.vertices, vertex, M.dims, tuple(dims))
    return Representation(target, M.field, tuple(dims), tuple(maps))


def nonsplit_extension(sub: Representation, top: Representation) -> Representation:
    """ The middle term of a nonsplit 0 -> sub -> E -> top -> 0 """
    rows, total, _ = _hom_system(top, sub)
    K = sub.K
    coords = [
        (h, r, c)
        for h, (s, t) in enumerate(sub.quiver.arrows)
        for r in range(sub.dims[t]) for c in range(top.dims[s])
    ]
    columns = [[row[u] for row in rows] for u in range(total)]
    basis, pivots = linalg.rref(columns, len(rows), K)
    for k in range(len(rows)):
        unit = [K.one if u == k else K.zero for u in range(len(rows))]
        if not linalg.in_span(unit, basis, pivots, K):
            break
    else:
        raise OracleError(f"Ext^1 from {top.dims} to {sub.dims} vanishes")

    h0, r0, c0 = coords[k]
    maps = []
    for h, (s, t) in enumerate(sub.quiver.arrows):
        cocycle = tuple(
            tuple(K.one if (h, r, c) == (h0, r0, c0) else K.zero for c in range(top.dims[s]))
            for r in range(sub.dims[t])
        )
        maps.append(linalg.block(
            [[sub.maps[h], cocycle], [linalg.zeros(top.dims[t], sub.dims[s], K), top.maps[h]]],
            [sub.dims[t], top.dims[t]], [sub.dims[s], top.dims[s]], K,
        ))
    dims = tuple(a + b for a, b in zip(sub.dims, top.dims))
    return Representation(sub.quiver, sub.field, dims, tuple(maps))


def _unflatten(vector, dims) -> Morphism:
    blocks, offset = [], 0
    for d in dims:
        blocks.append(tuple(tuple(vector[offset + r * d + c] for c in range(d)) for r in range(d)))
        offset += d * d
    return tuple(blocks)


def _compose(f: Morphism, g: Morphism, dims, K) -> Morphism:
    return tuple(linalg.matmul(a, b, d, d, d, K) for a, b, d in zip(f, g, dims))


def _is_nilpotent(f: Morphism, dims, K) -> bool:
    for block, d in zip(f, dims):
        power = block
        for _ in range(d - 1):
            power = linalg.matmul(power, block, d, d, d, K)
        if not linalg.is_zero(power, K):
            return False
    return True


def is_local(M: Representation) -> bool:
    """
    True when End(M) is local with residue field the base field, i.e. M is
    absolutely indecomposable.
    """
    basis = hom_basis(M, M)
    if len(basis) <= 1:
        return len(basis) == 1
    K, dims = M.K, M.dims
    first = next(k for k, d in enumerate(dims) if d)
    size = dims[first]

    radical = []
    for f in basis:
        trace = sum((f[first][r][r] for r in range(size)), K.zero)
        if not M.field.is_prime or size % M.field.p:
            candidates = [trace / K(size)]
        else:
            candidates = M.field.elements()
        for value in candidates:
            shifted = tuple(
                linalg.sub(block, linalg.scale(value, linalg.identity(d, K)))
                for block, d in zip(f, dims)
            )
            if _is_nilpotent(shifted, dims, K):
                radical.append(shifted)
                break
        else:
            return False

    width = sum(d * d for d in dims)
    layer = radical
    for _ in range(len(basis) + 1):
        rows, _ = linalg.rref([linalg.flatten(g) for g in layer], width, K)
        if not rows:
            return True
        layer = [
            _compose(_unflatten(row, dims), g, dims, K)
            for row in rows for g in radical
        ]
    return False


@dataclass(frozen=True)
class RootLabel:
    """ The unique indecomposable of a real root with no tube structure """
    dims: DimVector

    @property
    def name(self) -> str:
        return "P(" + ",".join(map(str, self.dims)) + ")"


@dataclass(frozen=True)
class KronLabel:
    side: int
    n: int

    @property
    def name(self) -> str:
        return f"U{self.side}_{self.n}"


@dataclass(frozen=True)
class TubeLabel:
    """
    Homogeneous tube module at a rational point. Point None is a generic
    point; within one multiset, generic parts with the same slot share it.
    """
    n: int
    point: tuple | None = None
    slot: int = 0

    @property
    def generic(self) -> bool:
        return self.point is None

    @property
    def name(self) -> str:
        if self.point is None:
            return f"T*{self.slot or ''}_{self.n}"
        return f"T({self.point[0]}:{self.point[1]})_{self.n}"


@dataclass(frozen=True)
class CyclicLabel:
    """ P_{i,l}: top at cycle position i, length l """
    i: int
    l: int

    @property
    def name(self) -> str:
        return f"P{self.i}_{self.l}"


@dataclass(frozen=True)
class ExceptionalLabel:
    """ Uniserial module of an exceptional tube: top R_{tube,j}, regular length l """
    tube: int
    j: int
    l: int

    @property
    def name(self) -> str:
        return f"R{self.tube}_{self.j}_{self.l}"


Label = RootLabel | KronLabel | TubeLabel | CyclicLabel | ExceptionalLabel
_ORDER = {RootLabel: 0, KronLabel: 1, CyclicLabel: 2, ExceptionalLabel: 3, TubeLabel: 4}


def label_key(label: Label) -> tuple:
    return _ORDER[type(label)], label.name


@dataclass(frozen=True)
class IsoLabel:
    """ Multiset of indecomposable labels """
    parts: tuple[tuple[Label, int], ...] = ()

    @classmethod
    def of(cls, labels) -> "IsoLabel":
        counts = Counter(labels)
        return cls(tuple(sorted(counts.items(), key=lambda item: label_key(item[0]))))

    @property
    def labels(self) -> list[Label]:
        return [label for label, m in self.parts for _ in range(m)]

    @property
    def is_indecomposable(self) -> bool:
        return len(self.parts) == 1 and self.parts[0][1] == 1

    @property
    def single(self) -> Label:
        if not self.is_indecomposable:
            raise ClassificationError(f"{self.name} is not indecomposable")
        return self.parts[0][0]

    def __add__(self, other: "IsoLabel") -> "IsoLabel":
        return IsoLabel.of(self.labels + other.labels)

    @property
    def name(self) -> str:
        if not self.parts:
            return "0"
        return "+".join(f"{m}*{label.name}" if m > 1 else label.name for label, m in self.parts)

    def to_dict(self) -> dict:
        return {label.name: m for label, m in self.parts}

    @property
    def slots(self) -> list[int]:
        return sorted({part.slot for part in self.labels if isinstance(part, TubeLabel) and part.generic})


def generic_form(label: IsoLabel) -> IsoLabel:
    """
    The evaluation class of a multiset. Homogeneous tube parts forget their
    points and keep only which of them share one: the groups of parts at a
    common point get slots 0, 1, ... ordered by their lengths.
    """
    groups: dict = {}
    rest = []
    for part in label.labels:
        if not isinstance(part, TubeLabel):
            rest.append(part)
            continue
        key = ("point", part.point) if part.point is not None else ("slot", part.slot)
        groups.setdefault(key, []).append(part.n)
    if not groups:
        return label
    ordered = sorted(
        (sorted(lengths, reverse=True) for lengths in groups.values()),
        key=lambda lengths: (len(lengths), lengths), reverse=True,
    )
    return IsoLabel.of(rest + [
        TubeLabel(n, None, slot) for slot, lengths in enumerate(ordered) for n in lengths
    ])


_PATTERNS = [
    (re.compile(r"^P\(([-\d,\s]+)\)$"), lambda m: RootLabel(tuple(int(x) for x in m[1].split(",")))),
    (re.compile(r"^U([01])_(\d+)$"), lambda m: KronLabel(int(m[1]), int(m[2]))),
    (re.compile(r"^T\*(\d*)_(\d+)$"), lambda m: TubeLabel(int(m[2]), None, int(m[1] or 0))),
    (re.compile(r"^T\(([-\d/]+):([-\d/]+)\)_(\d+)$"),
     lambda m: TubeLabel(int(m[3]), (Fraction(m[1]), Fraction(m[2])))),
    (re.compile(r"^P(\d+)_(\d+)$"), lambda m: CyclicLabel(int(m[1]), int(m[2]))),
    (re.compile(r"^R(\d+)_(\d+)_(\d+)$"), lambda m: ExceptionalLabel(int(m[1]), int(m[2]), int(m[3]))),
]


def parse_label(text: str) -> IsoLabel:
    """ 'P(1,0)+2*P(0,1)', 'U0_1', 'T(1:0)_2', 'T*_1+T*1_1', 'P0_3', 'R1_0_2' """
    labels = []
    for part in str(text).replace(" ", "").split("+"):
        if not part:
            continue
        counted = re.match(r"^(\d+)\*(.+)$", part)
        count, body = (counted[1], counted[2]) if counted else ("", part)
        for pattern, make in _PATTERNS:
            match = pattern.match(body)
            if match:
                labels.extend([make(match)] * (int(count) if count else 1))
                break
        else:
            raise ParseError(f"cannot read label {body!r}")
    return IsoLabel.of(labels)


def _jordan(n: int, K) -> linalg.Matrix:
    return tuple(tuple(K.one if c == r + 1 else K.zero for c in range(n)) for r in range(n))


def tube_pair(field: FieldSpec, point: tuple, n: int) -> tuple[linalg.Matrix, linalg.Matrix]:
    """ (x_a, x_b) of H_z(J_n): (J - tI, I) at z = (1:t) and (I, J) at (0:1) """
    K = field.domain
    J, I = _jordan(n, K), linalg.identity(n, K)
    c, d = field.point_elements(point)
    if K.is_zero(c):
        return I, J
    return linalg.sub(J, linalg.scale(d / c, I)), I


class Catalogue:
    """ Canonical indecomposables of one quiver, built on demand and cached per field """

    def __init__(self, q: Quiver):
        self.q = q
        self.dynkin = classify(q)
        self.family = self.dynkin.family
        if self.family == "other":
            raise UnsupportedFamily(f"{self.dynkin.tag} has no classified indecomposables")
        self._built: dict = {}
        self._points: dict = {}
        self._simples: dict = {}
        self._witnesses: dict = {}
        if self.family == "kronecker":
            self.source, self.sink = q.arrows[0]
        if self.family == "cyclic":
            self.order = cycle_order(q)
            self.period = len(q)
            self.out_edge = {s: h for h, (s, _) in enumerate(q.arrows)}
        if self.family in ("kronecker", "cyclic", "affine"):
            self.delta = first_imaginary_root(q)
        if self.family == "affine":
            self.table = cyclic_roots(q)
            self.extending = self._extending_vertex()

    def _extending_vertex(self) -> str:
        candidates = extending_vertices(self.q)
        for admissible in (self.q.is_sink, self.q.is_source):
            chosen = [v for v in candidates if admissible(v)]
            if chosen:
                return min(chosen)
        raise UnsupportedFamily("no extending vertex is a sink or a source")

    def dims(self, label: Label) -> DimVector:
        n = len(self.q)
        if isinstance(label, RootLabel):
            return self.q.check(label.dims)
        if isinstance(label, KronLabel):
            vector = [0] * n
            vector[self.source] = label.n + 1 - label.side
            vector[self.sink] = label.n + label.side
            return tuple(vector)
        if isinstance(label, TubeLabel):
            return tuple(label.n * d for d in self.delta)
        if isinstance(label, CyclicLabel):
            vector = [0] * n
            for k in range(label.l):
                vector[self.order[(label.i + k) % self.period]] += 1
            return tuple(vector)
        vector = [0] * n
        for s in range(label.l):
            vector = [x + y for x, y in zip(vector, self.table.root(label.tube, label.j + s))]
        return tuple(vector)

    def label_dims(self, label: IsoLabel) -> DimVector:
        total = [0] * len(self.q)
        for part in label.labels:
            total = [x + y for x, y in zip(total, self.dims(part))]
        return tuple(total)

    def normalize(self, label: Label, field: FieldSpec) -> Label:
        """ Family-specific form of a label, with tube points in normal form """
        if isinstance(label, RootLabel):
            a = self.q.check(label.dims)
            if self.family == "kronecker" and abs(a[self.source] - a[self.sink]) == 1:
                side = int(a[self.sink] > a[self.source])
                return KronLabel(side, min(a))
            if self.family == "affine" and is_root(self.q, a) and not imaginary_degree(self.q, a) \
                    and defect(self.q, a) == 0:
                return ExceptionalLabel(*regular_position(self.table, a))
            return RootLabel(a)
        if isinstance(label, TubeLabel) and label.point is not None:
            return TubeLabel(label.n, field.normalize_point(*field.point_elements(label.point)))
        if isinstance(label, ExceptionalLabel):
            return ExceptionalLabel(label.tube, label.j % self.table.orbit_lengths[label.tube - 1], label.l)
        if isinstance(label, CyclicLabel):
            return CyclicLabel(label.i % self.period, label.l)
        return label

    def points(self, field: FieldSpec) -> list[tuple]:
        """ Rational points of the homogeneous tube family """
        if self.family == "kronecker":
            return field.projective_line()
        exceptional = self.exceptional_points(field)
        return [z for z in field.projective_line() if z not in exceptional]

    def labels_at(self, grade, field: FieldSpec) -> list[Label]:
        """ Every indecomposable label of the given dims over the field """
        a = self.q.check(grade)
        if not any(a) or any(x < 0 for x in a):
            return []
        if self.family == "finite":
            return [RootLabel(a)] if is_root(self.q, a) else []
        if self.family == "cyclic":
            labels = [CyclicLabel(i, sum(a)) for i in range(self.period)]
            return [label for label in labels if self.dims(label) == a]
        if not is_root(self.q, a):
            return []
        n = imaginary_degree(self.q, a)
        if not n:
            return [self.normalize(RootLabel(a), field)]
        labels: list[Label] = [TubeLabel(n, z) for z in self.points(field)]
        if self.family == "affine":
            for tube, length in enumerate(self.table.orbit_lengths, start=1):
                labels.extend(ExceptionalLabel(tube, j, n * length) for j in range(length))
        return labels

    def labels_upto(self, bound, field: FieldSpec) -> list[Label]:
        bound = self.q.check(bound)
        labels = []
        for grade in product(*(range(b + 1) for b in bound)):
            labels.extend(self.labels_at(grade, field))
        return sorted(labels, key=lambda L: (sum(self.dims(L)), self.dims(L), label_key(L)))

    def evaluation_classes(self, grade, field: FieldSpec) -> list[Label]:
        """ labels_at with the homogeneous tube points collapsed to the generic one """
        a = self.q.check(grade)
        n = imaginary_degree(self.q, a) if self.family in ("kronecker", "affine") and any(a) else 0
        if not n:
            return self.labels_at(a, field)
        labels: list[Label] = [TubeLabel(n)]
        if self.family == "affine":
            labels.extend(L for L in self.labels_at(a, field) if isinstance(L, ExceptionalLabel))
        return labels

    def points_needed(self, label: IsoLabel) -> int:
        """ Smallest prime whose projective line has a homogeneous point per slot """
        slots = len(label.slots)
        if not slots:
            return 2
        exceptional = self.table.orbit_count if self.family == "affine" else 0
        return max(2, slots + exceptional - 1)

    def representatives(self, label: IsoLabel, field: FieldSpec) -> list[Representation]:
        """
        Modules of an evaluation class over the field. Generic slots go to
        distinct rational points, taken as consecutive windows of the line.
        """
        slots = label.slots
        if not slots:
            return [self.build_iso(label, field)]
        points = self.points(field)
        if len(points) < len(slots):
            raise CapExceeded(f"{label.name} needs {len(slots)} homogeneous points, {field} has {len(points)}")
        found = []
        for start in range(len(points) - len(slots) + 1):
            chosen = dict(zip(slots, points[start:start + len(slots)]))
            found.append(self.build_iso(IsoLabel.of([
                TubeLabel(part.n, chosen[part.slot]) if isinstance(part, TubeLabel) and part.generic else part
                for part in label.labels
            ]), field))
        return found

    def build_iso(self, label: IsoLabel, field: FieldSpec) -> Representation:
        """ Direct sum of the canonical indecomposables of a multiset label """
        rep = zero_representation(self.q, field, [0] * len(self.q))
        for part in label.labels:
            rep = direct_sum(rep, self.build(part, field))
        return rep

    def build(self, label: Label, field: FieldSpec) -> Representation:
        label = self.normalize(label, field)
        key = (label, field)
        if key not in self._built:
            self._built[key] = self._construct(label, field)
        return self._built[key]

    def _construct(self, label: Label, field: FieldSpec) -> Representation:
        if isinstance(label, KronLabel) and self.family == "kronecker":
            return self._kronecker(label, field)
        if isinstance(label, TubeLabel) and self.family in ("kronecker", "affine"):
            if label.generic:
                raise UnsupportedFamily("the generic tube label has no single representative")
            return self.tube_module(label.point, label.n, field)
        if isinstance(label, CyclicLabel) and self.family == "cyclic":
            return self._cyclic(label, field)
        if isinstance(label, ExceptionalLabel) and self.family == "affine":
            return self._exceptional(label, field)
        if isinstance(label, RootLabel) and self.family in ("finite", "affine"):
            a = label.dims
            if not is_root(self.q, a) or (self.family == "affine" and imaginary_degree(self.q, a)):
                raise UnsupportedFamily(f"{a} is not a real root")
            return self._peel(label.dims, field)
        raise UnsupportedFamily(f"{label.name} does not belong to {self.dynkin.tag}")

    def _kronecker(self, label: KronLabel, field: FieldSpec) -> Representation:
        K, n = field.domain, label.n
        a = tuple(tuple(K.one if c == r else K.zero for c in range(n + 1)) for r in range(n))
        b = tuple(tuple(K.one if c == r + 1 else K.zero for c in range(n + 1)) for r in range(n))
        if label.side:
            a, b = linalg.transpose(a, n, n + 1, K), linalg.transpose(b, n, n + 1, K)
        return Representation(self.q, field, self.dims(label), (a, b))

    def _kronecker_pair(self, xa, xb, n: int, field: FieldSpec) -> Representation:
        return Representation(self.q, field, self.dims(TubeLabel(n)), (xa, xb))

    def _cyclic(self, label: CyclicLabel, field: FieldSpec) -> Representation:
        """ Graded Jordan block: deg e_k = l - k + i, with x e_{k+1} = e_k """
        K, N, l = field.domain, self.period, label.l
        degree = {k: (l - k + label.i) % N for k in range(1, l + 1)}
        slot, counts = {}, [0] * N
        for k in range(1, l + 1):
            slot[k] = counts[degree[k]]
            counts[degree[k]] += 1
        dims = [0] * N
        for position, vertex in enumerate(self.order):
            dims[vertex] = counts[position]
        entries = [
            [[K.zero] * dims[s] for _ in range(dims[t])]
            for s, t in self.q.arrows
        ]
        for k in range(1, l):
            h = self.out_edge[self.order[degree[k + 1]]]
            entries[h][slot[k]][slot[k + 1]] = K.one
        maps = tuple(tuple(map(tuple, x)) for x in entries)
        return Representation(self.q, field, tuple(dims), maps)

    def _exceptional(self, label: ExceptionalLabel, field: FieldSpec) -> Representation:
        if label.l == 1:
            return self._regular_simple(label.tube, label.j, field)
        length = self.table.orbit_lengths[label.tube - 1]
        sub = self.build(ExceptionalLabel(label.tube, (label.j + label.l - 1) % length, 1), field)
        top = self.build(ExceptionalLabel(label.tube, label.j, label.l - 1), field)
        return nonsplit_extension(sub, top)

    def _regular_simple(self, tube: int, j: int, field: FieldSpec) -> Representation:
        """ R_{tube,j}, a regular composition factor of the module at the tube's point """
        key = (tube, j, field)
        if key not in self._simples:
            self.exceptional_points(field)
        if key not in self._simples:
            raise OracleError(f"R{tube}_{j} was not met over {field}")
        return self._simples[key]

    def _regular_socle(self, M: Representation, tube: int | None = None):
        """
        (tube, j, W) with W a brick subrepresentation of dims alpha_{tube,j}.
        A brick of a real root is its unique indecomposable, so this is the
        regular socle R_{tube,j} of a module in an exceptional tube.
        """
        for t, length in enumerate(self.table.orbit_lengths, start=1):
            if tube is not None and t != tube:
                continue
            for j in range(length):
                alpha = self.table.root(t, j)
                if alpha == M.dims or any(x > d for x, d in zip(alpha, M.dims)):
                    continue
                for W in graded_subspaces(M, alpha):
                    sub = subrepresentation(M, W)
                    if hom_dim(sub, sub) == 1:
                        return t, j, W
        return None

    def _composition_factors(self, module: Representation, tube: int, field: FieldSpec) -> None:
        """ Peel regular socles off R_{top,N} until its regular top is left """
        length = self.table.orbit_lengths[tube - 1]
        roots = {self.table.root(tube, j): j for j in range(length)}
        current = module
        for _ in range(length):
            if current.dims in roots:
                self._simples[(tube, roots[current.dims], field)] = current
                return
            found = self._regular_socle(current, tube)
            if found is None:
                raise OracleError(f"no regular socle in a module of dims {current.dims} of tube {tube}")
            _, j, W = found
            self._simples[(tube, j, field)] = subrepresentation(current, W)
            current = quotient(current, W)
        raise OracleError(f"tube {tube} has more than {length} regular composition factors")

    def tube_module(self, point: tuple, n: int, field: FieldSpec) -> Representation:
        """ H_z(J_n) on the Kronecker quiver, K(H_z(J_n)) on other affine quivers """
        xa, xb = tube_pair(field, point, n)
        if self.family == "kronecker":
            return self._kronecker_pair(xa, xb, n, field)
        if self.family != "affine":
            raise UnsupportedFamily(f"{self.dynkin.tag} has no homogeneous tubes")
        return self.embed(xa, xb, n, n, field)

    @property
    def alpha0(self) -> DimVector:
        """ Dims of the image of the Kronecker simple at the source """
        pi = self.q.index(self.extending)
        if self.q.is_sink(self.extending):
            return tuple(d - (k == pi) for k, d in enumerate(self.delta))
        return self.q.simple(pi)

    def embed(self, xa, xb, v0: int, v1: int, field: FieldSpec) -> Representation:
        """
        The functor from Kronecker representations (V_0 => V_1) to the quiver.
        For an extending sink p: W_p = V_1 and W_i = V_0 (x) k^{delta_i}
        elsewhere; for a source p the roles of V_0 and V_1 swap. Away from p
        the maps are those of the fixed indecomposable of dims delta - e_p.
        """
        K, q, p = field.domain, self.q, self.extending
        pi = q.index(p)
        sink = q.is_sink(p)
        rest = q.remove_vertices([p])
        inner = tuple(d for k, d in enumerate(self.delta) if k != pi)
        y = catalogue(rest).build(RootLabel(inner), field)
        spread = v0 if sink else v1

        touching = [h for h, (s, t) in enumerate(q.arrows) if pi in (s, t)]
        maps, kept = [], 0
        for h in range(len(q.arrows)):
            if h in touching:
                maps.append(None)
                continue
            maps.append(linalg.kron(y.maps[kept], linalg.identity(spread, K)))
            kept += 1
        far = [q.arrows[h][0] if sink else q.arrows[h][1] for h in touching]
        if len(touching) == 1 and self.delta[far[0]] == 2:
            if sink:
                maps[touching[0]] = tuple(tuple(xa[r]) + tuple(xb[r]) for r in range(v1))
            else:
                maps[touching[0]] = tuple(xa) + tuple(xb)
        elif len(touching) == 2:
            maps[touching[0]], maps[touching[1]] = tuple(xa), tuple(xb)
        else:
            raise UnsupportedFamily(f"extending vertex {p} has no supported neighbourhood")
        dims = [spread * d for d in self.delta]
        dims[pi] = v1 if sink else v0
        return Representation(q, field, tuple(dims), tuple(maps))

    def exceptional_points(self, field: FieldSpec) -> dict[tuple, tuple[int, int]]:
        """
        Point z -> (tube, top j) with K(H_z(J_1)) isomorphic to R_{tube,j} of
        length N_tube: the points where the module has a regular socle. The
        regular simples of each tube are read off its module on the way.
        """
        if self.family != "affine":
            return {}
        if field in self._points:
            return self._points[field]
        found: dict = {}
        for z in field.projective_line():
            module = self.tube_module(z, 1, field)
            if hom_dim(module, module) != 1:
                raise AssumptionViolated("tube family", f"the module at {z} over {field} is not a brick")
            socle = self._regular_socle(module)
            if socle is None:
                continue
            tube, j, _ = socle
            found[z] = (tube, (j + 1) % self.table.orbit_lengths[tube - 1])
            self._composition_factors(module, tube, field)
        for tube in range(1, self.table.orbit_count + 1):
            hits = [z for z, (t, _) in found.items() if t == tube]
            if len(hits) != 1:
                raise OracleError(f"tube {tube} meets {len(hits)} points over {field}")
        logger.info("exceptional points over %s: %s", field, found)
        self._points[field] = found
        return found

    def _peel(self, alpha: DimVector, field: FieldSpec) -> Representation:
        """
        Reflect at sinks (preprojective side) or sources (preinjective side)
        until alpha becomes simple, then rebuild with the opposite functors.
        """
        q = self.q
        at_sinks = self.family == "finite" or defect(q, alpha) < 0
        steps, current, a = [], q, tuple(alpha)
        for _ in range(4 * (sum(alpha) + len(q))):
            for vertex in sink_order(current) if at_sinks else source_order(current):
                if a == current.simple(vertex):
                    rep = simple(current, vertex, field)
                    for back in reversed(steps):
                        rep = reflection_apply(back, rep)
                    return rep
                a = reflect(current, vertex, a)
                if any(x < 0 for x in a):
                    raise UnsupportedFamily(f"{alpha} is not reached by reflections")
                steps.append(vertex)
                current = reflect_quiver(current, vertex)
        raise UnsupportedFamily(f"reflections from {alpha} do not terminate")

    def _tube_point(self, rep: Representation) -> tuple | None:
        if self.family == "kronecker" and not rep.field.is_prime:
            found = spec(rep)
            return found.points[0] if found.regular and len(found.points) == 1 else None
        if not rep.field.is_prime:
            raise UnsupportedFamily("tube points of general affine quivers need a finite field")
        for z in self.points(rep.field):
            if hom_dim(self.tube_module(z, 1, rep.field), rep):
                return z
        return None

    def resolve(self, rep: Representation) -> Label | None:
        """ Label of an absolutely indecomposable representation; None when it has none """
        a, q = rep.dims, self.q
        if self.family == "finite":
            return RootLabel(a) if is_root(q, a) else None
        if self.family == "cyclic":
            tops = [
                position for position, vertex in enumerate(self.order)
                if hom_dim(rep, simple(q, vertex, rep.field))
            ]
            if len(tops) != 1:
                return None
            label = CyclicLabel(tops[0], sum(a))
            return label if self.dims(label) == a else None
        if not is_root(q, a):
            return None
        n = imaginary_degree(q, a)
        if not n:
            return self.normalize(RootLabel(a), rep.field)
        if self.family == "affine":
            for tube, length in enumerate(self.table.orbit_lengths, start=1):
                for j in range(length):
                    if hom_dim(self.build(ExceptionalLabel(tube, j, 1), rep.field), rep):
                        return ExceptionalLabel(tube, (j - n * length + 1) % length, n * length)
        point = self._tube_point(rep)
        return None if point is None else TubeLabel(n, point)


@cache
def catalogue(q: Quiver) -> Catalogue:
    return Catalogue(q)


def canonical_indecomposable(q: Quiver, label: Label, field: FieldSpec) -> Representation:
    return catalogue(q).build(label, field)


def build_label(q: Quiver, label: IsoLabel, field: FieldSpec) -> Representation:
    return catalogue(q).build_iso(label, field)


def identify(M: Representation) -> IsoLabel:
    """
    Decomposition of M into canonical indecomposables. A local endomorphism
    ring is resolved directly; otherwise the multiplicities solve the
    Hom-fingerprint system against every candidate of smaller dims.
    """
    validate(M)
    if not any(M.dims):
        return IsoLabel()
    cat = catalogue(M.quiver)
    if is_local(M):
        label = cat.resolve(M)
        if label is None:
            raise ClassificationError(f"indecomposable of dims {M.dims} has no label over {M.field}")
        return IsoLabel.of([label])
    if cat.family in ("kronecker", "affine") and not M.field.is_prime:
        raise UnsupportedFamily("decomposing tube modules needs a finite field")
    return _fingerprint(cat, M)


def _fingerprint(cat: Catalogue, M: Representation) -> IsoLabel:
    """
    Multiplicities from dim Hom(P, M) and dim Hom(M, P) over the catalogued
    P. A module with a summand at a tube point of degree > 1 has no solution,
    or one whose endomorphisms do not match.
    """
    key = (M.dims, M.field)
    if key not in cat._witnesses:
        candidates = cat.labels_upto(M.dims, M.field)
        witnesses = [cat.build(label, M.field) for label in candidates]
        cat._witnesses[key] = candidates, witnesses, [[hom_dim(P, Q) for Q in witnesses] for P in witnesses]
    candidates, witnesses, left = cat._witnesses[key]
    k = len(witnesses)
    rows, rhs = [], []
    for a, P in enumerate(witnesses):
        rows.append([QQ(left[a][b]) for b in range(k)])
        rhs.append(QQ(hom_dim(P, M)))
        rows.append([QQ(left[b][a]) for b in range(k)])
        rhs.append(QQ(hom_dim(M, P)))
    if linalg.rank(rows, k, QQ) != k:
        raise OracleError(f"fingerprint system for dims {M.dims} is singular")
    solution = linalg.solve(rows, rhs, k, QQ)
    unlabeled = f"dims {M.dims} over {M.field} is not a sum of catalogued indecomposables"
    if solution is None:
        raise ClassificationError(unlabeled)

    labels = []
    for label, value in zip(candidates, solution):
        if QQ.denom(value) != 1 or QQ.numer(value) < 0:
            raise ClassificationError(f"{unlabeled}: multiplicity {value} of {label.name}")
        labels.extend([label] * int(QQ.numer(value)))
    found = IsoLabel.of(labels)
    if cat.label_dims(found) != M.dims:
        raise ClassificationError(f"{unlabeled}: {found.name} has other dims")
    B = cat.build_iso(found, M.field)
    if hom_dim(M, M) != hom_dim(B, B):
        raise ClassificationError(f"{unlabeled}: {found.name} has other endomorphisms")
    logger.debug("identified dims %s as %s", M.dims, found.name)
    return found


@dataclass(frozen=True)
class Spectrum:
    regular: bool
    points: tuple = ()


def spec(M: Representation) -> Spectrum:
    """ Points (c:c') with c x_a + c' x_b singular, for a Kronecker representation """
    cat = catalogue(M.quiver)
    if cat.family != "kronecker":
        raise ClassificationError("spectra are only defined on the Kronecker quiver")
    n = M.dims[cat.source]
    if n != M.dims[cat.sink]:
        return Spectrum(False)
    if n == 0:
        return Spectrum(True)

    def entry(x):
        value = M.field.to_python(x)
        return Rational(value.numerator, value.denominator) if isinstance(value, Fraction) else value

    t = Symbol("t")
    xa = Matrix(n, n, lambda r, c: entry(M.maps[0][r][c]))
    xb = Matrix(n, n, lambda r, c: entry(M.maps[1][r][c]))
    determinant = (xa + t * xb).det(method="berkowitz")
    if M.field.is_prime:
        poly = Poly(determinant, t, modulus=M.field.p)
    else:
        poly = Poly(determinant, t, domain="QQ")
    if poly.is_zero:
        return Spectrum(False)

    if M.field.is_prime:
        points = [(1, value) for value in range(M.field.p) if poly.eval(value) % M.field.p == 0]
    else:
        points = [(1, Fraction(int(r.p), int(r.q))) for r in sorted(poly.ground_roots())]
    if poly.degree() < n:
        points.append((0, 1))
    return Spectrum(True, tuple(points))
