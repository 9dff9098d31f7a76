"""
Small exact linear algebra over a sympy field domain.

Matrices are tuples of row tuples of domain elements. Reductions go through
sympy's DomainMatrix; only the bookkeeping around it lives here.
"""
from itertools import combinations, product

from sympy.polys.matrices import DomainMatrix

Matrix = tuple[tuple, ...]


def zeros(rows: int, cols: int, K) -> Matrix:
    return tuple(tuple(K.zero for _ in range(cols)) for _ in range(rows))


def identity(n: int, K) -> Matrix:
    return tuple(tuple(K.one if i == j else K.zero for j in range(n)) for i in range(n))


def shape(A: Matrix, cols: int | None = None) -> tuple[int, int]:
    if A:
        return len(A), len(A[0])
    return 0, cols or 0


def is_zero(A: Matrix, K) -> bool:
    return all(K.is_zero(x) for row in A for x in row)


def add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(c, A: Matrix) -> Matrix:
    return tuple(tuple(c * a for a in row) for row in A)


def transpose(A: Matrix, rows: int, cols: int, K) -> Matrix:
    if not A:
        return zeros(cols, rows, K)
    return tuple(zip(*A)) if cols else zeros(0, rows, K)


def matmul(A: Matrix, B: Matrix, m: int, k: int, n: int, K) -> Matrix:
    """ (m x k) @ (k x n), tolerating empty dimensions """
    if m == 0:
        return ()
    if k == 0 or n == 0:
        return zeros(m, n, K)
    columns = list(zip(*B))
    zero = K.zero
    return tuple(
        tuple(sum((a * b for a, b in zip(row, col)), zero) for col in columns)
        for row in A
    )


def apply(A: Matrix, v, K):
    zero = K.zero
    return [sum((a * x for a, x in zip(row, v)), zero) for row in A]


def kron(A: Matrix, B: Matrix) -> Matrix:
    return tuple(
        tuple(a * b for a in ra for b in rb)
        for ra in A for rb in B
    )


def block(blocks: list[list[Matrix]], row_sizes: list[int], col_sizes: list[int], K) -> Matrix:
    rows = []
    for bi, rsize in enumerate(row_sizes):
        for r in range(rsize):
            line = []
            for bj, csize in enumerate(col_sizes):
                part = blocks[bi][bj]
                line.extend(part[r] if part else [K.zero] * csize)
            rows.append(tuple(line))
    return tuple(rows)


def rref(rows, ncols: int, K) -> tuple[list[list], tuple[int, ...]]:
    """ Reduced row echelon form with the zero rows dropped """
    rows = [list(r) for r in rows]
    if not rows or ncols == 0:
        return [], ()
    reduced, pivots = DomainMatrix(rows, (len(rows), ncols), K).rref()
    return reduced.to_list()[:len(pivots)], tuple(pivots)


def rank(rows, ncols: int, K) -> int:
    return len(rref(rows, ncols, K)[1])


def nullspace(rows, ncols: int, K) -> list[list]:
    """ Basis of {x : A x = 0} as a list of vectors """
    reduced, pivots = rref(rows, ncols, K)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vec = [K.zero] * ncols
        vec[f] = K.one
        for k, p in enumerate(pivots):
            vec[p] = -reduced[k][f]
        basis.append(vec)
    return basis


def left_nullspace(rows, nrows: int, ncols: int, K) -> list[list]:
    """ Basis of {y : y A = 0} """
    return nullspace(transpose(tuple(map(tuple, rows)), nrows, ncols, K), nrows, K)


def solve(rows, rhs, ncols: int, K):
    """ One solution of A x = b, or None """
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not augmented:
        return [K.zero] * ncols
    reduced, pivots = rref(augmented, ncols + 1, K)
    if ncols in pivots:
        return None
    x = [K.zero] * ncols
    for k, p in enumerate(pivots):
        x[p] = reduced[k][ncols]
    return x


def reduce_vector(v, basis: list[list], pivots: tuple[int, ...]):
    """ Remainder of v modulo the row space of an rref basis """
    v = list(v)
    for row, p in zip(basis, pivots):
        c = v[p]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    return v


def in_span(v, basis: list[list], pivots: tuple[int, ...], K) -> bool:
    return all(K.is_zero(x) for x in reduce_vector(v, basis, pivots))


def grassmannian(d: int, n: int, K, elements: list) -> list[list[list]]:
    """ All d-dimensional subspaces of K^n, each as an rref row basis """
    if d == 0:
        return [[]]
    if d > n:
        return []
    spaces = []
    for pivots in combinations(range(n), d):
        slots = [
            (k, j) for k, p in enumerate(pivots)
            for j in range(p + 1, n) if j not in pivots
        ]
        for values in product(elements, repeat=len(slots)):
            rows = [[K.zero] * n for _ in range(d)]
            for k, p in enumerate(pivots):
                rows[k][p] = K.one
            for (k, j), value in zip(slots, values):
                rows[k][j] = value
            spaces.append(rows)
    return spaces


def flatten(mats: list[Matrix]) -> list:
    return [x for A in mats for row in A for x in row]
