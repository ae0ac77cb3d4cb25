"""Exact integer Smith normal form and basis extraction from relation matrices.

The relation matrix of a triangular presentation (K, L) is upper triangular
with the layer sizes negated on the diagonal in reversed generator order:
column c corresponds to generator t-c.  Its rows span the relation lattice,
so Z^t modulo that lattice is the presented group, and diagonalizing with
unimodular U, V (U R V = D, divisibility chain on the diagonal) yields the
invariant factors.  Rows of V^{-1} then give monomials of exactly those
orders; the extraction verifies that property and the induced bijection
rather than trusting any index convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import monomial as mn
from .errors import InconsistencyError


class IntMatrix:
    """A dense matrix of arbitrary-precision Python ints."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data):
        data = [list(row) for row in data]
        if not data or not data[0]:
            raise ValueError("matrix dimensions must be at least 1x1")
        cols = len(data[0])
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged rows")
            for x in row:
                if not isinstance(x, int):
                    raise ValueError(f"entries must be ints, got {type(x).__name__}")
        self.rows = len(data)
        self.cols = cols
        self.data = data

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.data)

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self):
        return f"IntMatrix({self.data!r})"

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = [
            [
                sum(self.data[i][k] * other.data[k][j] for k in range(self.cols))
                for j in range(other.cols)
            ]
            for i in range(self.rows)
        ]
        return IntMatrix(out)

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = [row[:] for row in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def diagonal(self) -> list[int]:
        return [self.data[i][i] for i in range(min(self.rows, self.cols))]

    def to_json_obj(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "data": [[str(x) for x in row] for row in self.data],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "IntMatrix":
        m = cls([[int(x) for x in row] for row in obj["data"]])
        if m.rows != obj["rows"] or m.cols != obj["cols"]:
            raise ValueError("matrix dimensions disagree with payload")
        return m


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Inverse of a matrix with determinant +-1 (Gauss-Jordan, exact)."""
    if m.rows != m.cols:
        raise ValueError("only square matrices invert")
    n = m.rows
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m.data)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = [[x for x in row[n:]] for row in a]
    for row in out:
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
    return IntMatrix([[int(x) for x in row] for row in out])


def vec_mat_mul(vec, m: IntMatrix) -> list[int]:
    if len(vec) != m.rows:
        raise ValueError("dimension mismatch")
    return [sum(vec[i] * m.data[i][j] for i in range(m.rows)) for j in range(m.cols)]


@dataclass
class SnfResult:
    """U * input * V = D with U, V unimodular and D's diagonal a divisibility chain."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.D.diagonal() if d != 0)


def smith_normal_form(m: IntMatrix) -> SnfResult:
    """Smith normal form by gcd-driven elimination, verified before returning.

    Any integer matrix is accepted.  Row operations accumulate in U, column
    operations in V; smallest-pivot selection keeps intermediate entries
    modest, and every result is checked exactly (U m V == D, |det U| =
    |det V| = 1, nonnegative diagonal divisibility chain).
    """
    R, C = m.rows, m.cols
    a = [row[:] for row in m.data]
    u = [row[:] for row in IntMatrix.identity(R).data]
    v = [row[:] for row in IntMatrix.identity(C).data]

    def row_combine(i1, i2, x, y, z, w):
        # (row i1, row i2) <- (x*row i1 + y*row i2, z*row i1 + w*row i2)
        for mat in (a, u):
            r1, r2 = mat[i1], mat[i2]
            for j in range(len(r1)):
                r1[j], r2[j] = x * r1[j] + y * r2[j], z * r1[j] + w * r2[j]

    def col_combine(j1, j2, x, y, z, w):
        for mat in (a, v):
            for row in mat:
                row[j1], row[j2] = x * row[j1] + y * row[j2], z * row[j1] + w * row[j2]

    def clear_at(t):
        # make a[t][t] the gcd of its row and column, zeros elsewhere
        while True:
            dirty = False
            for i in range(t + 1, R):
                if a[i][t]:
                    p, q = a[t][t], a[i][t]
                    if p and q % p == 0:
                        row_combine(t, i, 1, 0, -(q // p), 1)
                    else:
                        g = gcd(p, q)
                        x, y = _bezout(p, q)
                        row_combine(t, i, x, y, -(q // g), p // g)
                    dirty = True
            for j in range(t + 1, C):
                if a[t][j]:
                    p, q = a[t][t], a[t][j]
                    if p and q % p == 0:
                        col_combine(t, j, 1, 0, -(q // p), 1)
                    else:
                        g = gcd(p, q)
                        x, y = _bezout(p, q)
                        col_combine(t, j, x, y, -(q // g), p // g)
                    dirty = True
            if not dirty:
                return

    rank = min(R, C)
    for t in range(rank):
        # find the smallest nonzero entry of the trailing block as pivot
        best = None
        for i in range(t, R):
            for j in range(t, C):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
            u[t], u[bi] = u[bi], u[t]
        if bj != t:
            for mat in (a, v):
                for row in mat:
                    row[t], row[bj] = row[bj], row[t]
        clear_at(t)

    # enforce the divisibility chain and push zeros to the end
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if di == 0 and dj != 0:
                a[i], a[i + 1] = a[i + 1], a[i]
                u[i], u[i + 1] = u[i + 1], u[i]
                for mat in (a, v):
                    for row in mat:
                        row[i], row[i + 1] = row[i + 1], row[i]
                changed = True
            elif di != 0 and dj % di != 0:
                row_combine(i, i + 1, 1, 1, 0, 1)  # row i += row i+1
                clear_at(i)
                changed = True
    for i in range(rank):
        if a[i][i] < 0:
            for j in range(C):
                a[i][j] = -a[i][j]
            for j in range(R):
                u[i][j] = -u[i][j]

    result = SnfResult(IntMatrix(u), IntMatrix(a), IntMatrix(v))
    _check_snf(m, result)
    return result


def _bezout(p: int, q: int) -> tuple[int, int]:
    """x, y with x*p + y*q == gcd(p, q)."""
    old_r, r = p, q
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_x, x = x, old_x - qt * x
        old_y, y = y, old_y - qt * y
    if old_r < 0:
        old_x, old_y = -old_x, -old_y
    return old_x, old_y


def _check_snf(m: IntMatrix, res: SnfResult):
    if res.U.det() not in (1, -1) or res.V.det() not in (1, -1):
        raise InconsistencyError("transform matrices are not unimodular")
    if res.U.mul(m).mul(res.V) != res.D:
        raise InconsistencyError("U * M * V does not equal D")
    diag = res.D.diagonal()
    for i in range(res.D.rows):
        for j in range(res.D.cols):
            if i != j and res.D.data[i][j] != 0:
                raise InconsistencyError("D is not diagonal")
    for i in range(len(diag) - 1):
        if diag[i] < 0 or (diag[i] == 0 and diag[i + 1] != 0):
            raise InconsistencyError("diagonal is not a nonnegative chain")
        if diag[i] != 0 and diag[i + 1] % diag[i] != 0:
            raise InconsistencyError("diagonal divisibility chain is broken")


def build_relation_matrix(pres: mn.Presentation) -> IntMatrix:
    """The t x t upper-triangular relation matrix, generators in reversed column order.

    Row i carries generator g = t - i: -k_g on the diagonal and the relation
    exponents l_{g, t-j} to its right.
    """
    t = pres.t
    if t == 0:
        raise ValueError("the trivial presentation has no relation matrix")
    data = [[0] * t for _ in range(t)]
    for i in range(t):
        g = t - 1 - i  # 0-based generator index for row i
        data[i][i] = -pres.K[g]
        for j in range(i + 1, t):
            h = t - 1 - j  # column j holds generator h < g
            data[i][j] = pres.L[g][h]
    return IntMatrix(data)


def invariant_factors(pres: mn.Presentation) -> list[int]:
    """Invariant factors m_1 | m_2 | ... of the presented group, units dropped."""
    if pres.t == 0:
        return []
    res = smith_normal_form(build_relation_matrix(pres))
    diag = res.D.diagonal()
    if any(d == 0 for d in diag):
        raise InconsistencyError("relation matrix of a finite group must be nonsingular")
    return [d for d in diag if d > 1]


def basis_from_snf(pres: mn.Presentation, res: SnfResult) -> list[tuple[int, ...]]:
    """Monomials y_1..y_r with element_order(y_i) = m_i generating the group.

    Coordinates run in reversed generator order (coordinate c is the exponent
    of x_{t-c}), so basis rows come from V^{-1} read back-to-front.  The
    claimed orders and the induced bijection onto prod Z_{m_i} are verified;
    a failure means the index convention broke and raises immediately.
    """
    t = pres.t
    if t == 0:
        return []
    diag = res.D.diagonal()
    w = unimodular_inverse(res.V)
    basis = []
    orders = []
    for i in range(t):
        if diag[i] <= 1:
            continue
        rowvec = w.data[i]
        exps = [rowvec[t - 1 - g] for g in range(t)]
        y = mn.reduce(pres, exps)
        if mn.element_order(pres, y) != diag[i]:
            raise InconsistencyError(
                f"basis monomial order mismatch: expected {diag[i]}"
            )
        basis.append(y)
        orders.append(diag[i])
    if pres.n <= 4096:
        _check_basis_bijection(pres, basis, orders)
    return basis


def _check_basis_bijection(pres, basis, orders):
    seen = {mn.identity(pres)}
    frontier = [mn.identity(pres)]
    for y, m in zip(basis, orders):
        layer = list(frontier)
        acc = y
        for _ in range(1, m):
            for x in layer:
                z = mn.multiply(pres, x, acc)
                if z in seen:
                    raise InconsistencyError("basis monomials do not tile the group")
                seen.add(z)
                frontier.append(z)
            acc = mn.multiply(pres, acc, y)
    if len(seen) != pres.n:
        raise InconsistencyError("basis monomials do not span the group")


def basis_coordinates(pres: mn.Presentation, res: SnfResult, exponents) -> list[int]:
    """Coordinates of a chain-exponent vector over the basis of ``basis_from_snf``.

    The vector (one exponent per chain generator) maps to w V mod m_i in the
    reversed coordinate order; entries for unit factors are dropped.
    """
    t = pres.t
    if len(exponents) != t:
        raise ValueError(f"expected {t} exponents")
    w = [exponents[t - 1 - c] for c in range(t)]
    u = vec_mat_mul(w, res.V)
    diag = res.D.diagonal()
    return [u[i] % diag[i] for i in range(t) if diag[i] > 1]