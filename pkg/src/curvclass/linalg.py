"""Exact linear algebra over the Expr field.

Everything here is fraction-free Bareiss elimination with full pivoting.
The pivot at each step is the structurally smallest nonzero entry of the
active submatrix (total term count of numerator and denominator, ties in
row-major order); every pivot that is not a rational constant is recorded
as a regularity condition, i.e. the returned solution is valid on the open
dense set where those expressions do not vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from fractions import Fraction
from math import gcd as _int_gcd
from math import lcm as _int_lcm

from .context import CurvclassError
from .expr import Expr, ONE, ZERO
from .poly import Poly, div_exact, scalar_content

UNIQUE = "unique"
FAMILY = "family"
INCONSISTENT = "inconsistent"


class DegenerateMatrixError(CurvclassError):
    pass


class ExprMatrix:
    """Dense matrix of canonical Exprs."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: list[list[Expr]]):
        if not entries or not entries[0]:
            raise CurvclassError("matrix dimensions must be positive")
        self.rows = len(entries)
        self.cols = len(entries[0])
        for row in entries:
            if len(row) != self.cols:
                raise CurvclassError("ragged matrix rows")
        self.entries = entries

    @staticmethod
    def identity(n: int) -> "ExprMatrix":
        return ExprMatrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> list[Expr]:
        return list(self.entries[i])

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def matmul(self, other: "ExprMatrix") -> "ExprMatrix":
        if self.cols != other.rows:
            raise CurvclassError("matrix dimension mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a.is_zero():
                        continue
                    b = other.entries[k][j]
                    if b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ExprMatrix(out)


@dataclass
class LinearSolution:
    """Outcome of an exact linear solve A x = b over the Expr field."""

    status: str
    particular: list[Expr] | None = None
    null_basis: list[list[Expr]] = field(default_factory=list)
    regularity: list[Expr] = field(default_factory=list)
    inconsistent_row: int | None = None


def _structural_size(e: Expr) -> int:
    return e.term_count


def _clear_row_denominators(row: list[Expr]) -> list[Expr]:
    """Scale a row to polynomial entries with small integer content.

    Multiplying an equation by the product of its distinct denominators
    does not change its solution set, but it keeps the whole elimination
    inside the polynomial ring where fraction-free division is exact and
    cheap."""
    dens: list[Poly] = []
    for e in row:
        if not e.den.is_one() and e.den not in dens:
            dens.append(e.den)
    if dens:
        prod = dens[0]
        for d in dens[1:]:
            prod = prod * d
        cleared = []
        for e in row:
            if e.num.is_zero():
                cleared.append(ZERO)
            elif e.den.is_one():
                cleared.append(Expr(e.num * prod, _ONE_POLY, _canonical=True))
            else:
                cleared.append(
                    Expr(e.num * div_exact(prod, e.den), _ONE_POLY, _canonical=True)
                )
        row = cleared
    content = Fraction(0)
    for e in row:
        if not e.num.is_zero():
            c = scalar_content(e.num)
            content = Fraction(
                _int_gcd(content.numerator, c.numerator),
                _int_lcm(content.denominator, c.denominator) if content else c.denominator,
            )
    if content and content != 1:
        row = [e.scale(1 / content) for e in row]
    return row


_ONE_POLY = Poly.one()


def _record_pivot(regularity: list[Expr], pivot: Expr):
    if not pivot.is_rational() and pivot not in regularity:
        regularity.append(pivot)


def _bareiss_forward(M: list[list[Expr]], pivot_cols: int):
    """In-place fraction-free forward elimination with full pivoting.

    Returns (rank, col_perm, pivots, row_src).  Only the first pivot_cols
    columns are eligible pivots; trailing columns (right-hand sides) are
    carried through the row operations.  row_src maps eliminated row
    positions back to input row indices.
    """
    rows = len(M)
    width = len(M[0]) if rows else 0
    col_perm = list(range(pivot_cols))
    row_src = list(range(rows))
    pivots: list[Expr] = []
    prev = ONE
    r = 0
    while r < rows and r < pivot_cols:
        best = None
        for i in range(r, rows):
            row = M[i]
            for j in range(r, pivot_cols):
                e = row[j]
                if not e.is_zero():
                    key = (_structural_size(e), i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != r:
            M[r], M[bi] = M[bi], M[r]
            row_src[r], row_src[bi] = row_src[bi], row_src[r]
        if bj != r:
            for row in M:
                row[r], row[bj] = row[bj], row[r]
            col_perm[r], col_perm[bj] = col_perm[bj], col_perm[r]
        p = M[r][r]
        pivots.append(p)
        for i in range(r + 1, rows):
            factor = M[i][r]
            row_i = M[i]
            row_r = M[r]
            for j in range(r, width):
                v = p * row_i[j] - factor * row_r[j]
                if not prev.is_rational() or prev.as_rational() != 1:
                    v = v / prev
                row_i[j] = v
        prev = p
        r += 1
    return r, col_perm, pivots, row_src


def _propagate_units(M: list[list[Expr]], srcs: list, n: int, regularity: list[Expr]):
    """Repeatedly solve rows with a single active unknown and substitute.

    These structured systems are dominated by equations that pin one
    unknown outright; handling them first keeps the fraction-free core
    small.  Returns (pinned, remaining rows, None) or (None, None,
    inconsistent source)."""
    pinned: dict[int, Expr] = {}
    active = list(range(len(M)))
    changed = True
    while changed:
        changed = False
        still = []
        for i in active:
            row = M[i]
            live = None
            multiple = False
            for j in range(n):
                c = row[j]
                if c.is_zero():
                    continue
                if j in pinned:
                    if not pinned[j].is_zero():
                        row[n] = row[n] - c * pinned[j]
                    row[j] = ZERO
                    continue
                if live is None:
                    live = j
                else:
                    multiple = True
                    break
            if multiple:
                still.append(i)
                continue
            if live is None:
                if not row[n].is_zero():
                    return None, None, srcs[i]
                continue
            pivot = row[live]
            _record_pivot(regularity, pivot)
            pinned[live] = row[n] / pivot
            changed = True
        active = still
    # final substitution pass so remaining rows reference no pinned column
    for i in active:
        row = M[i]
        for j in range(n):
            if j in pinned and not row[j].is_zero():
                if not pinned[j].is_zero():
                    row[n] = row[n] - row[j] * pinned[j]
                row[j] = ZERO
    return pinned, active, None


def solve_linear(A: ExprMatrix, b: list[Expr]) -> LinearSolution:
    """Solve A x = b exactly; unique / affine family / inconsistent.

    The family case returns one particular solution (free unknowns set to
    zero) plus a null-space basis.  Inconsistency reports the input row
    whose reduced equation demands a nonzero expression equal zero.
    """
    if A.rows != len(b):
        raise CurvclassError("right-hand side length mismatch")
    n = A.cols
    M = [_clear_row_denominators(A.row(i) + [b[i]]) for i in range(A.rows)]
    regularity: list[Expr] = []
    srcs = list(range(A.rows))
    pinned, active, bad_src = _propagate_units(M, srcs, n, regularity)
    if bad_src is not None:
        return LinearSolution(INCONSISTENT, regularity=regularity, inconsistent_row=bad_src)

    free_cols = [j for j in range(n) if j not in pinned]
    sub_rows = []
    sub_src = []
    for i in active:
        sub_rows.append(_clear_row_denominators([M[i][j] for j in free_cols] + [M[i][n]]))
        sub_src.append(srcs[i])
    m = len(free_cols)
    rank = 0
    col_perm = list(range(m))
    R = sub_rows
    if sub_rows and m:
        rank, col_perm, pivots, row_src = _bareiss_forward(R, m)
        for p in pivots:
            _record_pivot(regularity, p)
        for i in range(rank, len(R)):
            if not R[i][m].is_zero():
                return LinearSolution(
                    INCONSISTENT, regularity=regularity,
                    inconsistent_row=sub_src[row_src[i]])
    elif sub_rows:
        for i, row in enumerate(sub_rows):
            if not row[0].is_zero():
                return LinearSolution(
                    INCONSISTENT, regularity=regularity, inconsistent_row=sub_src[i])

    def back_substitute(rhs_of, free_value_of):
        x_perm = [ZERO] * m
        for j in range(rank, m):
            x_perm[j] = free_value_of(j)
        for i in range(rank - 1, -1, -1):
            acc = rhs_of(i)
            for j in range(i + 1, m):
                if not R[i][j].is_zero() and not x_perm[j].is_zero():
                    acc = acc - R[i][j] * x_perm[j]
            x_perm[i] = acc / R[i][i]
        x = [ZERO] * n
        for j in range(m):
            x[free_cols[col_perm[j]]] = x_perm[j]
        for j, val in pinned.items():
            x[j] = val
        return x

    particular = back_substitute(lambda i: R[i][m], lambda j: ZERO)
    null_basis = []
    for jf in range(rank, m):
        vec = back_substitute(lambda i: ZERO, lambda j, jf=jf: ONE if j == jf else ZERO)
        # pinned unknowns are forced, so they stay zero in null vectors
        for j in pinned:
            vec[j] = ZERO
        null_basis.append(_normalize_null_vector(vec))
    status = UNIQUE if not null_basis else FAMILY
    return LinearSolution(status, particular, null_basis, regularity)


def _normalize_null_vector(vec: list[Expr]) -> list[Expr]:
    for e in vec:
        if not e.is_zero():
            if e == ONE:
                return vec
            return [v / e for v in vec]
    return vec


def null_space(A: ExprMatrix) -> list[list[Expr]]:
    """Basis of the right null space, each vector with its first
    structurally nonzero entry normalized to 1."""
    sol = solve_linear(A, [ZERO] * A.rows)
    return sol.null_basis


def determinant(G: ExprMatrix) -> Expr:
    if G.rows != G.cols:
        raise CurvclassError("determinant of a non-square matrix")
    M = [G.row(i) for i in range(G.rows)]
    rank, col_perm, pivots, row_src = _bareiss_forward(M, G.cols)
    if rank < G.rows:
        return ZERO
    # In Bareiss elimination the last pivot is det(G) up to permutation sign.
    sign = _perm_sign(row_src) * _perm_sign(col_perm)
    det = pivots[-1]
    return det if sign > 0 else -det


def _perm_sign(perm: list[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def invert_matrix(G: ExprMatrix, symmetric: bool = False) -> ExprMatrix:
    """Exact inverse via Gauss-Jordan; raises on a singular matrix.

    det(G) is the regularity condition of the result: the inverse is valid
    wherever it does not vanish.  symmetric=True asserts the input is
    symmetric first (the metric case).
    """
    if G.rows != G.cols:
        raise DegenerateMatrixError("cannot invert a non-square matrix")
    if symmetric and not G.is_symmetric():
        raise DegenerateMatrixError("matrix is not symmetric")
    n = G.rows
    M = [G.row(i) + ExprMatrix.identity(n).row(i) for i in range(n)]
    for col in range(n):
        best = None
        for i in range(col, n):
            e = M[i][col]
            if not e.is_zero():
                key = (_structural_size(e), i)
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise DegenerateMatrixError("degenerate metric")
        _, bi = best
        if bi != col:
            M[col], M[bi] = M[bi], M[col]
        p = M[col][col]
        inv_p = ONE / p
        M[col] = [v * inv_p for v in M[col]]
        for i in range(n):
            if i == col:
                continue
            f = M[i][col]
            if f.is_zero():
                continue
            M[i] = [a - f * b for a, b in zip(M[i], M[col])]
    return ExprMatrix([row[n:] for row in M])
