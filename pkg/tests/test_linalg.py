"""Exact linear algebra over the expression field."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from curvclass import ExprMatrix, invert_matrix, null_space, solve_linear
from curvclass.expr import ONE, ZERO, Expr
from curvclass.linalg import DegenerateMatrixError, determinant

from oracles import rational_solve
from test_expr import P


def mat(rows):
    return ExprMatrix([[P(str(v)) if not isinstance(v, Expr) else v for v in row] for row in rows])


G_PAPER = mat([
    ["exp(x1+x3)", 1, 0, 0],
    [1, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, "exp(x1)"],
])


class TestInversion:
    def test_identity(self):
        I4 = ExprMatrix.identity(4)
        inv = invert_matrix(I4)
        assert all(inv[i, j] == I4[i, j] for i in range(4) for j in range(4))

    def test_paper_metric_inverse(self):
        inv = invert_matrix(G_PAPER, symmetric=True)
        assert inv[0, 0].is_zero()
        assert inv[0, 1] == ONE
        assert inv[1, 1] == P("-exp(x1+x3)")
        assert inv[2, 2] == ONE
        assert inv[3, 3] == P("exp(-x1)")
        prod = G_PAPER.matmul(inv)
        assert all(
            (prod[i, j] - (ONE if i == j else ZERO)).is_zero()
            for i in range(4) for j in range(4)
        )

    def test_diagonal_inverse(self):
        a = P("1+exp(x1)")
        inv = invert_matrix(ExprMatrix([[a, ZERO], [ZERO, P("x3")]]))
        assert inv[0, 0] == ONE / a
        assert inv[1, 1] == P("1/x3")

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateMatrixError):
            invert_matrix(mat([[1, 1], [1, 1]]))

    def test_numeric_inverse_cross_check(self):
        import numpy as np

        from oracles import eval_expr_at, random_admissible_points
        from curvclass import builtin_metric

        m = builtin_metric("paper31")
        inv = invert_matrix(m.g, symmetric=True)
        for point in random_admissible_points(m, 5, seed=10):
            num = np.array([[eval_expr_at(m.g[i, j], point) for j in range(4)] for i in range(4)])
            sym = np.array([[eval_expr_at(inv[i, j], point) for j in range(4)] for i in range(4)])
            assert np.allclose(sym, np.linalg.inv(num), rtol=1e-9, atol=1e-12)

    def test_determinant_of_paper_metric(self):
        assert determinant(G_PAPER) == P("-exp(x1)")


class TestSolveLinear:
    def test_single_equation(self):
        sol = solve_linear(mat([[1]]), [P("(1+2*exp(x1+x3))/4")])
        assert sol.status == "unique"
        assert sol.particular[0] == P("(1+2*exp(x1+x3))/4")

    def test_inconsistent_example(self):
        sol = solve_linear(mat([[1], [1]]), [ONE, P("2")])
        assert sol.status == "inconsistent"
        assert sol.inconsistent_row in (0, 1)

    def test_hgk_direction_system(self):
        # the 2-unknown per-direction system of the hyper-generalized
        # recurrence for the primary metric, direction x1
        e = P("exp(x1+x3)")
        beta = P("(1+2*exp(x1+x3))/4")
        ex1 = P("exp(x1)")
        A = ExprMatrix([
            [P("-1/2") * e, -beta],
            [P("-1/4") * ex1, -(beta * ex1)],
        ])
        sol = solve_linear(A, [P("-1/2") * e, ZERO])
        assert sol.status == "unique"
        assert sol.particular[0] == P("-2*exp(x1+x3)/(1-2*exp(x1+x3))")
        assert sol.particular[1] == P("2*exp(x1+x3)/(1-4*exp(2*x1+2*x3))")

    def test_family_with_null_basis(self):
        sol = solve_linear(mat([[1, 1]]), [ONE])
        assert sol.status == "family"
        assert len(sol.null_basis) == 1
        v = sol.null_basis[0]
        assert (v[0] + v[1]).is_zero()
        # residual of the particular solution
        assert (sol.particular[0] + sol.particular[1] - ONE).is_zero()

    def test_regularity_records_symbolic_pivots(self):
        sol = solve_linear(mat([["exp(x1)-2", 0], [0, 1]]), [ONE, ONE])
        assert sol.status == "unique"
        assert any("exp(x1)" in r for r in map(str, sol.regularity))

    @given(st.integers(0, 10_000))
    def test_matches_independent_rational_elimination(self, seed):
        rng = random.Random(seed)
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        A = [[Fraction(rng.randint(-3, 3)) for _ in range(cols)] for _ in range(rows)]
        b = [Fraction(rng.randint(-3, 3)) for _ in range(rows)]
        expected_status, expected = rational_solve(A, b)
        sol = solve_linear(
            ExprMatrix([[Expr.from_rational(v) for v in row] for row in A]),
            [Expr.from_rational(v) for v in b],
        )
        assert sol.status == expected_status
        if sol.status != "inconsistent":
            # verify the particular solution satisfies every equation
            for row, rhs in zip(A, b):
                acc = -Expr.from_rational(rhs)
                for c, x in zip(row, sol.particular):
                    acc = acc + Expr.from_rational(c) * x
                assert acc.is_zero()
            for vec in sol.null_basis:
                for row in A:
                    acc = ZERO
                    for c, x in zip(row, vec):
                        acc = acc + Expr.from_rational(c) * x
                    assert acc.is_zero()

    @given(st.integers(0, 10_000))
    def test_status_invariant_under_row_permutation(self, seed):
        rng = random.Random(seed)
        rows, cols = rng.randint(2, 4), rng.randint(1, 3)
        A = [[Fraction(rng.randint(-2, 2)) for _ in range(cols)] for _ in range(rows)]
        b = [Fraction(rng.randint(-2, 2)) for _ in range(rows)]
        perm = list(range(rows))
        rng.shuffle(perm)
        as_mat = lambda rs: ExprMatrix([[Expr.from_rational(v) for v in row] for row in rs])
        s1 = solve_linear(as_mat(A), [Expr.from_rational(v) for v in b])
        s2 = solve_linear(as_mat([A[i] for i in perm]), [Expr.from_rational(b[i]) for i in perm])
        assert s1.status == s2.status
        assert len(s1.null_basis) == len(s2.null_basis)


class TestNullSpace:
    def test_zero_matrix_gives_unit_vectors(self):
        basis = null_space(ExprMatrix([[ZERO, ZERO, ZERO], [ZERO, ZERO, ZERO]]))
        assert len(basis) == 3
        for i, vec in enumerate(basis):
            assert vec[i] == ONE
            assert all(vec[j].is_zero() for j in range(3) if j != i)

    def test_identity_gives_empty_basis(self):
        assert null_space(ExprMatrix.identity(3)) == []

    def test_first_nonzero_entry_normalized(self):
        basis = null_space(mat([["exp(x1)", 1]]))
        assert len(basis) == 1
        first = next(e for e in basis[0] if not e.is_zero())
        assert first == ONE

    @given(st.integers(0, 10_000))
    def test_rank_nullity_against_numeric_rank(self, seed):
        import numpy as np

        rng = random.Random(seed)
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        A = [[Fraction(rng.randint(-2, 2)) for _ in range(cols)] for _ in range(rows)]
        basis = null_space(ExprMatrix([[Expr.from_rational(v) for v in row] for row in A]))
        numeric = np.array([[float(v) for v in row] for row in A])
        rank = int(np.linalg.matrix_rank(numeric)) if numeric.size else 0
        assert len(basis) + rank == cols
