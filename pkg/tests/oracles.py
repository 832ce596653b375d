"""Independent numeric and naive-symbolic oracles for the test suite.

These deliberately re-derive everything through a second code path:
curvature from finite differences of the metric alone, tensor actions by
dense all-indices loops, ranks by floating-point SVD.  Nothing here calls
back into the engine's symbolic algorithms beyond plain evaluation.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from curvclass import Expr, Geometry, MetricSpec, TensorField
from curvclass.equality import consistent_assignment, eval_numeric
from curvclass.expr import ZERO
from curvclass.linalg import ExprMatrix


# A fixed positive polynomial instantiation for opaque functions:
# f(t) = 2 + t + 3 t^2 (positive for t > 0, exact derivatives).
def poly_fn(order: int, t: float) -> float:
    if order == 0:
        return 2.0 + t + 3.0 * t * t
    if order == 1:
        return 1.0 + 6.0 * t
    if order == 2:
        return 6.0
    return 0.0


FN_TABLE = {"f": poly_fn}


def eval_expr_at(e: Expr, point: dict) -> float:
    if e.is_zero():
        return 0.0
    return eval_numeric(e, consistent_assignment(e.atoms(), point, FN_TABLE))


def random_admissible_points(m: MetricSpec, count: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    points = []
    for _ in range(count):
        point = {}
        for coord in m.coords:
            lo, hi = 0.6, 1.7
            value = rng.uniform(lo, hi)
            for a in m.assumptions:
                if a.name == coord and a.kind == "negative":
                    value = -value
                elif a.name == coord and a.kind == "interval":
                    value = rng.uniform(float(a.low), float(a.high))
            point[coord] = value
        points.append(point)
    return points


# ---------------------------------------------------------------------------
# finite-difference curvature pipeline
# ---------------------------------------------------------------------------


def metric_matrix_at(m: MetricSpec, x: list[float]) -> np.ndarray:
    n = m.dim
    point = dict(zip(m.coords, x))
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = eval_expr_at(m.g[i, j], point)
    return out


def fd_christoffel(m: MetricSpec, x: list[float], h: float = 1e-5) -> np.ndarray:
    n = m.dim
    ginv = np.linalg.inv(metric_matrix_at(m, x))
    dg = np.zeros((n, n, n))
    for l in range(n):
        xp, xm = list(x), list(x)
        xp[l] += h
        xm[l] -= h
        dg[:, :, l] = (metric_matrix_at(m, xp) - metric_matrix_at(m, xm)) / (2 * h)
    gamma = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = 0.5 * sum(
                    ginv[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l])
                    for l in range(n)
                )
    return gamma


def fd_riemann(m: MetricSpec, x: list[float], h: float = 1e-3) -> np.ndarray:
    n = m.dim
    gamma = fd_christoffel(m, x)
    dgamma = np.zeros((n, n, n, n))
    for l in range(n):
        xp, xm = list(x), list(x)
        xp[l] += h
        xm[l] -= h
        dgamma[:, :, :, l] = (fd_christoffel(m, xp) - fd_christoffel(m, xm)) / (2 * h)
    g = metric_matrix_at(m, x)
    riem = np.zeros((n, n, n, n))
    for hh, i, j, k in itertools.product(range(n), repeat=4):
        acc = 0.0
        for mm in range(n):
            ru = dgamma[mm, i, k, j] - dgamma[mm, i, j, k] + sum(
                gamma[mm, j, l] * gamma[l, i, k] - gamma[mm, k, l] * gamma[l, i, j]
                for l in range(n)
            )
            acc += g[hh, mm] * ru
        riem[hh, i, j, k] = acc
    return riem


def fd_ricci(m: MetricSpec, x: list[float]) -> np.ndarray:
    riem = fd_riemann(m, x)
    ginv = np.linalg.inv(metric_matrix_at(m, x))
    return np.einsum("hk,hijk->ij", ginv, riem)


def tensor_values_at(t: TensorField, m: MetricSpec, x: list[float]) -> np.ndarray:
    point = dict(zip(m.coords, x))
    out = np.zeros([t.dim] * t.rank)
    for idx, e in t.nonzero_items():
        out[idx] = eval_expr_at(e, point)
    return out


# ---------------------------------------------------------------------------
# naive symbolic actions (second code path for H.T and Q(E,T))
# ---------------------------------------------------------------------------


def naive_curvature_action(H: TensorField, T: TensorField, ginv: ExprMatrix) -> TensorField:
    """Dense gather implementation of (H.T) for cross-checking."""
    n = T.dim
    k = T.rank
    endo = [[[[ZERO for _ in range(n)] for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for x, y, j, mm in itertools.product(range(n), repeat=4):
        acc = ZERO
        for s in range(n):
            acc = acc + ginv[mm, s] * H.get((x, y, j, s))
        endo[x][y][j][mm] = acc
    comps = []
    for idx in itertools.product(range(n), repeat=k + 2):
        body, x, y = idx[:k], idx[k], idx[k + 1]
        acc = ZERO
        for slot in range(k):
            for mm in range(n):
                c = endo[x][y][body[slot]][mm]
                if not c.is_zero():
                    acc = acc - c * T.get(body[:slot] + (mm,) + body[slot + 1 :])
        comps.append(acc)
    return TensorField(k + 2, n, comps, verify=False)


def naive_tachibana(E: TensorField, T: TensorField) -> TensorField:
    n = T.dim
    k = T.rank
    comps = []
    for idx in itertools.product(range(n), repeat=k + 2):
        body, x, y = idx[:k], idx[k], idx[k + 1]
        acc = ZERO
        for slot in range(k):
            for mm in range(n):
                # (x wedge_E y)e_slotvalue = E(y, slotvalue) e_x - E(x, slotvalue) e_y
                coeff = ZERO
                if mm == x:
                    coeff = coeff + E.get((y, body[slot]))
                if mm == y:
                    coeff = coeff - E.get((x, body[slot]))
                if not coeff.is_zero():
                    acc = acc - coeff * T.get(body[:slot] + (mm,) + body[slot + 1 :])
        comps.append(acc)
    return TensorField(k + 2, n, comps, verify=False)


def numeric_rank(rows: list[list[Expr]], m: MetricSpec, points: list[dict]) -> int:
    """Max over sample points of the floating rank of the coefficient matrix."""
    best = 0
    for point in points:
        mat = np.array([[eval_expr_at(e, point) for e in row] for row in rows])
        best = max(best, int(np.linalg.matrix_rank(mat, tol=1e-8)))
    return best


def rational_solve(rows: list[list], rhs: list) -> tuple[str, list | None]:
    """Independent Fraction-only Gaussian elimination for cross-checking
    solve_linear on rational matrices; returns (status, particular|None)."""
    from fractions import Fraction

    m = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(rows, rhs)]
    nrows, ncols = len(m), len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [v / pv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if m[i][ncols]:
            return "inconsistent", None
    sol = [Fraction(0)] * ncols
    for row_i, c in enumerate(pivots):
        sol[c] = m[row_i][ncols]
    status = "unique" if len(pivots) == ncols else "family"
    return status, sol
