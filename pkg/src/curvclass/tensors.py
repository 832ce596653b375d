"""Tensor calculus: from a coordinate metric to every derived curvature tensor.

Sign conventions (fixed once, everything downstream inherits them):

    Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    R_hijk     = g_hm [ d_j Gamma^m_ik - d_k Gamma^m_ij
                        + Gamma^m_jl Gamma^l_ik - Gamma^m_kl Gamma^l_ij ]
    S_ij       = g^{hk} R_hijk ,   r = g^{ij} S_ij

Covariant derivatives append the derivative slot last:
T_{i1..ik,l} = d_l T - sum_j Gamma^m_{l i_j} T(..m..).

Curvature actions use the endomorphism with the pair (X, Y) in the last
two result slots:

    (H.T)(X1..Xk; X,Y)   = -sum_j T(.., H(X,Y)X_j, ..)
    Q(E,T)(X1..Xk; X,Y)  = -sum_j T(.., (X wedge_E Y)X_j, ..)

with (X wedge_E Y)Z = E(Y,Z)X - E(X,Z)Y and H(X,Y)Z obtained by raising
the last index of H(X,Y,Z,.).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .context import Assumption, Context, CurvclassError
from .equality import consistent_assignment, eval_numeric
from .expr import Expr, ONE, ZERO
from .linalg import DegenerateMatrixError, ExprMatrix, determinant, invert_matrix


class TensorError(CurvclassError):
    pass


# ---------------------------------------------------------------------------
# metric specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricSpec:
    """A coordinate metric: dimension, coordinates, symmetric Expr matrix,
    domain assumptions and opaque-function declarations (via context)."""

    name: str
    dim: int
    coords: tuple[str, ...]
    g: ExprMatrix
    context: Context

    def __post_init__(self):
        if self.dim < 3:
            raise TensorError("metrics of dimension below 3 are not supported")
        if len(self.coords) != self.dim:
            raise TensorError("coordinate count does not match dimension")
        if self.g.rows != self.dim or self.g.cols != self.dim:
            raise TensorError("metric matrix shape does not match dimension")
        if not self.g.is_symmetric():
            raise TensorError("metric matrix is not symmetric")
        if determinant(self.g).is_zero():
            raise TensorError("degenerate metric")

    @property
    def assumptions(self) -> tuple[Assumption, ...]:
        return self.context.assumptions


def metric_from_entries(
    name: str,
    coords: tuple[str, ...],
    entries: dict[tuple[int, int], Expr],
    context: Context,
) -> MetricSpec:
    """Build a MetricSpec from 1-based upper-triangle entries."""
    n = len(coords)
    rows = [[ZERO] * n for _ in range(n)]
    for (i, j), e in entries.items():
        rows[i - 1][j - 1] = e
        rows[j - 1][i - 1] = e
    return MetricSpec(name, n, coords, ExprMatrix(rows), context)


# ---------------------------------------------------------------------------
# tensor fields
# ---------------------------------------------------------------------------


class TensorField:
    """Dense valence-(0,k) tensor of canonical Exprs with declared symmetries.

    Symmetry metadata is declared, never assumed: each tag is verified at
    construction and downstream algorithms still iterate all indices.
    Tags: ("sym", i, j), ("antisym", i, j), ("pairsym", (a, b), (c, d)).
    """

    __slots__ = ("rank", "dim", "comps", "symmetries")

    def __init__(self, rank: int, dim: int, comps: list[Expr], symmetries=(), verify: bool = True):
        if len(comps) != dim**rank:
            raise TensorError("component count does not match valence")
        self.rank = rank
        self.dim = dim
        self.comps = comps
        self.symmetries = tuple(symmetries)
        if verify:
            self._verify_symmetries()

    # -- indexing -------------------------------------------------------

    def flat(self, idx: tuple[int, ...]) -> int:
        f = 0
        for i in idx:
            f = f * self.dim + i
        return f

    def get(self, idx: tuple[int, ...]) -> Expr:
        return self.comps[self.flat(idx)]

    def indices(self):
        return itertools.product(range(self.dim), repeat=self.rank)

    def nonzero_items(self):
        dim, rank = self.dim, self.rank
        for f, e in enumerate(self.comps):
            if not e.is_zero():
                idx = []
                v = f
                for _ in range(rank):
                    idx.append(v % dim)
                    v //= dim
                yield tuple(reversed(idx)), e

    def is_zero_tensor(self) -> bool:
        return all(e.is_zero() for e in self.comps)

    def first_nonzero(self):
        for idx, e in self.nonzero_items():
            return idx, e
        return None

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "TensorField") -> "TensorField":
        self._check_shape(other)
        comps = [a + b for a, b in zip(self.comps, other.comps)]
        return TensorField(self.rank, self.dim, comps, verify=False)

    def __sub__(self, other: "TensorField") -> "TensorField":
        self._check_shape(other)
        comps = [a - b for a, b in zip(self.comps, other.comps)]
        return TensorField(self.rank, self.dim, comps, verify=False)

    def scale(self, factor: Expr) -> "TensorField":
        if factor.is_zero():
            return TensorField(self.rank, self.dim, [ZERO] * len(self.comps), verify=False)
        comps = [factor * e if not e.is_zero() else ZERO for e in self.comps]
        return TensorField(self.rank, self.dim, comps, self.symmetries, verify=False)

    def with_symmetries(self, symmetries) -> "TensorField":
        return TensorField(self.rank, self.dim, self.comps, symmetries)

    def _check_shape(self, other: "TensorField"):
        if self.rank != other.rank or self.dim != other.dim:
            raise TensorError("tensor shape mismatch")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TensorField)
            and self.rank == other.rank
            and self.dim == other.dim
            and self.comps == other.comps
        )

    def __hash__(self):
        return hash((self.rank, self.dim, tuple(self.comps)))

    # -- verification ------------------------------------------------------

    def _verify_symmetries(self):
        for tag in self.symmetries:
            kind = tag[0]
            for idx, e in self.nonzero_items():
                if kind == "sym":
                    _, i, j = tag
                    other = _swap(idx, i, j)
                    if self.get(other) != e:
                        raise TensorError(f"declared symmetry {tag} fails at {idx}")
                elif kind == "antisym":
                    _, i, j = tag
                    other = _swap(idx, i, j)
                    if self.get(other) != -e:
                        raise TensorError(f"declared antisymmetry {tag} fails at {idx}")
                elif kind == "pairsym":
                    _, (a, b), (c, d) = tag
                    other = list(idx)
                    other[a], other[b], other[c], other[d] = idx[c], idx[d], idx[a], idx[b]
                    if self.get(tuple(other)) != e:
                        raise TensorError(f"declared pair symmetry fails at {idx}")
                else:
                    raise TensorError(f"unknown symmetry tag {tag!r}")

    # -- output -----------------------------------------------------------

    def dump_lines(self, label: str) -> list[str]:
        """One line per structurally nonzero component, 1-based indices."""
        lines = []
        for idx, e in sorted(self.nonzero_items()):
            pos = ",".join(str(i + 1) for i in idx)
            lines.append(f"{label}[{pos}] = {e}")
        return lines


def _swap(idx: tuple, i: int, j: int) -> tuple:
    lst = list(idx)
    lst[i], lst[j] = lst[j], lst[i]
    return tuple(lst)


RIEMANN_SYMMETRIES = (
    ("antisym", 0, 1),
    ("antisym", 2, 3),
    ("pairsym", (0, 1), (2, 3)),
)


def tensor_from_function(rank: int, dim: int, fn, symmetries=(), verify=True) -> TensorField:
    comps = [None] * dim**rank
    t = TensorField(rank, dim, [ZERO] * dim**rank, verify=False)
    for idx in itertools.product(range(dim), repeat=rank):
        comps[t.flat(idx)] = fn(*idx)
    return TensorField(rank, dim, comps, symmetries, verify=verify)


def metric_tensor(m: MetricSpec) -> TensorField:
    comps = [m.g[i, j] for i in range(m.dim) for j in range(m.dim)]
    return TensorField(2, m.dim, comps, (("sym", 0, 1),))


# ---------------------------------------------------------------------------
# Christoffel symbols
# ---------------------------------------------------------------------------


class ChristoffelSymbols:
    """Levi-Civita connection coefficients Gamma^k_ij, symmetric in (i, j)."""

    __slots__ = ("dim", "gamma", "_nonzero")

    def __init__(self, dim: int, gamma: list[list[list[Expr]]]):
        self.dim = dim
        self.gamma = gamma
        self._nonzero = [
            (k, i, j, gamma[k][i][j])
            for k in range(dim)
            for i in range(dim)
            for j in range(dim)
            if not gamma[k][i][j].is_zero()
        ]

    def get(self, k: int, i: int, j: int) -> Expr:
        return self.gamma[k][i][j]

    def nonzero_items(self):
        return self._nonzero

    def dump_lines(self, label: str = "Gamma") -> list[str]:
        lines = []
        for k in range(self.dim):
            for i in range(self.dim):
                for j in range(self.dim):
                    e = self.gamma[k][i][j]
                    if not e.is_zero():
                        lines.append(f"{label}[{k + 1},{i + 1},{j + 1}] = {e}")
        return lines


def christoffel(m: MetricSpec, ginv: ExprMatrix | None = None) -> ChristoffelSymbols:
    """Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).

    Torsion freedom is built in; metric compatibility (nabla g = 0) is
    verified exactly before returning.
    """
    n = m.dim
    if ginv is None:
        ginv = invert_matrix(m.g, symmetric=True)
    dg = [
        [[m.g[i, j].differentiate(m.coords[l]) for l in range(n)] for j in range(n)]
        for i in range(n)
    ]
    half = Expr.from_rational(Fraction(1, 2))
    gamma = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = ZERO
                for l in range(n):
                    gkl = ginv[k, l]
                    if gkl.is_zero():
                        continue
                    term = dg[j][l][i] + dg[i][l][j] - dg[i][j][l]
                    if not term.is_zero():
                        acc = acc + gkl * term
                acc = half * acc
                gamma[k][i][j] = acc
                gamma[k][j][i] = acc
    sym = ChristoffelSymbols(n, gamma)
    nabla_g = covariant_derivative(metric_tensor(m), sym, m.coords)
    if not nabla_g.is_zero_tensor():
        raise TensorError("metric compatibility check failed")
    return sym


# ---------------------------------------------------------------------------
# curvature tensors
# ---------------------------------------------------------------------------


def riemann(m: MetricSpec, gamma: ChristoffelSymbols | None = None) -> TensorField:
    """(0,4) Riemann-Christoffel tensor with the convention reproducing the
    component tables of the reference metric family (R_1313 = -e^{x1+x3}/2
    for the primary example)."""
    n = m.dim
    if gamma is None:
        gamma = christoffel(m)
    nz = gamma.nonzero_items()
    # d_l Gamma^m_ik, stored sparsely
    dgamma: dict[tuple[int, int, int, int], Expr] = {}
    for k, i, j, e in nz:
        for l in range(n):
            d = e.differentiate(m.coords[l])
            if not d.is_zero():
                dgamma[(k, i, j, l)] = d
    # Gamma^m_{jl} Gamma^l_{ik} contraction, sparsely
    by_upper: dict[int, list[tuple[int, int, Expr]]] = {}
    for k, i, j, e in nz:
        by_upper.setdefault(k, []).append((i, j, e))
    gg: dict[tuple[int, int, int, int], Expr] = {}
    for mm, entries_m in by_upper.items():
        for j, l, e1 in entries_m:
            for i, k2, e2 in by_upper.get(l, []):
                key = (mm, j, i, k2)
                prod = e1 * e2
                gg[key] = gg.get(key, ZERO) + prod

    def r_upper(mm, i, j, k):
        term = dgamma.get((mm, i, k, j), ZERO) - dgamma.get((mm, i, j, k), ZERO)
        t1 = gg.get((mm, j, i, k))
        if t1 is not None:
            term = term + t1
        t2 = gg.get((mm, k, i, j))
        if t2 is not None:
            term = term - t2
        return term

    comps = [ZERO] * n**4
    t = TensorField(4, n, comps, verify=False)
    for h in range(n):
        g_row = [m.g[h, mm] for mm in range(n)]
        for i in range(n):
            for j in range(n):
                for k in range(j + 1, n):
                    acc = ZERO
                    for mm in range(n):
                        if g_row[mm].is_zero():
                            continue
                        ru = r_upper(mm, i, j, k)
                        if not ru.is_zero():
                            acc = acc + g_row[mm] * ru
                    comps[t.flat((h, i, j, k))] = acc
                    comps[t.flat((h, i, k, j))] = -acc
    return TensorField(4, n, comps, RIEMANN_SYMMETRIES)


def ricci(m: MetricSpec, R: TensorField, ginv: ExprMatrix) -> TensorField:
    """S_ij = g^{hk} R_hijk."""
    n = m.dim
    comps = [ZERO] * n**2
    t = TensorField(2, n, comps, verify=False)
    for (h, i, j, k), e in R.nonzero_items():
        ghk = ginv[h, k]
        if not ghk.is_zero():
            f = t.flat((i, j))
            comps[f] = comps[f] + ghk * e
    return TensorField(2, n, comps, (("sym", 0, 1),))


def scalar_curvature(m: MetricSpec, S: TensorField, ginv: ExprMatrix) -> Expr:
    """r = g^{ij} S_ij."""
    acc = ZERO
    for (i, j), e in S.nonzero_items():
        gij = ginv[i, j]
        if not gij.is_zero():
            acc = acc + gij * e
    return acc


def covariant_derivative(T: TensorField, gamma: ChristoffelSymbols, coords) -> TensorField:
    """(0,k) -> (0,k+1); the derivative direction is the last index slot."""
    n = T.dim
    k = T.rank
    comps = [ZERO] * n ** (k + 1)
    out = TensorField(k + 1, n, comps, verify=False)
    for idx, v in T.nonzero_items():
        for l in range(n):
            d = v.differentiate(coords[l])
            if not d.is_zero():
                f = out.flat(idx + (l,))
                comps[f] = comps[f] + d
    for mm, s, l, ge in _gamma_lower_items(gamma):
        # contributes -Gamma^m_{ls} T(..m..) wherever slot value is m
        for idx, v in T.nonzero_items():
            prod = None
            for slot in range(k):
                if idx[slot] == mm:
                    if prod is None:
                        prod = ge * v
                    tgt = idx[:slot] + (s,) + idx[slot + 1 :] + (l,)
                    f = out.flat(tgt)
                    comps[f] = comps[f] - prod
    symmetries = T.symmetries
    return TensorField(k + 1, n, comps, symmetries)


def _gamma_lower_items(gamma: ChristoffelSymbols):
    for k, i, j, e in gamma.nonzero_items():
        yield (k, i, j, e)


def kulkarni_nomizu(J: TensorField, F: TensorField) -> TensorField:
    """(J wedge F)(X1,X2,X3,X4) = J14 F23 + J23 F14 - J13 F24 - J24 F13."""
    for T in (J, F):
        if T.rank != 2:
            raise TensorError("Kulkarni-Nomizu factors must be (0,2) tensors")
        if not all(
            T.get((i, j)) == T.get((j, i)) for i in range(T.dim) for j in range(i + 1, T.dim)
        ):
            raise TensorError("Kulkarni-Nomizu factors must be symmetric")
    n = J.dim

    def entry(a, b, c, d):
        return (
            J.get((a, d)) * F.get((b, c))
            + J.get((b, c)) * F.get((a, d))
            - J.get((a, c)) * F.get((b, d))
            - J.get((b, d)) * F.get((a, c))
        )

    comps = [ZERO] * n**4
    t = TensorField(4, n, comps, verify=False)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(n):
                for d in range(c + 1, n):
                    e = entry(a, b, c, d)
                    comps[t.flat((a, b, c, d))] = e
                    comps[t.flat((b, a, c, d))] = -e
                    comps[t.flat((a, b, d, c))] = -e
                    comps[t.flat((b, a, d, c))] = e
    return TensorField(4, n, comps, RIEMANN_SYMMETRIES)


DERIVED_KINDS = ("conformal", "projective", "concircular", "conharmonic")


def derived_tensor(
    m: MetricSpec,
    kind: str,
    R: TensorField,
    S: TensorField,
    r: Expr,
    g2: TensorField,
    gwg: TensorField,
    gwS: TensorField,
) -> TensorField:
    """Conformal C, projective P, concircular W, conharmonic K tensors.

    C and K require dim >= 4.  P carries only the antisymmetry of its
    first index pair; the others have full Riemann-type symmetries.
    """
    n = m.dim
    if kind in ("conformal", "conharmonic") and n < 4:
        raise TensorError(f"{kind} tensor undefined for dimension {n}")
    if kind == "projective":
        c = Expr.from_rational(Fraction(1, n - 1))

        def entry(a, b, cc, d):
            return R.get((a, b, cc, d)) - c * (
                g2.get((a, d)) * S.get((b, cc)) - g2.get((b, d)) * S.get((a, cc))
            )

        comps = [ZERO] * n**4
        t = TensorField(4, n, comps, verify=False)
        for a in range(n):
            for b in range(a + 1, n):
                for cc in range(n):
                    for d in range(n):
                        e = entry(a, b, cc, d)
                        comps[t.flat((a, b, cc, d))] = e
                        comps[t.flat((b, a, cc, d))] = -e
        return TensorField(4, n, comps, (("antisym", 0, 1),))
    if kind == "conformal":
        out = R - gwS.scale(Expr.from_rational(Fraction(1, n - 2)))
        if not r.is_zero():
            out = out + gwg.scale(r.scale(Fraction(1, 2 * (n - 2) * (n - 1))))
        return TensorField(4, n, out.comps, RIEMANN_SYMMETRIES)
    if kind == "concircular":
        out = R
        if not r.is_zero():
            out = out - gwg.scale(r.scale(Fraction(1, 2 * n * (n - 1))))
        return TensorField(4, n, out.comps, RIEMANN_SYMMETRIES)
    if kind == "conharmonic":
        out = R - gwS.scale(Expr.from_rational(Fraction(1, n - 2)))
        return TensorField(4, n, out.comps, RIEMANN_SYMMETRIES)
    raise TensorError(f"unknown derived tensor kind {kind!r}")


# ---------------------------------------------------------------------------
# curvature actions
# ---------------------------------------------------------------------------


def _raise_last_index(H: TensorField, ginv: ExprMatrix) -> dict:
    """Endomorphism table: m -> list of (x, y, j, coeff) with
    coeff = g^{ms} H_{xyjs}, i.e. [H(X,Y)X_j]^m."""
    n = H.dim
    table: dict[int, list[tuple[int, int, int, Expr]]] = {}
    acc: dict[tuple[int, int, int, int], Expr] = {}
    for (x, y, j, s), e in H.nonzero_items():
        for mm in range(n):
            gms = ginv[mm, s]
            if gms.is_zero():
                continue
            key = (mm, x, y, j)
            prev = acc.get(key)
            acc[key] = gms * e if prev is None else prev + gms * e
    for (mm, x, y, j), e in acc.items():
        if not e.is_zero():
            table.setdefault(mm, []).append((x, y, j, e))
    return table


def curvature_action(H: TensorField, T: TensorField, m: MetricSpec, ginv: ExprMatrix) -> TensorField:
    """(H.T)(X1..Xk; X,Y) = -sum_j T(.., H(X,Y)X_j, ..)."""
    if H.rank != 4:
        raise TensorError("curvature action needs a (0,4) tensor")
    n = T.dim
    k = T.rank
    endo = _raise_last_index(H, ginv)
    comps = [ZERO] * n ** (k + 2)
    out = TensorField(k + 2, n, comps, verify=False)
    for idx, v in T.nonzero_items():
        for slot in range(k):
            for x, y, j, coeff in endo.get(idx[slot], ()):
                tgt = idx[:slot] + (j,) + idx[slot + 1 :] + (x, y)
                f = out.flat(tgt)
                comps[f] = comps[f] - coeff * v
    # (X,Y)-antisymmetry of the result is a property of geometric inputs
    # (antisymmetric first pair of H), not of the operation; nothing is
    # declared here
    return TensorField(k + 2, n, comps)


def tachibana(E: TensorField, T: TensorField, m: MetricSpec) -> TensorField:
    """Q(E,T)(X1..Xk; X,Y) = -sum_j T(.., (X wedge_E Y)X_j, ..)."""
    if E.rank != 2:
        raise TensorError("Tachibana operator needs a symmetric (0,2) tensor")
    if not all(E.get((i, j)) == E.get((j, i)) for i in range(E.dim) for j in range(i + 1, E.dim)):
        raise TensorError("Tachibana operator needs a symmetric (0,2) tensor")
    n = T.dim
    k = T.rank
    comps = [ZERO] * n ** (k + 2)
    out = TensorField(k + 2, n, comps, verify=False)
    e_items = list(E.nonzero_items())
    for idx, v in T.nonzero_items():
        for slot in range(k):
            mm = idx[slot]
            # (X wedge_E Y)X_j = E(Y, X_j) X - E(X, X_j) Y ; T slot holds m.
            for (y, j), ee in e_items:
                prod = ee * v
                # term E(Y, X_j) X with X = e_m: result (.., j, .., x=m, y)
                tgt = idx[:slot] + (j,) + idx[slot + 1 :] + (mm, y)
                f = out.flat(tgt)
                comps[f] = comps[f] - prod
                # term -E(X, X_j) Y with Y = e_m: result (.., j, .., x, y=m)
                tgt = idx[:slot] + (j,) + idx[slot + 1 :] + (y, mm)
                f = out.flat(tgt)
                comps[f] = comps[f] + prod
    return TensorField(k + 2, n, comps, (("antisym", k, k + 1),))


# ---------------------------------------------------------------------------
# numeric signature
# ---------------------------------------------------------------------------


def default_opaque_values(m: MetricSpec):
    """Deterministic instantiation f(t) = 1 + t^2 for signature sampling;
    positive wherever declared positive, smooth, with exact derivatives."""
    table = {}
    for name in m.context.opaque:
        def fval(order, t, _n=name):
            if order == 0:
                return 1.0 + t * t
            if order == 1:
                return 2.0 * t
            if order == 2:
                return 2.0
            return 0.0
        table[name] = fval
    return table


def signature_at(m: MetricSpec, point: dict[str, float]) -> tuple[int, int]:
    """Inertia (positive count, negative count) of g at a numeric point."""
    import numpy as np

    for coord in m.coords:
        if coord not in point:
            raise TensorError(f"point is missing coordinate {coord!r}")
    fn_values = default_opaque_values(m)
    rows = []
    for i in range(m.dim):
        row = []
        for j in range(m.dim):
            e = m.g[i, j]
            if e.is_zero():
                row.append(0.0)
            else:
                assignment = consistent_assignment(e.atoms(), point, fn_values)
                row.append(eval_numeric(e, assignment))
        rows.append(row)
    mat = np.array(rows, dtype=float)
    eigs = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    scale = max(1.0, float(np.max(np.abs(eigs))))
    if any(abs(ev) < 1e-9 * scale for ev in eigs):
        raise DegenerateMatrixError("metric degenerate at the sample point")
    pos = int(sum(1 for ev in eigs if ev > 0))
    neg = int(sum(1 for ev in eigs if ev < 0))
    return pos, neg


def admissible_point(m: MetricSpec) -> dict[str, float]:
    """A deterministic coordinate point satisfying every assumption."""
    point = {}
    for coord in m.coords:
        value = 1.0
        for a in m.assumptions:
            if a.name != coord:
                continue
            if a.kind == "negative":
                value = -1.0
            elif a.kind == "interval":
                value = (float(a.low) + float(a.high)) / 2.0
        point[coord] = value
    return point


# ---------------------------------------------------------------------------
# cached geometry workspace
# ---------------------------------------------------------------------------


class Geometry:
    """Per-metric cache: every tensor is computed once and shared read-only.

    Tensor names understood by `tensor_by_name` (for dumps and detectors):
    metric, riemann, ricci, conformal, projective, concircular,
    conharmonic, gwg (g wedge g), gws (g wedge S), sws (S wedge S), plus
    nabla-<name> for covariant derivatives (repeatable) and the curvature
    action / Tachibana shorthands rr, rs, cc, pp, qgr, qgs, qgc, qgp, qsr,
    qsc, qsp.
    """

    def __init__(self, m: MetricSpec):
        self.metric = m
        self._cache: dict[str, TensorField] = {}
        self._actions: dict[tuple[str, str], TensorField] = {}
        self._tachibanas: dict[tuple[str, str], TensorField] = {}
        self._ginv: ExprMatrix | None = None
        self._det: Expr | None = None
        self._gamma: ChristoffelSymbols | None = None
        self._r: Expr | None = None

    # -- base quantities ---------------------------------------------------

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def coords(self):
        return self.metric.coords

    @property
    def det(self) -> Expr:
        if self._det is None:
            self._det = determinant(self.metric.g)
        return self._det

    @property
    def ginv(self) -> ExprMatrix:
        if self._ginv is None:
            self._ginv = invert_matrix(self.metric.g, symmetric=True)
        return self._ginv

    @property
    def gamma(self) -> ChristoffelSymbols:
        if self._gamma is None:
            self._gamma = christoffel(self.metric, self.ginv)
        return self._gamma

    @property
    def scalar(self) -> Expr:
        if self._r is None:
            self._r = scalar_curvature(self.metric, self.tensor("ricci"), self.ginv)
        return self._r

    # -- named tensors -------------------------------------------------------

    def tensor(self, name: str) -> TensorField:
        t = self._cache.get(name)
        if t is None:
            t = self._build(name)
            self._cache[name] = t
        return t

    def _build(self, name: str) -> TensorField:
        m = self.metric
        if name.startswith("nabla-"):
            base = self.tensor(name[len("nabla-") :])
            return covariant_derivative(base, self.gamma, m.coords)
        if name == "metric":
            return metric_tensor(m)
        if name == "riemann":
            return riemann(m, self.gamma)
        if name == "ricci":
            return ricci(m, self.tensor("riemann"), self.ginv)
        if name == "gwg":
            g2 = self.tensor("metric")
            return kulkarni_nomizu(g2, g2)
        if name == "gws":
            return kulkarni_nomizu(self.tensor("metric"), self.tensor("ricci"))
        if name == "sws":
            S = self.tensor("ricci")
            return kulkarni_nomizu(S, S)
        if name in DERIVED_KINDS:
            return derived_tensor(
                m,
                name,
                self.tensor("riemann"),
                self.tensor("ricci"),
                self.scalar,
                self.tensor("metric"),
                self.tensor("gwg"),
                self.tensor("gws"),
            )
        raise TensorError(f"unknown tensor {name!r}")

    def action(self, h_name: str, t_name: str) -> TensorField:
        key = (h_name, t_name)
        t = self._actions.get(key)
        if t is None:
            t = curvature_action(self.tensor(h_name), self.tensor(t_name), self.metric, self.ginv)
            self._actions[key] = t
        return t

    def tachibana_of(self, e_name: str, t_name: str) -> TensorField:
        key = (e_name, t_name)
        t = self._tachibanas.get(key)
        if t is None:
            t = tachibana(self.tensor(e_name), self.tensor(t_name), self.metric)
            self._tachibanas[key] = t
        return t

    def nabla(self, name: str) -> TensorField:
        return self.tensor("nabla-" + name)

    # -- CLI-facing resolution -----------------------------------------------

    _SHORTHAND = {
        "rr": ("action", "riemann", "riemann"),
        "rs": ("action", "riemann", "ricci"),
        "cc": ("action", "conformal", "conformal"),
        "pp": ("action", "projective", "projective"),
        "qgr": ("tachibana", "metric", "riemann"),
        "qgs": ("tachibana", "metric", "ricci"),
        "qgc": ("tachibana", "metric", "conformal"),
        "qgp": ("tachibana", "metric", "projective"),
        "qsr": ("tachibana", "ricci", "riemann"),
        "qsc": ("tachibana", "ricci", "conformal"),
        "qsp": ("tachibana", "ricci", "projective"),
    }

    TENSOR_LABELS = {
        "metric": "g",
        "riemann": "R",
        "ricci": "S",
        "conformal": "C",
        "projective": "P",
        "concircular": "W",
        "conharmonic": "K",
        "gwg": "GWG",
        "gws": "GWS",
        "sws": "SWS",
        "rr": "RR",
        "rs": "RS",
        "cc": "CC",
        "pp": "PP",
        "qgr": "QGR",
        "qgs": "QGS",
        "qgc": "QGC",
        "qgp": "QGP",
        "qsr": "QSR",
        "qsc": "QSC",
        "qsp": "QSP",
    }

    def tensor_by_name(self, name: str) -> tuple[TensorField, str]:
        """Resolve a dump name to (tensor, component label)."""
        depth = 0
        base = name
        while base.startswith("nabla-"):
            base = base[len("nabla-") :]
            depth += 1
        if base in self._SHORTHAND:
            kind, a, b = self._SHORTHAND[base]
            t = self.action(a, b) if kind == "action" else self.tachibana_of(a, b)
            label = self.TENSOR_LABELS[base]
        elif base in self.TENSOR_LABELS:
            t = self.tensor(base)
            label = self.TENSOR_LABELS[base]
        else:
            raise TensorError(f"unknown tensor {name!r}")
        for _ in range(depth):
            t = covariant_derivative(t, self.gamma, self.coords)
        return t, label
