"""Built-in metric zoo and the line-oriented metric file format.

File format ('#' starts a comment, blank lines ignored):

    metric "<name>"
    dim <integer>
    coords <ident> <ident> ...
    assume <coord> > 0          # or: < 0, != 0, in (a, b)
    opaque <ident>(<coord>) [positive]
    g <i> <j> = <expression>    # 1-based; unspecified entries are 0

Symmetric completion applies: giving g i j also sets g j i; giving both
with different expressions is an error.
"""

from __future__ import annotations

from fractions import Fraction

from .context import Assumption, Context, CurvclassError
from .expr import Expr, ZERO
from .linalg import ExprMatrix
from .parser import ParseError, parse_expr
from .tensors import MetricSpec


class MetricFormatError(CurvclassError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def load_metric_file(text: str) -> MetricSpec:
    name = None
    dim = None
    coords: tuple[str, ...] | None = None
    assumptions: list[Assumption] = []
    opaque: dict[str, str] = {}
    opaque_positive: list[str] = []
    entries: list[tuple[int, int, int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "metric":
            if not (rest.startswith('"') and rest.endswith('"') and len(rest) >= 2):
                raise MetricFormatError('metric name must be quoted: metric "<name>"', lineno)
            name = rest[1:-1]
        elif head == "dim":
            try:
                dim = int(rest)
            except ValueError:
                raise MetricFormatError(f"invalid dimension {rest!r}", lineno) from None
        elif head == "coords":
            coords = tuple(rest.split())
            if not coords:
                raise MetricFormatError("coords line lists no coordinates", lineno)
        elif head == "assume":
            assumptions.append(_parse_assumption(rest, lineno))
        elif head == "opaque":
            fn_name, arg, positive = _parse_opaque(rest, lineno)
            if fn_name in opaque:
                raise MetricFormatError(f"opaque function {fn_name!r} declared twice", lineno)
            opaque[fn_name] = arg
            if positive:
                opaque_positive.append(fn_name)
        elif head == "g":
            try:
                ij, expr_text = rest.split("=", 1)
                i_s, j_s = ij.split()
                entries.append((lineno, int(i_s), int(j_s), expr_text.strip()))
            except ValueError:
                raise MetricFormatError("expected: g <i> <j> = <expression>", lineno) from None
        else:
            raise MetricFormatError(f"unknown directive {head!r}", lineno)

    if name is None:
        raise MetricFormatError("missing metric name")
    if dim is None:
        raise MetricFormatError("missing dim")
    if coords is None:
        raise MetricFormatError("missing coords")
    if len(coords) != dim:
        raise MetricFormatError(f"dim is {dim} but {len(coords)} coordinates are declared")

    for a in assumptions:
        if a.name not in coords and a.name not in opaque:
            raise MetricFormatError(f"assumption on undeclared identifier {a.name!r}")
    for fn_name in opaque_positive:
        assumptions.append(Assumption(fn_name, "positive"))
    ctx = Context(coords=coords, opaque=opaque, assumptions=tuple(assumptions))

    rows = [[ZERO] * dim for _ in range(dim)]
    given: dict[tuple[int, int], Expr] = {}
    for lineno, i, j, expr_text in entries:
        if not (1 <= i <= dim and 1 <= j <= dim):
            raise MetricFormatError(f"index ({i},{j}) outside 1..{dim}", lineno)
        try:
            e = parse_expr(expr_text, ctx)
        except ParseError as exc:
            raise MetricFormatError(str(exc), lineno) from None
        key = (min(i, j), max(i, j))
        if key in given:
            if given[key] != e:
                raise MetricFormatError(
                    f"conflicting symmetric entries for g {key[0]} {key[1]}", lineno)
            continue
        given[key] = e
        rows[i - 1][j - 1] = e
        rows[j - 1][i - 1] = e
    return MetricSpec(name, dim, coords, ExprMatrix(rows), ctx)


def _parse_assumption(rest: str, lineno: int) -> Assumption:
    parts = rest.split(None, 1)
    if len(parts) != 2:
        raise MetricFormatError("expected: assume <coord> <constraint>", lineno)
    name, cond = parts[0], parts[1].replace(" ", "")
    if cond == ">0":
        return Assumption(name, "positive")
    if cond == "<0":
        return Assumption(name, "negative")
    if cond == "!=0":
        return Assumption(name, "nonzero")
    if cond.startswith("in(") and cond.endswith(")"):
        body = cond[3:-1]
        try:
            lo, hi = body.split(",")
            return Assumption(name, "interval", Fraction(lo), Fraction(hi))
        except (ValueError, ZeroDivisionError):
            raise MetricFormatError(f"invalid interval {body!r}", lineno) from None
    raise MetricFormatError(f"unknown constraint {cond!r}", lineno)


def _parse_opaque(rest: str, lineno: int) -> tuple[str, str, bool]:
    positive = False
    if rest.endswith(" positive"):
        positive = True
        rest = rest[: -len(" positive")].strip()
    if not (rest.endswith(")") and "(" in rest):
        raise MetricFormatError("expected: opaque <ident>(<coord>) [positive]", lineno)
    fn_name, arg = rest[:-1].split("(", 1)
    fn_name, arg = fn_name.strip(), arg.strip()
    if not fn_name.isidentifier() or not arg.isidentifier():
        raise MetricFormatError("expected: opaque <ident>(<coord>) [positive]", lineno)
    return fn_name, arg, positive


def render_metric_file(m: MetricSpec) -> str:
    """Canonical file rendering; load(render(m)) reproduces m exactly."""
    lines = [f'metric "{m.name}"', f"dim {m.dim}", "coords " + " ".join(m.coords)]
    opaque_positive = {a.name for a in m.assumptions if a.kind == "positive"}
    for a in m.assumptions:
        if a.name in m.context.opaque:
            continue
        if a.kind == "positive":
            lines.append(f"assume {a.name} > 0")
        elif a.kind == "negative":
            lines.append(f"assume {a.name} < 0")
        elif a.kind == "nonzero":
            lines.append(f"assume {a.name} != 0")
        else:
            lines.append(f"assume {a.name} in ({a.low}, {a.high})")
    for fn_name, arg in m.context.opaque.items():
        suffix = " positive" if fn_name in opaque_positive else ""
        lines.append(f"opaque {fn_name}({arg}){suffix}")
    for i in range(m.dim):
        for j in range(i, m.dim):
            e = m.g[i, j]
            if not e.is_zero():
                lines.append(f"g {i + 1} {j + 1} = {e}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# built-in registry
# ---------------------------------------------------------------------------


def _paper_family_file(name: str, g11: str, g33: str, g44: str) -> str:
    return "\n".join(
        [
            f'metric "{name}"',
            "dim 4",
            "coords x1 x2 x3 x4",
            "assume x1 > 0",
            "assume x2 > 0",
            "assume x3 > 0",
            "assume x4 > 0",
            f"g 1 1 = {g11}",
            "g 1 2 = 1",
            f"g 3 3 = {g33}",
            f"g 4 4 = {g44}",
        ]
    )


def _extension_file(name: str, base: str, dim: int) -> str:
    """Append f(x1) delta_ab dx^a dx^b, a,b = 5..dim, to a 4-dim family metric."""
    coords = " ".join(f"x{i}" for i in range(1, dim + 1))
    lines = [f'metric "{name}"', f"dim {dim}", f"coords {coords}"]
    lines += [f"assume x{i} > 0" for i in range(1, 5)]
    lines.append("opaque f(x1) positive")
    if base == "exponential":
        lines += ["g 1 1 = exp(x1+x3)", "g 1 2 = 1", "g 3 3 = 1", "g 4 4 = f(x1)"]
    else:
        lines += ["g 1 1 = x1*x3", "g 2 2 = x1", "g 1 3 = 1", "g 4 4 = f(x1)"]
    for a in range(5, dim + 1):
        lines.append(f"g {a} {a} = f(x1)")
    return "\n".join(lines)


_BUILTIN_FILES: dict[str, str] = {
    # the primary example and its seven signature variants, in source order
    "paper31": _paper_family_file("paper31", "exp(x1+x3)", "1", "exp(x1)"),
    "sv1": _paper_family_file("sv1", "-exp(x1+x3)", "1", "exp(x1)"),
    "sv2": _paper_family_file("sv2", "exp(x1+x3)", "-1", "-exp(x1)"),
    "sv3": _paper_family_file("sv3", "-exp(x1+x3)", "-1", "-exp(x1)"),
    "sv4": _paper_family_file("sv4", "exp(x1+x3)", "-1", "exp(x1)"),
    "sv5": _paper_family_file("sv5", "-exp(x1+x3)", "-1", "exp(x1)"),
    "sv6": _paper_family_file("sv6", "-exp(x1+x3)", "1", "-exp(x1)"),
    "sv7": _paper_family_file("sv7", "exp(x1+x3)", "1", "-exp(x1)"),
    # the same curvature class with an opaque warping function
    "m312": "\n".join([
        'metric "m312"',
        "dim 4",
        "coords x1 x2 x3 x4",
        "assume x1 > 0", "assume x2 > 0", "assume x3 > 0", "assume x4 > 0",
        "opaque f(x1) positive",
        "g 1 1 = exp(x1+x3)", "g 1 2 = 1", "g 3 3 = 1", "g 4 4 = f(x1)",
    ]),
    "m313": "\n".join([
        'metric "m313"',
        "dim 4",
        "coords x1 x2 x3 x4",
        "assume x1 > 0", "assume x2 > 0", "assume x3 > 0", "assume x4 > 0",
        "opaque f(x1) positive",
        "g 1 1 = x1*x3", "g 2 2 = x1", "g 1 3 = 1", "g 4 4 = f(x1)",
    ]),
    # Kronecker-delta extensions, 5 <= a, b <= n
    "m314_5": _extension_file("m314_5", "exponential", 5),
    "m314_6": _extension_file("m314_6", "exponential", 6),
    "m315_5": _extension_file("m315_5", "polynomial", 5),
    "m315_6": _extension_file("m315_6", "polynomial", 6),
    # controls
    "flat4": "\n".join([
        'metric "flat4"',
        "dim 4",
        "coords x1 x2 x3 x4",
        "g 1 1 = 1", "g 2 2 = 1", "g 3 3 = 1", "g 4 4 = 1",
    ]),
    # constant-curvature hyperbolic-type metric: locally symmetric, R != 0
    "locsym4": "\n".join([
        'metric "locsym4"',
        "dim 4",
        "coords x1 x2 x3 x4",
        "g 1 1 = 1",
        "g 2 2 = exp(2*x1)",
        "g 3 3 = exp(2*x1)",
        "g 4 4 = exp(2*x1)",
    ]),
    # pp-wave with H = e^{x1}(x3^2 + x4^2): curvature is alpha g^(eta x eta)
    # with eta = dx1 parallel, hence recurrent but not symmetric
    "ppwave4": "\n".join([
        'metric "ppwave4"',
        "dim 4",
        "coords x1 x2 x3 x4",
        "g 1 1 = exp(x1)*(x3^2+x4^2)",
        "g 1 2 = 1",
        "g 3 3 = 1",
        "g 4 4 = 1",
    ]),
}

BUILTIN_NAMES = tuple(_BUILTIN_FILES)

_cache: dict[str, MetricSpec] = {}


def builtin_metric(name: str) -> MetricSpec:
    if name not in _BUILTIN_FILES:
        raise CurvclassError(
            f"unknown builtin metric {name!r}; available: {', '.join(BUILTIN_NAMES)}")
    if name not in _cache:
        _cache[name] = load_metric_file(_BUILTIN_FILES[name])
    return _cache[name]
