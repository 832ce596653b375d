"""Canonical symbolic expressions: exact rational functions over atoms.

An Expr is a pair num/den of polynomials (see poly) kept in canonical form:
gcd(num, den) = 1, exp-generator exponents nonnegative with joint minimum
zero per direction, den integer-primitive with positive leading
coefficient.  Two Exprs denote the same function exactly when they compare
equal, so equality doubles as the exact zero test.

Exprs are immutable and hashable; all operations return new values and are
safe to share across threads.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

from .context import CurvclassError
from .poly import (
    KIND_EXP,
    KIND_FN,
    KIND_SYMBOL,
    ExactDivisionError,
    Poly,
    cancel,
    div_exact,
)


class ExprError(CurvclassError):
    pass


class Expr:
    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly, _canonical: bool = False):
        if not _canonical:
            num, den = cancel(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_rational(q) -> "Expr":
        return Expr(Poly.const(Fraction(q)), Poly.one(), _canonical=True)

    @staticmethod
    def symbol(name: str) -> "Expr":
        return Expr(Poly.symbol(name), Poly.one(), _canonical=True)

    @staticmethod
    def exponential(form: dict) -> "Expr":
        """exp of a rational-coefficient linear form {coord: coeff}."""
        return Expr(Poly.exponential(form), Poly.one())

    @staticmethod
    def opaque(name: str, order: int, arg: str) -> "Expr":
        return Expr(Poly.fn(name, order, arg), Poly.one(), _canonical=True)

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_rational(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ExprError("expression is not a rational constant")
        return self.num.const_value() / self.den.const_value()

    @property
    def term_count(self) -> int:
        """Structural size: total number of monomials in num and den."""
        return len(self.num) + len(self.den)

    def atoms(self) -> set:
        return self.num.atoms() | self.den.atoms()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expr):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "Expr") -> "Expr":
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den.is_one() and other.den.is_one():
            return Expr(self.num + other.num, _ONE_POLY, _canonical=True)
        if self.den == other.den:
            return Expr(self.num + other.num, self.den)
        return Expr(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "Expr":
        return Expr(-self.num, self.den, _canonical=True)

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def __mul__(self, other: "Expr") -> "Expr":
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den.is_one() and other.den.is_one():
            num = self.num * other.num
            # products of canonical polynomials stay canonical over den 1
            return Expr(num, _ONE_POLY, _canonical=True)
        return Expr(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "Expr") -> "Expr":
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero expression")
        if self.num.is_zero():
            return ZERO
        if self.den.is_one() and other.den.is_one() and not other.num.is_const():
            # exact-quotient fast path: fraction-free elimination divides by
            # known factors, so this avoids the gcd machinery entirely
            try:
                q = div_exact(self.num, other.num)
            except ExactDivisionError:
                pass
            else:
                return Expr(q, _ONE_POLY, _canonical=True)
        return Expr(self.num * other.den, self.den * other.num)

    def __pow__(self, k: int) -> "Expr":
        if not isinstance(k, int):
            raise ExprError("only integer powers are supported")
        if k == 0:
            return ONE
        if k < 0:
            if self.num.is_zero():
                raise ZeroDivisionError("negative power of zero")
            return Expr(self.den.pow_int(-k), self.num.pow_int(-k))
        return Expr(self.num.pow_int(k), self.den.pow_int(k))

    def scale(self, q) -> "Expr":
        q = Fraction(q)
        if not q:
            return ZERO
        return Expr(self.num.scale(q), self.den)

    # -- calculus -----------------------------------------------------------

    def differentiate(self, coord: str) -> "Expr":
        """Exact partial derivative with respect to a declared coordinate."""
        dn = self.num.derivative(coord)
        if self.den.is_one():
            return Expr(dn, _ONE_POLY, _canonical=True)
        dd = self.den.derivative(coord)
        if dd.is_zero():
            return Expr(dn, self.den)
        return Expr(dn * self.den - self.num * dd, self.den * self.den)

    # -- printing ------------------------------------------------------------

    def __str__(self) -> str:
        return expr_to_str(self)

    def __repr__(self) -> str:
        return f"Expr({expr_to_str(self)})"


_ONE_POLY = Poly.one()
ZERO = Expr(Poly.zero(), _ONE_POLY, _canonical=True)
ONE = Expr(_ONE_POLY, _ONE_POLY, _canonical=True)


def differentiate(e: Expr, coord: str) -> Expr:
    return e.differentiate(coord)


# ---------------------------------------------------------------------------
# printing (grammar-conformant; parse(print(e)) reproduces e exactly)
# ---------------------------------------------------------------------------


def _frac_str(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _form_str(pairs) -> str:
    """Linear form of an exp argument, coordinates in atom order."""
    parts = []
    for coord, q in pairs:
        if q == 1:
            s = coord
        else:
            s = f"{_frac_str(q)}*{coord}"
        if parts and not s.startswith("-"):
            parts.append("+" + s)
        else:
            parts.append(s)
    return "".join(parts)


def _mono_factors(mono) -> list[str]:
    factors = []
    exp_pairs = []
    exp_done = False
    for atom, e in mono:
        kind = atom[0]
        if kind == KIND_EXP:
            exp_pairs.append((atom[1], Fraction(e)))
            continue
        if exp_pairs and not exp_done:
            factors.append(f"exp({_form_str(exp_pairs)})")
            exp_done = True
        if kind == KIND_SYMBOL:
            base = atom[1]
        elif kind == KIND_FN:
            primes = "'" * atom[2]
            base = f"{atom[1]}{primes}({atom[3]})"
        else:  # pragma: no cover
            raise AssertionError(atom)
        factors.append(base if e == 1 else f"{base}^{e}")
    if exp_pairs and not exp_done:
        factors.append(f"exp({_form_str(exp_pairs)})")
    return factors


def _poly_str(p: Poly) -> str:
    """Ascending graded-lex term order, exact coefficients inline."""
    if p.is_zero():
        return "0"
    parts = []
    for mono, coeff in p.sorted_terms():
        factors = _mono_factors(mono)
        if not factors:
            term = _frac_str(coeff)
        elif coeff == 1:
            term = "*".join(factors)
        elif coeff == -1:
            # "-x^2" would re-parse as (-x)^2; spell the coefficient out then
            if "^" in factors[0]:
                term = "-1*" + "*".join(factors)
            else:
                term = "-" + "*".join(factors)
        else:
            term = _frac_str(coeff) + "*" + "*".join(factors)
        if parts and not term.startswith("-"):
            parts.append("+" + term)
        else:
            parts.append(term)
    return "".join(parts)


def _is_atomic_factor(p: Poly) -> bool:
    """True when p prints as a single juxtaposable factor (one term, unit
    coefficient, at most one atom without a caret, or a bare constant)."""
    if len(p) != 1:
        return p.is_zero()
    (mono, coeff), = p.terms.items()
    if not mono:
        return True
    if coeff != 1:
        return False
    factors = _mono_factors(mono)
    return len(factors) == 1 and "^" not in factors[0]


def _coeff_denominator_lcm(p: Poly) -> int:
    d = 1
    for c in p.terms.values():
        d = d * c.denominator // _int_gcd(d, c.denominator)
    return d


def expr_to_str(e: Expr) -> str:
    num, den = e.num, e.den
    if den.is_one():
        if len(num) <= 1:
            return _poly_str(num)
        d = _coeff_denominator_lcm(num)
        if d == 1:
            return _poly_str(num)
        return f"({_poly_str(num.scale(d))})/{d}"
    d = _coeff_denominator_lcm(num)
    num_s = _poly_str(num.scale(d))
    if len(num) > 1:
        num_s = f"({num_s})"
    den_scaled = den.scale(d)
    den_s = _poly_str(den_scaled)
    if not _is_atomic_factor(den_scaled):
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"
