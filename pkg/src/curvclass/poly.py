"""Exact multivariate polynomial layer underneath the expression engine.

A polynomial is a finite sum of monomials with exact rational coefficients.
Monomials are products of powers of three kinds of atoms:

* symbols        -- coordinates and declared constants, integer exponents;
* exp generators -- one generator per coordinate direction, standing for
  e^{x};   a monomial carries a rational exponent q per direction, so the
  factor e^{q*x} is representable and products merge exponents additively
  (this is exactly the exp(a)*exp(b) = exp(a+b) rule, applied per
  coordinate of the linear form);
* opaque derivatives -- f, f', f'' ... applied to their declared
  coordinate, integer exponents.

Atoms are ordered symbols < exp generators < opaque derivatives, and
monomials are compared in graded lexicographic order.  All arithmetic is
exact (``fractions.Fraction`` coefficients); nothing here ever touches
floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from math import lcm as int_lcm
from typing import Iterable, Iterator

# Atom kind tags; the integer fixes the sort order of the atom classes.
KIND_SYMBOL = 0
KIND_EXP = 1
KIND_FN = 2

#: Atoms are plain tuples so they sort and hash cheaply:
#:   (KIND_SYMBOL, name)              a coordinate or declared constant
#:   (KIND_EXP, coord)                the generator e^{coord}
#:   (KIND_FN, name, order, arg)      the order-th derivative of opaque
#:                                    function `name` applied to `arg`
Atom = tuple

#: A monomial is a tuple of (atom, exponent) pairs sorted by atom.
#: Exponents are nonzero; ints except on KIND_EXP atoms, which may carry
#: Fractions (and, transiently, negative values before canonicalization).
Monomial = tuple

EMPTY_MONO: Monomial = ()

_SENTINEL_ATOM = (KIND_FN + 1,)


def sym_atom(name: str) -> Atom:
    return (KIND_SYMBOL, name)


def exp_atom(coord: str) -> Atom:
    return (KIND_EXP, coord)


def fn_atom(name: str, order: int, arg: str) -> Atom:
    return (KIND_FN, name, order, arg)


def _norm_exp(e):
    """Collapse Fraction exponents with denominator 1 down to int."""
    if isinstance(e, Fraction) and e.denominator == 1:
        return int(e)
    return e


def make_mono(pairs: Iterable[tuple[Atom, object]]) -> Monomial:
    merged: dict[Atom, object] = {}
    for atom, e in pairs:
        e = merged.get(atom, 0) + e
        if e:
            merged[atom] = e
        elif atom in merged:
            del merged[atom]
    return tuple(sorted((a, _norm_exp(e)) for a, e in merged.items()))


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    return make_mono(list(m1) + list(m2))


def mono_deg(m: Monomial):
    d = 0
    for _, e in m:
        d += e
    return d


def mono_cmp(m1: Monomial, m2: Monomial) -> int:
    """Graded lexicographic comparison; earlier atoms with higher powers win."""
    d1, d2 = mono_deg(m1), mono_deg(m2)
    if d1 != d2:
        return 1 if d1 > d2 else -1
    i = j = 0
    while i < len(m1) or j < len(m2):
        a1 = m1[i][0] if i < len(m1) else _SENTINEL_ATOM
        a2 = m2[j][0] if j < len(m2) else _SENTINEL_ATOM
        if a1 == a2:
            e1, e2 = m1[i][1], m2[j][1]
            i += 1
            j += 1
        elif a1 < a2:
            e1, e2 = m1[i][1], 0
            i += 1
        else:
            e1, e2 = 0, m2[j][1]
            j += 1
        if e1 != e2:
            return 1 if e1 > e2 else -1
    return 0


class Poly:
    """Immutable sparse polynomial: dict monomial -> nonzero Fraction."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict):
        self.terms = terms
        self._hash = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return _ZERO

    @staticmethod
    def one() -> "Poly":
        return _ONE

    @staticmethod
    def const(q) -> "Poly":
        q = Fraction(q)
        if not q:
            return _ZERO
        return Poly({EMPTY_MONO: q})

    @staticmethod
    def symbol(name: str) -> "Poly":
        return Poly({((sym_atom(name), 1),): Fraction(1)})

    @staticmethod
    def exponential(form: dict) -> "Poly":
        """e^{sum form[c]*c}; an empty/zero form gives the constant 1."""
        pairs = [(exp_atom(c), Fraction(q)) for c, q in form.items() if q]
        if not pairs:
            return _ONE
        return Poly({make_mono(pairs): Fraction(1)})

    @staticmethod
    def fn(name: str, order: int, arg: str) -> "Poly":
        return Poly({((fn_atom(name, order, arg), 1),): Fraction(1)})

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and EMPTY_MONO in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.terms[EMPTY_MONO]

    def is_one(self) -> bool:
        return self.terms.get(EMPTY_MONO) == 1 and len(self.terms) == 1

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:  # debugging aid only
        return f"Poly({self.terms!r})"

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = c
            else:
                s = s + c
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return Poly(terms)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return _ZERO
        if other.is_one():
            return self
        if self.is_one():
            return other
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = terms.get(m)
                if s is None:
                    terms[m] = c
                else:
                    s = s + c
                    if s:
                        terms[m] = s
                    else:
                        del terms[m]
        return Poly(terms)

    def scale(self, q: Fraction) -> "Poly":
        if not q:
            return _ZERO
        if q == 1:
            return self
        return Poly({m: c * q for m, c in self.terms.items()})

    def mono_shift(self, mono: Monomial) -> "Poly":
        """Multiply by a single monomial (exponents may be negative)."""
        if not mono:
            return self
        return Poly({mono_mul(m, mono): c for m, c in self.terms.items()})

    def pow_int(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power at the polynomial layer")
        result = _ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- structure -----------------------------------------------------

    def atoms(self) -> set:
        out = set()
        for m in self.terms:
            for a, _ in m:
                out.add(a)
        return out

    def leading(self) -> tuple[Monomial, Fraction]:
        best = None
        for m in self.terms:
            if best is None or mono_cmp(m, best) > 0:
                best = m
        return best, self.terms[best]

    def sorted_terms(self, reverse: bool = False) -> list[tuple[Monomial, Fraction]]:
        import functools

        key = functools.cmp_to_key(mono_cmp)
        monos = sorted(self.terms, key=lambda m: key(m), reverse=reverse)
        return [(m, self.terms[m]) for m in monos]

    def degree_in(self, atom: Atom):
        d = 0
        for m in self.terms:
            for a, e in m:
                if a == atom and e > d:
                    d = e
        return d

    def coeff_in(self, atom: Atom, power) -> "Poly":
        """Coefficient of atom**power, as a polynomial without that atom."""
        terms: dict = {}
        for m, c in self.terms.items():
            e = 0
            rest = []
            for a, ee in m:
                if a == atom:
                    e = ee
                else:
                    rest.append((a, ee))
            if e == power:
                terms[tuple(rest)] = c
        return Poly(terms)

    # -- calculus -------------------------------------------------------

    def derivative(self, coord: str) -> "Poly":
        """Exact partial derivative with respect to a coordinate.

        Symbols differentiate to 1 or 0, the exp generator e^{q*coord}
        reproduces itself times q, and opaque atoms step their derivative
        order: d/dx f^(k)(x) = f^(k+1)(x).
        """
        sa = sym_atom(coord)
        ea = exp_atom(coord)
        acc = _ZERO
        for m, c in self.terms.items():
            for idx, (a, e) in enumerate(m):
                rest = m[:idx] + m[idx + 1 :]
                if a == sa:
                    dm = rest if e == 1 else make_mono(list(rest) + [(a, e - 1)])
                    acc = acc + Poly({dm: c * e})
                elif a == ea:
                    acc = acc + Poly({m: c * e})
                elif a[0] == KIND_FN and a[3] == coord:
                    bumped = fn_atom(a[1], a[2] + 1, a[3])
                    pairs = list(rest) + [(bumped, 1)]
                    if e != 1:
                        pairs.append((a, e - 1))
                    acc = acc + Poly({make_mono(pairs): c * e})
        return acc


_ZERO = Poly({})
_ONE = Poly({EMPTY_MONO: Fraction(1)})


# ---------------------------------------------------------------------------
# scalar content and primitivity
# ---------------------------------------------------------------------------


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(int_gcd(a.numerator, b.numerator), int_lcm(a.denominator, b.denominator))


def scalar_content(p: Poly) -> Fraction:
    """Positive rational c such that p/c has coprime integer coefficients."""
    c = Fraction(0)
    for coeff in p.terms.values():
        c = _frac_gcd(c, abs(coeff))
    return c


def primitive_scale(p: Poly) -> Fraction:
    """The factor s with s*p integer-primitive and positive leading coefficient."""
    if p.is_zero():
        return Fraction(1)
    s = 1 / scalar_content(p)
    _, lead = p.leading()
    return -s if lead < 0 else s


def make_primitive(p: Poly) -> Poly:
    return p.scale(primitive_scale(p))


# ---------------------------------------------------------------------------
# exact division and gcd (integer-exponent polynomials only)
# ---------------------------------------------------------------------------


class ExactDivisionError(ArithmeticError):
    pass


def _mono_divide(m1: Monomial, m2: Monomial):
    """m1 / m2, or None when m2 does not divide m1 (any exponent underflow)."""
    out = []
    d2 = dict(m2)
    for a, e in m1:
        e2 = d2.pop(a, 0)
        e = e - e2
        if e < 0:
            return None
        if e:
            out.append((a, _norm_exp(e)))
    if d2:
        return None
    return tuple(out)


def div_exact(a: Poly, b: Poly) -> Poly:
    """Exact polynomial quotient a/b; raises if b does not divide a."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if b.is_const():
        return a.scale(1 / b.const_value())
    quo: dict = {}
    rem = a
    lb, cb = b.leading()
    while not rem.is_zero():
        lr, cr = rem.leading()
        m = _mono_divide(lr, lb)
        if m is None:
            raise ExactDivisionError("inexact polynomial division")
        q = cr / cb
        quo[m] = quo.get(m, Fraction(0)) + q
        rem = rem - Poly({m: q}) * b
    return Poly({m: c for m, c in quo.items() if c})


def _coeff_list(p: Poly, atom: Atom) -> dict:
    """Univariate view of p in `atom`: degree -> coefficient Poly."""
    out: dict = {}
    for m, c in p.terms.items():
        e = 0
        rest = []
        for a, ee in m:
            if a == atom:
                e = ee
            else:
                rest.append((a, ee))
        rest_m = tuple(rest)
        coeff = out.setdefault(e, {})
        coeff[rest_m] = coeff.get(rest_m, Fraction(0)) + c
    return {e: Poly({m: c for m, c in d.items() if c}) for e, d in out.items()}


def _gcd_many(polys: Iterable[Poly]) -> Poly:
    g = _ZERO
    for p in polys:
        g = poly_gcd(g, p)
        if g.is_one():
            return g
    return g


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Primitive gcd of two polynomials with nonnegative integer exponents.

    Primitive PRS: recurse on a main variable, stripping contents at each
    step.  Constants are units over Q, so the gcd of anything with a
    nonzero constant is 1.
    """
    if a.is_zero():
        return make_primitive(b)
    if b.is_zero():
        return make_primitive(a)
    if a.is_const() or b.is_const():
        return _ONE
    a = make_primitive(a)
    b = make_primitive(b)
    if a == b:
        return a
    shared = a.atoms() & b.atoms()
    if not shared:
        return _ONE
    # Main variable: smallest combined degree keeps the PRS short.
    x = min(shared, key=lambda at: (a.degree_in(at) + b.degree_in(at), at))

    ca = _coeff_list(a, x)
    cb = _coeff_list(b, x)
    cont_a = _gcd_many(ca.values())
    cont_b = _gcd_many(cb.values())
    cont = poly_gcd(cont_a, cont_b)
    pa = div_exact(a, cont_a)
    pb = div_exact(b, cont_b)

    f, g = (pa, pb) if pa.degree_in(x) >= pb.degree_in(x) else (pb, pa)
    while not g.is_zero():
        r = _prem(f, g, x)
        if not r.is_zero():
            r = div_exact(r, _gcd_many(_coeff_list(r, x).values()))
            r = make_primitive(r)
        f, g = g, r
    if f.degree_in(x) == 0:
        gx = _ONE
    else:
        gx = make_primitive(f)
    return make_primitive(cont * gx)


def _prem(f: Poly, g: Poly, x: Atom) -> Poly:
    """Pseudo-remainder of f by g with respect to x (up to lc(g) powers)."""
    dg = g.degree_in(x)
    lg = g.coeff_in(x, dg)
    r = f
    while not r.is_zero():
        dr = r.degree_in(x)
        if dr < dg:
            break
        lr = r.coeff_in(x, dr)
        shift = ((x, dr - dg),) if dr > dg else EMPTY_MONO
        r = lg * r - (lr * g).mono_shift(shift)
    return r


# ---------------------------------------------------------------------------
# canonicalization of rational-function pairs
# ---------------------------------------------------------------------------


def _mono_content(p: Poly) -> dict:
    """Per-atom minimum exponent over all monomials (0 when absent somewhere)."""
    it = iter(p.terms)
    first = next(it)
    mins = dict(first)
    for m in it:
        d = dict(m)
        for a in list(mins):
            e = d.get(a, 0)
            if e < mins[a]:
                mins[a] = e
        for a, e in d.items():
            if a not in mins and e < 0:
                mins[a] = e
    return {a: e for a, e in mins.items() if e}


def _exp_denominator_scale(polys: list[Poly]) -> dict:
    """lcm of exponent denominators per exp atom across the given polys."""
    scales: dict = {}
    for p in polys:
        for m in p.terms:
            for a, e in m:
                if a[0] == KIND_EXP and isinstance(e, Fraction):
                    scales[a] = int_lcm(scales.get(a, 1), e.denominator)
    return scales


def _rescale_exp(p: Poly, scales: dict, invert: bool) -> Poly:
    if not scales:
        return p
    terms: dict = {}
    for m, c in p.terms.items():
        mm = []
        for a, e in m:
            d = scales.get(a)
            if d:
                e = Fraction(e) / d if invert else int(Fraction(e) * d)
                e = _norm_exp(e)
            mm.append((a, e))
        terms[tuple(sorted(mm))] = c
    return Poly(terms)


def cancel(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Canonical form of the rational function num/den.

    Guarantees: gcd(num, den) = 1 including monomial factors, exp-generator
    exponents are >= 0 with joint per-direction minimum 0, and den is
    integer-primitive with positive leading coefficient.
    """
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return _ZERO, _ONE

    # Joint monomial content: dividing both sides by it cancels common
    # monomial factors and shifts every exp direction to joint minimum 0.
    cn = _mono_content(num)
    cd = _mono_content(den)
    common = make_mono(
        [(a, -min(cn.get(a, 0), cd.get(a, 0))) for a in set(cn) | set(cd)]
    )
    if common:
        num = num.mono_shift(common)
        den = den.mono_shift(common)

    if not num.is_const() and not den.is_const():
        scales = _exp_denominator_scale([num, den])
        n1 = _rescale_exp(num, scales, invert=False)
        d1 = _rescale_exp(den, scales, invert=False)
        g = poly_gcd(n1, d1)
        if not g.is_one():
            n1 = div_exact(n1, g)
            d1 = div_exact(d1, g)
            num = _rescale_exp(n1, scales, invert=True)
            den = _rescale_exp(d1, scales, invert=True)

    s = primitive_scale(den)
    return num.scale(s), den.scale(s)
