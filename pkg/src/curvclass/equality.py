"""Two-tier equality: exact canonical comparison plus randomized evaluation.

Canonical forms make the exact tier trivial: an Expr is zero iff its
numerator is the zero polynomial.  The randomized tier is a Schwartz-Zippel
style cross-check: atoms are sampled independently as real numbers (the
atom-independence model, so e^{x} directions and opaque derivatives are
free values), respecting declared domain assumptions, and the expression
is evaluated at several points.  It exists as an independent oracle; the
engine itself always decides on canonical forms.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .context import Assumption, CurvclassError
from .expr import Expr
from .poly import KIND_EXP, KIND_FN, KIND_SYMBOL, Atom

ZERO_EXACT = "zero_exact"
ZERO_PROBABILISTIC = "zero_probabilistic"
NONZERO = "nonzero"


class EvaluationError(CurvclassError):
    pass


class DegenerateSamplingError(CurvclassError):
    pass


@dataclass(frozen=True)
class EqualityConfig:
    """Sampling configuration; the seed must be given explicitly."""

    seed: int
    num_points: int = 8
    tolerance: float = 1e-9
    assumptions: tuple[Assumption, ...] = ()

    def __post_init__(self):
        if self.num_points < 1:
            raise CurvclassError("num_points must be at least 1")


@dataclass(frozen=True)
class EqualityVerdict:
    kind: str
    points_tested: int = 0
    tolerance: float = 0.0
    witness: dict | None = None
    value: float = 0.0

    def is_zero(self) -> bool:
        return self.kind in (ZERO_EXACT, ZERO_PROBABILISTIC)


def eval_numeric(e: Expr, assignment: dict) -> float:
    """Evaluate at an atom -> float assignment; exact coefficients are
    folded by the canonical form, the floating part is one multiply-add per
    monomial (relative error around 1e-12 per operation)."""
    num = _eval_poly(e.num, assignment)
    den = _eval_poly(e.den, assignment)
    if den == 0.0:
        raise EvaluationError("zero denominator at evaluation point")
    return num / den


def _eval_poly(p, assignment: dict) -> float:
    total = 0.0
    for mono, coeff in p.terms.items():
        total += _eval_term(mono, coeff, assignment)
    return total


def _eval_term(mono, coeff, assignment: dict) -> float:
    v = float(coeff)
    for atom, e in mono:
        try:
            base = assignment[atom]
        except KeyError:
            raise EvaluationError(f"assignment missing atom {atom_label(atom)}") from None
        if isinstance(e, int):
            v *= base ** e
        else:
            if base <= 0.0:
                raise EvaluationError("fractional power of a non-positive sample")
            v *= base ** float(e)
    return v


def _eval_scale(p, assignment: dict) -> float:
    return sum(abs(_eval_term(m, c, assignment)) for m, c in p.terms.items())


def atom_label(atom: Atom) -> str:
    if atom[0] == KIND_SYMBOL:
        return atom[1]
    if atom[0] == KIND_EXP:
        return f"exp({atom[1]})"
    primes = "'" * atom[2]
    return f"{atom[1]}{primes}({atom[3]})"


def _constraint_for(name: str, assumptions) -> Assumption | None:
    for a in assumptions:
        if a.name == name:
            return a
    return None


def _sample_value(rng: random.Random, constraint: Assumption | None) -> float:
    if constraint is None:
        v = rng.uniform(0.25, 2.5)
        return v if rng.random() < 0.5 else -v
    if constraint.kind == "positive":
        return rng.uniform(0.25, 2.5)
    if constraint.kind == "negative":
        return -rng.uniform(0.25, 2.5)
    if constraint.kind == "nonzero":
        v = rng.uniform(0.25, 2.5)
        return v if rng.random() < 0.5 else -v
    return rng.uniform(float(constraint.low), float(constraint.high))


def sample_assignment(atoms, rng: random.Random, assumptions=()) -> dict:
    """Independent values per atom: coordinates respect assumptions, exp
    directions are positive, opaque order-0 atoms respect a same-named
    assumption, higher derivatives are unconstrained."""
    assignment = {}
    for atom in sorted(atoms):
        if atom[0] == KIND_SYMBOL:
            assignment[atom] = _sample_value(rng, _constraint_for(atom[1], assumptions))
        elif atom[0] == KIND_EXP:
            assignment[atom] = rng.uniform(0.25, 2.5)
        else:
            constraint = _constraint_for(atom[1], assumptions) if atom[2] == 0 else None
            assignment[atom] = _sample_value(rng, constraint)
    return assignment


def consistent_assignment(atoms, coord_values: dict, fn_values: dict | None = None) -> dict:
    """Assignment where exp atoms equal the true exponentials of the
    coordinate values and opaque atoms come from supplied callables
    (name -> callable(order, t)); used by finite-difference oracles."""
    assignment = {}
    for atom in atoms:
        if atom[0] == KIND_SYMBOL:
            if atom[1] not in coord_values:
                raise EvaluationError(f"missing value for symbol {atom[1]}")
            assignment[atom] = float(coord_values[atom[1]])
        elif atom[0] == KIND_EXP:
            assignment[atom] = math.exp(float(coord_values[atom[1]]))
        else:
            if not fn_values or atom[1] not in fn_values:
                raise EvaluationError(f"missing instantiation for opaque function {atom[1]}")
            assignment[atom] = float(fn_values[atom[1]](atom[2], float(coord_values[atom[3]])))
    return assignment


def is_zero(e: Expr, config: EqualityConfig) -> EqualityVerdict:
    """Decide whether e vanishes identically.

    Canonical zero gives ZeroExact outright.  Otherwise the expression is
    evaluated at num_points independent samples; any value whose magnitude
    exceeds the relative tolerance yields NonZero with the witness
    assignment, and all-small values yield ZeroProbabilistic.
    """
    if e.is_zero():
        return EqualityVerdict(ZERO_EXACT)
    rng = random.Random(config.seed)
    atoms = e.atoms()
    tested = 0
    retries = 0
    max_retries = 10 * config.num_points
    while tested < config.num_points:
        assignment = sample_assignment(atoms, rng, config.assumptions)
        den_val = _eval_poly(e.den, assignment)
        if den_val == 0.0 or not math.isfinite(den_val):
            retries += 1
            if retries > max_retries:
                raise DegenerateSamplingError("degenerate sampling domain")
            continue
        num_val = _eval_poly(e.num, assignment)
        scale = max(1.0, _eval_scale(e.num, assignment))
        if abs(num_val) > config.tolerance * scale:
            value = num_val / den_val
            witness = {atom_label(a): v for a, v in sorted(assignment.items())}
            return EqualityVerdict(NONZERO, tested + 1, config.tolerance, witness, value)
        tested += 1
    return EqualityVerdict(ZERO_PROBABILISTIC, tested, config.tolerance)
