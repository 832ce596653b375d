"""Declaration context: coordinates, constants, opaque functions, assumptions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class CurvclassError(Exception):
    """Base class for all errors raised by this package."""


@dataclass(frozen=True)
class Assumption:
    """Domain restriction on a coordinate (or on an opaque function's sign).

    kind is one of 'positive', 'negative', 'nonzero', 'interval'; interval
    bounds are rational and open.
    """

    name: str
    kind: str
    low: Fraction | None = None
    high: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("positive", "negative", "nonzero", "interval"):
            raise CurvclassError(f"unknown assumption kind {self.kind!r}")
        if self.kind == "interval" and (self.low is None or self.high is None or self.low >= self.high):
            raise CurvclassError("interval assumption needs rational bounds low < high")


RESERVED_FUNCTIONS = ("exp", "sin", "cos", "log")


@dataclass(frozen=True)
class Context:
    """Declared identifiers for parsing and sampling.

    coords are the manifold coordinates (exp arguments and opaque-function
    arguments must come from here); constants are free scalar symbols such
    as the a_i in a vector-field ansatz; opaque maps a function name to the
    coordinate it is applied to.
    """

    coords: tuple[str, ...]
    constants: tuple[str, ...] = ()
    opaque: dict[str, str] = field(default_factory=dict)
    assumptions: tuple[Assumption, ...] = ()

    def __post_init__(self):
        seen = set()
        for name in (*self.coords, *self.constants, *self.opaque):
            if name in RESERVED_FUNCTIONS:
                raise CurvclassError(f"identifier {name!r} is reserved")
            if name in seen:
                raise CurvclassError(f"identifier {name!r} declared twice")
            seen.add(name)
        for fn, arg in self.opaque.items():
            if arg not in self.coords:
                raise CurvclassError(f"opaque function {fn!r} applied to undeclared coordinate {arg!r}")

    def is_symbol(self, name: str) -> bool:
        return name in self.coords or name in self.constants

    def with_constants(self, *names: str) -> "Context":
        return Context(self.coords, self.constants + tuple(names), self.opaque, self.assumptions)
