"""Mixed linear models: the common currency of the linearizers and the solver."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

ZERO = Fraction(0)
ONE = Fraction(1)

# Sort rank of provenance kinds; constraints are exported in this order.
PROVENANCE_ORDER = {
    "orig": 0,
    "cmp": 1,
    "mc_ub_i": 2,
    "mc_ub_j": 3,
    "mc_lb": 4,
    "side": 5,
}


@dataclass(frozen=True, order=True)
class LinVar:
    """A model variable: ``x`` (original), ``y`` (product) or solver-internal kinds.

    ``id`` is an int for ``x``, a pair for ``y`` and any tuple for other kinds.
    """

    kind: str
    id: object

    @property
    def name(self) -> str:
        if isinstance(self.id, tuple):
            return self.kind + "_".join(str(part) for part in self.id)
        return f"{self.kind}{self.id}"

    def __repr__(self):
        return self.name


def x(i: int) -> LinVar:
    return LinVar("x", i)


def y(i: int, j: int) -> LinVar:
    return LinVar("y", (i, j) if i <= j else (j, i))


@dataclass(frozen=True)
class LinConstraint:
    coeffs: Mapping[LinVar, Fraction]
    sense: str  # "=", ">=" or "<="
    rhs: Fraction
    provenance: tuple = ()

    def __post_init__(self):
        if self.sense not in ("=", ">=", "<="):
            raise ValueError(f"bad sense {self.sense!r}")
        object.__setattr__(
            self, "coeffs", {v: Fraction(a) for v, a in self.coeffs.items() if a != 0}
        )
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    @property
    def name(self) -> str:
        kind, *rest = self.provenance or ("row",)
        if kind == "orig":
            return f"orig_k{rest[0]}"
        if kind == "cmp":
            return f"cmp_k{rest[0]}_j{rest[1]}"
        return "_".join([kind, *map(str, rest)])

    def lhs(self, values: Mapping[LinVar, Fraction]) -> Fraction:
        return sum((a * values.get(v, ZERO) for v, a in self.coeffs.items()), ZERO)

    def satisfied(self, values) -> bool:
        lhs = self.lhs(values)
        if self.sense == "=":
            return lhs == self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs <= self.rhs


@dataclass(frozen=True)
class LinModel:
    """``minimize objective`` subject to ``constraints`` and variable bounds.

    ``bounds`` maps every variable to a ``(lb, ub)`` pair, ``ub=None`` meaning
    no upper bound; ``integer`` holds the
    variables restricted to integral values.
    """

    vars: tuple[LinVar, ...]
    constraints: tuple[LinConstraint, ...]
    objective: Mapping[LinVar, Fraction] = field(default_factory=dict)
    bounds: Mapping[LinVar, tuple[Fraction, Fraction]] = field(default_factory=dict)
    integer: frozenset[LinVar] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "integer", frozenset(self.integer))
        bounds = {v: (ZERO, ONE) for v in self.vars}
        bounds.update(
            {v: (Fraction(lo), None if hi is None else Fraction(hi)) for v, (lo, hi) in self.bounds.items()}
        )
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(
            self, "objective", {v: Fraction(a) for v, a in self.objective.items() if a != 0}
        )
        declared = set(self.vars)
        for con in self.constraints:
            missing = set(con.coeffs) - declared
            if missing:
                raise ValueError(f"constraint {con.name} uses undeclared {sorted(missing)}")
        if set(self.objective) - declared or self.integer - declared:
            raise ValueError("objective or integrality refers to undeclared variables")

    def by_kind(self, kind: str) -> list[LinConstraint]:
        return [c for c in self.constraints if c.provenance and c.provenance[0] == kind]

    def with_bounds(self, overrides: Mapping[LinVar, tuple]) -> "LinModel":
        bounds = dict(self.bounds)
        bounds.update(overrides)
        return replace(self, bounds=bounds)

    def with_objective(self, objective: Mapping[LinVar, Fraction]) -> "LinModel":
        return replace(self, objective=dict(objective))


def relax(model: LinModel) -> LinModel:
    """Continuous relaxation: integrality dropped, bounds kept."""
    return replace(model, integer=frozenset())
