"""Binary quadratic program instances with linear equation constraints.

An instance is::

    min  c.x + d.y
    s.t. sum_{i in A_k} a_i^k x_i = b^k      for every equation k
         C x + D y >= e                      (side constraints)
         y_ij = x_i x_j                      for (i, j) in P
         x binary

Variables are indexed ``1..n``; a product pair ``(i, j)`` is stored with
``i <= j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import SizeExceeded

Pair = tuple[int, int]
Rational = Fraction


def as_rational(value) -> Fraction:
    """Convert ints, Fractions and numeric strings exactly; floats go via ``str``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def ordered(i: int, j: int) -> Pair:
    return (i, j) if i <= j else (j, i)


@dataclass(frozen=True)
class LinearEquation:
    id: str
    coeffs: Mapping[int, Fraction]
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(
            self, "coeffs", {int(i): as_rational(a) for i, a in sorted(self.coeffs.items())}
        )
        object.__setattr__(self, "rhs", as_rational(self.rhs))

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.coeffs)

    def value(self, x) -> Fraction:
        """Left-hand side at ``x``, a sequence indexed from variable 1."""
        return sum((a * x[i - 1] for i, a in self.coeffs.items()), Fraction(0))


@dataclass(frozen=True)
class SideConstraint:
    """``sum x_coeffs * x + sum y_coeffs * y >= rhs``."""

    x_coeffs: Mapping[int, Fraction]
    y_coeffs: Mapping[Pair, Fraction]
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(
            self, "x_coeffs", {int(i): as_rational(a) for i, a in sorted(self.x_coeffs.items())}
        )
        object.__setattr__(
            self,
            "y_coeffs",
            {(int(p[0]), int(p[1])): as_rational(a) for p, a in sorted(self.y_coeffs.items())},
        )
        object.__setattr__(self, "rhs", as_rational(self.rhs))

    def lhs(self, x) -> Fraction:
        total = sum((a * x[i - 1] for i, a in self.x_coeffs.items()), Fraction(0))
        for (i, j), a in self.y_coeffs.items():
            total += a * x[i - 1] * x[j - 1]
        return total


@dataclass(frozen=True)
class Instance:
    n: int
    equations: tuple[LinearEquation, ...]
    P: frozenset[Pair] = frozenset()
    c: Mapping[int, Fraction] = field(default_factory=dict)
    d: Mapping[Pair, Fraction] = field(default_factory=dict)
    sides: tuple[SideConstraint, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        object.__setattr__(self, "sides", tuple(self.sides))
        object.__setattr__(self, "P", frozenset((int(i), int(j)) for i, j in self.P))
        object.__setattr__(
            self, "c", {int(i): as_rational(v) for i, v in sorted(self.c.items()) if v != 0}
        )
        object.__setattr__(
            self,
            "d",
            {(int(p[0]), int(p[1])): as_rational(v) for p, v in sorted(self.d.items()) if v != 0},
        )

    @property
    def variables(self) -> range:
        return range(1, self.n + 1)

    def equation(self, k: str) -> LinearEquation:
        for eq in self.equations:
            if eq.id == k:
                return eq
        raise KeyError(k)

    @property
    def equation_ids(self) -> list[str]:
        return [eq.id for eq in self.equations]

    def owners(self, i: int) -> list[str]:
        """Ids of the equations whose support contains variable ``i``."""
        return [eq.id for eq in self.equations if i in eq.coeffs]

    @property
    def disjoint(self) -> bool:
        seen: set[int] = set()
        for eq in self.equations:
            if seen & eq.support:
                return False
            seen |= eq.support
        return True

    def objective_value(self, x) -> Fraction:
        """Exact quadratic objective at a binary point ``x``."""
        total = sum((v * x[i - 1] for i, v in self.c.items()), Fraction(0))
        for (i, j), v in self.d.items():
            total += v * x[i - 1] * x[j - 1]
        return total


@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    element: object = None


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.ok


def validate_instance(inst: Instance) -> ValidationReport:
    issues: list[Issue] = []

    def in_range(i):
        return 1 <= i <= inst.n

    ids = [eq.id for eq in inst.equations]
    for k in sorted({k for k in ids if ids.count(k) > 1}):
        issues.append(Issue("duplicate-equation-id", f"equation id {k} used more than once", k))

    for eq in inst.equations:
        if not eq.coeffs:
            issues.append(Issue("empty-equation", f"equation {eq.id} has no terms", eq.id))
        for i, a in eq.coeffs.items():
            if not in_range(i):
                issues.append(
                    Issue("index-out-of-range", f"variable {i} in equation {eq.id}", i)
                )
            if a <= 0:
                issues.append(
                    Issue(
                        "nonpositive-coefficient",
                        f"coefficient of x{i} in equation {eq.id} is {a}",
                        (eq.id, i),
                    )
                )
        if eq.rhs <= 0:
            issues.append(
                Issue("nonpositive-rhs", f"right-hand side of equation {eq.id} is {eq.rhs}", eq.id)
            )

    covered = set().union(*(eq.support for eq in inst.equations)) if inst.equations else set()
    uncovered: set[int] = set()
    for i, j in sorted(inst.P):
        if i > j:
            issues.append(Issue("unordered-pair", f"pair ({i},{j}) has i > j", (i, j)))
        if not (in_range(i) and in_range(j)):
            issues.append(Issue("index-out-of-range", f"pair ({i},{j})", (i, j)))
            continue
        uncovered.update(v for v in (i, j) if v not in covered)
    for v in sorted(uncovered):
        issues.append(
            Issue("uncovered-variable", f"x{v} occurs in a product but in no equation", v)
        )

    for i in inst.c:
        if not in_range(i):
            issues.append(Issue("index-out-of-range", f"objective variable {i}", i))
    for p in inst.d:
        if p not in inst.P:
            issues.append(Issue("objective-pair-not-in-P", f"objective uses product {p}", p))

    for s, side in enumerate(inst.sides):
        for i in side.x_coeffs:
            if not in_range(i):
                issues.append(Issue("index-out-of-range", f"variable {i} in side {s}", i))
        for p in side.y_coeffs:
            if p not in inst.P:
                issues.append(
                    Issue("side-pair-not-in-P", f"side constraint {s} uses product {p}", (s, p))
                )
    return ValidationReport(tuple(issues))


def brute_force_feasible(inst: Instance, cap: int = 25) -> list[tuple[int, ...]]:
    """All binary points satisfying the equations and side constraints.

    Points come out in lexicographic order. Equations prune the search
    early: a partial assignment is abandoned once an equation can no
    longer reach its right-hand side.
    """
    if inst.n > cap:
        raise SizeExceeded(f"n={inst.n} exceeds brute-force cap {cap}")
    n = inst.n
    eqs = [(eq.coeffs, eq.rhs) for eq in inst.equations]
    # remaining[v][e]: sum of coefficients of equation e over variables > v
    remaining = [[sum(a for i, a in co.items() if i > v) for co, _ in eqs] for v in range(n + 1)]
    x = [0] * n
    partial = [Fraction(0)] * len(eqs)
    out: list[tuple[int, ...]] = []

    def consistent(v):
        for e, (_, b) in enumerate(eqs):
            if partial[e] > b or partial[e] + remaining[v][e] < b:
                return False
        return True

    def descend(v):
        if v == n:
            if all(side.lhs(x) >= side.rhs for side in inst.sides):
                out.append(tuple(x))
            return
        for bit in (0, 1):
            x[v] = bit
            if bit:
                for e, (co, _) in enumerate(eqs):
                    if v + 1 in co:
                        partial[e] += co[v + 1]
            if consistent(v + 1):
                descend(v + 1)
            if bit:
                for e, (co, _) in enumerate(eqs):
                    if v + 1 in co:
                        partial[e] -= co[v + 1]
        x[v] = 0

    if consistent(0):
        descend(0)
    return out
