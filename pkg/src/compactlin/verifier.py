"""Exact LP checks that a compact linearization implies the McCormick inequalities.

Every decision here rests on an exact rational LP optimum: a pair passes a
check when the largest achievable violation of the inequality is ``<= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .coverage import CoveragePlan, check_conditions, full_plan, support_plan
from .errors import PlanInvalid, RegimeMismatch, SolverError
from .linearizer import compact_linearize, standard_linearize
from .linmodel import LinConstraint, LinModel, LinVar, relax, x, y
from .model import Instance, Pair, brute_force_feasible
from .optcore import OPTIMAL, LpSession, solve_lp
from . import zoo

KINDS = ("mc_ub_i", "mc_ub_j", "mc_lb")
ASSIGNMENT, DEGREE_TWO, GENERAL = "assignment", "degree-two", "general"


def violation_expr(kind: str, i: int, j: int) -> tuple[dict[LinVar, int], int]:
    """Linear expression (coefficients, constant) that is positive iff the inequality fails."""
    if kind == "mc_ub_i":
        return {y(i, j): 1, x(i): -1}, 0
    if kind == "mc_ub_j":
        return {y(i, j): 1, x(j): -1}, 0
    if kind == "mc_lb":
        return {x(i): 1, x(j): 1, y(i, j): -1}, -1
    raise ValueError(kind)


def _evaluate(expr, constant, point) -> Fraction:
    return sum((Fraction(a) * point[v] for v, a in expr.items()), Fraction(constant))


@dataclass
class ConsistencyReport:
    instance_id: str
    per_pair_max: dict[tuple[Pair, str], Optional[Fraction]] = field(default_factory=dict)
    points_checked: int = 0

    @property
    def passed(self) -> bool:
        return all(v is not None and v <= 0 for v in self.per_pair_max.values())


@dataclass
class Witness:
    pair: Pair
    kind: str
    violation: Fraction
    point: dict[LinVar, Fraction]


@dataclass
class DominanceReport:
    instance_id: str
    regime: str
    per_pair_max: dict[tuple[Pair, str], Fraction] = field(default_factory=dict)
    witnesses: list[Witness] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v <= 0 for v in self.per_pair_max.values())

    @property
    def witness(self) -> Optional[Witness]:
        return max(self.witnesses, key=lambda w: w.violation, default=None)


def _product_pairs(plan: CoveragePlan) -> list[Pair]:
    return sorted(p for p in plan.Q if p[0] != p[1])


def verify_theorem1(inst: Instance, plan: CoveragePlan, cap: int = 25) -> ConsistencyReport:
    """Integer consistency: with x fixed at any feasible binary point, every
    product variable allowed by the compact rows equals x_i * x_j.

    For fixed x the three inequality forms differ only by constants, so each
    pair needs the maximum and the minimum of ``y_ij`` over the fixed-x polytope.
    """
    if not check_conditions(inst, plan):
        raise PlanInvalid("plan violates the coverage conditions")
    points = brute_force_feasible(inst, cap)
    model = relax(compact_linearize(inst, plan))
    pairs = _product_pairs(plan)
    report = ConsistencyReport(inst.name)
    for key in ((p, k) for p in pairs for k in KINDS):
        report.per_pair_max[key] = Fraction(-1)
    # x variables outside every row cannot influence the fixed-x polytope
    active = sorted({v.id for con in model.constraints for v in con.coeffs if v.kind == "x"})
    report.points_checked = len(points)
    seen = set()
    for point in points:
        key = tuple(point[i - 1] for i in active)
        if key in seen:
            continue
        seen.add(key)
        fixed = {x(i): (Fraction(point[i - 1]),) * 2 for i in active}
        session = LpSession(model.with_bounds(fixed))
        for i, j in pairs:
            xi, xj = point[i - 1], point[j - 1]
            hi = session.maximize({y(i, j): 1})
            if hi is None:
                # the true product must always be feasible; record the failure
                for k in KINDS:
                    report.per_pair_max[(i, j), k] = None
                continue
            lo = -session.maximize({y(i, j): -1})
            found = {"mc_ub_i": hi - xi, "mc_ub_j": hi - xj, "mc_lb": xi + xj - 1 - lo}
            for k, v in found.items():
                prev = report.per_pair_max[(i, j), k]
                if prev is not None and v > prev:
                    report.per_pair_max[(i, j), k] = v
    if not points:
        report.per_pair_max.clear()
    return report


def detect_regime(inst: Instance, plan: CoveragePlan) -> str:
    unit = all(a == 1 for eq in inst.equations for a in eq.coeffs.values())
    if unit and all(eq.rhs == 1 for eq in inst.equations):
        return ASSIGNMENT
    if unit and all(eq.rhs == 2 and plan.B[eq.id] == eq.support for eq in inst.equations):
        return DEGREE_TWO
    return GENERAL


def _check_regime(inst: Instance, plan: CoveragePlan, regime: str) -> None:
    if regime == GENERAL:
        return
    if regime not in (ASSIGNMENT, DEGREE_TWO):
        raise ValueError(f"unknown regime {regime!r}")
    bad = [eq.id for eq in inst.equations if any(a != 1 for a in eq.coeffs.values())]
    if bad:
        raise RegimeMismatch(f"equations {bad} have non-unit coefficients")
    want = 1 if regime == ASSIGNMENT else 2
    bad = [eq.id for eq in inst.equations if eq.rhs != want]
    if bad:
        raise RegimeMismatch(f"equations {bad} do not have right-hand side {want}")
    if regime == DEGREE_TWO:
        bad = [eq.id for eq in inst.equations if plan.B[eq.id] != eq.support]
        if bad:
            raise RegimeMismatch(f"equations {bad} are not multiplied by their own support")


def verify_dominance(inst: Instance, plan: CoveragePlan, regime: str = GENERAL) -> DominanceReport:
    """Maximize every McCormick violation over the fully relaxed compact model.

    Under the assignment and degree-two regimes all maxima must be ``<= 0``.
    Under ``general`` a positive maximum is a finding: it is recorded with the
    maximizing point, which is re-checked exactly against the model.
    """
    _check_regime(inst, plan, regime)
    model = relax(compact_linearize(inst, plan))
    session = LpSession(model)
    report = DominanceReport(inst.name, regime)
    if session.status != OPTIMAL:
        return report
    for i, j in _product_pairs(plan):
        for kind in KINDS:
            expr, const = violation_expr(kind, i, j)
            best, point = session.argmax(expr, const)
            if best is None:
                raise SolverError("relaxed compact model became infeasible")
            report.per_pair_max[(i, j), kind] = best
            if best > 0:
                witness = Witness((i, j), kind, best, point)
                if not witness_sound(model, witness):
                    raise SolverError(f"witness for {(i, j)} {kind} failed re-verification")
                report.witnesses.append(witness)
    return report


def witness_sound(model: LinModel, witness: Witness) -> bool:
    """Point satisfies every row and bound exactly and has the claimed violation."""
    point = witness.point
    for v in model.vars:
        lo, hi = model.bounds[v]
        if point[v] < lo or (hi is not None and point[v] > hi):
            return False
    if not all(con.satisfied(point) for con in model.constraints):
        return False
    expr, const = violation_expr(witness.kind, *witness.pair)
    return _evaluate(expr, const, point) == witness.violation


@dataclass(frozen=True)
class BoundComparison:
    lp_bound_compact: Fraction
    lp_bound_standard: Fraction
    regime: str

    @property
    def delta(self) -> Fraction:
        return self.lp_bound_compact - self.lp_bound_standard


def compare_bounds(inst: Instance, plan: CoveragePlan) -> BoundComparison:
    """LP bounds of both linearizations; in the dominance regimes compact >= standard."""
    compact = solve_lp(compact_linearize(inst, plan))
    standard = solve_lp(standard_linearize(inst, inst.P))
    if compact.status != OPTIMAL or standard.status != OPTIMAL:
        raise SolverError("relaxation of a feasible instance must have an optimum")
    result = BoundComparison(compact.objective, standard.objective, detect_regime(inst, plan))
    if result.regime != GENERAL and result.delta < 0:
        raise SolverError(
            f"compact bound {result.lp_bound_compact} below standard bound "
            f"{result.lp_bound_standard} in the {result.regime} regime"
        )
    return result


# ---------------------------------------------------------------------------
# structural comparison with the known formulations


def _canonical(terms, sense, rhs) -> tuple:
    """Row with sortable semantic keys, scaled so its first coefficient is 1."""
    merged: dict = {}
    for key, a in terms:
        merged[key] = merged.get(key, 0) + Fraction(a)
    terms = sorted((k, a) for k, a in merged.items() if a)
    lead = terms[0][1]
    return tuple((k, a / lead) for k, a in terms), sense, Fraction(rhs) / lead


def _edge(a: int, b: int) -> tuple[int, int]:
    return (min(a, b), max(a, b))


def _both(u, v) -> tuple:
    return tuple(sorted((u, v)))


def fischer_helmberg_rows(vertex_count: int) -> set[tuple]:
    """For each edge {j,k} and endpoint j: sum over paths i-j-k of y_ijk = x_jk."""
    V = range(1, vertex_count + 1)
    rows = set()
    for j in V:
        for k in V:
            if k == j:
                continue
            jk = _edge(j, k)
            terms = [(("y", _both(_edge(i, j), jk)), 1) for i in V if i not in (j, k)]
            terms.append((("x", jk), -1))
            rows.add(_canonical(terms, "=", 0))
    return rows


def frieze_yadegar_rows(n: int) -> set[tuple]:
    """Rows of the Frieze-Yadegar linearization over symmetric products.

    For every assignment x[k,l]: sum_i y[ij,kl] = x[kl] for each location j,
    and sum_j y[ij,kl] = x[kl] for each facility i, where y[kl,kl] = x[kl].
    """
    N = range(1, n + 1)
    rows = set()
    for k in N:
        for l in N:
            kl = (k, l)
            for fixed in N:
                for members in ([(fixed, p) for p in N], [(i, fixed) for i in N]):
                    terms = [(("x", kl) if m == kl else ("y", _both(m, kl)), 1) for m in members]
                    terms.append((("x", kl), -1))
                    rows.add(_canonical(terms, "=", 0))
    return rows


@dataclass
class StructuralMatch:
    reference: str
    size: int
    match: bool
    compact_rows: int
    reference_rows: int
    product_vars: int
    standard_inequalities: int
    plan: CoveragePlan

    def __bool__(self):
        return self.match


def structural_match(reference: str, size: int) -> StructuralMatch:
    """Generate a QTSP or QAP instance, linearize it, and compare its
    compact rows with an independently written reference emitter."""
    if reference == "qtsp":
        inst = zoo.gen_qtsp(zoo.QtspSpec(size, include_subtours=False))
        # each degree equation multiplied by its own edges
        plan = support_plan(inst)
        edges = zoo.qtsp_edges(size)

        def names(v: LinVar):
            if v.kind == "x":
                return ("x", edges[v.id - 1])
            a, b = v.id
            return ("y", _both(edges[a - 1], edges[b - 1]))

        expected = fischer_helmberg_rows(size)
    elif reference == "qap":
        inst = zoo.gen_qap(zoo.QapSpec(size))
        # the reference multiplies every assignment row and column by every x
        plan = full_plan(inst)
        n = size

        def cell(idx):
            return ((idx - 1) // n + 1, (idx - 1) % n + 1)

        def names(v: LinVar):
            if v.kind == "x":
                return ("x", cell(v.id))
            a, b = v.id
            return ("y", _both(cell(a), cell(b)))

        expected = frieze_yadegar_rows(size)
    else:
        raise ValueError(f"unknown reference {reference!r}")
    model = compact_linearize(inst, plan)
    rows = model.by_kind("cmp")
    got = {_canonical([(names(v), a) for v, a in r.coeffs.items()], r.sense, r.rhs) for r in rows}
    return StructuralMatch(
        reference=reference,
        size=size,
        match=got == expected,
        compact_rows=len(rows),
        reference_rows=len(expected),
        product_vars=sum(1 for v in model.vars if v.kind == "y"),
        standard_inequalities=len(standard_linearize(inst).constraints) - len(inst.equations),
        plan=plan,
    )
