"""Choice of multiplier sets: which variables each equation is multiplied by.

Multiplying equation ``k`` by ``x_j`` for every ``j`` in ``B[k]`` induces the
product pairs ``Q``. A plan is usable when ``Q`` contains every demanded
product and each induced pair ``(i, j)`` is reached from both sides: some
equation holding ``i`` is multiplied by ``x_j`` and some equation holding
``j`` is multiplied by ``x_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .errors import SolverError, SupportsNotDisjoint
from .linmodel import LinConstraint, LinModel, LinVar
from .model import Instance, Pair, ordered
from .optcore import OPTIMAL, solve_lp, solve_milp


@dataclass(frozen=True)
class CoveragePlan:
    B: Mapping[str, frozenset[int]]
    Q: frozenset[Pair]


@dataclass(frozen=True)
class CoverageStats:
    num_equations: int
    num_vars: int
    standard_ineq_count: int

    @classmethod
    def of(cls, inst: Instance, plan: CoveragePlan) -> "CoverageStats":
        # squares are substituted away by the linearizer
        return cls(
            num_equations=sum(len(b) for b in plan.B.values()),
            num_vars=sum(1 for i, j in plan.Q if i != j),
            standard_ineq_count=3 * len(inst.P),
        )


@dataclass
class ConditionCheck:
    ok: bool
    witnesses: dict[Pair, tuple[str, str]] = field(default_factory=dict)
    reason: str = ""

    def __bool__(self):
        return self.ok


def induced_Q(inst: Instance, B: Mapping[str, frozenset[int]]) -> frozenset[Pair]:
    Q = set()
    for eq in inst.equations:
        for j in B.get(eq.id, ()):
            Q.update(ordered(i, j) for i in eq.coeffs)
    return frozenset(Q)


def make_plan(inst: Instance, B: Mapping[str, set[int]]) -> CoveragePlan:
    B = {eq.id: frozenset(B.get(eq.id, ())) for eq in inst.equations}
    return CoveragePlan(B, induced_Q(inst, B))


def full_plan(inst: Instance) -> CoveragePlan:
    """Every equation multiplied by every variable that occurs in some equation."""
    covered = frozenset().union(*(eq.support for eq in inst.equations))
    return make_plan(inst, {eq.id: covered for eq in inst.equations})


def support_plan(inst: Instance) -> CoveragePlan:
    """Every equation multiplied by the variables of its own support."""
    return make_plan(inst, {eq.id: eq.support for eq in inst.equations})


def check_conditions(inst: Instance, plan: CoveragePlan) -> ConditionCheck:
    missing = inst.P - plan.Q
    if missing:
        return ConditionCheck(False, reason=f"demanded pairs not induced: {sorted(missing)}")
    if plan.Q != induced_Q(inst, plan.B):
        return ConditionCheck(False, reason="Q differs from the set induced by B")
    witnesses, failures = {}, []
    for i, j in sorted(plan.Q):
        k = next((eq.id for eq in inst.equations if i in eq.coeffs and j in plan.B.get(eq.id, ())), None)
        l = next((eq.id for eq in inst.equations if j in eq.coeffs and i in plan.B.get(eq.id, ())), None)
        if k is None:
            failures.append(f"({i},{j}): no equation holding x{i} is multiplied by x{j}")
        if l is None:
            failures.append(f"({i},{j}): no equation holding x{j} is multiplied by x{i}")
        if k is not None and l is not None:
            witnesses[(i, j)] = (k, l)
    if failures:
        return ConditionCheck(False, witnesses, "; ".join(failures))
    return ConditionCheck(True, witnesses)


def closure_disjoint(inst: Instance) -> CoveragePlan:
    """Smallest plan for pairwise-disjoint supports, by fixpoint closure.

    With disjoint supports every variable has exactly one owning equation, so
    a pair ``(i, j)`` forces ``j`` into ``B[owner(i)]`` and ``i`` into
    ``B[owner(j)]``. Forced additions induce new pairs; repeat until stable.
    """
    owner: dict[int, str] = {}
    for eq in inst.equations:
        for i in eq.coeffs:
            if i in owner:
                raise SupportsNotDisjoint(f"x{i} occurs in equations {owner[i]} and {eq.id}")
            owner[i] = eq.id
    support = {eq.id: eq.support for eq in inst.equations}
    B: dict[str, set[int]] = {eq.id: set() for eq in inst.equations}
    work = sorted(inst.P)
    while work:
        i, j = work.pop()
        for a, b in ((i, j), (j, i)):
            k = owner[a]
            if b not in B[k]:
                B[k].add(b)
                work.extend(ordered(h, b) for h in support[k])
    return make_plan(inst, B)


def default_weights(inst: Instance) -> tuple[Fraction, Fraction]:
    """``(w_eqn, w_var)``: fewest equations first, then fewest variables."""
    widest = max((len(eq.coeffs) for eq in inst.equations), default=0)
    return Fraction(widest + 1), Fraction(1)


@dataclass(frozen=True)
class SelectionModel:
    model: LinModel
    z: Mapping[tuple[int, str], LinVar]
    f: Mapping[Pair, LinVar]
    w_eqn: Fraction
    w_var: Fraction


def build_selection_milp(inst: Instance, w_eqn=None, w_var=None) -> SelectionModel:
    """MILP choosing ``B`` with minimum weighted count of rows and products.

    ``z[i, k] = 1`` puts ``i`` into ``B[k]``; ``f[i, j]`` marks ``(i, j)`` as
    induced. Pairs in ``P`` are forced, multiplications induce their pairs,
    and every induced pair must be reached from both of its variables.
    """
    dw_eqn, dw_var = default_weights(inst)
    w_eqn = dw_eqn if w_eqn is None else Fraction(w_eqn)
    w_var = dw_var if w_var is None else Fraction(w_var)
    n = inst.n
    ids = inst.equation_ids
    z = {(i, k): LinVar("z", (i, k)) for k in ids for i in range(1, n + 1)}
    f = {(i, j): LinVar("f", (i, j)) for i in range(1, n + 1) for j in range(i, n + 1)}
    cons: list[LinConstraint] = []
    for p in sorted(inst.P):
        cons.append(LinConstraint({f[p]: 1}, "=", 1, ("sel_fix", *p)))
    for eq in inst.equations:
        k = eq.id
        for i in sorted(eq.coeffs):
            for j in range(1, n + 1):
                # multiplying equation k by x_j induces the pair {i, j}
                cons.append(
                    LinConstraint({f[ordered(i, j)]: 1, z[j, k]: -1}, ">=", 0, ("sel_induce", k, i, j))
                )
    for (i, j), fv in f.items():
        reach_i = {z[j, k]: 1 for k in inst.owners(i)}
        reach_j = {z[i, k]: 1 for k in inst.owners(j)}
        cons.append(LinConstraint({**reach_i, fv: -1}, ">=", 0, ("sel_cond1", i, j)))
        cons.append(LinConstraint({**reach_j, fv: -1}, ">=", 0, ("sel_cond2", i, j)))
    objective = {v: w_eqn for v in z.values()}
    objective.update({v: w_var for v in f.values()})
    model = LinModel(
        vars=[*z.values(), *f.values()],
        constraints=cons,
        objective=objective,
        # demanded pairs also fixed through bounds, so the solver substitutes them out
        bounds={f[p]: (1, 1) for p in inst.P},
        integer=frozenset(z.values()),
    )
    return SelectionModel(model, z, f, w_eqn, w_var)


@dataclass(frozen=True)
class SelectionResult:
    plan: CoveragePlan
    stats: CoverageStats
    objective: Fraction
    lp_integral: bool
    node_count: int


def solve_selection(inst: Instance, w_eqn=None, w_var=None) -> SelectionResult:
    """Solve the selection MILP; the LP relaxation is tried first."""
    sel = build_selection_milp(inst, w_eqn, w_var)
    lp = solve_lp(sel.model)
    if lp.status != OPTIMAL:
        raise SolverError("selection relaxation infeasible for a validated instance")
    lp_integral = all(lp.values[v].denominator == 1 for v in sel.z.values())
    if lp_integral:
        values, objective, nodes = lp.values, lp.objective, 1
    else:
        mip = solve_milp(sel.model)
        if mip.status != OPTIMAL:
            raise SolverError("selection MILP infeasible for a validated instance")
        values, objective, nodes = mip.values, mip.objective, mip.node_count
    B = {k: {i for (i, kk), v in sel.z.items() if kk == k and values[v] == 1} for k in inst.equation_ids}
    plan = make_plan(inst, B)
    if not check_conditions(inst, plan):
        raise SolverError("selection solution does not satisfy the coverage conditions")
    return SelectionResult(plan, CoverageStats.of(inst, plan), objective, lp_integral, nodes)


def plan_cost(inst: Instance, plan: CoveragePlan, w_eqn=None, w_var=None) -> Fraction:
    """Selection objective of a plan: squares count as induced pairs here."""
    dw_eqn, dw_var = default_weights(inst)
    w_eqn = dw_eqn if w_eqn is None else Fraction(w_eqn)
    w_var = dw_var if w_var is None else Fraction(w_var)
    return w_eqn * sum(len(b) for b in plan.B.values()) + w_var * len(plan.Q)


def make_coverage(inst: Instance, method: str = "auto", w_eqn=None, w_var=None) -> CoveragePlan:
    """Dispatch on ``method``: ``fixpoint``, ``milp``, ``auto`` (fixpoint when
    disjoint and default weights), ``support`` or ``full``."""
    if method == "support":
        return support_plan(inst)
    if method == "full":
        return full_plan(inst)
    if method == "fixpoint" or (method == "auto" and inst.disjoint and w_eqn is None and w_var is None):
        return closure_disjoint(inst)
    if method in ("milp", "auto"):
        return solve_selection(inst, w_eqn, w_var).plan
    raise ValueError(f"unknown coverage method {method!r}")
