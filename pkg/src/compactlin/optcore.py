"""Exact rational LP (bounded primal simplex) and branch-and-bound.

Entering columns are priced by largest reduced cost until a run of
degenerate pivots shows up; from then on the solve uses Bland's rule, which
rules out cycling. All pivots use ``gmpy2.mpq``; results are returned as
``fractions.Fraction``.
Every optimal solution is checked by substitution into the original model
before it is handed out, so an optimum reported here is exact.
"""

from __future__ import annotations

import heapq
import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from gmpy2 import mpq

from .errors import NodeBudgetExceeded, SolverError
from .linmodel import LinModel, LinVar, relax

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

DEFAULT_NODE_BUDGET = 10**6
MAX_PIVOTS = 200_000
# consecutive degenerate pivots tolerated before switching to Bland's rule
DEGENERATE_SWITCH = 25

_ZERO = mpq(0)


def _q(value) -> mpq:
    value = Fraction(value)
    return mpq(value.numerator, value.denominator)


def _frac(value: mpq) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


@dataclass
class LpSolution:
    status: str
    objective: Optional[Fraction] = None
    values: dict[LinVar, Fraction] = field(default_factory=dict)


@dataclass
class MipSolution:
    status: str
    objective: Optional[Fraction] = None
    values: dict[LinVar, Fraction] = field(default_factory=dict)
    node_count: int = 0


class LpSession:
    """A simplex tableau kept primal feasible across several objectives.

    Phase I runs once in the constructor; each call to :meth:`minimize`
    starts phase II from the basis the previous call ended with.
    Variables with equal lower and upper bound are substituted out.
    """

    def __init__(self, model: LinModel):
        self.model = model
        self.fixed: dict[LinVar, mpq] = {}
        self.cols: list[LinVar] = []
        for v in model.vars:
            lo, hi = model.bounds[v]
            if hi is not None and lo > hi:
                self.status = INFEASIBLE
                return
            if lo == hi:
                self.fixed[v] = _q(lo)
            else:
                self.cols.append(v)
        self.col_index = {v: j for j, v in enumerate(self.cols)}
        self.lb: list[mpq] = [_q(model.bounds[v][0]) for v in self.cols]
        self.ub: list[Optional[mpq]] = [
            None if model.bounds[v][1] is None else _q(model.bounds[v][1]) for v in self.cols
        ]
        self.n_struct = len(self.cols)

        self.rows: list[dict[int, mpq]] = []
        self.basis: list[int] = []
        self.value: list[mpq] = list(self.lb)
        self.at_upper: list[bool] = [False] * self.n_struct
        artificials: list[int] = []
        pending: list[tuple[dict[int, mpq], mpq]] = []

        for con in model.constraints:
            row: dict[int, mpq] = {}
            rhs = _q(con.rhs)
            for v, a in con.coeffs.items():
                if v in self.fixed:
                    rhs -= _q(a) * self.fixed[v]
                else:
                    row[self.col_index[v]] = _q(a)
            if con.sense != "=":
                s = self._new_col(_ZERO, None)
                row[s] = mpq(1) if con.sense == "<=" else mpq(-1)
            if not row:
                if (con.sense == "=" and rhs != 0) or (con.sense == ">=" and rhs > 0) or (
                    con.sense == "<=" and rhs < 0
                ):
                    self.status = INFEASIBLE
                    return
                continue
            pending.append((row, rhs))

        for row, rhs in pending:
            resid = rhs - sum((a * self.value[j] for j, a in row.items()), _ZERO)
            # a slack with the right sign can start basic instead of an artificial
            slack = next(
                (j for j, a in row.items() if j >= self.n_struct and (resid == 0 or (a > 0) == (resid > 0))),
                None,
            )
            if slack is not None:
                a = row[slack]
                row = {j: c / a for j, c in row.items()}
                self.value[slack] = resid / a
                self.rows.append(row)
                self.basis.append(slack)
                continue
            if resid < 0:
                row = {j: -a for j, a in row.items()}
                resid = -resid
            art = self._new_col(_ZERO, None)
            self.value[art] = resid
            row[art] = mpq(1)
            artificials.append(art)
            self.rows.append(row)
            self.basis.append(art)

        self.is_basic = [False] * len(self.value)
        for b in self.basis:
            self.is_basic[b] = True
        self.pivots = 0
        self.bland = False
        self._index_columns()
        self.status = OPTIMAL
        if artificials:
            self._phase_one(artificials)

    def _index_columns(self) -> None:
        self.col_rows: dict[int, set[int]] = {}
        for r, row in enumerate(self.rows):
            for j in row:
                self.col_rows.setdefault(j, set()).add(r)

    def _new_col(self, lo, hi) -> int:
        self.lb.append(lo)
        self.ub.append(hi)
        self.value.append(lo)
        self.at_upper.append(False)
        return len(self.lb) - 1

    # -- simplex machinery -------------------------------------------------

    def _reduced_costs(self, cost: Mapping[int, mpq]) -> dict[int, mpq]:
        d = {j: c for j, c in cost.items() if not self.is_basic[j]}
        for r, b in enumerate(self.basis):
            cb = cost.get(b)
            if cb:
                for j, a in self.rows[r].items():
                    if j != b:
                        v = d.get(j, _ZERO) - cb * a
                        if v:
                            d[j] = v
                        else:
                            d.pop(j, None)
        return d

    def _pivot(self, r: int, e: int, d: dict[int, mpq]) -> None:
        row = self.rows[r]
        piv = row[e]
        if piv != 1:
            row = {j: a / piv for j, a in row.items()}
            self.rows[r] = row
        col_rows = self.col_rows
        for i in list(col_rows[e]):
            if i == r:
                continue
            other = self.rows[i]
            f = other[e]
            for j, a in row.items():
                old = other.get(j)
                if old is None:
                    other[j] = -f * a
                    col_rows.setdefault(j, set()).add(i)
                else:
                    v = old - f * a
                    if v:
                        other[j] = v
                    else:
                        del other[j]
                        col_rows[j].discard(i)
        de = d.get(e)
        if de:
            for j, a in row.items():
                v = d.get(j, _ZERO) - de * a
                if v:
                    d[j] = v
                else:
                    d.pop(j, None)
        leaving = self.basis[r]
        self.is_basic[leaving] = False
        self.is_basic[e] = True
        self.basis[r] = e
        self.pivots += 1

    def _entering(self, d: dict[int, mpq]) -> Optional[int]:
        """Improving nonbasic column: steepest reduced cost, or lowest index under Bland."""
        best, best_mag = None, None
        for j in sorted(d):
            dj = d[j]
            if self.is_basic[j] or self.lb[j] == self.ub[j]:
                continue
            if (dj < 0 and not self.at_upper[j]) or (dj > 0 and self.at_upper[j]):
                if self.bland:
                    return j
                mag = abs(dj)
                if best is None or mag > best_mag:
                    best, best_mag = j, mag
        return best

    def _iterate(self, d: dict[int, mpq]) -> str:
        degenerate_run = 0
        self.bland = False
        while True:
            if self.pivots > MAX_PIVOTS:
                raise SolverError("pivot limit reached")
            entering = self._entering(d)
            if entering is None:
                return OPTIMAL
            e = entering
            direction = -1 if self.at_upper[e] else 1
            span = None if self.ub[e] is None else self.ub[e] - self.lb[e]
            best = None
            leave_row = None
            leave_upper = False
            for r in sorted(self.col_rows.get(e, ())):
                t = self.rows[r][e]
                b = self.basis[r]
                rate = -t * direction
                if rate < 0:
                    limit = (self.value[b] - self.lb[b]) / -rate
                    hits_upper = False
                elif self.ub[b] is not None:
                    limit = (self.ub[b] - self.value[b]) / rate
                    hits_upper = True
                else:
                    continue
                if best is None or limit < best or (limit == best and b < self.basis[leave_row]):
                    best, leave_row, leave_upper = limit, r, hits_upper
            if span is not None and (best is None or span <= best):
                theta = span
                leave_row = None
            elif best is None:
                return UNBOUNDED
            else:
                theta = best
            if theta:
                degenerate_run = 0
                step = theta * direction
                for r in self.col_rows.get(e, ()):
                    self.value[self.basis[r]] -= self.rows[r][e] * step
                self.value[e] += step
            else:
                degenerate_run += 1
                if degenerate_run > DEGENERATE_SWITCH:
                    # from here on Bland's rule alone; it cannot cycle
                    self.bland = True
            if leave_row is None:
                self.at_upper[e] = not self.at_upper[e]
                self.value[e] = self.ub[e] if self.at_upper[e] else self.lb[e]
                continue
            b = self.basis[leave_row]
            self.value[b] = self.ub[b] if leave_upper else self.lb[b]
            self.at_upper[b] = leave_upper
            self.at_upper[e] = False
            self._pivot(leave_row, e, d)

    def _phase_one(self, artificials: list[int]) -> None:
        cost = {a: mpq(1) for a in artificials}
        d = self._reduced_costs(cost)
        if self._iterate(d) != OPTIMAL:
            raise SolverError("phase I cannot be unbounded")
        if any(self.value[a] != 0 for a in artificials):
            self.status = INFEASIBLE
            return
        art = set(artificials)
        keep = []
        for r, b in enumerate(self.basis):
            if b not in art:
                keep.append(r)
                continue
            candidates = [j for j in self.rows[r] if j not in art]
            if candidates:
                e = min(candidates)
                self.is_basic[b] = False
                self._pivot(r, e, {})
                keep.append(r)
        # rows still carrying a basic artificial are redundant
        self.rows = [self.rows[r] for r in keep]
        self.basis = [self.basis[r] for r in keep]
        for row in self.rows:
            for a in art.intersection(row):
                del row[a]
        for a in art:
            self.lb[a] = self.ub[a] = _ZERO
            self.value[a] = _ZERO
        self._index_columns()

    # -- public API --------------------------------------------------------

    def minimize(self, objective: Mapping[LinVar, Fraction]) -> LpSolution:
        if self.status == INFEASIBLE:
            return LpSolution(INFEASIBLE)
        const = _ZERO
        cost: dict[int, mpq] = {}
        for v, c in objective.items():
            if v in self.fixed:
                const += _q(c) * self.fixed[v]
            elif c:
                cost[self.col_index[v]] = _q(c)
        d = self._reduced_costs(cost)
        status = self._iterate(d)
        if status != OPTIMAL:
            return LpSolution(status)
        values = {v: _frac(val) for v, val in self.fixed.items()}
        values.update({v: _frac(self.value[j]) for j, v in enumerate(self.cols)})
        obj = sum((Fraction(c) * values[v] for v, c in objective.items()), Fraction(0))
        _self_check(self.model, values)
        if _q(obj) != const + sum((c * self.value[j] for j, c in cost.items()), _ZERO):
            raise SolverError("objective mismatch after substitution")
        return LpSolution(OPTIMAL, obj, values)

    def maximize(self, expr: Mapping[LinVar, Fraction], constant=0) -> Optional[Fraction]:
        """Max of ``expr + constant`` over the polytope, ``None`` if it is empty."""
        sol = self.minimize({v: -Fraction(a) for v, a in expr.items()})
        if sol.status == INFEASIBLE:
            return None
        if sol.status == UNBOUNDED:
            raise SolverError("violation maximization cannot be unbounded on a bounded box")
        return -sol.objective + Fraction(constant)

    def argmax(self, expr: Mapping[LinVar, Fraction], constant=0):
        """Like :meth:`maximize` but also return the maximizing point."""
        sol = self.minimize({v: -Fraction(a) for v, a in expr.items()})
        if sol.status != OPTIMAL:
            return None, None
        return -sol.objective + Fraction(constant), sol.values


def _self_check(model: LinModel, values: Mapping[LinVar, Fraction]) -> None:
    for v in model.vars:
        lo, hi = model.bounds[v]
        if values[v] < lo or (hi is not None and values[v] > hi):
            raise SolverError(f"{v} = {values[v]} outside [{lo}, {hi}]")
    for con in model.constraints:
        if not con.satisfied(values):
            raise SolverError(f"constraint {con.name} violated by simplex solution")


def solve_lp(model: LinModel) -> LpSolution:
    """Solve the continuous relaxation of ``model`` exactly."""
    return LpSession(relax(model)).minimize(model.objective)


def maximize_violation(model: LinModel, expr, constant=0) -> Optional[Fraction]:
    """Maximum of a linear expression over the model's polytope.

    ``expr`` maps variables to coefficients. Returns ``None`` when the
    polytope is empty.
    """
    return LpSession(relax(model)).maximize(expr, constant)


def _node_budget(budget: Optional[int]) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("COMPACTLIN_NODE_BUDGET")
    return int(env) if env else DEFAULT_NODE_BUDGET


def solve_milp(model: LinModel, node_budget: Optional[int] = None) -> MipSolution:
    """Best-first branch-and-bound over the model's integer variables.

    Branches on the first fractional integer variable in declaration order,
    exploring the down branch first among nodes with equal bound.
    """
    budget = _node_budget(node_budget)
    int_vars = [v for v in model.vars if v in model.integer]
    base = relax(model)
    counter = itertools.count()
    nodes = 0
    incumbent: Optional[LpSolution] = None

    def solve_node(overrides):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise NodeBudgetExceeded(f"more than {budget} branch-and-bound nodes")
        return LpSession(base.with_bounds(overrides)).minimize(model.objective)

    root = solve_node({})
    if root.status == UNBOUNDED:
        return MipSolution(UNBOUNDED, node_count=nodes)
    heap = []
    if root.status == OPTIMAL:
        heap.append((root.objective, next(counter), {}, root))
    while heap:
        bound, _, overrides, sol = heapq.heappop(heap)
        if incumbent is not None and bound >= incumbent.objective:
            break
        branch = next((v for v in int_vars if sol.values[v].denominator != 1), None)
        if branch is None:
            incumbent = sol
            continue
        val = sol.values[branch]
        lo, hi = base.with_bounds(overrides).bounds[branch]
        for child in (
            {**overrides, branch: (lo, Fraction(math.floor(val)))},
            {**overrides, branch: (Fraction(math.ceil(val)), hi)},
        ):
            res = solve_node(child)
            if res.status == OPTIMAL and (
                incumbent is None or res.objective < incumbent.objective
            ):
                heapq.heappush(heap, (res.objective, next(counter), child, res))
    if incumbent is None:
        return MipSolution(INFEASIBLE, node_count=nodes)
    return MipSolution(OPTIMAL, incumbent.objective, dict(incumbent.values), nodes)
