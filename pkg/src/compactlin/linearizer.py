"""Compact and standard (McCormick) linearizations of an instance."""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable

from .coverage import CoveragePlan, check_conditions
from .errors import PlanInvalid, SquarePairRejected
from .linmodel import LinConstraint, LinModel, LinVar, relax, x, y
from .model import Instance, Pair

__all__ = ["compact_linearize", "standard_linearize", "relax"]


def _product_term(i: int, j: int) -> LinVar:
    """Variable standing for x_i * x_j; a square is just x_i on binaries."""
    return x(i) if i == j else y(i, j)


def _common_parts(inst: Instance):
    """Original equations, side constraints and objective shared by both models."""
    cons = [
        LinConstraint({x(i): a for i, a in eq.coeffs.items()}, "=", eq.rhs, ("orig", eq.id))
        for eq in inst.equations
    ]
    sides = []
    for s, side in enumerate(inst.sides):
        coeffs: dict[LinVar, Fraction] = defaultdict(Fraction)
        for i, a in side.x_coeffs.items():
            coeffs[x(i)] += a
        for (i, j), a in side.y_coeffs.items():
            coeffs[_product_term(i, j)] += a
        sides.append(LinConstraint(coeffs, ">=", side.rhs, ("side", s)))
    objective: dict[LinVar, Fraction] = defaultdict(Fraction)
    for i, v in inst.c.items():
        objective[x(i)] += v
    for (i, j), v in inst.d.items():
        objective[_product_term(i, j)] += v
    return cons, sides, dict(objective)


def _model(inst, products: Iterable[Pair], rows, objective) -> LinModel:
    xs = [x(i) for i in inst.variables]
    ys = [y(i, j) for i, j in sorted(products) if i != j]
    return LinModel(vars=xs + ys, constraints=rows, objective=objective, integer=frozenset(xs))


def compact_linearize(inst: Instance, plan: CoveragePlan) -> LinModel:
    """Multiply each equation k by x_j for j in B[k] and linearize the products.

    Row ``(k, j)`` reads ``sum_i a_i y_ij = b x_j``; a square term ``a_j y_jj``
    becomes ``a_j x_j`` and merges with the right-hand side. No McCormick
    inequalities are emitted.
    """
    check = check_conditions(inst, plan)
    if not check:
        raise PlanInvalid(check.reason)
    orig, sides, objective = _common_parts(inst)
    rows = list(orig)
    for eq in inst.equations:
        for j in sorted(plan.B[eq.id]):
            coeffs: dict[LinVar, Fraction] = defaultdict(Fraction)
            for i, a in eq.coeffs.items():
                coeffs[_product_term(i, j)] += a
            coeffs[x(j)] -= eq.rhs
            row = LinConstraint(coeffs, "=", 0, ("cmp", eq.id, j))
            if row.coeffs:
                rows.append(row)
    return _model(inst, plan.Q, rows + sides, objective)


def standard_linearize(inst: Instance, pairs: Iterable[Pair] | None = None) -> LinModel:
    """Original equations plus the three McCormick inequalities per product."""
    pairs = sorted(inst.P if pairs is None else pairs)
    squares = [p for p in pairs if p[0] == p[1]]
    if squares:
        raise SquarePairRejected(f"square products {squares} have no McCormick form")
    missing = inst.P - set(pairs)
    if missing:
        raise ValueError(f"pairs must contain every demanded product; missing {sorted(missing)}")
    orig, sides, objective = _common_parts(inst)
    rows = list(orig)
    for i, j in pairs:
        v = y(i, j)
        rows.append(LinConstraint({v: 1, x(i): -1}, "<=", 0, ("mc_ub_i", i, j)))
        rows.append(LinConstraint({v: 1, x(j): -1}, "<=", 0, ("mc_ub_j", i, j)))
        rows.append(LinConstraint({v: 1, x(i): -1, x(j): -1}, ">=", -1, ("mc_lb", i, j)))
    return _model(inst, pairs, rows + sides, objective)
