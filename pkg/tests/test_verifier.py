from fractions import Fraction

import pytest

from compactlin import verifier, zoo
from compactlin.coverage import closure_disjoint, make_coverage, plan_cost, solve_selection, support_plan
from compactlin.errors import RegimeMismatch
from compactlin.linearizer import compact_linearize
from compactlin.linmodel import LinModel, relax, x, y
from compactlin.model import brute_force_feasible
from compactlin.optcore import LpSession
from compactlin.verifier import (
    ASSIGNMENT,
    DEGREE_TWO,
    GENERAL,
    Witness,
    compare_bounds,
    detect_regime,
    structural_match,
    verify_dominance,
    verify_theorem1,
    witness_sound,
)


def test_theorem1_example_a(example_a):
    report = verify_theorem1(example_a, closure_disjoint(example_a))
    assert report.passed and report.points_checked == 4
    assert all(v <= 0 for v in report.per_pair_max.values())


def test_theorem1_example_b_fixes_y12(example_b):
    plan = closure_disjoint(example_b)
    assert verify_theorem1(example_b, plan).passed
    model = relax(compact_linearize(example_b, plan))
    for point in brute_force_feasible(example_b):
        fixed = {x(i): (point[i - 1],) * 2 for i in example_b.variables}
        session = LpSession(model.with_bounds(fixed))
        assert session.maximize({y(1, 2): 1}) == 0
        assert session.maximize({y(1, 2): -1}) == 0


def test_theorem1_detects_missing_rows(example_a, monkeypatch):
    """Negative control: without the compact rows the products float freely."""
    real = verifier.compact_linearize

    def weakened(inst, plan):
        model = real(inst, plan)
        keep = [c for c in model.constraints if c.provenance[0] != "cmp"]
        return LinModel(model.vars, keep, model.objective, model.bounds, model.integer)

    monkeypatch.setattr(verifier, "compact_linearize", weakened)
    assert not verify_theorem1(example_a, closure_disjoint(example_a)).passed


@pytest.mark.parametrize("seed", range(10))
def test_theorem1_random(seed):
    inst = zoo.gen_random(zoo.RandomSpec(n=8, num_equations=2 + seed % 2, num_pairs=3, seed=seed))
    assert verify_theorem1(inst, make_coverage(inst)).passed


def test_dominance_example_a(example_a):
    report = verify_dominance(example_a, closure_disjoint(example_a), ASSIGNMENT)
    assert report.passed and report.witness is None
    assert report.per_pair_max[(1, 3), "mc_ub_i"] == 0


def test_regime_mismatch(example_b):
    plan = closure_disjoint(example_b)
    with pytest.raises(RegimeMismatch):
        verify_dominance(example_b, plan, ASSIGNMENT)
    with pytest.raises(RegimeMismatch):
        verify_dominance(example_b, plan, DEGREE_TWO)


def test_degree_two_needs_support_plan():
    inst = zoo.gen_qtsp(zoo.QtspSpec(4, seed=1))
    plan = solve_selection(inst).plan
    if plan != support_plan(inst):
        with pytest.raises(RegimeMismatch):
            verify_dominance(inst, plan, DEGREE_TWO)
    assert verify_dominance(inst, support_plan(inst), DEGREE_TWO).passed


def test_detect_regime(example_a, example_b):
    assert detect_regime(example_a, closure_disjoint(example_a)) == ASSIGNMENT
    assert detect_regime(example_b, closure_disjoint(example_b)) == GENERAL
    inst = zoo.gen_qtsp(zoo.QtspSpec(4))
    assert detect_regime(inst, support_plan(inst)) == DEGREE_TWO


def test_general_probe_example_b(example_b):
    report = verify_dominance(example_b, closure_disjoint(example_b), GENERAL)
    assert report.passed and not report.witnesses


def general_instances():
    for seed in range(40):
        yield zoo.gen_random(zoo.RandomSpec(n=7, num_equations=2, coef_max=4, num_pairs=3, seed=seed))


def test_general_witnesses_are_sound():
    found = 0
    for inst in general_instances():
        plan = make_coverage(inst)
        report = verify_dominance(inst, plan, GENERAL)
        model = relax(compact_linearize(inst, plan))
        for w in report.witnesses:
            assert w.violation > 0 and witness_sound(model, w)
            found += 1
        if found >= 3:
            break
    assert found, "expected at least one fractional witness among the probes"


def test_tampered_witness_rejected():
    for inst in general_instances():
        plan = make_coverage(inst)
        report = verify_dominance(inst, plan, GENERAL)
        if report.witness:
            model = relax(compact_linearize(inst, plan))
            w = report.witness
            assert not witness_sound(model, Witness(w.pair, w.kind, w.violation + 1, w.point))
            bent = dict(w.point)
            bent[x(w.pair[0])] += Fraction(1, 7)
            assert not witness_sound(model, Witness(w.pair, w.kind, w.violation, bent))
            return
    pytest.fail("no witness found")


def test_compare_bounds(example_a):
    res = compare_bounds(example_a, closure_disjoint(example_a))
    assert res.regime == ASSIGNMENT and res.delta >= 0


@pytest.mark.parametrize("n", [2, 3])
def test_qap_dominance(n):
    inst = zoo.gen_qap(zoo.QapSpec(n, seed=1))
    plan = make_coverage(inst)
    assert verify_dominance(inst, plan, ASSIGNMENT).passed
    assert compare_bounds(inst, plan).delta >= 0


@pytest.mark.parametrize("V", [4, 5])
def test_qtsp_structure(V):
    res = structural_match("qtsp", V)
    assert res.match and res.compact_rows == V * (V - 1)


def test_qtsp5_counts():
    res = structural_match("qtsp", 5)
    assert (res.compact_rows, res.product_vars, res.standard_inequalities) == (20, 30, 90)


@pytest.mark.parametrize("n", [2, 3])
def test_qap_structure(n):
    assert structural_match("qap", n).match


def test_minimal_qap_rows_are_reference_rows():
    inst = zoo.gen_qap(zoo.QapSpec(3))
    model = compact_linearize(inst, solve_selection(inst).plan)
    n = 3

    def names(v):
        cell = lambda idx: ((idx - 1) // n + 1, (idx - 1) % n + 1)
        if v.kind == "x":
            return ("x", cell(v.id))
        return ("y", tuple(sorted((cell(v.id[0]), cell(v.id[1])))))

    got = {
        verifier._canonical([(names(v), a) for v, a in r.coeffs.items()], r.sense, r.rhs)
        for r in model.by_kind("cmp")
    }
    assert got and got < verifier.frieze_yadegar_rows(3)


def test_k4_selection_optimum_is_not_the_reference():
    """On K4 the selection objective prefers other multipliers, so its rows differ."""
    inst = zoo.gen_qtsp(zoo.QtspSpec(4, include_subtours=False))
    res = solve_selection(inst)
    assert res.plan != support_plan(inst)
    assert res.objective < plan_cost(inst, support_plan(inst))


def test_unknown_reference():
    with pytest.raises(ValueError):
        structural_match("knapsack", 3)
