from fractions import Fraction

import pytest

from compactlin.errors import SizeExceeded
from compactlin.model import (
    Instance,
    LinearEquation,
    SideConstraint,
    as_rational,
    brute_force_feasible,
    validate_instance,
)
from oracles import feasible_points


def codes(inst):
    return [issue.code for issue in validate_instance(inst).issues]


def test_as_rational_is_exact():
    assert as_rational("1/3") == Fraction(1, 3)
    assert as_rational(0.1) == Fraction(1, 10)
    assert as_rational(2) == 2


def test_examples_validate(example_a, example_b):
    assert validate_instance(example_a).ok
    assert validate_instance(example_b).ok


def test_equation_value_and_support():
    eq = LinearEquation("k", {3: 1, 1: 2}, 2)
    assert eq.support == {1, 3}
    assert eq.value([1, 0, 0]) == 2
    assert list(eq.coeffs) == [1, 3]


@pytest.mark.parametrize(
    "inst, code",
    [
        (Instance(2, [LinearEquation("1", {1: 1}, 1), LinearEquation("1", {2: 1}, 1)]), "duplicate-equation-id"),
        (Instance(2, [LinearEquation("1", {}, 1)]), "empty-equation"),
        (Instance(2, [LinearEquation("1", {3: 1}, 1)]), "index-out-of-range"),
        (Instance(2, [LinearEquation("1", {1: 0, 2: 1}, 1)]), "nonpositive-coefficient"),
        (Instance(2, [LinearEquation("1", {1: 1, 2: 1}, 0)]), "nonpositive-rhs"),
        (Instance(2, [LinearEquation("1", {1: 1, 2: 1}, 1)], P={(2, 1)}), "unordered-pair"),
        (Instance(3, [LinearEquation("1", {1: 1, 2: 1}, 1)], P={(1, 3)}), "uncovered-variable"),
        (Instance(2, [LinearEquation("1", {1: 1, 2: 1}, 1)], d={(1, 2): 1}), "objective-pair-not-in-P"),
        (
            Instance(2, [LinearEquation("1", {1: 1, 2: 1}, 1)], sides=[SideConstraint({}, {(1, 2): 1}, 0)]),
            "side-pair-not-in-P",
        ),
    ],
)
def test_validation_codes(inst, code):
    assert code in codes(inst)


def test_brute_force_example_b(example_b):
    assert brute_force_feasible(example_b) == [(0, 1, 1), (1, 0, 0)]


def test_brute_force_example_a(example_a):
    assert len(brute_force_feasible(example_a)) == 4


def test_brute_force_respects_sides():
    inst = Instance(
        3,
        [LinearEquation("1", {1: 1, 2: 1, 3: 1}, 1)],
        P={(1, 2)},
        sides=[SideConstraint({1: -1}, {}, 0)],
    )
    assert brute_force_feasible(inst) == [(0, 0, 1), (0, 1, 0)]


def test_brute_force_cap():
    inst = Instance(30, [LinearEquation("1", {i: 1 for i in range(1, 31)}, 1)])
    with pytest.raises(SizeExceeded):
        brute_force_feasible(inst)


def test_brute_force_matches_enumeration():
    from compactlin import zoo

    for seed in range(15):
        inst = zoo.gen_random(zoo.RandomSpec(n=7, num_equations=2, num_sides=1, seed=seed))
        assert brute_force_feasible(inst) == feasible_points(inst)
