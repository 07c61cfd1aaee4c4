import itertools
from fractions import Fraction

import pytest

from compactlin import zoo
from compactlin.errors import InconsistentSpec, SizeExceeded
from compactlin.model import brute_force_feasible, validate_instance
from oracles import quadratic_value


def tours(V):
    """Hamiltonian cycles as vertex sequences starting at 1, one per direction pair."""
    for rest in itertools.permutations(range(2, V + 1)):
        if rest[0] < rest[-1]:
            yield (1, *rest)


def tour_cost(tour, costs):
    V = len(tour)
    total = 0
    for pos in range(V):
        i, j, k = tour[pos - 1], tour[pos], tour[(pos + 1) % V]
        total += costs[(min(i, k), j, max(i, k))]
    return total


def tour_point(tour, V):
    edges = zoo.qtsp_edges(V)
    used = {tuple(sorted((tour[p], tour[(p + 1) % V]))) for p in range(V)}
    return tuple(int(e in used) for e in edges)


@pytest.mark.parametrize("V", [4, 5, 6])
def test_qtsp_points_are_hamiltonian_cycles(V):
    inst = zoo.gen_qtsp(zoo.QtspSpec(V, seed=3))
    assert validate_instance(inst).ok
    want = sorted(tour_point(t, V) for t in tours(V))
    assert brute_force_feasible(inst) == want


@pytest.mark.parametrize("V", [4, 5])
def test_qtsp_objective_is_tour_cost(V):
    import random

    rng = random.Random(3)
    costs = {t: rng.randint(1, 10) for t in zoo.qtsp_triples(V)}
    inst = zoo.gen_qtsp(zoo.QtspSpec(V, costs=costs))
    for t in tours(V):
        assert quadratic_value(inst, tour_point(t, V)) == tour_cost(t, costs)


def test_qtsp_counts():
    inst = zoo.gen_qtsp(zoo.QtspSpec(5))
    assert inst.n == 10 and len(inst.equations) == 5 and len(inst.P) == 30
    assert all(eq.rhs == 2 and len(eq.coeffs) == 4 for eq in inst.equations)


def test_qtsp_size_limits():
    with pytest.raises(SizeExceeded):
        zoo.gen_qtsp(zoo.QtspSpec(3))


@pytest.mark.parametrize("n", [2, 3])
def test_qap_objective_is_assignment_cost(n):
    inst = zoo.gen_qap(zoo.QapSpec(n, seed=5))
    points = brute_force_feasible(inst)
    assert len(points) == len(list(itertools.permutations(range(n))))
    import random

    rng = random.Random(5)
    flow = [[0 if a == b else rng.randint(1, 9) for b in range(n)] for a in range(n)]
    dist = [[0 if a == b else rng.randint(1, 9) for b in range(n)] for a in range(n)]
    for perm in itertools.permutations(range(n)):
        point = [0] * (n * n)
        for i, p in enumerate(perm):
            point[zoo.qap_var(n, i + 1, p + 1) - 1] = 1
        cost = sum(flow[i][j] * dist[perm[i]][perm[j]] for i in range(n) for j in range(n))
        assert quadratic_value(inst, point) == cost


def test_qap_size_limits():
    with pytest.raises(SizeExceeded):
        zoo.gen_qap(zoo.QapSpec(5))


@pytest.mark.parametrize("seed", range(20))
def test_random_is_feasible_and_valid(seed):
    spec = zoo.RandomSpec(n=6 + seed % 8, num_equations=1 + seed % 4, num_sides=seed % 2, seed=seed)
    inst = zoo.gen_random(spec)
    assert validate_instance(inst).ok
    assert brute_force_feasible(inst)


@pytest.mark.parametrize("seed", range(10))
def test_random_assignment_mode(seed):
    inst = zoo.gen_random(zoo.RandomSpec(n=10, num_equations=3, assignment=True, seed=seed))
    assert all(eq.rhs == 1 and set(eq.coeffs.values()) == {Fraction(1)} for eq in inst.equations)
    assert brute_force_feasible(inst)


def test_random_disjoint_mode():
    inst = zoo.gen_random(zoo.RandomSpec(n=9, num_equations=3, disjoint=True, seed=1))
    assert inst.disjoint


def test_random_is_seeded():
    spec = zoo.RandomSpec(seed=42)
    assert zoo.gen_random(spec) == zoo.gen_random(spec)


def test_random_inconsistent_spec():
    with pytest.raises(InconsistentSpec):
        zoo.gen_random(zoo.RandomSpec(n=4, num_equations=3, disjoint=True, support_size=(2, 2)))
