"""Instance generators: symmetric quadratic TSP, Koopmans-Beckmann QAP, random."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .errors import InconsistentSpec, SizeExceeded
from .model import Instance, LinearEquation, SideConstraint, ordered, validate_instance

# ---------------------------------------------------------------------------
# quadratic TSP


def qtsp_edges(vertex_count: int) -> list[tuple[int, int]]:
    """Edges of the complete graph, lexicographic; edge ``e`` is variable ``e + 1``."""
    return list(itertools.combinations(range(1, vertex_count + 1), 2))


def qtsp_triples(vertex_count: int) -> list[tuple[int, int, int]]:
    """``(i, j, k)`` with middle vertex ``j`` and ``i < k``: a path i-j-k."""
    V = range(1, vertex_count + 1)
    return [(i, j, k) for j in V for i in V for k in V if i < k and j not in (i, k)]


@dataclass(frozen=True)
class QtspSpec:
    vertex_count: int
    costs: Optional[Mapping[tuple[int, int, int], Fraction]] = None
    include_subtours: bool = True
    seed: int = 0


def gen_qtsp(spec: QtspSpec) -> Instance:
    V = spec.vertex_count
    if not 4 <= V <= 8:
        raise SizeExceeded(f"quadratic TSP generator supports 4..8 vertices, got {V}")
    edges = qtsp_edges(V)
    var = {e: idx + 1 for idx, e in enumerate(edges)}
    equations = [
        LinearEquation(f"v{v}", {var[e]: 1 for e in edges if v in e}, 2) for v in range(1, V + 1)
    ]
    if spec.costs is None:
        rng = random.Random(spec.seed)
        costs = {t: Fraction(rng.randint(1, 10)) for t in qtsp_triples(V)}
    else:
        costs = dict(spec.costs)
    d = {}
    for i, j, k in qtsp_triples(V):
        p = ordered(var[ordered(i, j)], var[ordered(j, k)])
        d[p] = d.get(p, Fraction(0)) + Fraction(costs.get((i, j, k), 0))
    P = {ordered(var[ordered(i, j)], var[ordered(j, k)]) for i, j, k in qtsp_triples(V)}
    sides = []
    if spec.include_subtours:
        for size in range(2, V - 1):
            for W in itertools.combinations(range(1, V + 1), size):
                inside = {var[e]: -1 for e in itertools.combinations(W, 2)}
                sides.append(SideConstraint(inside, {}, -(size - 1)))
    return Instance(
        n=len(edges),
        equations=equations,
        P=P,
        d=d,
        sides=sides,
        name=f"qtsp-v{V}-s{spec.seed}",
    )


# ---------------------------------------------------------------------------
# quadratic assignment


@dataclass(frozen=True)
class QapSpec:
    n: int
    flow: Optional[list[list[int]]] = None
    distance: Optional[list[list[int]]] = None
    seed: int = 0


def qap_var(n: int, facility: int, location: int) -> int:
    return (facility - 1) * n + location


def gen_qap(spec: QapSpec) -> Instance:
    """Koopmans-Beckmann QAP: x[i,p] = 1 iff facility i sits at location p."""
    n = spec.n
    if not 2 <= n <= 4:
        raise SizeExceeded(f"QAP generator supports n in 2..4, got {n}")
    rng = random.Random(spec.seed)

    def matrix(given):
        if given is not None:
            return given
        return [[0 if a == b else rng.randint(1, 9) for b in range(n)] for a in range(n)]

    flow, dist = matrix(spec.flow), matrix(spec.distance)
    N = range(1, n + 1)
    equations = [LinearEquation(f"r{i}", {qap_var(n, i, p): 1 for p in N}, 1) for i in N]
    equations += [LinearEquation(f"c{p}", {qap_var(n, i, p): 1 for i in N}, 1) for p in N]
    d = {}
    for i, j in itertools.combinations(N, 2):
        for p in N:
            for q in N:
                if p == q:
                    continue
                w = flow[i - 1][j - 1] * dist[p - 1][q - 1] + flow[j - 1][i - 1] * dist[q - 1][p - 1]
                if w:
                    d[ordered(qap_var(n, i, p), qap_var(n, j, q))] = Fraction(w)
    return Instance(n=n * n, equations=equations, P=set(d), d=d, name=f"qap-n{n}-s{spec.seed}")


# ---------------------------------------------------------------------------
# random


@dataclass(frozen=True)
class RandomSpec:
    n: int = 8
    num_equations: int = 2
    support_size: tuple[int, int] = (2, 4)
    coef_max: int = 3
    num_pairs: int = 3
    disjoint: bool = False
    assignment: bool = False
    fractional: bool = True
    num_sides: int = 0
    seed: int = 0


def _random_coef(rng: random.Random, spec: RandomSpec) -> Fraction:
    a = Fraction(rng.randint(1, spec.coef_max))
    if spec.fractional and rng.random() < 0.3:
        a /= rng.choice((2, 3))
    return a


def gen_random(spec: RandomSpec) -> Instance:
    """Seeded random instance with at least one feasible binary point.

    A hidden binary point is drawn first; each right-hand side is then set
    to the equation's value at that point. In assignment mode every support
    holds exactly one variable set to one, and all coefficients are 1.
    """
    lo, hi = spec.support_size
    if spec.n < 1 or spec.num_equations < 1 or not 1 <= lo <= hi <= spec.n:
        raise InconsistentSpec("need n >= 1, at least one equation and 1 <= support sizes <= n")
    if spec.disjoint and spec.num_equations * lo > spec.n:
        raise InconsistentSpec("disjoint supports do not fit into n variables")
    rng = random.Random(spec.seed)
    pool = list(range(1, spec.n + 1))
    if spec.assignment:
        count = spec.num_equations if spec.disjoint else rng.randint(1, spec.num_equations)
        ones = set(rng.sample(pool, min(count, spec.n)))
        point = [int(i in ones) for i in pool]
    else:
        point = [rng.randint(0, 1) for _ in pool]
    used: set[int] = set()
    supports = []
    for k in range(spec.num_equations):
        free = [i for i in pool if i not in used] if spec.disjoint else pool
        # leave room for the supports still to come
        room = len(free) - (lo * (spec.num_equations - k - 1) if spec.disjoint else 0)
        if spec.assignment:
            # exactly one variable of the support is one at the hidden point
            hot = [i for i in free if point[i - 1]]
            cold = [i for i in free if not point[i - 1]]
            if not hot:
                raise InconsistentSpec("no unused variable left to carry an assignment")
            size = rng.randint(lo, max(lo, min(hi, room)))
            support = [rng.choice(hot)] + rng.sample(cold, min(size - 1, len(cold)))
        else:
            if room < lo:
                raise InconsistentSpec("ran out of variables for disjoint supports")
            support = rng.sample(free, rng.randint(lo, min(hi, room)))
            if not any(point[i - 1] for i in support):
                point[support[0] - 1] = 1
        used.update(support)
        supports.append(sorted(support))
    equations = []
    for k, support in enumerate(supports, start=1):
        if spec.assignment:
            coeffs = {i: Fraction(1) for i in support}
        else:
            coeffs = {i: _random_coef(rng, spec) for i in support}
        rhs = sum(a * point[i - 1] for i, a in coeffs.items())
        equations.append(LinearEquation(str(k), coeffs, rhs))
    covered = sorted(used)
    candidates = [(i, j) for i, j in itertools.combinations(covered, 2)]
    rng.shuffle(candidates)
    P = set(candidates[: spec.num_pairs])
    c = {i: Fraction(rng.randint(-5, 5)) for i in covered}
    d = {p: Fraction(rng.choice([v for v in range(-10, 11) if v])) for p in sorted(P)}
    sides = []
    for _ in range(spec.num_sides):
        xs = {i: Fraction(rng.randint(-3, 3)) for i in rng.sample(covered, min(3, len(covered)))}
        ys = {p: Fraction(rng.randint(-3, 3)) for p in sorted(P) if rng.random() < 0.5}
        side = SideConstraint(xs, ys, 0)
        sides.append(SideConstraint(xs, ys, side.lhs(point)))
    inst = Instance(
        n=spec.n,
        equations=equations,
        P=P,
        c=c,
        d=d,
        sides=sides,
        name=f"random-n{spec.n}-k{spec.num_equations}-s{spec.seed}",
    )
    report = validate_instance(inst)
    if not report.ok:
        raise InconsistentSpec(f"generated instance is invalid: {report.issues}")
    return inst


# ---------------------------------------------------------------------------
# the two worked examples


def example_a() -> Instance:
    """Two disjoint assignment rows ``x1+x2=1``, ``x3+x4=1`` with ``P={(1,3)}``."""
    return Instance(
        n=4,
        equations=[LinearEquation("1", {1: 1, 2: 1}, 1), LinearEquation("2", {3: 1, 4: 1}, 1)],
        P={(1, 3)},
        c={1: Fraction(-2), 3: Fraction(-1)},
        d={(1, 3): Fraction(5)},
        name="exampleA",
    )


def example_b() -> Instance:
    """Single row ``2x1+x2+x3=2`` with ``P={(1,2)}``."""
    return Instance(
        n=3,
        equations=[LinearEquation("1", {1: 2, 2: 1, 3: 1}, 2)],
        P={(1, 2)},
        c={3: Fraction(1)},
        d={(1, 2): Fraction(-1)},
        name="exampleB",
    )
