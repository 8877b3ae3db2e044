import random
from fractions import Fraction

import pytest

from xclab.errors import DimensionError
from xclab.lp import (
    LinearSystem,
    LpStatus,
    bounds,
    eq,
    geq,
    leq,
    lp_feasible,
    lp_optimize,
    vertex_enumeration_optimum,
)


def test_empty_interval_is_infeasible():
    system = LinearSystem.build(1, [geq([1], 0), leq([1], -1)])
    result = lp_feasible(system)
    assert result.status is LpStatus.INFEASIBLE
    assert result.witness is None
    assert not result.feasible


def test_unit_interval_is_feasible_at_zero():
    system = LinearSystem.build(1, bounds(1, 0, 0, 1))
    result = lp_feasible(system)
    assert result.feasible
    assert result.witness == (0,)
    assert system.is_satisfied(result.witness)


def test_forced_solution_is_found():
    rows = [eq([1, 0], 1), eq([0, 1], 0)] + bounds(2, 0, 0, 2) + bounds(2, 1, 0, 2)
    result = lp_feasible(LinearSystem.build(2, rows))
    assert result.witness == (1, 0)


def test_no_variables_with_contradictory_constants_is_infeasible():
    system = LinearSystem.build(0, [((), "<=", -1)])
    assert lp_feasible(system).status is LpStatus.INFEASIBLE
    assert lp_feasible(LinearSystem.build(0, [((), "<=", 1)])).feasible


@pytest.mark.parametrize(
    "objective,rows,num_vars,expected",
    [
        ([1], bounds(1, 0, 0, 1), 1, 1),
        ([1, 1], [geq([1, 0], 0), geq([0, 1], 0), leq([1, 1], 1)], 2, 1),
        ([2, -1], bounds(2, 0, "-1/2", "3/4") + bounds(2, 1, 1, 3), 2, Fraction(1, 2)),
    ],
)
def test_lp_optimize_maximum(objective, rows, num_vars, expected):
    system = LinearSystem.build(num_vars, rows)
    result = lp_optimize(objective, system, "max")
    assert result.status is LpStatus.FEASIBLE
    assert result.optimum == expected
    assert system.is_satisfied(result.witness)


def test_lp_optimize_unbounded():
    system = LinearSystem.build(1, [geq([1], 0)])
    assert lp_optimize([1], system, "max").status is LpStatus.UNBOUNDED
    assert lp_optimize([1], system, "min").optimum == 0


def test_lp_optimize_infeasible_is_a_status():
    system = LinearSystem.build(1, [geq([1], 2), leq([1], 1)])
    assert lp_optimize([1], system).status is LpStatus.INFEASIBLE


def test_lp_optimize_validates_objective_length():
    with pytest.raises(DimensionError):
        lp_optimize([1, 1], LinearSystem.build(1, bounds(1, 0, 0, 1)))


def test_nonnegative_declaration_replaces_explicit_rows():
    system = LinearSystem.build(2, [leq([1, 1], 3), eq([1, -1], 1)], nonnegative=[0, 1])
    result = lp_optimize([0, 1], system, "max")
    assert result.optimum == 1
    assert result.witness == (2, 1)
    assert lp_optimize([0, 1], system, "min").optimum == 0


def test_redundant_equations_do_not_break_phase_one():
    rows = [eq([1, 1], 1), eq([2, 2], 2), geq([1, 0], 0), geq([0, 1], 0)]
    result = lp_optimize([1, 0], LinearSystem.build(2, rows), "max")
    assert result.optimum == 1


def test_simplex_is_deterministic():
    rows = [leq([1, 2, 1], 4), leq([3, 0, 1], 5), geq([1, 1, 1], 1)] + bounds(3, 2, 0, 2)
    system = LinearSystem.build(3, rows, nonnegative=[0, 1])
    first = lp_optimize([1, 1, 1], system)
    second = lp_optimize([1, 1, 1], system)
    assert first == second


@pytest.mark.parametrize(
    "objective",
    [(1, 0), (0, 1), (1, 1), (-1, 2), (3, -1), ("1/2", "-2/3")],
)
def test_lp_optimum_matches_vertex_enumeration(objective):
    rows = [
        leq([1, 2], 6),
        leq([3, 1], 9),
        leq([-1, 1], 2),
        geq([1, 0], 0),
        geq([0, 1], "1/2"),
    ]
    system = LinearSystem.build(2, rows)
    for sense in ("max", "min"):
        assert lp_optimize(objective, system, sense).optimum == vertex_enumeration_optimum(objective, system, sense)



def _random_boxed_system(rng):
    num_vars = rng.randint(1, 4)
    rows = []
    for _ in range(rng.randint(1, 6)):
        coeffs = [rng.randint(-3, 3) for _ in range(num_vars)]
        relation = rng.choice(["<=", "<=", ">=", "="])
        rows.append((coeffs, relation, rng.randint(-3, 3)))
    for j in range(num_vars):
        rows.extend(bounds(num_vars, j, -4, 4))
    nonnegative = [j for j in range(num_vars) if rng.random() < 0.25]
    return LinearSystem.build(num_vars, rows, nonnegative=nonnegative)


def test_random_boxed_lps_match_vertex_enumeration():
    rng = random.Random(7)
    outcomes = {status: 0 for status in LpStatus}
    for _ in range(100):
        system = _random_boxed_system(rng)
        objective = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(system.num_vars)]
        sense = rng.choice(["max", "min"])
        result = lp_optimize(objective, system, sense)
        expected = vertex_enumeration_optimum(objective, system, sense)
        outcomes[result.status] += 1
        if expected is None:
            assert result.status is LpStatus.INFEASIBLE
            assert lp_feasible(system).status is LpStatus.INFEASIBLE
            continue
        assert result.status is LpStatus.FEASIBLE
        assert result.optimum == expected
        assert system.is_satisfied(result.witness)
        assert system.is_satisfied(lp_feasible(system).witness)
    assert outcomes[LpStatus.FEASIBLE] > 0
    assert outcomes[LpStatus.INFEASIBLE] > 0

def test_constraint_and_system_checks():
    with pytest.raises(DimensionError):
        LinearSystem.build(2, [leq([1], 1)])
    with pytest.raises(DimensionError):
        LinearSystem.build(1, [], nonnegative=[3])
    system = LinearSystem.build(2, [leq([1, 1], 1)], nonnegative=[0])
    assert system.is_satisfied((0, 1))
    assert not system.is_satisfied((-1, 0))
    assert not system.is_satisfied((0,))
    assert system.without(0).constraints == ()
    assert len(system.extended([geq([0, 1], 0)]).constraints) == 2
