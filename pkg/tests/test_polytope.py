import random

import pytest

from xclab.errors import ConsistencyError, DimensionError, DomainError
from xclab.polytope import (
    HPolytope,
    VertexSet,
    affine_hull,
    cube_points,
    delta_int,
    hull,
    is_non_redundant,
    same_solution_set,
    slack_matrix,
)

SEGMENT = VertexSet(1, ((0,), (1,)))
TRIANGLE = VertexSet(2, ((0, 0), (1, 0), (0, 1)))
POINT = VertexSet(2, ((1, 1),))


@pytest.mark.parametrize("n,expected", [(1, 2), (2, 6), (3, 16), (4, 56), (5, 216)])
def test_delta_int(n, expected):
    assert delta_int(n) == expected


def test_delta_int_rejects_zero_dimension():
    with pytest.raises(DomainError):
        delta_int(0)


class TestVertexSet:
    def test_vertices_are_sorted(self):
        assert TRIANGLE.vertices == ((0, 0), (0, 1), (1, 0))

    def test_rejects_empty_duplicate_and_non_binary_sets(self):
        with pytest.raises(DomainError):
            VertexSet(2, ())
        with pytest.raises(DomainError):
            VertexSet(1, ((1,), (1,)))
        with pytest.raises(DomainError):
            VertexSet(1, ((2,),))
        with pytest.raises(DimensionError):
            VertexSet(2, ((1,),))

    def test_mask_round_trips_through_cube_order(self):
        for mask in range(1, 16):
            assert VertexSet.from_mask(2, mask).mask() == mask
        assert VertexSet.from_mask(2, 0b0111) == TRIANGLE

    def test_complement_and_membership(self):
        assert TRIANGLE.complement() == [(1, 1)]
        assert (0, 1) in TRIANGLE
        assert (1, 1) not in TRIANGLE


def test_hull_of_segment():
    P = hull(SEGMENT)
    assert P.A == ((1,), (-1,))
    assert P.b == (1, 0)
    assert P.delta == 2


def test_hull_of_triangle():
    P = hull(TRIANGLE)
    assert set(zip(P.A, P.b)) == {((1, 1), 1), ((-1, 0), 0), ((0, -1), 0)}
    assert P.A[0] == (1, 1)


def test_hull_of_point_is_equation_pairs():
    P = hull(POINT)
    assert list(zip(P.A, P.b)) == [((1, 0), 1), ((-1, 0), -1), ((0, 1), 1), ((0, -1), -1)]
    assert P.equation_partner(0) == 1
    assert P.equation_partner(3) == 2


def test_hull_of_cube_has_its_six_facets():
    P = hull(VertexSet(3, tuple(cube_points(3))))
    assert P.f == 6
    assert all(value in (-1, 0, 1) for row in P.A for value in row)


def test_hull_of_lower_dimensional_set_mixes_facets_and_equations():
    X = VertexSet(3, ((0, 0, 1), (1, 0, 0), (0, 1, 0)))
    free, equations = affine_hull(X)
    assert len(free) == 2
    assert equations == [((1, 1, 1), 1)]
    P = hull(X)
    assert P.f == 3 + 2
    for vertex in X:
        assert P.contains(vertex)
    assert not P.contains((0, 0, 0))
    assert not P.contains((1, 1, 0))


def test_hull_is_deterministic():
    X = VertexSet.from_mask(3, 0b10110110)
    assert hull(X) == hull(X)


def test_hull_contains_exactly_the_vertex_set_for_every_two_dimensional_set():
    for mask in range(1, 16):
        X = VertexSet.from_mask(2, mask)
        P = hull(X)
        assert P.max_abs() <= P.delta
        inside = [point for point in cube_points(2) if P.contains(point)]
        assert inside == list(X.vertices)


def test_hull_rows_are_non_redundant_for_every_three_dimensional_sample():
    for mask in (0b1, 0b11, 0b10010110, 0b01111111, 0b11111111, 0b00010111):
        P = hull(VertexSet.from_mask(3, mask))
        certificates = is_non_redundant(P)
        assert [cert.row for cert in certificates] == list(range(P.f))
        assert all(cert.ok for cert in certificates)


def test_is_non_redundant_flags_a_duplicated_row():
    P = HPolytope(1, ((1,), (-1,), (2,)), (1, 0, 2), 2)
    certificates = is_non_redundant(P)
    assert [cert.ok for cert in certificates] == [False, True, False]
    assert certificates[0].lp_max == 1


class TestSlackMatrix:
    def test_segment(self):
        S = slack_matrix(hull(SEGMENT), SEGMENT)
        assert S.S.to_lists() == [[1, 0], [0, 1]]

    def test_triangle_is_identity(self):
        S = slack_matrix(hull(TRIANGLE), TRIANGLE)
        assert S.S.to_lists() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_point_is_zero_column(self):
        S = slack_matrix(hull(POINT), POINT)
        assert (S.f, S.v) == (4, 1)
        assert S.S.to_lists() == [[0], [0], [0], [0]]

    def test_violated_row_is_a_consistency_error(self):
        P = HPolytope(1, ((1,),), (0,), 2)
        with pytest.raises(ConsistencyError):
            slack_matrix(P, SEGMENT)

    def test_entries_are_nonnegative_integers(self):
        for mask in range(1, 256, 5):
            X = VertexSet.from_mask(3, mask)
            S = slack_matrix(hull(X), X)
            assert S.S.is_nonnegative()
            assert S.S.is_integral()


def test_violation_is_positive_outside():
    P = hull(TRIANGLE)
    assert P.violation((1, 1)) == 1
    assert P.violation((0, 0)) == 0


def test_same_solution_set_ignores_row_order_and_scaling():
    P = hull(TRIANGLE)
    Q = HPolytope(2, ((0, -2), (2, 2), (-1, 0)), (0, 2, 0), 6)
    assert same_solution_set(P, Q)
    R = HPolytope(2, ((1, 1), (-1, 0), (0, -1)), (2, 0, 0), 6)
    assert not same_solution_set(P, R)


def test_cube_points_are_lexicographic():
    assert cube_points(2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(cube_points(3)) == 8


@pytest.fixture(scope="module")
def three_dimensional_hulls():
    return {mask: hull(VertexSet.from_mask(3, mask)) for mask in range(1, 256)}


def test_every_outside_point_violates_by_at_least_one(three_dimensional_hulls):
    for mask, P in three_dimensional_hulls.items():
        X = VertexSet.from_mask(3, mask)
        assert all(P.violation(vertex) <= 0 for vertex in X.vertices)
        assert all(P.violation(point) >= 1 for point in X.complement()), mask


def test_coefficients_stay_within_delta_at_dimension_three(three_dimensional_hulls):
    bound = delta_int(3)
    for P in three_dimensional_hulls.values():
        assert P.max_abs() <= bound
        assert all(abs(value) <= bound for value in P.b)


def test_every_three_dimensional_hull_is_non_redundant(three_dimensional_hulls):
    for mask, P in three_dimensional_hulls.items():
        assert all(cert.ok for cert in is_non_redundant(P)), mask


def test_coefficients_stay_within_delta_at_dimension_four():
    rng = random.Random(4)
    masks = [rng.randrange(1, 1 << 16) for _ in range(12)] + [(1 << 16) - 1, 0b1000000000010111]
    for mask in masks:
        X = VertexSet.from_mask(4, mask)
        P = hull(X)
        assert P.max_abs() <= delta_int(4)
        assert all(P.violation(point) >= 1 for point in X.complement())


@pytest.mark.parametrize("n", [2, 3])
def test_hull_agrees_with_cdd(n, cdd_hull):
    for mask in range(1, 1 << (1 << n), 1 if n == 2 else 7):
        X = VertexSet.from_mask(n, mask)
        assert same_solution_set(hull(X), cdd_hull(X)), mask
