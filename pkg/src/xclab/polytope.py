"""0/1 vertex sets, their exact integer hull descriptions and slack matrices.

``hull`` works in the affine hull of X: it picks the leftmost set of free
coordinates, enumerates facets of the projected full-dimensional polytope
from cofactor normals, lifts them back, and appends every affine-hull
equation as a ``(+row, -row)`` inequality pair.

Row order is canonical: facet rows sorted descending by ``(b_i, A_i)``,
then equation pairs ordered by their dependent coordinate.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, Sequence

from .errors import ConsistencyError, DimensionError, DomainError
from .linalg import RatMatrix, det, rref
from .lp import LinearSystem, LpStatus, lp_optimize

logger = logging.getLogger(__name__)

Point = tuple[int, ...]


def delta_int(n: int) -> int:
    """Smallest integer >= (n+1)^((n+1)/2), the integral stand-in for the facet bound."""
    if n < 1:
        raise DomainError(f"Dimension must be at least 1, got {n}.")
    square = (n + 1) ** (n + 1)
    root = math.isqrt(square)
    return root if root * root == square else root + 1


def cube_points(n: int) -> list[Point]:
    return [tuple(bits) for bits in itertools.product((0, 1), repeat=n)]


@dataclass(frozen=True)
class VertexSet:
    n: int
    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"Dimension must be at least 1, got {self.n}.")
        points = [tuple(int(value) for value in vertex) for vertex in self.vertices]
        if not points:
            raise DomainError("A vertex set must be nonempty.")
        for point in points:
            if len(point) != self.n:
                raise DimensionError(f"Vertex {point} does not have dimension {self.n}.")
            if any(value not in (0, 1) for value in point):
                raise DomainError(f"Vertex {point} is not a 0/1 vector.")
        ordered = tuple(sorted(set(points)))
        if len(ordered) != len(points):
            raise DomainError("Vertex set contains duplicate vertices.")
        object.__setattr__(self, "vertices", ordered)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "VertexSet":
        """Subset of the lexicographically ordered cube selected by the bits of ``mask``."""
        points = cube_points(n)
        return cls(n, tuple(point for index, point in enumerate(points) if mask >> index & 1))

    def mask(self) -> int:
        index = {point: position for position, point in enumerate(cube_points(self.n))}
        return sum(1 << index[vertex] for vertex in self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.vertices)

    def __contains__(self, point: object) -> bool:
        return tuple(point) in set(self.vertices)  # type: ignore[arg-type]

    def complement(self) -> list[Point]:
        members = set(self.vertices)
        return [point for point in cube_points(self.n) if point not in members]


@dataclass(frozen=True)
class HPolytope:
    n: int
    A: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]
    delta: int

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(value) for value in row) for row in self.A)
        rhs = tuple(int(value) for value in self.b)
        if len(rows) != len(rhs):
            raise DimensionError(f"A has {len(rows)} rows but b has {len(rhs)} entries.")
        for index, row in enumerate(rows):
            if len(row) != self.n:
                raise DimensionError(f"Row {index} has {len(row)} entries, expected {self.n}.")
        object.__setattr__(self, "A", rows)
        object.__setattr__(self, "b", rhs)

    @property
    def f(self) -> int:
        return len(self.A)

    def matrix(self) -> RatMatrix:
        return RatMatrix.from_rows(self.A, cols=self.n)

    def system(self) -> LinearSystem:
        return LinearSystem.build(self.n, ((row, "<=", rhs) for row, rhs in zip(self.A, self.b)))

    def max_abs(self) -> int:
        return max((abs(value) for row in self.A for value in row), default=0)

    def violation(self, point: Sequence[object]) -> Fraction:
        """Largest ``A_i x - b_i``; positive iff the point lies outside."""
        values = [Fraction(value) for value in point]
        return max(
            sum((a * x for a, x in zip(row, values)), Fraction(0)) - rhs
            for row, rhs in zip(self.A, self.b)
        )

    def contains(self, point: Sequence[object]) -> bool:
        return self.violation(point) <= 0

    def equation_partner(self, index: int) -> int | None:
        """Index of the opposite half when row ``index`` belongs to an equation pair."""
        target = (tuple(-value for value in self.A[index]), -self.b[index])
        for other, (row, rhs) in enumerate(zip(self.A, self.b)):
            if other != index and (row, rhs) == target:
                return other
        return None


@dataclass(frozen=True)
class SlackMatrix:
    S: RatMatrix

    @property
    def f(self) -> int:
        return self.S.rows

    @property
    def v(self) -> int:
        return self.S.cols


@dataclass(frozen=True)
class RedundancyCertificate:
    row: int
    kind: str
    lp_max: Fraction | None
    ok: bool


def _gcd_reduce(coeffs: Sequence[int], rhs: int) -> tuple[tuple[int, ...], int]:
    divisor = reduce(math.gcd, (abs(value) for value in coeffs), abs(rhs))
    if divisor > 1:
        return tuple(value // divisor for value in coeffs), rhs // divisor
    return tuple(coeffs), rhs


def _integerize(values: Sequence[Fraction]) -> list[int]:
    scale = reduce(lambda acc, value: acc * value.denominator // math.gcd(acc, value.denominator), values, 1)
    return [int(value * scale) for value in values]


def affine_hull(X: VertexSet) -> tuple[tuple[int, ...], list[tuple[tuple[int, ...], int]]]:
    """Free coordinates and integer equations ``a x = beta`` of aff(X).

    Each equation expresses one dependent coordinate in terms of the free ones,
    with a positive coefficient on the dependent coordinate.
    """
    base = X.vertices[0]
    diffs = [[Fraction(v - p) for v, p in zip(vertex, base)] for vertex in X.vertices[1:]]
    reduced, pivots = rref(diffs, X.n)
    equations: list[tuple[tuple[int, ...], int]] = []
    for coord in range(X.n):
        if coord in pivots:
            continue
        coeffs = [Fraction(0)] * X.n
        coeffs[coord] = Fraction(1)
        for position, pivot in enumerate(pivots):
            coeffs[pivot] = -reduced[position][coord]
        rhs = sum((c * p for c, p in zip(coeffs, base)), Fraction(0))
        integral = _integerize(coeffs + [rhs])
        equations.append(_gcd_reduce(integral[:-1], integral[-1]))
    return tuple(pivots), equations


def _cofactor_normal(subset: Sequence[Point]) -> tuple[int, ...]:
    """Integer normal of the hyperplane through ``d`` points of ``R^d``."""
    base = subset[0]
    dim = len(base)
    diffs = [[q - p for q, p in zip(point, base)] for point in subset[1:]]
    normal = []
    for col in range(dim):
        minor = RatMatrix.from_rows(([row[j] for j in range(dim) if j != col] for row in diffs), cols=dim - 1)
        sign = -1 if col % 2 else 1
        normal.append(int(sign * det(minor)))
    return tuple(normal)


def _projected_facets(points: Sequence[Point]) -> list[tuple[tuple[int, ...], int]]:
    dim = len(points[0])
    facets: set[tuple[tuple[int, ...], int]] = set()
    for subset in itertools.combinations(points, dim):
        normal = _cofactor_normal(subset)
        if not any(normal):
            continue
        beta = sum(a * x for a, x in zip(normal, subset[0]))
        values = [sum(a * x for a, x in zip(normal, point)) for point in points]
        if all(value <= beta for value in values):
            facets.add(_gcd_reduce(normal, beta))
        elif all(value >= beta for value in values):
            facets.add(_gcd_reduce(tuple(-a for a in normal), -beta))
    return list(facets)


def hull(X: VertexSet) -> HPolytope:
    """Integer non-redundant system for conv(X).

    Facet rows come sorted descending by ``(b_i, A_i)`` rather than ascending by
    ``(A_i, b_i)``; with lexicographically ordered vertices this order is what
    makes the slack matrices of the segment and the triangle come out as identities.
    """
    free, equations = affine_hull(X)
    rows: list[tuple[tuple[int, ...], int]] = []
    if free:
        projected = sorted({tuple(vertex[j] for j in free) for vertex in X.vertices})
        for normal, beta in _projected_facets(projected):
            lifted = [0] * X.n
            for position, coord in enumerate(free):
                lifted[coord] = normal[position]
            rows.append((tuple(lifted), beta))
    rows.sort(key=lambda item: (item[1], item[0]), reverse=True)
    for coeffs, rhs in equations:
        rows.append((coeffs, rhs))
        rows.append((tuple(-value for value in coeffs), -rhs))

    delta = delta_int(X.n)
    polytope = HPolytope(X.n, tuple(row for row, _ in rows), tuple(rhs for _, rhs in rows), delta)
    bound = max([polytope.max_abs()] + [abs(value) for value in polytope.b])
    if bound > delta:
        raise ConsistencyError(f"Hull coefficient {bound} exceeds the bound {delta} at n={X.n}.")
    logger.debug("hull: n=%d |X|=%d dim=%d facets=%d", X.n, len(X), len(free), polytope.f)
    return polytope


def slack_matrix(P: HPolytope, X: VertexSet) -> SlackMatrix:
    if P.n != X.n:
        raise DimensionError(f"Polytope dimension {P.n} differs from vertex dimension {X.n}.")
    rows = []
    for i, (row, rhs) in enumerate(zip(P.A, P.b)):
        slacks = [rhs - sum(a * x for a, x in zip(row, vertex)) for vertex in X.vertices]
        negative = next((j for j, value in enumerate(slacks) if value < 0), None)
        if negative is not None:
            raise ConsistencyError(f"Vertex {X.vertices[negative]} violates row {i} of the system.")
        rows.append(slacks)
    return SlackMatrix(RatMatrix.from_rows(rows, cols=len(X)))


def is_non_redundant(P: HPolytope) -> list[RedundancyCertificate]:
    """Per-row LP certificate: dropping row i must let ``A_i x`` exceed ``b_i``."""
    system = P.system()
    certificates = []
    for i in range(P.f):
        kind = "equation" if P.equation_partner(i) is not None else "facet"
        result = lp_optimize(P.A[i], system.without(i), "max")
        if result.status is LpStatus.UNBOUNDED:
            certificates.append(RedundancyCertificate(i, kind, None, True))
        else:
            value = result.optimum
            certificates.append(RedundancyCertificate(i, kind, value, value is not None and value > P.b[i]))
    return certificates


def same_solution_set(P: HPolytope, Q: HPolytope) -> bool:
    """Mutual containment: every row of each system is valid over the other."""
    for first, second in ((P, Q), (Q, P)):
        system = second.system()
        for row, rhs in zip(first.A, first.b):
            result = lp_optimize(row, system, "max")
            if result.status is not LpStatus.FEASIBLE or result.optimum is None or result.optimum > rhs:
                return False
    return True
