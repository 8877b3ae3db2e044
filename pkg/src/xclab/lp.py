"""Exact rational linear programming.

Two-phase primal simplex over :class:`fractions.Fraction` with Bland's rule,
so every run terminates and identical input yields an identical witness.
Variables are free unless listed in ``LinearSystem.nonnegative``; free
variables are split into ``x+ - x-`` internally. Equations stay equations.

Infeasible and unbounded are ordinary results, never exceptions.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionError, RankError
from .linalg import RatMatrix, Vector, as_vector, dot, solve

logger = logging.getLogger(__name__)


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: Vector
    relation: Relation
    rhs: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", as_vector(self.coeffs))
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def holds(self, point: Sequence[Fraction]) -> bool:
        lhs = dot(self.coeffs, point)
        if self.relation is Relation.LE:
            return lhs <= self.rhs
        if self.relation is Relation.GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LinearSystem:
    num_vars: int
    constraints: tuple[Constraint, ...] = ()
    nonnegative: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "nonnegative", frozenset(self.nonnegative))
        for index, constraint in enumerate(self.constraints):
            if len(constraint.coeffs) != self.num_vars:
                raise DimensionError(
                    f"Constraint {index} has {len(constraint.coeffs)} coefficients, expected {self.num_vars}."
                )
        bad = [j for j in self.nonnegative if not 0 <= j < self.num_vars]
        if bad:
            raise DimensionError(f"Nonnegative variable indices out of range: {sorted(bad)}")

    @classmethod
    def build(
        cls,
        num_vars: int,
        rows: Iterable[tuple[Sequence[object], str | Relation, object]],
        nonnegative: Iterable[int] = (),
    ) -> "LinearSystem":
        return cls(
            num_vars,
            tuple(Constraint(as_vector(coeffs), Relation(relation), Fraction(rhs)) for coeffs, relation, rhs in rows),
            frozenset(nonnegative),
        )

    def extended(self, rows: Iterable[tuple[Sequence[object], str | Relation, object]]) -> "LinearSystem":
        extra = LinearSystem.build(self.num_vars, rows)
        return LinearSystem(self.num_vars, self.constraints + extra.constraints, self.nonnegative)

    def without(self, index: int) -> "LinearSystem":
        kept = self.constraints[:index] + self.constraints[index + 1:]
        return LinearSystem(self.num_vars, kept, self.nonnegative)

    def is_satisfied(self, point: Sequence[object]) -> bool:
        values = as_vector(point)
        if len(values) != self.num_vars:
            return False
        if any(values[j] < 0 for j in self.nonnegative):
            return False
        return all(constraint.holds(values) for constraint in self.constraints)


def unit(num_vars: int, index: int, value: object = 1) -> Vector:
    return tuple(Fraction(value) if j == index else Fraction(0) for j in range(num_vars))


def leq(coeffs: Sequence[object], rhs: object) -> tuple[Vector, Relation, Fraction]:
    return as_vector(coeffs), Relation.LE, Fraction(rhs)


def geq(coeffs: Sequence[object], rhs: object) -> tuple[Vector, Relation, Fraction]:
    return as_vector(coeffs), Relation.GE, Fraction(rhs)


def eq(coeffs: Sequence[object], rhs: object) -> tuple[Vector, Relation, Fraction]:
    return as_vector(coeffs), Relation.EQ, Fraction(rhs)


def bounds(num_vars: int, index: int, lo: object, hi: object) -> list[tuple[Vector, Relation, Fraction]]:
    """Rows ``lo <= x_index <= hi``."""
    return [geq(unit(num_vars, index), lo), leq(unit(num_vars, index), hi)]


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    witness: Vector | None = None
    optimum: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status is LpStatus.FEASIBLE


class _Tableau:
    """Dense simplex tableau kept in canonical form (basic columns are unit vectors)."""

    def __init__(self, system: LinearSystem) -> None:
        self.columns: list[tuple[int, int]] = []
        for var in range(system.num_vars):
            self.columns.append((var, 1))
            if var not in system.nonnegative:
                self.columns.append((var, -1))
        n_struct = len(self.columns)
        slack_of: dict[int, int] = {}
        for index, constraint in enumerate(system.constraints):
            if constraint.relation is not Relation.EQ:
                slack_of[index] = n_struct + len(slack_of)
        self.n_real = n_struct + len(slack_of)

        rows: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        for index, constraint in enumerate(system.constraints):
            row = [constraint.coeffs[var] * sign for var, sign in self.columns]
            row.extend([Fraction(0)] * len(slack_of))
            if constraint.relation is Relation.LE:
                row[slack_of[index]] = Fraction(1)
            elif constraint.relation is Relation.GE:
                row[slack_of[index]] = Fraction(-1)
            value = constraint.rhs
            if value < 0:
                row = [-entry for entry in row]
                value = -value
            rows.append(row)
            rhs.append(value)

        needs_artificial = [
            index for index in range(len(rows))
            if not (index in slack_of and rows[index][slack_of[index]] == 1)
        ]
        self.n_total = self.n_real + len(needs_artificial)
        basis: list[int] = []
        artificial_of = {index: self.n_real + k for k, index in enumerate(needs_artificial)}
        for index, row in enumerate(rows):
            row.extend([Fraction(0)] * len(needs_artificial))
            if index in artificial_of:
                row[artificial_of[index]] = Fraction(1)
                basis.append(artificial_of[index])
            else:
                basis.append(slack_of[index])
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, c: int) -> None:
        pivot_row = self.rows[r]
        pivot_value = pivot_row[c]
        if pivot_value != 1:
            self.rows[r] = pivot_row = [entry / pivot_value for entry in pivot_row]
            self.rhs[r] /= pivot_value
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            factor = row[c]
            if factor == 0:
                continue
            self.rows[i] = [a - factor * b if b else a for a, b in zip(row, pivot_row)]
            self.rhs[i] -= factor * self.rhs[r]
        self.basis[r] = c
        self.pivots += 1

    def minimize(self, cost: Sequence[Fraction], allowed: int) -> str:
        """Minimize ``cost . z`` over the first ``allowed`` columns; return "optimal" or "unbounded"."""
        reduced = list(cost)
        for i, basic in enumerate(self.basis):
            weight = cost[basic]
            if weight:
                reduced = [d - weight * a for d, a in zip(reduced, self.rows[i])]
        while True:
            basic_set = set(self.basis)
            entering = next(
                (j for j in range(allowed) if reduced[j] < 0 and j not in basic_set),
                None,
            )
            if entering is None:
                return "optimal"
            leaving = None
            best: tuple[Fraction, int] | None = None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    key = (self.rhs[i] / row[entering], self.basis[i])
                    if best is None or key < best:
                        best = key
                        leaving = i
            if leaving is None:
                return "unbounded"
            self.pivot(leaving, entering)
            weight = reduced[entering]
            reduced = [d - weight * a if a else d for d, a in zip(reduced, self.rows[leaving])]

    def drive_out_artificials(self) -> None:
        keep: list[int] = []
        for i in range(len(self.rows)):
            if self.basis[i] < self.n_real:
                keep.append(i)
                continue
            column = next((j for j in range(self.n_real) if self.rows[i][j] != 0), None)
            if column is None:
                continue
            self.pivot(i, column)
            keep.append(i)
        self.rows = [self.rows[i][:self.n_real] for i in keep]
        self.rhs = [self.rhs[i] for i in keep]
        self.basis = [self.basis[i] for i in keep]
        self.n_total = self.n_real

    def point(self, num_vars: int) -> Vector:
        values = [Fraction(0)] * self.n_total
        for i, basic in enumerate(self.basis):
            values[basic] = self.rhs[i]
        result = [Fraction(0)] * num_vars
        for col, (var, sign) in enumerate(self.columns):
            result[var] += sign * values[col]
        return tuple(result)


def _phase_one(system: LinearSystem) -> _Tableau | None:
    tableau = _Tableau(system)
    if tableau.n_total > tableau.n_real:
        cost = [Fraction(0)] * tableau.n_real + [Fraction(1)] * (tableau.n_total - tableau.n_real)
        tableau.minimize(cost, tableau.n_total)
        infeasibility = sum(
            (tableau.rhs[i] for i, basic in enumerate(tableau.basis) if basic >= tableau.n_real),
            Fraction(0),
        )
        if infeasibility > 0:
            logger.debug("phase one: infeasible after %d pivots", tableau.pivots)
            return None
        tableau.drive_out_artificials()
    return tableau


def lp_feasible(system: LinearSystem) -> LpResult:
    tableau = _phase_one(system)
    if tableau is None:
        return LpResult(LpStatus.INFEASIBLE)
    return LpResult(LpStatus.FEASIBLE, witness=tableau.point(system.num_vars))


def lp_optimize(objective: Sequence[object], system: LinearSystem, sense: str = "max") -> LpResult:
    goal = as_vector(objective)
    if len(goal) != system.num_vars:
        raise DimensionError(f"Objective has {len(goal)} entries, expected {system.num_vars}.")
    if sense not in {"max", "min"}:
        raise ValueError(f"Unknown optimization sense: {sense}")
    tableau = _phase_one(system)
    if tableau is None:
        return LpResult(LpStatus.INFEASIBLE)
    direction = -1 if sense == "max" else 1
    cost = [direction * goal[var] * sign for var, sign in tableau.columns]
    cost.extend([Fraction(0)] * (tableau.n_real - len(cost)))
    outcome = tableau.minimize(cost, tableau.n_real)
    logger.debug("lp_optimize: %s after %d pivots", outcome, tableau.pivots)
    if outcome == "unbounded":
        return LpResult(LpStatus.UNBOUNDED)
    witness = tableau.point(system.num_vars)
    return LpResult(LpStatus.FEASIBLE, witness=witness, optimum=dot(goal, witness))


def vertex_enumeration_optimum(objective: Sequence[object], system: LinearSystem, sense: str = "max") -> Fraction | None:
    """Brute-force optimum over basic solutions; a test oracle for bounded, pointed LPs."""
    goal = as_vector(objective)
    n = system.num_vars
    hyperplanes = [(constraint.coeffs, constraint.rhs) for constraint in system.constraints]
    hyperplanes.extend((tuple(Fraction(int(i == j)) for i in range(n)), Fraction(0)) for j in sorted(system.nonnegative))
    best: Fraction | None = None
    for subset in itertools.combinations(hyperplanes, n):
        matrix = RatMatrix.from_rows((coeffs for coeffs, _ in subset), cols=n) if n else RatMatrix.zeros(0, 0)
        try:
            point = solve(matrix, [rhs for _, rhs in subset])
        except RankError:
            continue
        if not system.is_satisfied(point):
            continue
        value = dot(goal, point)
        if best is None or (value > best if sense == "max" else value < best):
            best = value
    return best
