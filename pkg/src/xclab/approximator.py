"""Compact approximate extensions with LP-certified containment.

The same row selection as the discretizer, on a grid fine enough that the
projection of ``Q = {(x, y) : Bx + Cy <= d}`` lies between ``conv(X)`` and its
epsilon-neighbourhood. Q has ``2(n + r)`` band rows followed by ``2r`` box rows.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .certificates import CertificateReport
from .errors import ConsistencyError, DimensionError, DomainError
from .factorization import Factorization
from .discretizer import prepare, rounded_rows
from .linalg import RatMatrix, Vector, as_vector, dot
from .lp import LinearSystem, LpStatus, lp_optimize
from .polytope import HPolytope, VertexSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ApproxExtension:
    n: int
    r: int
    delta: int
    epsilon: Fraction
    delta_small: Fraction
    grid: Fraction
    tol: Fraction
    B: RatMatrix
    C: RatMatrix
    d: Vector
    polytope: HPolytope
    factorization: Factorization

    @property
    def rows(self) -> int:
        return self.B.rows

    def system(self) -> LinearSystem:
        rows = ((self.B.row(i) + self.C.row(i), "<=", self.d[i]) for i in range(self.B.rows))
        return LinearSystem.build(self.n + self.r, rows)


def compute_delta(n: int, delta: int, epsilon: object) -> Fraction:
    eps = Fraction(epsilon)
    if eps <= 0:
        raise DomainError(f"epsilon must be positive, got {eps}.")
    if n < 1:
        raise DomainError(f"Dimension must be at least 1, got {n}.")
    base = n * delta
    return min(Fraction(1, 2 * base ** (2 * n + 2)), eps / (n * base ** n))


def build_approx(
    X: VertexSet,
    F: Factorization | None = None,
    epsilon: object = Fraction(1, 2),
    delta_override: object | None = None,
) -> ApproxExtension:
    eps = Fraction(epsilon)
    pipeline = prepare(X, F)
    n, r, delta = X.n, pipeline.factorization.r, pipeline.polytope.delta
    small = compute_delta(n, delta, eps)
    if delta_override is not None:
        override = Fraction(delta_override)
        if not 0 < override <= small:
            raise DomainError(f"delta override {override} must lie in (0, {small}].")
        small = override
    grid = small / (4 * r * (n + r) * delta)
    tol = small / (4 * (n + r))
    Abar, Ubar, bbar = rounded_rows(pipeline, grid)

    B_rows: list[Vector] = []
    C_rows: list[Vector] = []
    d: list[Fraction] = []
    for i in range(n + r):
        B_rows.extend([Abar.row(i), tuple(-value for value in Abar.row(i))])
        C_rows.extend([Ubar.row(i), tuple(-value for value in Ubar.row(i))])
        d.extend([bbar[i] + tol, -bbar[i] + tol])
    zero_x = (Fraction(0),) * n
    for j in range(r):
        e_j = tuple(Fraction(int(c == j)) for c in range(r))
        B_rows.extend([zero_x, zero_x])
        C_rows.extend([e_j, tuple(-value for value in e_j)])
        d.extend([Fraction(delta), Fraction(0)])

    approx = ApproxExtension(
        n=n,
        r=r,
        delta=delta,
        epsilon=eps,
        delta_small=small,
        grid=grid,
        tol=tol,
        B=RatMatrix.from_rows(B_rows, cols=n),
        C=RatMatrix.from_rows(C_rows, cols=r),
        d=tuple(d),
        polytope=pipeline.polytope,
        factorization=pipeline.factorization,
    )
    if approx.rows != 4 * r + 2 * n:
        raise ConsistencyError(f"Approximate extension has {approx.rows} rows, expected {4 * r + 2 * n}.")
    logger.debug("build_approx: n=%d r=%d delta_small=%s rows=%d", n, r, small, approx.rows)
    return approx


def objective_battery(P: HPolytope, seed: int = 0, random_count: int = 4) -> list[Vector]:
    """Facet normals, signed unit vectors and seeded random rational objectives, deduplicated in order."""
    objectives: list[Vector] = [as_vector(row) for row in P.A]
    for i in range(P.n):
        for sign in (1, -1):
            objectives.append(tuple(Fraction(sign * int(i == j)) for j in range(P.n)))
    rng = np.random.default_rng(seed)
    for _ in range(random_count):
        numerators = rng.integers(-5, 6, size=P.n)
        denominators = rng.integers(1, 5, size=P.n)
        objectives.append(tuple(Fraction(int(p), int(q)) for p, q in zip(numerators, denominators)))
    unique: list[Vector] = []
    for objective in objectives:
        if objective not in unique:
            unique.append(objective)
    return unique


def optimize_over(Q: ApproxExtension, c: Sequence[object]) -> tuple[Fraction, Vector]:
    """Maximum of ``c . x`` over the projection of Q, with the maximizing ``x``."""
    goal = as_vector(c)
    if len(goal) != Q.n:
        raise DimensionError(f"Objective has {len(goal)} entries, expected {Q.n}.")
    result = lp_optimize(goal + (Fraction(0),) * Q.r, Q.system(), "max")
    if result.status is not LpStatus.FEASIBLE or result.optimum is None or result.witness is None:
        raise ConsistencyError(f"Optimization over the approximate extension ended {result.status.value}.")
    return result.optimum, result.witness[: Q.n]


def verify_sandwich(
    Q: ApproxExtension,
    X: VertexSet,
    objectives: Sequence[Sequence[object]] | None = None,
) -> CertificateReport:
    """Certify vertex containment, the lifted facet bound and the objective gap."""
    report = CertificateReport(subject="sandwich")
    system = Q.system()
    V = Q.factorization.V
    for j, vertex in enumerate(X.vertices):
        point = as_vector(vertex) + V.col(j)
        report.add("vertex_containment", system.is_satisfied(point), f"vertex {j + 1} {vertex}")

    P = Q.polytope
    for i, row in enumerate(P.A):
        ceiling = P.b[i] + Q.delta_small
        value, _ = optimize_over(Q, row)
        report.add("facet_lift", value <= ceiling, f"row {i + 1}: max {value} vs b + delta {ceiling}")

    battery = [as_vector(c) for c in objectives] if objectives is not None else objective_battery(P)
    for c in battery:
        if len(c) != Q.n:
            raise DimensionError(f"Objective {c} has {len(c)} entries, expected {Q.n}.")
        over_q, _ = optimize_over(Q, c)
        over_p = max(dot(c, as_vector(vertex)) for vertex in X.vertices)
        gap = over_q - over_p
        norm_sq = dot(c, c)
        ok = gap <= 0 or gap * gap <= Q.epsilon * Q.epsilon * norm_sq
        report.add("objective_gap", ok, f"c={tuple(str(v) for v in c)}: gap {gap}")
    logger.debug("verify_sandwich: %s", report.counts())
    return report
