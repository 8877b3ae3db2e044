"""Discretization of a 0/1 vertex set into a small rounded system, and back.

``discretize`` picks a locally max-volume row basis of ``[A | U]`` for a
normalized slack factorization, rounds the selected rows of U down onto a
grid and pads to ``n + r`` rows. A 0/1 point belongs to the original set
exactly when some ``y`` in ``[0, delta]^r`` keeps every row of the rounded
system within the tolerance band, which is what ``reconstruct`` tests.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, DomainError, FactorizationError, PreconditionError
from .factorization import Factorization, normalize, trivial_factorization, validate_factorization
from .linalg import RatMatrix, Vector, as_vector, cramer_coefficients, dot, gram_volume_sq, rank
from .lp import LinearSystem, LpStatus, lp_feasible, lp_optimize
from .polytope import HPolytope, VertexSet, cube_points, hull, slack_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RowSelection:
    indices: tuple[int, ...]
    k: int
    volume_sq: Fraction


@dataclass(frozen=True)
class DiscretizedSystem:
    n: int
    r: int
    delta: int
    Abar: RatMatrix
    Ubar: RatMatrix
    bbar: Vector
    q: Fraction
    tol: Fraction

    def __post_init__(self) -> None:
        height = self.n + self.r
        if self.Abar.shape != (height, self.n) or self.Ubar.shape != (height, self.r) or len(self.bbar) != height:
            raise DimensionError(f"Discretized system must have {height} rows over {self.n}+{self.r} columns.")
        check_tolerance(self.n, self.r, self.tol)


def separation_floor(n: int, r: int) -> Fraction:
    """Smallest band deviation any non-member can have."""
    return Fraction(1, 2 * (n + r))


def check_tolerance(n: int, r: int, tol: Fraction) -> None:
    """Reject tolerances that would let a non-member into the band."""
    if tol <= 0:
        raise DomainError(f"Tolerance must be positive, got {tol}.")
    if tol >= separation_floor(n, r):
        raise DomainError(f"Tolerance {tol} must stay below {separation_floor(n, r)} at n={n}, r={r}.")


@dataclass(frozen=True)
class Pipeline:
    """Intermediate objects shared by the discretizer and the approximator."""

    polytope: HPolytope
    factorization: Factorization
    selection: RowSelection


def select_maxvol_rows(M: RatMatrix) -> RowSelection:
    """Greedy max-volume basis of the row space, improved by single-row exchanges.

    The exchange loop swaps in a row whenever its Cramer coefficient against
    some basis row exceeds 1 in absolute value, so on return every row ``l``
    satisfies ``|lambda_i| <= 1`` over the selected basis.
    """
    rows = M.row_list()
    k = rank(M)
    selected: list[int] = []
    for _ in range(k):
        best_index, best_volume = None, Fraction(0)
        for index in range(len(rows)):
            if index in selected:
                continue
            volume = gram_volume_sq([rows[i] for i in selected] + [rows[index]])
            if volume > best_volume:
                best_index, best_volume = index, volume
        if best_index is None:
            break
        selected.append(best_index)

    swaps = 0
    while selected:
        basis = [rows[i] for i in selected]
        exchange = None
        for index in range(len(rows)):
            if index in selected:
                continue
            coefficients = cramer_coefficients(basis, rows[index])
            position = next((p for p, lam in enumerate(coefficients) if abs(lam) > 1), None)
            if position is not None:
                exchange = (position, index)
                break
        if exchange is None:
            break
        position, index = exchange
        selected[position] = index
        swaps += 1

    indices = tuple(sorted(selected))
    volume_sq = gram_volume_sq([rows[i] for i in indices])
    logger.debug("select_maxvol_rows: k=%d indices=%s swaps=%d", k, indices, swaps)
    return RowSelection(indices, len(indices), volume_sq)


def cramer_certificate(M: RatMatrix, selection: RowSelection) -> Fraction:
    """Largest squared Cramer coefficient of a non-selected row over the selected basis."""
    rows = M.row_list()
    basis = [rows[i] for i in selection.indices]
    worst = Fraction(0)
    for index, row in enumerate(rows):
        if index in selection.indices or not basis:
            continue
        worst = max([worst] + [lam * lam for lam in cramer_coefficients(basis, row)])
    return worst


def grid_round_down(U_I: RatMatrix, q: Fraction) -> RatMatrix:
    step = Fraction(q)
    if step <= 0:
        raise DomainError(f"Grid spacing must be positive, got {step}.")
    if not U_I.is_nonnegative():
        raise PreconditionError("Only nonnegative matrices are rounded onto the grid.")
    return RatMatrix(U_I.rows, U_I.cols, tuple(math.floor(value / step) * step for value in U_I.entries))


def prepare(X: VertexSet, F: Factorization | None = None) -> Pipeline:
    P = hull(X)
    S = slack_matrix(P, X)
    if F is None:
        F = trivial_factorization(S, "left")
    else:
        check = validate_factorization(S, F)
        if not check.ok:
            raise FactorizationError(f"Factorization rejected: {check.message}")
    if F.r < 1:
        raise DomainError("Factorization width must be at least 1.")
    F = normalize(F, P.delta)
    selection = select_maxvol_rows(P.matrix().hstack(F.U))
    return Pipeline(P, F, selection)


def rounded_rows(pipeline: Pipeline, step: Fraction) -> tuple[RatMatrix, RatMatrix, Vector]:
    """Selected rows of ``(A, U, b)`` with U rounded down onto ``step``, padded to ``n + r`` rows."""
    P, F, indices = pipeline.polytope, pipeline.factorization, pipeline.selection.indices
    height = P.n + F.r
    Abar = P.matrix().select_rows(indices).pad_rows(height)
    Ubar = grid_round_down(F.U.select_rows(indices), step).pad_rows(height)
    bbar = tuple(Fraction(P.b[i]) for i in indices) + (Fraction(0),) * (height - len(indices))
    return Abar, Ubar, bbar


def discretize(X: VertexSet, F: Factorization | None = None, tol: Fraction | None = None) -> DiscretizedSystem:
    pipeline = prepare(X, F)
    n, r, delta = X.n, pipeline.factorization.r, pipeline.polytope.delta
    q = Fraction(1, 4 * r * (n + r) * delta)
    band = Fraction(1, 4 * (n + r)) if tol is None else Fraction(tol)
    Abar, Ubar, bbar = rounded_rows(pipeline, q)
    logger.debug("discretize: n=%d r=%d rows=%s", n, r, pipeline.selection.indices)
    return DiscretizedSystem(n, r, delta, Abar, Ubar, bbar, q, band)


def _check_point(D: DiscretizedSystem, x: Sequence[object]) -> Vector:
    point = as_vector(x)
    if len(point) != D.n:
        raise DimensionError(f"Point has dimension {len(point)}, expected {D.n}.")
    return point


def _band_system(D: DiscretizedSystem, point: Vector, deviation: bool) -> LinearSystem:
    """Rows over ``y`` (and a trailing ``t`` when ``deviation``) bounding ``|Abar x + Ubar y - bbar|``."""
    width = D.r + (1 if deviation else 0)
    rows = []
    for i in range(D.n + D.r):
        offset = D.bbar[i] - dot(D.Abar.row(i), point)
        coeffs = D.Ubar.row(i)
        if deviation:
            rows.append((coeffs + (Fraction(-1),), "<=", offset))
            rows.append((coeffs + (Fraction(1),), ">=", offset))
        else:
            rows.append((coeffs, "<=", offset + D.tol))
            rows.append((coeffs, ">=", offset - D.tol))
    for j in range(D.r):
        rows.append((tuple(Fraction(int(c == j)) for c in range(width)), "<=", D.delta))
    return LinearSystem.build(width, rows, nonnegative=range(width))


def membership_witness(D: DiscretizedSystem, x: Sequence[object]) -> Vector | None:
    result = lp_feasible(_band_system(D, _check_point(D, x), deviation=False))
    return result.witness if result.feasible else None


def membership_test(D: DiscretizedSystem, x: Sequence[object]) -> bool:
    return membership_witness(D, x) is not None


def member_deviation(D: DiscretizedSystem, x: Sequence[object]) -> Fraction:
    """Exact ``min over y in [0, delta]^r`` of ``||Abar x + Ubar y - bbar||_inf``."""
    system = _band_system(D, _check_point(D, x), deviation=True)
    objective = (Fraction(0),) * D.r + (Fraction(1),)
    result = lp_optimize(objective, system, "min")
    if result.status is not LpStatus.FEASIBLE or result.optimum is None:
        raise PreconditionError(f"Deviation LP ended {result.status.value}.")
    return result.optimum


def separation_margin(D: DiscretizedSystem, x: Sequence[object]) -> Fraction:
    if membership_test(D, x):
        raise PreconditionError(f"Point {tuple(x)} is a member; it has no separation margin.")
    return member_deviation(D, x)


def reconstruct(D: DiscretizedSystem) -> VertexSet:
    members = [point for point in cube_points(D.n) if membership_test(D, point)]
    return VertexSet(D.n, tuple(members))


def system_key(D: DiscretizedSystem) -> str:
    """Canonical text of ``(Abar, Ubar, bbar)`` together with the grid data."""
    payload = {
        "n": D.n,
        "r": D.r,
        "Abar": [str(value) for value in D.Abar.entries],
        "Ubar": [str(value) for value in D.Ubar.entries],
        "bbar": [str(value) for value in D.bbar],
        "q": str(D.q),
        "tol": str(D.tol),
    }
    return json.dumps(payload, separators=(",", ":"))
