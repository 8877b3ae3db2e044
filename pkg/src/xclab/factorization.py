"""Nonnegative slack factorizations and the extensions they induce.

A factorization ``S = U V`` of the slack matrix of ``P = {Ax <= b}`` gives
the extension ``Q = {(x, y) : Ax + Uy = b, y >= 0}`` whose projection onto
``x`` is ``P``; column ``V^j`` is the lifting witness of vertex ``x_j``.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .certificates import CertificateReport
from .errors import DimensionError, DomainError, FactorizationError, PreconditionError
from .linalg import RatMatrix, Vector, as_vector, dot, rank
from .lp import LinearSystem, LpStatus, lp_optimize
from .polytope import HPolytope, SlackMatrix, VertexSet, slack_matrix

logger = logging.getLogger(__name__)

SIDES = ("left", "right")


@dataclass(frozen=True)
class Factorization:
    U: RatMatrix
    V: RatMatrix

    def __post_init__(self) -> None:
        if self.U.cols != self.V.rows:
            raise DimensionError(f"U has {self.U.cols} columns but V has {self.V.rows} rows.")

    @property
    def r(self) -> int:
        return self.U.cols

    def product(self) -> RatMatrix:
        return self.U @ self.V


@dataclass(frozen=True)
class FactorizationCheck:
    ok: bool
    kind: str | None = None
    entry: tuple[int, int] | None = None
    message: str = "ok"

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ExtendedFormulation:
    """``Q = {(x, y) : Ax + Uy = b, y >= 0}``; the first ``n`` variables are ``x``."""

    n: int
    A: RatMatrix
    b: Vector
    U: RatMatrix
    V: RatMatrix | None = None

    @property
    def r(self) -> int:
        return self.U.cols

    @property
    def size(self) -> int:
        # one inequality per nonnegative lifting variable
        return self.r

    def system(self) -> LinearSystem:
        rows = (
            (self.A.row(i) + self.U.row(i), "=", self.b[i])
            for i in range(self.A.rows)
        )
        return LinearSystem.build(self.n + self.r, rows, nonnegative=range(self.n, self.n + self.r))

    def project(self, point: Sequence[Fraction]) -> Vector:
        return tuple(point[: self.n])


def trivial_factorization(S: SlackMatrix, side: str = "left") -> Factorization:
    if side not in SIDES:
        raise DomainError(f"Unknown factorization side: {side}")
    if side == "left":
        return Factorization(S.S, RatMatrix.identity(S.v))
    return Factorization(RatMatrix.identity(S.f), S.S)


def _first_negative(matrix: RatMatrix) -> tuple[int, int] | None:
    for i in range(matrix.rows):
        for j, value in enumerate(matrix.row(i)):
            if value < 0:
                return (i + 1, j + 1)
    return None


def validate_factorization(S: SlackMatrix, F: Factorization) -> FactorizationCheck:
    """Exact check of ``U >= 0``, ``V >= 0`` and ``UV = S``; entries are reported 1-based."""
    if F.U.rows != S.f or F.V.cols != S.v:
        raise DimensionError(
            f"Factorization {F.U.rows}x{F.r} * {F.r}x{F.V.cols} does not match slack matrix {S.f}x{S.v}."
        )
    for label, matrix in (("U", F.U), ("V", F.V)):
        entry = _first_negative(matrix)
        if entry is not None:
            value = matrix[entry[0] - 1, entry[1] - 1]
            return FactorizationCheck(False, f"nonnegativity_{label}", entry, f"{label}{entry} = {value} is negative")
    product = F.product()
    for i in range(S.f):
        for j in range(S.v):
            if product[i, j] != S.S[i, j]:
                entry = (i + 1, j + 1)
                return FactorizationCheck(
                    False, "product", entry, f"(UV){entry} = {product[i, j]} but S{entry} = {S.S[i, j]}"
                )
    return FactorizationCheck(True)


def rescale(F: Factorization, scales: Sequence[object]) -> Factorization:
    """Multiply column l of U by ``scales[l]`` and divide row l of V by it; the product is unchanged."""
    factors = as_vector(scales)
    if len(factors) != F.r:
        raise DimensionError(f"Expected {F.r} scales, got {len(factors)}.")
    if any(value <= 0 for value in factors):
        raise DomainError("Rescaling factors must be positive.")
    U = RatMatrix.from_rows(
        (tuple(value * factors[col] for col, value in enumerate(F.U.row(i))) for i in range(F.U.rows)),
        cols=F.r,
    )
    V = RatMatrix.from_rows(
        (tuple(value / factors[i] for value in F.V.row(i)) for i in range(F.r)),
        cols=F.V.cols,
    )
    return Factorization(U, V)


def normalize(F: Factorization, delta: int) -> Factorization:
    """Rescale so that ``||U||_inf <= delta`` and ``||V||_inf <= delta``.

    Each column pair is scaled by a rational factor from the interval
    ``[||V_l|| / delta, delta / ||U^l||]``; pairs already inside the bound keep
    their entries. A zero column of U zeroes the matching row of V.
    """
    if not (F.U.is_nonnegative() and F.V.is_nonnegative()):
        raise PreconditionError("normalize needs a nonnegative factorization.")
    bound = Fraction(delta)
    columns = [list(F.U.col(col)) for col in range(F.r)]
    rows = [list(F.V.row(col)) for col in range(F.r)]
    for col in range(F.r):
        u_norm = max(columns[col], default=Fraction(0))
        v_norm = max(rows[col], default=Fraction(0))
        if u_norm == 0:
            rows[col] = [Fraction(0)] * len(rows[col])
            continue
        if u_norm * v_norm > bound * bound:
            raise PreconditionError(
                f"Column {col + 1}: ||U^l|| * ||V_l|| = {u_norm * v_norm} exceeds delta^2 = {bound * bound}."
            )
        if v_norm > bound:
            scale = v_norm / bound
        elif u_norm > bound:
            scale = bound / u_norm
        else:
            continue
        columns[col] = [value * scale for value in columns[col]]
        rows[col] = [value / scale for value in rows[col]]
    U = RatMatrix.from_rows(
        ([columns[col][i] for col in range(F.r)] for i in range(F.U.rows)),
        cols=F.r,
    )
    return Factorization(U, RatMatrix.from_rows(rows, cols=F.V.cols))


def witness(F: Factorization, j: int) -> Vector:
    return F.V.col(j)


def build_extension(P: HPolytope, F: Factorization, X: VertexSet | None = None) -> ExtendedFormulation:
    if F.U.rows != P.f:
        raise DimensionError(f"U has {F.U.rows} rows but the polytope has {P.f}.")
    if X is not None:
        check = validate_factorization(slack_matrix(P, X), F)
        if not check.ok:
            raise FactorizationError(f"Factorization rejected: {check.message}")
    elif not F.U.is_nonnegative():
        raise FactorizationError("Factorization rejected: U has a negative entry.")
    return ExtendedFormulation(P.n, P.matrix(), as_vector(P.b), F.U, F.V)


def verify_extension(EF: ExtendedFormulation, X: VertexSet) -> CertificateReport:
    """Vertex witnesses satisfy ``Ax_j + U V^j = b`` and every row's maximum over Q is ``b_l``."""
    report = CertificateReport(subject="extension")
    if EF.V is None or EF.V.cols != len(X):
        report.add("vertex_witness", False, "extension carries no witness column per vertex")
        return report
    system = EF.system()
    for j, vertex in enumerate(X.vertices):
        point = as_vector(vertex) + EF.V.col(j)
        if not system.is_satisfied(point):
            broken = next(
                (i for i, constraint in enumerate(system.constraints) if not constraint.holds(point)),
                None,
            )
            detail = f"vertex {j + 1} {vertex}: " + (f"row {broken + 1}" if broken is not None else "y < 0")
            report.add("vertex_witness", False, detail)
        else:
            report.add("vertex_witness", True)
    for i in range(EF.A.rows):
        objective = EF.A.row(i) + (Fraction(0),) * EF.r
        result = lp_optimize(objective, system, "max")
        if result.status is not LpStatus.FEASIBLE:
            report.add("row_maximum", False, f"row {i + 1}: LP {result.status.value}")
        elif result.optimum != EF.b[i]:
            report.add("row_maximum", False, f"row {i + 1}: max {result.optimum} != b = {EF.b[i]}")
        else:
            report.add("row_maximum", True)
    logger.debug("verify_extension: %s", report.counts())
    return report


def rectangle_cover_number(S: RatMatrix) -> int:
    """Fewest all-positive combinatorial rectangles covering the support of S (brute force)."""
    matrix = S if S.rows <= S.cols else S.transpose()
    support = {(i, j) for i in range(matrix.rows) for j in range(matrix.cols) if matrix[i, j] != 0}
    if not support:
        return 0
    if matrix.rows > 12:
        raise DomainError(f"Rectangle cover search is limited to 12 rows, got {matrix.rows}.")
    rectangles: set[frozenset[tuple[int, int]]] = set()
    for size in range(1, matrix.rows + 1):
        for chosen in itertools.combinations(range(matrix.rows), size):
            cols = [j for j in range(matrix.cols) if all((i, j) in support for i in chosen)]
            if not cols:
                continue
            # close the row set so only maximal rectangles are kept
            rows = [i for i in range(matrix.rows) if all((i, j) in support for j in cols)]
            rectangles.add(frozenset((i, j) for i in rows for j in cols))
    candidates = sorted(rectangles, key=lambda cells: (-len(cells), sorted(cells)))
    covering = {cell: [rect for rect in candidates if cell in rect] for cell in support}
    best = len(support)

    def search(uncovered: frozenset[tuple[int, int]], used: int) -> None:
        nonlocal best
        if not uncovered:
            best = min(best, used)
            return
        if used + 1 >= best:
            return
        cell = min(uncovered, key=lambda item: (len(covering[item]), item))
        for rect in covering[cell]:
            search(uncovered - rect, used + 1)

    search(frozenset(support), 0)
    return best


@dataclass(frozen=True)
class RankBounds:
    lower: int
    upper: int
    rank: int
    rectangle_cover: int
    witness: Factorization | None = None

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def nonnegative_rank_bounds(
    S: SlackMatrix,
    *,
    seed: int = 0,
    iterations: int = 2000,
    restarts: int = 8,
) -> RankBounds:
    from .nmf import nmf_heuristic

    linear_rank = rank(S.S)
    cover = rectangle_cover_number(S.S)
    lower = max(linear_rank, cover)
    upper = min(S.f, S.v)
    found: Factorization | None = None
    for width in range(max(lower, 1), upper):
        found = nmf_heuristic(S, width, seed=seed, iterations=iterations, restarts=restarts)
        if found is not None:
            upper = width
            break
    if lower == 0:
        upper = 0
    logger.info("nonnegative rank bounds: rank=%d cover=%d bracket=[%d, %d]", linear_rank, cover, lower, upper)
    return RankBounds(lower, upper, linear_rank, cover, found)


def column_in_cone(U: RatMatrix, target: Sequence[Fraction]) -> Vector | None:
    """Exact ``v >= 0`` with ``U v = target``, or None."""
    rows = ((U.row(i), "=", target[i]) for i in range(U.rows))
    system = LinearSystem.build(U.cols, rows, nonnegative=range(U.cols))
    result = lp_optimize((Fraction(0),) * U.cols, system, "min")
    if result.status is not LpStatus.FEASIBLE or result.witness is None:
        return None
    if any(dot(U.row(i), result.witness) != target[i] for i in range(U.rows)):
        return None
    return result.witness
