"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction` (canonical ``p/q`` with ``q > 0``), so
every comparison in the package is exact. Matrices are immutable row-major
:class:`RatMatrix` values; ``M.row(i)`` is ``M_i`` and ``M.col(j)`` is
``M^j``.

Volumes are always handled squared: ``vol(w_1..w_k)^2 = det(W W^T)`` is
rational even when the volume is not.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionError, RankError, SpanError

Rational = Fraction
Vector = tuple[Fraction, ...]


def as_vector(values: Iterable[object]) -> Vector:
    return tuple(Fraction(value) for value in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"Cannot take dot product of lengths {len(u)} and {len(v)}.")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add_scaled(u: Sequence[Fraction], v: Sequence[Fraction], scale: Fraction) -> Vector:
    """Return ``u + scale * v``."""
    return tuple(a + scale * b for a, b in zip(u, v))


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise DimensionError(f"Negative matrix shape {self.rows}x{self.cols}.")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"Matrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, got {len(self.entries)}."
            )
        object.__setattr__(self, "entries", tuple(Fraction(value) for value in self.entries))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[object]], cols: int | None = None) -> "RatMatrix":
        materialized = [as_vector(row) for row in rows]
        if not materialized:
            return cls(0, cols or 0, ())
        width = len(materialized[0])
        if cols is not None and cols != width:
            raise DimensionError(f"Expected {cols} columns, got {width}.")
        for index, row in enumerate(materialized):
            if len(row) != width:
                raise DimensionError(f"Row {index} has {len(row)} entries, expected {width}.")
        return cls(len(materialized), width, tuple(value for row in materialized for value in row))

    @classmethod
    def identity(cls, size: int) -> "RatMatrix":
        return cls.from_rows(
            ([1 if i == j else 0 for j in range(size)] for i in range(size)),
            cols=size,
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def column(cls, values: Iterable[object]) -> "RatMatrix":
        return cls.from_rows(([value] for value in values), cols=1)

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"Index ({i}, {j}) outside {self.rows}x{self.cols} matrix.")
        return self.entries[i * self.cols + j]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> Vector:
        start = i * self.cols
        return self.entries[start:start + self.cols]

    def col(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self) -> list[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix.from_rows((self.col(j) for j in range(self.cols)), cols=self.rows)

    def matmul(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}.")
        columns = [other.col(j) for j in range(other.cols)]
        return RatMatrix.from_rows(
            ([dot(self.row(i), column) for column in columns] for i in range(self.rows)),
            cols=other.cols,
        )

    __matmul__ = matmul

    def apply(self, vector: Sequence[Fraction]) -> Vector:
        if len(vector) != self.cols:
            raise DimensionError(f"Cannot apply {self.rows}x{self.cols} matrix to vector of length {len(vector)}.")
        return tuple(dot(self.row(i), vector) for i in range(self.rows))

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise DimensionError(f"Cannot stack {self.rows} rows beside {other.rows} rows.")
        return RatMatrix.from_rows(
            (self.row(i) + other.row(i) for i in range(self.rows)),
            cols=self.cols + other.cols,
        )

    def select_rows(self, indices: Sequence[int]) -> "RatMatrix":
        return RatMatrix.from_rows((self.row(i) for i in indices), cols=self.cols)

    def pad_rows(self, total: int) -> "RatMatrix":
        if total < self.rows:
            raise DimensionError(f"Cannot pad {self.rows} rows down to {total}.")
        zero_row = (Fraction(0),) * self.cols
        return RatMatrix.from_rows(self.row_list() + [zero_row] * (total - self.rows), cols=self.cols)

    def replace_row(self, i: int, values: Sequence[object]) -> "RatMatrix":
        rows = self.row_list()
        rows[i] = as_vector(values)
        return RatMatrix.from_rows(rows, cols=self.cols)

    def replace_col(self, j: int, values: Sequence[object]) -> "RatMatrix":
        column = as_vector(values)
        return RatMatrix.from_rows(
            (self.row(i)[:j] + (column[i],) + self.row(i)[j + 1:] for i in range(self.rows)),
            cols=self.cols,
        )

    def max_abs(self) -> Fraction:
        """Entrywise maximum absolute value (the matrix ``||.||_inf`` used throughout)."""
        return max((abs(value) for value in self.entries), default=Fraction(0))

    def is_nonnegative(self) -> bool:
        return all(value >= 0 for value in self.entries)

    def is_integral(self) -> bool:
        return all(value.denominator == 1 for value in self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def to_lists(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]


def _require_square(matrix: RatMatrix) -> None:
    if not matrix.is_square():
        raise DimensionError(f"Determinant needs a square matrix, got {matrix.rows}x{matrix.cols}.")


def det(matrix: RatMatrix) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals."""
    _require_square(matrix)
    size = matrix.rows
    work = [list(matrix.row(i)) for i in range(size)]
    result = Fraction(1)
    for col in range(size):
        pivot = next((i for i in range(col, size) if work[i][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            result = -result
        pivot_value = work[col][col]
        result *= pivot_value
        for i in range(col + 1, size):
            factor = work[i][col] / pivot_value
            if factor:
                for j in range(col, size):
                    work[i][j] -= factor * work[col][j]
    return result


def det_by_expansion(matrix: RatMatrix) -> Fraction:
    """Cofactor expansion along the first row; only meant for small matrices."""
    _require_square(matrix)
    rows = matrix.row_list()
    return _expand(rows)


def _expand(rows: list[Vector]) -> Fraction:
    size = len(rows)
    if size == 0:
        return Fraction(1)
    if size == 1:
        return rows[0][0]
    total = Fraction(0)
    for j, value in enumerate(rows[0]):
        if value == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        sign = -1 if j % 2 else 1
        total += sign * value * _expand(minor)
    return total


def rref(rows: Sequence[Sequence[Fraction]], cols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the pivot column indices (leftmost basis)."""
    work = [[Fraction(value) for value in row] for row in rows]
    pivots: list[int] = []
    lead = 0
    for col in range(cols):
        pivot = next((i for i in range(lead, len(work)) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[lead], work[pivot] = work[pivot], work[lead]
        pivot_value = work[lead][col]
        work[lead] = [value / pivot_value for value in work[lead]]
        for i in range(len(work)):
            if i != lead and work[i][col] != 0:
                factor = work[i][col]
                work[i] = [a - factor * b for a, b in zip(work[i], work[lead])]
        pivots.append(col)
        lead += 1
        if lead == len(work):
            break
    return work[:lead], pivots


def rank(matrix: RatMatrix) -> int:
    _, pivots = rref(matrix.row_list(), matrix.cols)
    return len(pivots)


def vectors_rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    if not vectors:
        return 0
    return rank(RatMatrix.from_rows(vectors))


def solve(matrix: RatMatrix, rhs: Sequence[Fraction]) -> Vector:
    """Solve a nonsingular square system exactly."""
    _require_square(matrix)
    if len(rhs) != matrix.rows:
        raise DimensionError(f"Right-hand side has length {len(rhs)}, expected {matrix.rows}.")
    augmented = [list(matrix.row(i)) + [Fraction(rhs[i])] for i in range(matrix.rows)]
    reduced, pivots = rref(augmented, matrix.cols)
    if len(pivots) != matrix.rows:
        raise RankError("System matrix is singular.")
    return tuple(row[-1] for row in reduced)


def gram_matrix(vectors: Sequence[Sequence[Fraction]]) -> RatMatrix:
    return RatMatrix.from_rows(
        ([dot(u, v) for v in vectors] for u in vectors),
        cols=len(vectors),
    )


def _check_same_length(vectors: Sequence[Sequence[Fraction]]) -> None:
    lengths = {len(vector) for vector in vectors}
    if len(lengths) > 1:
        raise DimensionError(f"Vectors have mismatched lengths {sorted(lengths)}.")


def gram_volume_sq(vectors: Sequence[Sequence[object]]) -> Fraction:
    """Squared k-volume of the parallelepiped spanned by ``vectors``; 0 iff dependent."""
    materialized = [as_vector(vector) for vector in vectors]
    _check_same_length(materialized)
    return det(gram_matrix(materialized))


def cramer_coefficients(basis: Sequence[Sequence[object]], target: Sequence[object]) -> Vector:
    """Unique coefficients ``lam`` with ``target = sum(lam_i * basis_i)``."""
    rows = [as_vector(vector) for vector in basis]
    goal = as_vector(target)
    _check_same_length(rows + [goal])
    gram = gram_matrix(rows)
    if det(gram) == 0:
        raise RankError("Basis vectors are linearly dependent.")
    coefficients = solve(gram, [dot(row, goal) for row in rows])
    combined = tuple(sum((lam * row[j] for lam, row in zip(coefficients, rows)), Fraction(0)) for j in range(len(goal)))
    if combined != goal:
        raise SpanError("Target vector is not in the span of the basis.")
    return coefficients
