"""Best-effort search for small nonnegative slack factorizations.

Floating-point multiplicative updates propose a left factor; it is snapped to
small rationals and every column of the right factor is then recovered by an
exact LP, so a returned factorization always validates exactly.
"""
from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np

from .factorization import Factorization, column_in_cone, validate_factorization
from .linalg import RatMatrix
from .polytope import SlackMatrix

logger = logging.getLogger(__name__)

EPS = 1e-12
SNAP_THRESHOLDS = (1e-6, 1e-4, 1e-2, 1e-1)
MAX_DENOMINATOR = 256


def _multiplicative_updates(target: np.ndarray, width: int, rng: np.random.Generator, iterations: int) -> np.ndarray:
    rows, cols = target.shape
    W = rng.random((rows, width)) + 0.1
    H = rng.random((width, cols)) + 0.1
    for _ in range(iterations):
        H *= (W.T @ target) / (W.T @ W @ H + EPS)
        W *= (target @ H.T) / (W @ H @ H.T + EPS)
    return W


def _snap(W: np.ndarray, threshold: float) -> RatMatrix:
    scale = W.max(axis=0)
    scale[scale <= 0] = 1.0
    scaled = W / scale
    scaled[scaled < threshold] = 0.0
    return RatMatrix.from_rows(
        ([Fraction(float(value)).limit_denominator(MAX_DENOMINATOR) for value in row] for row in scaled),
        cols=W.shape[1],
    )


def _exact_completion(S: SlackMatrix, U: RatMatrix) -> Factorization | None:
    columns = []
    for j in range(S.v):
        column = column_in_cone(U, S.S.col(j))
        if column is None:
            return None
        columns.append(column)
    V = RatMatrix.from_rows(zip(*columns), cols=S.v) if U.cols else RatMatrix.zeros(0, S.v)
    candidate = Factorization(U, V)
    return candidate if validate_factorization(S, candidate).ok else None


def nmf_heuristic(
    S: SlackMatrix,
    r: int,
    *,
    seed: int = 0,
    iterations: int = 2000,
    restarts: int = 8,
) -> Factorization | None:
    """Exact width-``r`` factorization of S, or None when none was found."""
    if r < 1:
        return None
    target = np.array([[float(value) for value in S.S.row(i)] for i in range(S.f)], dtype=float)
    rng = np.random.default_rng(seed)
    for attempt in range(restarts):
        W = _multiplicative_updates(target, r, rng, iterations)
        seen: set[tuple[Fraction, ...]] = set()
        for threshold in SNAP_THRESHOLDS:
            U = _snap(W, threshold)
            if U.entries in seen:
                continue
            seen.add(U.entries)
            found = _exact_completion(S, U)
            if found is not None:
                logger.info("nmf: width %d found on restart %d (snap %.0e)", r, attempt, threshold)
                return found
        logger.debug("nmf: restart %d at width %d gave no exact completion", attempt, r)
    return None
