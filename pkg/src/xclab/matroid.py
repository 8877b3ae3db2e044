"""Matroids as explicit bitmask families of independent sets.

Elements are numbered ``1..n`` in the public API; element ``e`` is bit
``e - 1`` of a mask. The independence oracle, rank and greedy are layered on
the explicit family.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import ConsistencyError, DimensionError, DomainError, MatroidAxiomError
from .linalg import Vector, as_vector
from .lp import LpStatus, lp_optimize
from .polytope import HPolytope, VertexSet, delta_int, hull, same_solution_set

logger = logging.getLogger(__name__)

# facet enumeration of the independent sets stays fast up to this ground set size
HULL_CHECK_MAX_N = 4


def to_mask(elements: Iterable[int], n: int) -> int:
    mask = 0
    for element in elements:
        if not 1 <= int(element) <= n:
            raise DomainError(f"Element {element} is outside the ground set 1..{n}.")
        mask |= 1 << (int(element) - 1)
    return mask


def to_elements(mask: int) -> tuple[int, ...]:
    return tuple(bit + 1 for bit in range(mask.bit_length()) if mask >> bit & 1)


def _size(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Matroid:
    n: int
    independent: frozenset[int]

    def is_independent(self, subset: Iterable[int] | int) -> bool:
        mask = subset if isinstance(subset, int) else to_mask(subset, self.n)
        return mask in self.independent

    def rank(self, subset: Iterable[int] | int | None = None) -> int:
        if subset is None:
            mask = (1 << self.n) - 1
        else:
            mask = subset if isinstance(subset, int) else to_mask(subset, self.n)
        chosen = 0
        for bit in range(self.n):
            if mask >> bit & 1 and (chosen | 1 << bit) in self.independent:
                chosen |= 1 << bit
        return _size(chosen)

    def family(self) -> list[tuple[int, ...]]:
        return [to_elements(mask) for mask in sorted(self.independent, key=lambda m: (_size(m), m))]


def validate_matroid(n: int, family: Iterable[Iterable[int]]) -> Matroid:
    """Check both independence axioms exhaustively; raise with the witness pair on failure."""
    if n < 0:
        raise DomainError(f"Ground set size must be nonnegative, got {n}.")
    masks = frozenset(to_mask(subset, n) for subset in family)
    if 0 not in masks:
        raise MatroidAxiomError("The empty set must be independent.", axiom="empty", witness=())
    ordered = sorted(masks, key=lambda m: (_size(m), m))
    for mask in ordered:
        for bit in range(n):
            if mask >> bit & 1 and mask & ~(1 << bit) not in masks:
                smaller = mask & ~(1 << bit)
                raise MatroidAxiomError(
                    f"Subset {set(to_elements(smaller)) or '{}'} of independent {set(to_elements(mask))} is missing.",
                    axiom="I",
                    witness=(to_elements(mask), to_elements(smaller)),
                )
    by_size: dict[int, list[int]] = {}
    for mask in ordered:
        by_size.setdefault(_size(mask), []).append(mask)
    # with downward closure, exchange between sizes k and k+1 implies it for all size gaps
    for size, smaller_sets in sorted(by_size.items()):
        for I in smaller_sets:
            for J in by_size.get(size + 1, []):
                extra = J & ~I
                if not any((I | 1 << bit) in masks for bit in range(n) if extra >> bit & 1):
                    raise MatroidAxiomError(
                        f"No element of {set(to_elements(J))} extends {set(to_elements(I)) or '{}'}.",
                        axiom="II",
                        witness=(to_elements(I), to_elements(J)),
                    )
    return Matroid(n, masks)


def uniform(n: int, k: int) -> Matroid:
    if not 0 <= k <= n:
        raise DomainError(f"Uniform matroid needs 0 <= k <= n, got k={k}, n={n}.")
    return Matroid(n, frozenset(mask for mask in range(1 << n) if _size(mask) <= k))


def _is_forest(edges: Sequence[tuple[int, int]], mask: int) -> bool:
    parent: dict[int, int] = {}

    def find(node: int) -> int:
        while parent.get(node, node) != node:
            node = parent[node]
        return node

    for bit, (u, v) in enumerate(edges):
        if not mask >> bit & 1:
            continue
        root_u, root_v = find(u), find(v)
        if root_u == root_v:
            return False
        parent[root_u] = root_v
    return True


def graphic(edges: Sequence[tuple[int, int]]) -> Matroid:
    """Cycle matroid of a simple graph; element ``e`` is ``edges[e - 1]``."""
    seen: set[frozenset[int]] = set()
    for u, v in edges:
        if u == v:
            raise DomainError(f"Loop edge ({u}, {v}) is not allowed in a simple graph.")
        key = frozenset((u, v))
        if key in seen:
            raise DomainError(f"Parallel edge ({u}, {v}) is not allowed in a simple graph.")
        seen.add(key)
    m = len(edges)
    return Matroid(m, frozenset(mask for mask in range(1 << m) if _is_forest(edges, mask)))


def complete_graph_edges(nodes: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, nodes + 1), 2))


def bases(M: Matroid) -> list[tuple[int, ...]]:
    full = M.rank()
    return [to_elements(mask) for mask in sorted(M.independent) if _size(mask) == full]


def from_bases(n: int, basis_family: Iterable[Iterable[int]]) -> Matroid:
    tops = [to_mask(basis, n) for basis in basis_family]
    family = {to_elements(mask) for mask in range(1 << n) if any(mask & ~top == 0 for top in tops)}
    return validate_matroid(n, family)


def greedy_optimize(M: Matroid, weights: Sequence[object]) -> tuple[tuple[int, ...], Fraction]:
    values = as_vector(weights)
    if len(values) != M.n:
        raise DimensionError(f"Expected {M.n} weights, got {len(values)}.")
    chosen = 0
    for bit in sorted(range(M.n), key=lambda b: (-values[b], b)):
        if values[bit] <= 0:
            break
        if (chosen | 1 << bit) in M.independent:
            chosen |= 1 << bit
    elements = to_elements(chosen)
    return elements, sum((values[e - 1] for e in elements), Fraction(0))


def random_weights(n: int, seed: int) -> Vector:
    """Seeded rational weights, numerators in -5..5 and denominators in 1..4."""
    rng = np.random.default_rng(seed)
    numerators = rng.integers(-5, 6, size=n)
    denominators = rng.integers(1, 5, size=n)
    return tuple(Fraction(int(p), int(q)) for p, q in zip(numerators, denominators))


def characteristic_vectors(M: Matroid) -> VertexSet:
    return VertexSet(M.n, tuple(tuple(mask >> bit & 1 for bit in range(M.n)) for mask in M.independent))


def _prune(n: int, rows: list[tuple[tuple[int, ...], int]]) -> list[tuple[tuple[int, ...], int]]:
    kept = list(rows)
    index = 0
    while index < len(kept):
        others = kept[:index] + kept[index + 1:]
        candidate = HPolytope(n, tuple(a for a, _ in others), tuple(b for _, b in others), delta_int(n))
        coeffs, rhs = kept[index]
        result = lp_optimize(coeffs, candidate.system(), "max")
        if result.status is LpStatus.FEASIBLE and result.optimum is not None and result.optimum <= rhs:
            kept.pop(index)
        else:
            index += 1
    return kept


def matroid_polytope(M: Matroid, check_hull: bool | None = None) -> tuple[VertexSet, HPolytope]:
    """Characteristic vectors of the independent sets and the pruned rank-inequality system."""
    if M.n < 1:
        raise DomainError("The matroid polytope needs a nonempty ground set.")
    X = characteristic_vectors(M)
    rows: list[tuple[tuple[int, ...], int]] = []
    for mask in range(1, 1 << M.n):
        rows.append((tuple(mask >> bit & 1 for bit in range(M.n)), M.rank(mask)))
    for bit in range(M.n):
        rows.append((tuple(-int(bit == j) for j in range(M.n)), 0))
    kept = _prune(M.n, rows)
    P = HPolytope(M.n, tuple(a for a, _ in kept), tuple(b for _, b in kept), delta_int(M.n))
    logger.debug("matroid_polytope: n=%d rank rows %d -> %d", M.n, len(rows), P.f)
    if check_hull is None:
        check_hull = M.n <= HULL_CHECK_MAX_N
    if check_hull:
        if not same_solution_set(P, hull(X)):
            raise ConsistencyError("Rank-inequality system and the hull of the independent sets differ.")
    return X, P
