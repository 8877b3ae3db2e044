"""Exhaustive experiments over every nonempty 0/1 vertex set of a given dimension.

Work items are independent. With ``jobs > 1`` they fan out over a process
pool; results are always merged back in canonical (bitmask) order so the
summary does not depend on scheduling.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterator, Sequence, TypeVar

from .approximator import build_approx, verify_sandwich
from .counting import CountReport, certified_matroid_xc_lower_bound, certified_xc_lower_bound
from .discretizer import (
    discretize,
    check_tolerance,
    member_deviation,
    membership_test,
    reconstruct,
    separation_margin,
    system_key,
)
from .factorization import build_extension, trivial_factorization, verify_extension
from .polytope import VertexSet, hull, slack_matrix

logger = logging.getLogger(__name__)

T = TypeVar("T")


def all_vertex_sets(n: int) -> Iterator[VertexSet]:
    for mask in range(1, 1 << (1 << n)):
        yield VertexSet.from_mask(n, mask)


@dataclass(frozen=True)
class RoundtripRecord:
    mask: int
    size: int
    r: int
    reconstructed_ok: bool
    extension_ok: bool
    margin_ok: bool
    max_member_deviation: Fraction
    min_nonmember_margin: Fraction | None
    key: str

    @property
    def passed(self) -> bool:
        return self.reconstructed_ok and self.extension_ok and self.margin_ok


@dataclass
class RoundtripSummary:
    n: int
    total: int
    records: list[RoundtripRecord] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for record in self.records if record.passed)

    @property
    def injective(self) -> bool:
        return len({record.key for record in self.records}) == len(self.records)

    @property
    def ok(self) -> bool:
        return self.injective and self.passed == self.total == len(self.records)

    def failures(self) -> list[RoundtripRecord]:
        return [record for record in self.records if not record.passed]

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "total": self.total,
            "passed": self.passed,
            "injective": self.injective,
            "failed_masks": [record.mask for record in self.failures()],
        }


def roundtrip_one(X: VertexSet, tol: Fraction | None = None) -> RoundtripRecord:
    D = discretize(X, tol=tol)
    reconstructed_ok = reconstruct(D) == X

    P = hull(X)
    S = slack_matrix(P, X)
    extension_ok = all(
        verify_extension(build_extension(P, trivial_factorization(S, side), X), X).ok
        for side in ("left", "right")
    )

    deviations = [member_deviation(D, vertex) for vertex in X.vertices]
    margins = [separation_margin(D, point) for point in X.complement() if not membership_test(D, point)]
    worst_member = max(deviations)
    closest_outsider = min(margins) if margins else None
    margin_ok = worst_member <= D.tol and (
        closest_outsider is None or closest_outsider >= Fraction(1, 2 * (D.n + D.r))
    )
    return RoundtripRecord(
        mask=X.mask(),
        size=len(X),
        r=D.r,
        reconstructed_ok=reconstructed_ok,
        extension_ok=extension_ok,
        margin_ok=margin_ok,
        max_member_deviation=worst_member,
        min_nonmember_margin=closest_outsider,
        key=system_key(D),
    )


def _roundtrip_mask(n: int, mask: int, tol: Fraction | None) -> RoundtripRecord:
    return roundtrip_one(VertexSet.from_mask(n, mask), tol)


def fan_out(
    work: Callable[..., T],
    items: Sequence[tuple[Any, ...]],
    jobs: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> list[T]:
    """Run ``work(*item)`` for every item; results come back in item order."""
    results: list[T | None] = [None] * len(items)
    if jobs <= 1:
        for index, args in enumerate(items):
            results[index] = work(*args)
            if progress is not None:
                progress(index + 1, len(items))
        return results  # type: ignore[return-value]
    done = 0
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = {pool.submit(work, *args): index for index, args in enumerate(items)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
            done += 1
            if progress is not None:
                progress(done, len(items))
    return results  # type: ignore[return-value]


def roundtrip_sweep(
    n: int,
    jobs: int = 1,
    tol: Fraction | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> RoundtripSummary:
    if tol is not None:
        # the full cube has the widest trivial factorization, r = 2^n
        check_tolerance(n, 1 << n, Fraction(tol))
    masks = range(1, 1 << (1 << n))
    records = fan_out(_roundtrip_mask, [(n, mask, tol) for mask in masks], jobs, progress)
    summary = RoundtripSummary(n=n, total=len(masks), records=records)
    logger.info("roundtrip n=%d: %d/%d passed, injective=%s", n, summary.passed, summary.total, summary.injective)
    return summary


@dataclass(frozen=True)
class SandwichRecord:
    mask: int
    epsilon: Fraction
    ok: bool
    failures: tuple[str, ...]


def _sandwich_mask(n: int, mask: int, epsilon: Fraction, delta_scale: Fraction) -> SandwichRecord:
    X = VertexSet.from_mask(n, mask)
    Q = build_approx(X, epsilon=epsilon)
    if delta_scale != 1:
        Q = build_approx(X, epsilon=epsilon, delta_override=Q.delta_small * delta_scale)
    report = verify_sandwich(Q, X)
    return SandwichRecord(mask, epsilon, report.ok, tuple(f"{c.name}: {c.detail}" for c in report.failures()))


def approx_sweep(
    n: int,
    epsilons: Sequence[object] = (Fraction(1, 2), Fraction(1, 10)),
    jobs: int = 1,
    delta_scale: object = 1,
) -> list[SandwichRecord]:
    scale = Fraction(delta_scale)
    items = [
        (n, mask, Fraction(epsilon), scale)
        for epsilon in epsilons
        for mask in range(1, 1 << (1 << n))
    ]
    return fan_out(_sandwich_mask, items, jobs)


def bound_sweep(n_values: Sequence[int], matroid: bool = False) -> list[CountReport]:
    calculator = certified_matroid_xc_lower_bound if matroid else certified_xc_lower_bound
    return [calculator(n) for n in n_values]
