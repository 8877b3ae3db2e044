"""Certified pigeonhole lower bounds on extension complexity.

Every quantity is an exact big integer. ``systems_log2_upper(n, R)`` bounds
the base-2 logarithm of the number of distinct rounded systems of width up
to R; as long as it stays below the log-count of the family being encoded,
some member of the family needs more than R inequalities.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any

from .errors import DomainError
from .polytope import delta_int

logger = logging.getLogger(__name__)


def ceil_log2(k: int) -> int:
    """Exact ``ceil(log2(k))`` for a positive integer."""
    if k < 1:
        raise DomainError(f"ceil_log2 needs a positive integer, got {k}.")
    return (k - 1).bit_length()


def entry_values_log2(n: int) -> int:
    return ceil_log2(16 * delta_int(n) ** 5)


def systems_log2_upper(n: int, R: int) -> int:
    if R < 1:
        raise DomainError(f"R must be at least 1, got {R}.")
    return (n + R + 1) * (n + R) * entry_values_log2(n)


def matroid_count_log2_lower(n: int) -> Fraction:
    if n < 1:
        raise DomainError(f"Ground set size must be at least 1, got {n}.")
    return Fraction(math.comb(n, n // 2), 2 * n)


def asymptotic_ratio(n: int, R_star: int) -> float:
    """``R_star`` over ``2^(n/2) / sqrt(n log2(2n))``; informational only."""
    scale = 2.0 ** (n / 2) / math.sqrt(n * math.log2(2 * n))
    return R_star / scale


@dataclass(frozen=True)
class CountReport:
    n: int
    family: str
    target: int
    R_star: int
    log2_systems_below: int | None
    log2_systems_at: int
    saturated: bool
    ratio: float

    @property
    def trivial(self) -> bool:
        return self.target <= 0

    def bracket_ok(self) -> bool:
        below_ok = self.R_star == 1 or (
            self.log2_systems_below is not None and self.log2_systems_below < self.target
        )
        at_ok = self.saturated or self.log2_systems_at >= self.target
        return below_ok and at_ok

    def transcript(self) -> list[str]:
        lines = [
            f"family: {self.family} at n={self.n}",
            f"target log2 count: {self.target}",
        ]
        if self.R_star > 1:
            lines.append(
                f"log2 systems(R={self.R_star - 1}) = {self.log2_systems_below} < {self.target}"
                f"  => some member needs more than {self.R_star - 1} inequalities"
            )
        relation = ">=" if self.log2_systems_at >= self.target else "<"
        lines.append(f"log2 systems(R={self.R_star}) = {self.log2_systems_at} {relation} {self.target}")
        if self.saturated:
            lines.append(f"search capped at R = 2^{self.n}; the bound is saturated")
        if self.trivial:
            lines.append("target is 0; the bound is trivial")
        lines.append(f"certified: xc >= {self.R_star}")
        return lines

    def to_json(self) -> dict[str, Any]:
        payload = asdict(self)
        payload["bracket_ok"] = self.bracket_ok()
        payload["transcript"] = self.transcript()
        return payload


def _threshold_search(n: int, target: int) -> tuple[int, bool]:
    """Least R in [1, 2^n] with ``systems_log2_upper(n, R) >= target``; flags saturation."""
    cap = 2 ** n
    if systems_log2_upper(n, 1) >= target:
        return 1, False
    if systems_log2_upper(n, cap) < target:
        return cap, True
    lo, hi = 1, 2
    while hi < cap and systems_log2_upper(n, hi) < target:
        lo, hi = hi, min(2 * hi, cap)
    # invariant: bound(lo) < target <= bound(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if systems_log2_upper(n, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi, False


def _report(n: int, family: str, target: int) -> CountReport:
    if n < 1:
        raise DomainError(f"Dimension must be at least 1, got {n}.")
    R_star, saturated = _threshold_search(n, target)
    report = CountReport(
        n=n,
        family=family,
        target=target,
        R_star=R_star,
        log2_systems_below=systems_log2_upper(n, R_star - 1) if R_star > 1 else None,
        log2_systems_at=systems_log2_upper(n, R_star),
        saturated=saturated,
        ratio=asymptotic_ratio(n, R_star),
    )
    logger.debug("count report: n=%d family=%s R*=%d", n, family, R_star)
    return report


def certified_xc_lower_bound(n: int) -> CountReport:
    """Pigeonhole over all nonempty subsets of the cube: target ``2^n``."""
    return _report(n, "0/1 sets", 2 ** n)


def certified_matroid_xc_lower_bound(n: int) -> CountReport:
    return _report(n, "matroids", math.floor(matroid_count_log2_lower(n)))
