import json
from fractions import Fraction

import pytest

from xclab.counting import (
    asymptotic_ratio,
    ceil_log2,
    certified_matroid_xc_lower_bound,
    certified_xc_lower_bound,
    entry_values_log2,
    matroid_count_log2_lower,
    systems_log2_upper,
)
from xclab.errors import DomainError
from xclab.sweep import bound_sweep


@pytest.mark.parametrize("k,expected", [(1, 0), (2, 1), (3, 2), (512, 9), (513, 10), (2 ** 200 + 1, 201)])
def test_ceil_log2(k, expected):
    assert ceil_log2(k) == expected


def test_ceil_log2_rejects_non_positive():
    with pytest.raises(DomainError):
        ceil_log2(0)


def test_entry_values_log2_at_dimension_one():
    # 16 * 2^5 = 512 values per entry
    assert entry_values_log2(1) == 9


@pytest.mark.parametrize("n,R,expected", [(1, 1, 54), (1, 2, 108)])
def test_systems_log2_upper(n, R, expected):
    assert systems_log2_upper(n, R) == expected


def test_systems_log2_upper_rejects_zero_width():
    with pytest.raises(DomainError):
        systems_log2_upper(1, 0)


def test_systems_log2_upper_is_strictly_increasing():
    for n in range(1, 8):
        values = [systems_log2_upper(n, R) for R in range(1, 20)]
        assert all(a < b for a, b in zip(values, values[1:]))
    for R in (1, 5, 40):
        values = [systems_log2_upper(n, R) for n in range(1, 12)]
        assert all(a < b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n,expected", [(2, Fraction(1, 2)), (4, Fraction(3, 4)), (8, Fraction(35, 8))])
def test_matroid_count_log2_lower(n, expected):
    assert matroid_count_log2_lower(n) == expected


def test_dimension_one_bound_is_one():
    report = certified_xc_lower_bound(1)
    assert report.R_star == 1
    assert report.target == 2
    assert report.log2_systems_at == 54
    assert report.log2_systems_below is None
    assert report.bracket_ok()


def _assert_tight_bracket(report):
    assert report.bracket_ok()
    assert not report.saturated
    assert report.target <= systems_log2_upper(report.n, report.R_star) == report.log2_systems_at
    if report.R_star > 1:
        assert systems_log2_upper(report.n, report.R_star - 1) == report.log2_systems_below < report.target


def test_bracket_is_certified_at_every_dimension():
    for n in range(1, 65):
        report = certified_xc_lower_bound(n)
        assert report.target == 2 ** n
        _assert_tight_bracket(report)


def test_matroid_bracket_is_certified_from_eight():
    for n in range(8, 65):
        report = certified_matroid_xc_lower_bound(n)
        assert report.target > 0
        _assert_tight_bracket(report)


def test_large_dimension_gives_a_nontrivial_bound():
    report = certified_xc_lower_bound(20)
    assert report.R_star == 47
    assert report.log2_systems_below < report.target <= report.log2_systems_at
    assert report.transcript()[-1] == "certified: xc >= 47"


def test_matroid_bound_at_four_is_trivial():
    report = certified_matroid_xc_lower_bound(4)
    assert report.target == 0
    assert report.R_star == 1
    assert report.trivial
    assert "target is 0; the bound is trivial" in report.transcript()


def test_matroid_bound_is_monotone_from_eight():
    values = [certified_matroid_xc_lower_bound(n).R_star for n in range(8, 65)]
    assert values == sorted(values)
    assert values[-1] > 1


def test_ratio_stays_in_a_bounded_band():
    reports = bound_sweep(range(20, 61))
    ratios = [report.ratio for report in reports]
    assert all(0.25 < ratio < 1.5 for ratio in ratios)
    assert max(ratios) / min(ratios) < 2
    assert asymptotic_ratio(20, 47) == pytest.approx(ratios[0])


def test_report_json_is_serializable():
    payload = certified_matroid_xc_lower_bound(12).to_json()
    assert payload["family"] == "matroids"
    assert payload["bracket_ok"] is True
    assert isinstance(payload["transcript"], list)
    json.dumps(payload)


def test_bound_sweep_matroid_flag():
    reports = bound_sweep([8, 9], matroid=True)
    assert [report.family for report in reports] == ["matroids", "matroids"]
    assert [report.target for report in reports] == [4, 7]
