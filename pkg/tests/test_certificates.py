from xclab.certificates import CertificateReport
from xclab.errors import DomainError, MatroidAxiomError, XclabError


def test_empty_report_is_ok():
    report = CertificateReport(subject="empty")
    assert report.ok
    assert report.counts() == {"checks": 0, "passed": 0, "failed": 0}


def test_failures_are_kept_in_order():
    report = CertificateReport(subject="demo")
    assert report.add("first", True) is True
    assert report.add("second", False, "row 2") is False
    report.add("third", False, "vertex 1")

    assert not report.ok
    assert [check.name for check in report.failures()] == ["second", "third"]
    assert report.to_json() == {
        "subject": "demo",
        "ok": False,
        "checks": 3,
        "passed": 1,
        "failed": 2,
        "failures": [{"name": "second", "detail": "row 2"}, {"name": "third", "detail": "vertex 1"}],
    }


def test_error_codes():
    assert DomainError("bad").code == "domain"
    assert XclabError("custom", code="special").code == "special"
    error = MatroidAxiomError("broken", axiom="II", witness=((1,), (2, 3)))
    assert isinstance(error, ValueError)
    assert (error.code, error.axiom, error.witness) == ("matroid_axiom", "II", ((1,), (2, 3)))
