from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class CertificateReport:
    """Ordered list of exact checks; failures are data, never exceptions."""

    subject: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, ok, detail))
        return ok

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def failures(self) -> list[Check]:
        return [check for check in self.checks if not check.ok]

    def counts(self) -> dict[str, int]:
        failed = len(self.failures())
        return {"checks": len(self.checks), "passed": len(self.checks) - failed, "failed": failed}

    def to_json(self) -> dict[str, Any]:
        return {
            "subject": self.subject,
            "ok": self.ok,
            **self.counts(),
            "failures": [{"name": check.name, "detail": check.detail} for check in self.failures()],
        }
