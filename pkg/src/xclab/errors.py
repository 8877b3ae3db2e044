from __future__ import annotations

from typing import Any


class XclabError(ValueError):
    default_code = "xclab_error"

    def __init__(self, message: str, *, code: str | None = None) -> None:
        super().__init__(message)
        self.code = code or self.default_code


class DimensionError(XclabError):
    default_code = "dimension"


class SpanError(XclabError):
    default_code = "span"


class RankError(XclabError):
    default_code = "rank"


class DomainError(XclabError):
    default_code = "domain"


class ConsistencyError(XclabError):
    default_code = "consistency"


class PreconditionError(XclabError):
    default_code = "precondition"


class FactorizationError(XclabError):
    default_code = "factorization"


class ArtifactFormatError(XclabError):
    default_code = "artifact_format"


class MatroidAxiomError(XclabError):
    default_code = "matroid_axiom"

    def __init__(self, message: str, *, axiom: str, witness: tuple[Any, ...]) -> None:
        super().__init__(message)
        self.axiom = axiom
        self.witness = witness
