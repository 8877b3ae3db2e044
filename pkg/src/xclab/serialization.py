"""JSON artifacts for every pipeline stage.

Rationals are written as ``"p/q"`` strings (``"p"`` when ``q = 1``) so files
stay exact; integers that are integral by construction are plain JSON ints.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from .approximator import ApproxExtension
from .discretizer import DiscretizedSystem
from .errors import ArtifactFormatError, XclabError
from .factorization import ExtendedFormulation, Factorization
from .linalg import RatMatrix
from .matroid import Matroid, validate_matroid
from .polytope import HPolytope, SlackMatrix, VertexSet


def format_rational(value: object) -> str:
    return str(Fraction(value))


def parse_rational(raw: object, where: str = "value") -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise ArtifactFormatError(f"{where}: expected an integer or a 'p/q' string, got {raw!r}.")
    if isinstance(raw, str) and any(mark in raw.lower() for mark in (".", "e")):
        raise ArtifactFormatError(f"{where}: decimal text {raw!r} is not an exact rational.")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ArtifactFormatError(f"{where}: cannot parse rational {raw!r}.") from exc


def _require(payload: Mapping[str, Any], key: str, kind: str) -> Any:
    if not isinstance(payload, Mapping):
        raise ArtifactFormatError(f"{kind}: expected a JSON object.")
    if key not in payload:
        raise ArtifactFormatError(f"{kind}: missing key '{key}'.")
    return payload[key]


def _int(raw: object, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ArtifactFormatError(f"{where}: expected an integer, got {raw!r}.")
    return raw


def _list(raw: object, where: str) -> list[Any]:
    if not isinstance(raw, list):
        raise ArtifactFormatError(f"{where}: expected a list, got {type(raw).__name__}.")
    return raw


def matrix_to_json(matrix: RatMatrix) -> list[list[str]]:
    return [[format_rational(value) for value in matrix.row(i)] for i in range(matrix.rows)]


def matrix_from_json(raw: object, where: str, cols: int | None = None) -> RatMatrix:
    rows = _list(raw, where)
    parsed = []
    for i, row in enumerate(rows):
        entries = _list(row, f"{where}[{i}]")
        parsed.append([parse_rational(value, f"{where}[{i}][{j}]") for j, value in enumerate(entries)])
    widths = {len(row) for row in parsed}
    if len(widths) > 1:
        raise ArtifactFormatError(f"{where}: ragged matrix with row lengths {sorted(widths)}.")
    width = widths.pop() if widths else (cols or 0)
    if cols is not None and width != cols:
        raise ArtifactFormatError(f"{where}: expected {cols} columns, got {width}.")
    return RatMatrix.from_rows(parsed, cols=width)


def _vector_to_json(values: Sequence[object]) -> list[str]:
    return [format_rational(value) for value in values]


def _vector_from_json(raw: object, where: str) -> tuple[Fraction, ...]:
    return tuple(parse_rational(value, f"{where}[{i}]") for i, value in enumerate(_list(raw, where)))


def _int_matrix(matrix: RatMatrix) -> list[list[int]]:
    return [[int(value) for value in matrix.row(i)] for i in range(matrix.rows)]


def vertex_set_to_json(X: VertexSet) -> dict[str, Any]:
    return {"n": X.n, "vertices": [list(vertex) for vertex in X.vertices]}


def vertex_set_from_json(payload: Mapping[str, Any]) -> VertexSet:
    n = _int(_require(payload, "n", "vertex set"), "n")
    vertices = []
    for i, vertex in enumerate(_list(_require(payload, "vertices", "vertex set"), "vertices")):
        entries = _list(vertex, f"vertices[{i}]")
        if any(isinstance(value, bool) or value not in (0, 1) for value in entries):
            raise ArtifactFormatError(f"vertices[{i}]: entries must be 0 or 1.")
        vertices.append(tuple(entries))
    try:
        return VertexSet(n, tuple(vertices))
    except XclabError as exc:
        raise ArtifactFormatError(f"vertex set: {exc}") from exc


def polytope_to_json(P: HPolytope) -> dict[str, Any]:
    return {"n": P.n, "A": [list(row) for row in P.A], "b": list(P.b), "delta": P.delta}


def polytope_from_json(payload: Mapping[str, Any]) -> HPolytope:
    n = _int(_require(payload, "n", "polytope"), "n")
    A = [[_int(value, f"A[{i}][{j}]") for j, value in enumerate(_list(row, f"A[{i}]"))]
         for i, row in enumerate(_list(_require(payload, "A", "polytope"), "A"))]
    b = [_int(value, f"b[{i}]") for i, value in enumerate(_list(_require(payload, "b", "polytope"), "b"))]
    delta = _int(_require(payload, "delta", "polytope"), "delta")
    try:
        return HPolytope(n, tuple(tuple(row) for row in A), tuple(b), delta)
    except XclabError as exc:
        raise ArtifactFormatError(f"polytope: {exc}") from exc


def slack_to_json(S: SlackMatrix) -> dict[str, Any]:
    return {"f": S.f, "v": S.v, "S": _int_matrix(S.S)}


def slack_from_json(payload: Mapping[str, Any]) -> SlackMatrix:
    f = _int(_require(payload, "f", "slack matrix"), "f")
    v = _int(_require(payload, "v", "slack matrix"), "v")
    matrix = matrix_from_json(_require(payload, "S", "slack matrix"), "S", cols=v)
    if matrix.rows != f:
        raise ArtifactFormatError(f"S: expected {f} rows, got {matrix.rows}.")
    return SlackMatrix(matrix)


def factorization_to_json(F: Factorization) -> dict[str, Any]:
    return {"U": matrix_to_json(F.U), "V": matrix_to_json(F.V), "r": F.r}


def factorization_from_json(payload: Mapping[str, Any]) -> Factorization:
    r = _int(_require(payload, "r", "factorization"), "r")
    U = matrix_from_json(_require(payload, "U", "factorization"), "U", cols=r)
    V = matrix_from_json(_require(payload, "V", "factorization"), "V")
    if V.rows != r:
        raise ArtifactFormatError(f"V: expected {r} rows, got {V.rows}.")
    return Factorization(U, V)


def extension_to_json(EF: ExtendedFormulation) -> dict[str, Any]:
    return {
        "n": EF.n,
        "r": EF.r,
        "A": matrix_to_json(EF.A),
        "b": _vector_to_json(EF.b),
        "U": matrix_to_json(EF.U),
    }


def system_to_json(D: DiscretizedSystem) -> dict[str, Any]:
    return {
        "n": D.n,
        "r": D.r,
        "delta": D.delta,
        "q": format_rational(D.q),
        "tol": format_rational(D.tol),
        "Abar": _int_matrix(D.Abar),
        "Ubar": matrix_to_json(D.Ubar),
        "bbar": [int(value) for value in D.bbar],
    }


def system_from_json(payload: Mapping[str, Any]) -> DiscretizedSystem:
    kind = "discretized system"
    n = _int(_require(payload, "n", kind), "n")
    r = _int(_require(payload, "r", kind), "r")
    delta = _int(_require(payload, "delta", kind), "delta")
    q = parse_rational(_require(payload, "q", kind), "q")
    tol = parse_rational(_require(payload, "tol", kind), "tol")
    Abar = matrix_from_json(_require(payload, "Abar", kind), "Abar", cols=n)
    Ubar = matrix_from_json(_require(payload, "Ubar", kind), "Ubar", cols=r)
    bbar = _vector_from_json(_require(payload, "bbar", kind), "bbar")
    try:
        return DiscretizedSystem(n, r, delta, Abar, Ubar, bbar, q, tol)
    except XclabError as exc:
        raise ArtifactFormatError(f"{kind}: {exc}") from exc


def approx_to_json(Q: ApproxExtension) -> dict[str, Any]:
    return {
        "n": Q.n,
        "r": Q.r,
        "epsilon": format_rational(Q.epsilon),
        "delta_small": format_rational(Q.delta_small),
        "grid": format_rational(Q.grid),
        "tol": format_rational(Q.tol),
        "B": matrix_to_json(Q.B),
        "C": matrix_to_json(Q.C),
        "d": _vector_to_json(Q.d),
    }


def matroid_to_json(M: Matroid) -> dict[str, Any]:
    return {"n": M.n, "independent": [list(subset) for subset in M.family()]}


def matroid_from_json(payload: Mapping[str, Any]) -> Matroid:
    n = _int(_require(payload, "n", "matroid"), "n")
    family = []
    for i, subset in enumerate(_list(_require(payload, "independent", "matroid"), "independent")):
        family.append(tuple(_int(value, f"independent[{i}]") for value in _list(subset, f"independent[{i}]")))
    return validate_matroid(n, family)


def objectives_from_json(payload: object) -> list[tuple[Fraction, ...]]:
    """Objective battery file: a list of vectors, or ``{"objectives": [...]}``."""
    raw = payload.get("objectives") if isinstance(payload, Mapping) else payload
    return [_vector_from_json(row, f"objectives[{i}]") for i, row in enumerate(_list(raw, "objectives"))]


def read_json(path: Path | str) -> Any:
    source = Path(path)
    try:
        return json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ArtifactFormatError(f"Cannot read {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ArtifactFormatError(f"{source} is not valid JSON: {exc}") from exc


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def write_json(path: Path | str, payload: Any) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps(payload), encoding="utf-8")
    return target


def load(path: Path | str, decoder: Callable[[Any], Any]) -> Any:
    return decoder(read_json(path))
