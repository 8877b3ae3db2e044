"""Command-line front end: hull -> slack -> factorize -> extend/discretize/approx -> verify/bound.

Every stage reads and writes JSON artifacts. Progress goes to stdout as tagged
lines and each command ends with one ``[summary] {json}`` line.

Exit codes: 0 ok, 1 usage or parse error, 2 certificate failure,
3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .approximator import build_approx, objective_battery, optimize_over, verify_sandwich
from .config import (
    default_jobs,
    default_log_level,
    default_seed,
    nmf_iterations,
    nmf_restarts,
    reports_dir,
    save_reports,
    to_fraction,
)
from .counting import certified_matroid_xc_lower_bound, certified_xc_lower_bound
from .discretizer import check_tolerance, discretize, reconstruct
from .errors import ArtifactFormatError, DomainError, MatroidAxiomError, XclabError
from .factorization import (
    Factorization,
    build_extension,
    nonnegative_rank_bounds,
    trivial_factorization,
    validate_factorization,
    verify_extension,
)
from .matroid import Matroid, characteristic_vectors, complete_graph_edges, graphic, matroid_polytope, uniform
from .nmf import nmf_heuristic
from .polytope import VertexSet, hull, is_non_redundant, slack_matrix
from .serialization import (
    approx_to_json,
    dumps,
    extension_to_json,
    factorization_from_json,
    factorization_to_json,
    load,
    matroid_from_json,
    matroid_to_json,
    objectives_from_json,
    polytope_to_json,
    slack_to_json,
    system_from_json,
    system_to_json,
    vertex_set_from_json,
    vertex_set_to_json,
    write_json,
)
from .sweep import roundtrip_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CERTIFICATE = 2
EXIT_INTERNAL = 3

LOG_FORMAT = "%(asctime)s [%(levelname)-8s] %(name)s: %(message)s"


def configure_logging(level: str) -> None:
    root = logging.getLogger()
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%Y-%m-%dT%H:%M:%S"))
    root.addHandler(handler)
    root.setLevel(getattr(logging, level.upper(), logging.WARNING))


def _log(tag: str, msg: str) -> None:
    print(f"[{tag}] {msg}", flush=True)


def _fmt_elapsed(seconds: float) -> str:
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes = int(seconds // 60)
    return f"{minutes}m {int(round(seconds - minutes * 60))}s"


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[Path, ...] = ()
    out: Path | None = None
    n: int | None = None
    epsilon: Fraction | None = None
    tol: Fraction | None = None
    seed: int = 0
    jobs: int = 1
    options: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        known = {"command", "input", "out", "n", "eps", "tol", "seed", "jobs", "log_level", "handler"}
        inputs = (Path(args.input),) if getattr(args, "input", None) else ()
        return cls(
            command=args.command,
            inputs=inputs,
            out=Path(args.out) if args.out else None,
            n=getattr(args, "n", None),
            epsilon=getattr(args, "eps", None),
            tol=getattr(args, "tol", None),
            seed=args.seed,
            jobs=args.jobs,
            options={key: value for key, value in vars(args).items() if key not in known},
        )


@dataclass
class Outcome:
    summary: dict[str, Any]
    artifact: Any = None
    certified: bool = True


def _emit(config: RunConfig, artifact: Any) -> None:
    if artifact is None:
        return
    if config.out is not None:
        target = write_json(config.out, artifact)
        _log("ok", f"wrote {target}")
    else:
        sys.stdout.write(dumps(artifact))
        sys.stdout.flush()


def _vertex_set(config: RunConfig) -> VertexSet:
    return load(config.inputs[0], vertex_set_from_json)


def _factorization_for(config: RunConfig, X: VertexSet) -> Factorization | None:
    path = config.options.get("factorization")
    if not path:
        side = config.options.get("side")
        if side:
            return trivial_factorization(slack_matrix(hull(X), X), side)
        return None
    return load(path, factorization_from_json)


def cmd_hull(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    P = hull(X)
    summary: dict[str, Any] = {"n": P.n, "rows": P.f, "delta": P.delta}
    certified = True
    if config.options.get("check"):
        report = is_non_redundant(P)
        failed = [cert.row + 1 for cert in report if not cert.ok]
        certified = not failed
        summary["redundant_rows"] = failed
        _log("ok" if certified else "fail", f"non-redundancy: {len(report) - len(failed)}/{len(report)} rows certified")
    return Outcome(summary, polytope_to_json(P), certified)


def cmd_slack(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    S = slack_matrix(hull(X), X)
    return Outcome({"f": S.f, "v": S.v}, slack_to_json(S))


def cmd_factorize(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    S = slack_matrix(hull(X), X)
    width = config.options.get("nmf_width")
    if width is None:
        F = trivial_factorization(S, config.options.get("side") or "left")
    else:
        found = nmf_heuristic(S, width, seed=config.seed, iterations=nmf_iterations(), restarts=nmf_restarts())
        if found is None:
            _log("fail", f"no exact factorization of width {width} found (seed={config.seed})")
            return Outcome({"r": width, "found": False}, None, certified=False)
        F = found
    check = validate_factorization(S, F)
    _log("ok" if check.ok else "fail", f"factorization of width {F.r}: {check.message}")
    return Outcome({"r": F.r, "valid": check.ok}, factorization_to_json(F), check.ok)


def cmd_extend(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    P = hull(X)
    F = _factorization_for(config, X) or trivial_factorization(slack_matrix(P, X), "left")
    EF = build_extension(P, F, X)
    return Outcome({"n": EF.n, "r": EF.r, "size": EF.size}, extension_to_json(EF))


def cmd_verify_extension(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    P = hull(X)
    F = _factorization_for(config, X) or trivial_factorization(slack_matrix(P, X), "left")
    report = verify_extension(build_extension(P, F, X), X)
    for failure in report.failures():
        _log("fail", f"{failure.name}: {failure.detail}")
    return Outcome(report.counts() | {"ok": report.ok}, report.to_json(), report.ok)


def _check_tol(n: int, r: int, tol: Fraction) -> None:
    try:
        check_tolerance(n, r, tol)
    except DomainError as exc:
        raise ValueError(f"invalid --tol: {exc}") from exc


def cmd_discretize(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    F = _factorization_for(config, X)
    if config.tol is not None:
        _check_tol(X.n, F.r if F is not None else len(X), config.tol)
    D = discretize(X, F, tol=config.tol)
    return Outcome({"n": D.n, "r": D.r, "q": str(D.q), "tol": str(D.tol)}, system_to_json(D))


def cmd_reconstruct(config: RunConfig) -> Outcome:
    D = load(config.inputs[0], system_from_json)
    X = reconstruct(D)
    return Outcome({"n": X.n, "vertices": len(X)}, vertex_set_to_json(X))


def cmd_roundtrip(config: RunConfig) -> Outcome:
    n = config.n or 1
    started = time.monotonic()

    def progress(done: int, total: int) -> None:
        if done % 50 == 0 or done == total:
            _log("info", f"{done}/{total} vertex sets processed")

    if config.tol is not None:
        _check_tol(n, 1 << n, config.tol)
    summary = roundtrip_sweep(n, jobs=config.jobs, tol=config.tol, progress=progress)
    for record in summary.failures():
        _log("fail", f"mask {record.mask}: reconstructed={record.reconstructed_ok} "
                     f"extension={record.extension_ok} margin={record.margin_ok}")
    if not summary.injective:
        _log("fail", "two vertex sets produced the same discretized system")
    _log("done", f"{summary.passed}/{summary.total} reconstructed ({_fmt_elapsed(time.monotonic() - started)})")
    payload = summary.to_json()
    if config.options.get("save_report"):
        target = write_json(reports_dir() / f"roundtrip_n{n}.json", payload | {
            "records": [
                {
                    "mask": record.mask,
                    "r": record.r,
                    "max_member_deviation": str(record.max_member_deviation),
                    "min_nonmember_margin": None if record.min_nonmember_margin is None
                    else str(record.min_nonmember_margin),
                }
                for record in summary.records
            ],
        })
        _log("ok", f"wrote {target}")
    return Outcome(payload, None, summary.ok)


def _objectives(config: RunConfig, X: VertexSet) -> list[tuple[Fraction, ...]]:
    path = config.options.get("objectives")
    if path:
        return objectives_from_json(load(path, lambda payload: payload))
    return objective_battery(hull(X), seed=config.seed)


def cmd_approx(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    epsilon = config.epsilon or Fraction(1, 2)
    Q = build_approx(X, _factorization_for(config, X), epsilon=epsilon)
    report = verify_sandwich(Q, X, _objectives(config, X))
    for failure in report.failures():
        _log("fail", f"{failure.name}: {failure.detail}")
    summary = {"n": Q.n, "r": Q.r, "rows": Q.rows, "epsilon": str(epsilon), "delta_small": str(Q.delta_small)}
    return Outcome(summary | report.counts(), {"Q": approx_to_json(Q), "certificates": report.to_json()}, report.ok)


def cmd_optimize(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    epsilon = config.epsilon or Fraction(1, 2)
    Q = build_approx(X, _factorization_for(config, X), epsilon=epsilon)
    objective = config.options.get("objective")
    c = tuple(to_fraction(part) for part in objective.split(",")) if objective else (Fraction(1),) * X.n
    value, point = optimize_over(Q, c)
    artifact = {"objective": [str(v) for v in c], "value": str(value), "x": [str(v) for v in point]}
    return Outcome({"value": str(value)}, artifact)


def cmd_bound(config: RunConfig) -> Outcome:
    n = config.n or 1
    calculator = certified_matroid_xc_lower_bound if config.options.get("matroid") else certified_xc_lower_bound
    report = calculator(n)
    for line in report.transcript():
        _log("info", line)
    ok = report.bracket_ok()
    _log("ok" if ok else "fail", f"R_star={report.R_star} bracket={'certified' if ok else 'broken'}")
    return Outcome({"n": n, "R_star": report.R_star, "bracket_ok": ok}, report.to_json(), ok)


def _parse_edges(raw: str) -> list[tuple[int, int]]:
    edges = []
    for part in raw.split(","):
        left, sep, right = part.strip().partition("-")
        if not sep:
            raise ValueError(f"Edge '{part}' must look like 'u-v'.")
        edges.append((int(left), int(right)))
    return edges


def _matroid_from_arguments(config: RunConfig) -> Matroid:
    try:
        if config.options.get("family") == "uniform":
            return uniform(config.n or 0, config.options.get("k") or 0)
        edges = config.options.get("edges")
        return graphic(_parse_edges(edges) if edges else complete_graph_edges(config.options.get("nodes") or 3))
    except DomainError as exc:
        raise ValueError(f"invalid matroid arguments: {exc}") from exc


def _matroid(config: RunConfig) -> Matroid:
    if config.options.get("family") in {"uniform", "graphic"}:
        return _matroid_from_arguments(config)
    if not config.inputs:
        raise ArtifactFormatError("--family file needs an input matroid file.")
    return load(config.inputs[0], matroid_from_json)


def cmd_matroid(config: RunConfig) -> Outcome:
    M = _matroid(config)
    emit = config.options.get("emit") or "matroid"
    summary: dict[str, Any] = {"n": M.n, "independent_sets": len(M.independent), "rank": M.rank()}
    if emit == "vertices":
        return Outcome(summary, vertex_set_to_json(characteristic_vectors(M)))
    if emit == "polytope":
        _, P = matroid_polytope(M)
        summary["rows"] = P.f
        return Outcome(summary, polytope_to_json(P))
    return Outcome(summary, matroid_to_json(M))


def cmd_nrank(config: RunConfig) -> Outcome:
    X = _vertex_set(config)
    S = slack_matrix(hull(X), X)
    bounds = nonnegative_rank_bounds(S, seed=config.seed, iterations=nmf_iterations(), restarts=nmf_restarts())
    summary = {
        "f": S.f,
        "v": S.v,
        "rank": bounds.rank,
        "rectangle_cover": bounds.rectangle_cover,
        "lower": bounds.lower,
        "upper": bounds.upper,
        "exact": bounds.exact,
    }
    artifact = dict(summary)
    if bounds.witness is not None:
        artifact["witness"] = factorization_to_json(bounds.witness)
    return Outcome(summary, artifact)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(raw: str) -> Fraction:
    try:
        value = to_fraction(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive rational, got {raw}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xclab", description="Exact extension complexity laboratory for 0/1 polytopes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=default_log_level(), help="Python logging level for library detail.")

    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="Write the JSON artifact here instead of stdout.")
    common.add_argument("--seed", type=int, default=default_seed(), help="Seed for randomized steps.")
    common.add_argument("--jobs", type=int, default=default_jobs(), help="Worker processes for sweeps.")

    factorized = _Parser(add_help=False)
    factorized.add_argument("--factorization", default=None, help="Factorization JSON to use instead of a trivial one.")
    factorized.add_argument("--side", choices=["left", "right"], default=None, help="Trivial factorization side.")

    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[RunConfig], Outcome], help_text: str, *parents: argparse.ArgumentParser):
        command = sub.add_parser(name, parents=[common, *parents], help=help_text)
        command.set_defaults(handler=handler)
        return command

    command = add("hull", cmd_hull, "Integer facet description of conv(X).")
    command.add_argument("input")
    command.add_argument("--check", action="store_true", help="Certify non-redundancy of every row by LP.")

    add("slack", cmd_slack, "Slack matrix of conv(X).").add_argument("input")

    command = add("factorize", cmd_factorize, "Nonnegative factorization of the slack matrix.")
    command.add_argument("input")
    command.add_argument("--side", choices=["left", "right"], default="left")
    command.add_argument("--nmf-width", type=int, default=None, help="Search for an exact factorization of this width.")

    add("extend", cmd_extend, "Extended formulation from a factorization.", factorized).add_argument("input")
    add("verify-extension", cmd_verify_extension, "Certify an extended formulation.", factorized).add_argument("input")

    command = add("discretize", cmd_discretize, "Rounded system encoding X.", factorized)
    command.add_argument("input")
    command.add_argument("--tol", type=_rational, default=None, help="Membership tolerance p/q.")

    add("reconstruct", cmd_reconstruct, "Recover X from a rounded system.").add_argument("input")

    command = add("roundtrip", cmd_roundtrip, "Exhaustive discretize/reconstruct sweep.")
    command.add_argument("--n", type=int, required=True)
    command.add_argument("--tol", type=_rational, default=None)
    command.add_argument(
        "--save-report",
        action=argparse.BooleanOptionalAction,
        default=save_reports(),
        help="Write per-set records under the reports dir (default from XCLAB_SAVE_REPORTS).",
    )

    command = add("approx", cmd_approx, "Approximate extension with sandwich certificates.", factorized)
    command.add_argument("input")
    command.add_argument("--eps", type=_rational, default=Fraction(1, 2))
    command.add_argument("--objectives", default=None, help="JSON list of objective vectors.")

    command = add("optimize", cmd_optimize, "Maximize an objective over the approximate extension.", factorized)
    command.add_argument("input")
    command.add_argument("--eps", type=_rational, default=Fraction(1, 2))
    command.add_argument("--objective", default=None, help="Comma-separated rationals, e.g. 1,-1/2.")

    command = add("bound", cmd_bound, "Certified counting lower bound.")
    command.add_argument("--n", type=int, required=True)
    command.add_argument("--matroid", action="store_true")

    command = add("matroid", cmd_matroid, "Build a matroid and emit it, its vertices or its polytope.")
    command.add_argument("input", nargs="?")
    command.add_argument("--family", choices=["uniform", "graphic", "file"], required=True)
    command.add_argument("--n", type=int, default=None)
    command.add_argument("--k", type=int, default=None)
    command.add_argument("--edges", default=None, help="Edge list such as 1-2,2-3,1-3.")
    command.add_argument("--nodes", type=int, default=None, help="Complete graph size when --edges is absent.")
    command.add_argument("--emit", choices=["matroid", "vertices", "polytope"], default="matroid")

    add("nrank", cmd_nrank, "Nonnegative rank bracket of the slack matrix.").add_argument("input")
    return parser


def run(config: RunConfig, handler: Callable[[RunConfig], Outcome]) -> int:
    _log("start", f"{config.command} " + " ".join(str(path) for path in config.inputs))
    started = time.monotonic()
    outcome = handler(config)
    _emit(config, outcome.artifact)
    elapsed = time.monotonic() - started
    code = EXIT_OK if outcome.certified else EXIT_CERTIFICATE
    _log("done" if code == EXIT_OK else "error", f"{config.command} ({_fmt_elapsed(elapsed)})")
    print("[summary] " + json.dumps(outcome.summary | {"command": config.command, "exit_code": code}), flush=True)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.log_level)
    config = RunConfig.from_args(args)
    try:
        return run(config, args.handler)
    except (ArtifactFormatError, MatroidAxiomError) as exc:
        _log("error", f"parse error: {exc}")
        return EXIT_USAGE
    except XclabError as exc:
        _log("error", f"invariant breach ({exc.code}): {exc}")
        return EXIT_INTERNAL
    except (ValueError, OSError) as exc:
        _log("error", str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
