import json
from fractions import Fraction

import pytest

from xclab.cli import EXIT_CERTIFICATE, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, build_parser, main
from xclab.config import REPO_ROOT
from xclab.factorization import trivial_factorization
from xclab.polytope import VertexSet, hull, slack_matrix
from xclab.serialization import factorization_to_json, read_json, vertex_set_to_json, write_json

EXAMPLES_DIR = REPO_ROOT / "configs" / "examples"
TRIANGLE = VertexSet(2, ((0, 0), (1, 0), (0, 1)))
SQUARE = VertexSet(2, ((0, 0), (0, 1), (1, 0), (1, 1)))


def _summary(out):
    line = [entry for entry in out.splitlines() if entry.startswith("[summary] ")][-1]
    return json.loads(line[len("[summary] "):])


@pytest.fixture
def triangle_file(tmp_path):
    return write_json(tmp_path / "triangle.json", vertex_set_to_json(TRIANGLE))


@pytest.fixture
def segment_file():
    return EXAMPLES_DIR / "segment.json"


def test_parser_lists_every_command():
    parser = build_parser()
    choices = parser._subparsers._group_actions[0].choices
    assert set(choices) == {
        "hull", "slack", "factorize", "extend", "verify-extension", "discretize", "reconstruct",
        "roundtrip", "approx", "optimize", "bound", "matroid", "nrank",
    }


def test_hull_writes_artifact_and_summary(segment_file, tmp_path, capsys):
    target = tmp_path / "out" / "hull.json"
    code = main(["hull", str(segment_file), "--out", str(target), "--check"])
    out = capsys.readouterr().out

    assert code == EXIT_OK
    assert read_json(target) == {"n": 1, "A": [[1], [-1]], "b": [1, 0], "delta": 2}
    assert "[start] hull" in out
    assert "[ok] non-redundancy: 2/2 rows certified" in out
    summary = _summary(out)
    assert summary["rows"] == 2
    assert summary["redundant_rows"] == []
    assert summary["exit_code"] == 0


def test_artifact_goes_to_stdout_without_out(triangle_file, capsys):
    assert main(["slack", str(triangle_file)]) == EXIT_OK
    out = capsys.readouterr().out
    body = out[out.index("{"):out.index("[done]")]
    assert json.loads(body)["S"] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_discretize_then_reconstruct(triangle_file, tmp_path, capsys):
    system_file = tmp_path / "system.json"
    assert main(["discretize", str(triangle_file), "--out", str(system_file)]) == EXIT_OK
    assert read_json(system_file)["q"] == "1/360"

    vertices_file = tmp_path / "vertices.json"
    assert main(["reconstruct", str(system_file), "--out", str(vertices_file)]) == EXIT_OK
    assert read_json(vertices_file) == vertex_set_to_json(TRIANGLE)
    assert _summary(capsys.readouterr().out)["vertices"] == 3


def test_discretize_accepts_a_rational_tolerance(segment_file, tmp_path):
    system_file = tmp_path / "system.json"
    assert main(["discretize", str(segment_file), "--tol", "1/100", "--out", str(system_file)]) == EXIT_OK
    assert read_json(system_file)["tol"] == "1/100"


def test_extend_and_verify_with_a_factorization_file(triangle_file, tmp_path, capsys):
    S = slack_matrix(hull(TRIANGLE), TRIANGLE)
    factor_file = write_json(tmp_path / "F.json", factorization_to_json(trivial_factorization(S, "right")))

    assert main(["extend", str(triangle_file), "--factorization", str(factor_file)]) == EXIT_OK
    assert _summary(capsys.readouterr().out)["r"] == 3

    assert main(["verify-extension", str(triangle_file), "--side", "left"]) == EXIT_OK
    summary = _summary(capsys.readouterr().out)
    assert summary["ok"] is True
    assert summary["failed"] == 0


def test_rejected_factorization_is_an_internal_error(triangle_file, tmp_path, capsys):
    bad = {"r": 1, "U": [["1"], ["0"], ["0"]], "V": [["1", "1", "1"]]}
    factor_file = write_json(tmp_path / "bad.json", bad)
    assert main(["verify-extension", str(triangle_file), "--factorization", str(factor_file)]) == EXIT_INTERNAL
    assert "[error] invariant breach (factorization)" in capsys.readouterr().out


def test_roundtrip_prints_the_reconstruction_count(capsys):
    assert main(["roundtrip", "--n", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[done] 3/3 reconstructed" in out
    assert _summary(out)["passed"] == 3


def test_roundtrip_can_save_a_report(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("XCLAB_REPORTS_DIR", str(tmp_path / "reports"))
    assert main(["roundtrip", "--n", "1", "--save-report"]) == EXIT_OK
    report = read_json(tmp_path / "reports" / "roundtrip_n1.json")
    assert [record["mask"] for record in report["records"]] == [1, 2, 3]


def test_saving_reports_can_default_from_the_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("XCLAB_REPORTS_DIR", str(tmp_path / "reports"))
    monkeypatch.setenv("XCLAB_SAVE_REPORTS", "yes")
    assert main(["roundtrip", "--n", "1", "--no-save-report"]) == EXIT_OK
    assert not (tmp_path / "reports" / "roundtrip_n1.json").exists()
    assert main(["roundtrip", "--n", "1"]) == EXIT_OK
    assert (tmp_path / "reports" / "roundtrip_n1.json").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["discretize", "SEGMENT", "--tol", "1"],
        ["discretize", "SEGMENT", "--tol", "1/6"],
        ["roundtrip", "--n", "1", "--tol", "1/6"],
    ],
)
def test_tolerance_above_the_separation_floor_is_a_usage_error(argv, segment_file, capsys):
    argv = [str(segment_file) if arg == "SEGMENT" else arg for arg in argv]
    assert main(argv) == EXIT_USAGE
    assert "[error] invalid --tol: Tolerance" in capsys.readouterr().out


def test_approx_with_objectives_file(segment_file, tmp_path, capsys):
    target = tmp_path / "approx.json"
    objectives = EXAMPLES_DIR / "objectives_1d.json"
    code = main(["approx", str(segment_file), "--eps", "1/2", "--objectives", str(objectives), "--out", str(target)])
    assert code == EXIT_OK
    payload = read_json(target)
    assert payload["Q"]["delta_small"] == "1/32"
    assert payload["certificates"]["ok"] is True
    assert _summary(capsys.readouterr().out)["rows"] == 10


def test_optimize_over_the_approximation(segment_file, capsys):
    assert main(["optimize", str(segment_file), "--objective", "1"]) == EXIT_OK
    value = Fraction(_summary(capsys.readouterr().out)["value"])
    assert 1 <= value <= Fraction(33, 32)


def test_bound_report(capsys):
    assert main(["bound", "--n", "20"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[info] certified: xc >= 47" in out
    assert _summary(out)["R_star"] == 47


def test_matroid_bound_flag(capsys):
    assert main(["bound", "--n", "4", "--matroid"]) == EXIT_OK
    assert "[info] target is 0; the bound is trivial" in capsys.readouterr().out


def test_matroid_polytope_emission(tmp_path, capsys):
    target = tmp_path / "P.json"
    argv = ["matroid", "--family", "graphic", "--edges", "1-2,2-3,1-3", "--emit", "polytope", "--out", str(target)]
    assert main(argv) == EXIT_OK
    payload = read_json(target)
    assert [1, 1, 1] in payload["A"]
    assert _summary(capsys.readouterr().out)["rank"] == 2


def test_matroid_file_round_trip(tmp_path):
    source = EXAMPLES_DIR / "uniform_2_4.json"
    target = tmp_path / "vertices.json"
    assert main(["matroid", str(source), "--family", "file", "--emit", "vertices", "--out", str(target)]) == EXIT_OK
    assert len(read_json(target)["vertices"]) == 11


def test_invalid_matroid_file_is_a_parse_error(tmp_path, capsys):
    source = write_json(tmp_path / "m.json", {"n": 2, "independent": [[], [1, 2]]})
    assert main(["matroid", str(source), "--family", "file"]) == EXIT_USAGE
    assert "[error] parse error" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["matroid", "--family", "uniform", "--n", "2", "--k", "3"],
        ["matroid", "--family", "graphic", "--edges", "1-2,2-1"],
    ],
)
def test_impossible_matroid_arguments_are_a_usage_error(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "[error] invalid matroid arguments" in capsys.readouterr().out


def test_nrank_of_the_square(tmp_path, capsys):
    square = write_json(tmp_path / "square.json", vertex_set_to_json(SQUARE))
    assert main(["nrank", str(square)]) == EXIT_OK
    summary = _summary(capsys.readouterr().out)
    assert (summary["lower"], summary["upper"], summary["exact"]) == (4, 4, True)


def test_failed_factorization_search_is_a_certificate_failure(triangle_file, monkeypatch, capsys):
    monkeypatch.setenv("XCLAB_NMF_ITERATIONS", "50")
    monkeypatch.setenv("XCLAB_NMF_RESTARTS", "2")
    assert main(["factorize", str(triangle_file), "--nmf-width", "2"]) == EXIT_CERTIFICATE
    out = capsys.readouterr().out
    assert "[fail] no exact factorization of width 2" in out
    assert _summary(out)["exit_code"] == EXIT_CERTIFICATE


@pytest.mark.parametrize(
    "argv",
    [
        ["hull"],
        ["no-such-command"],
        ["approx", "x.json", "--eps", "0.5"],
        ["approx", "x.json", "--eps", "-1/2"],
        ["roundtrip"],
    ],
)
def test_usage_errors_exit_with_one(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_missing_input_file(tmp_path, capsys):
    assert main(["hull", str(tmp_path / "absent.json")]) == EXIT_USAGE
    assert "[error] parse error: Cannot read" in capsys.readouterr().out


def test_malformed_vertex_file(tmp_path, capsys):
    source = write_json(tmp_path / "bad.json", {"n": 2, "vertices": [[0, 2]]})
    assert main(["hull", str(source)]) == EXIT_USAGE


def test_version_flag(capsys):
    assert main(["--version"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("xclab ")
