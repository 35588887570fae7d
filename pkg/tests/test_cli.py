"""Command line interface: exit codes, output shapes, determinism."""

import json
import subprocess
import sys

import pytest

from gkmkit import cli


def run(capsys, *argv):
    """Invoke the CLI in process; return (exit code, stdout, stderr)."""
    try:
        code = cli.main(list(argv))
    except SystemExit as stop:
        code = stop.code if isinstance(stop.code, int) else 3
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture()
def simplex_file(tmp_path, capsys):
    path = tmp_path / "s2.json"
    code, out, _ = run(capsys, "model", "simplex", "2")
    assert code == 0
    path.write_text(out)
    return str(path)


# -- exit codes --------------------------------------------------------------------


def test_validate_ok(simplex_file, capsys):
    code, out, _ = run(capsys, "validate", simplex_file)
    assert code == 0
    assert out.strip().endswith("ok")
    for name in ("vertex_references", "connection_axioms", "uniform_valence"):
        assert "PASS %s" % name in out


def test_validate_broken_graph(simplex_file, tmp_path, capsys):
    doc = json.loads(open(simplex_file).read())
    doc["edges"] = [e for e in doc["edges"] if e["id"] not in ("1-2", "1-2~")]
    bad = tmp_path / "broken.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1
    assert "FAIL uniform_valence" in out
    assert out.strip().endswith("invalid")


def test_garbage_json_is_an_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("garbage{")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 3
    assert "input error" in err


def test_missing_file_is_an_io_error(tmp_path, capsys):
    code, _, err = run(capsys, "validate", str(tmp_path / "nope.json"))
    assert code == 3
    assert "io error" in err


def test_unknown_subcommand(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 3


def test_no_arguments_prints_usage(capsys):
    code, _, err = run(capsys)
    assert code == 3
    assert "usage" in err.lower()


# -- betti output shape -------------------------------------------------------------


def test_betti_json_document(simplex_file, capsys):
    code, out, _ = run(capsys, "--format", "json", "betti", simplex_file)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert doc["command"] == "betti"
    assert doc["betti"] == [1, 1, 1]
    assert doc["equivariant"] == [1, 3, 6]
    assert doc["total"] == 3
    assert doc["vertices"] == 3


def test_betti_text_output(simplex_file, capsys):
    code, out, _ = run(capsys, "betti", simplex_file)
    assert code == 0
    assert "betti: (1, 1, 1)" in out


# -- determinism and option placement -----------------------------------------------


def test_repeated_runs_are_identical(simplex_file, capsys):
    outs = set()
    for _ in range(3):
        code, out, _ = run(capsys, "--format", "json", "betti", simplex_file)
        assert code == 0
        outs.add(out)
    assert len(outs) == 1


def test_jobs_flag_does_not_change_output(simplex_file, capsys):
    _, base, _ = run(capsys, "--format", "json", "betti", simplex_file)
    _, jobs, _ = run(capsys, "--format", "json", "--jobs", "4", "betti", simplex_file)
    assert base == jobs


def test_format_flag_accepted_after_subcommand(simplex_file, capsys):
    _, before, _ = run(capsys, "--format", "json", "betti", simplex_file)
    _, after, _ = run(capsys, "betti", simplex_file, "--format", "json")
    assert before == after


# -- acs ---------------------------------------------------------------------------------


def test_acs_refuses_biangle(tmp_path, capsys):
    code, out, _ = run(capsys, "model", "sigma", "2")
    path = tmp_path / "sigma2.json"
    path.write_text(out)
    code, out, _ = run(capsys, "acs", str(path))
    assert code == 2
    assert out.splitlines()[0] == "NO_LIFT: sign contradiction"


def test_acs_finds_square_lift(tmp_path, capsys):
    code, out, _ = run(capsys, "model", "hirzebruch", "0")
    path = tmp_path / "square.json"
    path.write_text(out)
    code, out, _ = run(capsys, "acs", str(path))
    assert code == 0
    assert out.splitlines()[0] == "LIFT_FOUND"


# -- pipeline ------------------------------------------------------------------------------


@pytest.fixture()
def quotient_file(tmp_path, capsys):
    code, out, _ = run(capsys, "model", "hypercube", "3", "--part", "quotient")
    assert code == 0
    path = tmp_path / "q3.json"
    path.write_text(out)
    return str(path)


def test_pipeline_classify_quotient(quotient_file, capsys):
    code, out, _ = run(capsys, "pipeline", "classify", quotient_file)
    assert code == 0
    assert out.splitlines()[0] == "nontrivial_cover"
    assert "deck order: 2" in out


def test_pipeline_classify_expectation_refuted(quotient_file, capsys):
    code, _, _ = run(
        capsys, "pipeline", "classify", quotient_file, "--expect-product"
    )
    assert code == 2


def test_pipeline_model_refuses_quotient3(quotient_file, capsys):
    code, out, _ = run(capsys, "pipeline", "model", quotient_file)
    assert code == 2
    assert out.startswith("FAILED at stage small_three_faces")


def test_pipeline_model_builds_square(tmp_path, capsys):
    code, out, _ = run(capsys, "model", "hirzebruch", "0")
    path = tmp_path / "square.json"
    path.write_text(out)
    code, out, _ = run(capsys, "pipeline", "model", str(path))
    assert code == 0
    assert "betti: (1, 2, 1)" in out
    assert "torus symmetry bound: 2" in out


# -- bott ------------------------------------------------------------------------------------


HIRZEBRUCH_SPEC = {
    "stages": [
        {"n": 1, "bundles": [[], []]},
        {"n": 1, "bundles": [[0], [1]]},
    ]
}


def test_bott_tower_betti(tmp_path, capsys):
    path = tmp_path / "h1.bott"
    path.write_text(json.dumps(HIRZEBRUCH_SPEC))
    code, out, _ = run(capsys, "--format", "json", "bott", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["betti"] == [1, 2, 1]
    assert doc["total"] == 4
    assert "x1^2 + x0*x1" in doc["relations"]


def test_bott_malformed_spec(tmp_path, capsys):
    path = tmp_path / "bad.bott"
    path.write_text('{"stages": "oops"}')
    code, _, err = run(capsys, "bott", str(path))
    assert code == 3
    assert "input error" in err


def test_bott_wrong_bundle_count(tmp_path, capsys):
    path = tmp_path / "short.bott"
    path.write_text('{"stages": [{"n": 1, "bundles": [[]]}]}')
    code, _, err = run(capsys, "bott", str(path))
    assert code == 3
    assert "2 integer vectors of length 0" in err


# -- faces -----------------------------------------------------------------------------


def test_faces_listing(simplex_file, capsys):
    code, out, _ = run(capsys, "faces", simplex_file, "--dim", "1")
    assert code == 0
    assert out.splitlines()[0] == "3 face(s) of dimension 1"


def test_faces_dimension_out_of_range(simplex_file, capsys):
    code, _, err = run(capsys, "faces", simplex_file, "--dim", "9")
    assert code == 3
    assert "between 1 and the valence" in err


# -- model emits graphs the other commands accept ---------------------------------------------


def test_model_pipe_round_trip():
    emit = subprocess.run(
        [sys.executable, "-m", "gkmkit", "model", "simplex", "2"],
        capture_output=True,
        text=True,
    )
    assert emit.returncode == 0
    check = subprocess.run(
        [sys.executable, "-m", "gkmkit", "validate", "-"],
        input=emit.stdout,
        capture_output=True,
        text=True,
    )
    assert check.returncode == 0
    assert check.stdout.strip().endswith("ok")
