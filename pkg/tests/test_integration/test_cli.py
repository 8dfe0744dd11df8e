import json
import pytest

from scrollsmith.src.certificates import Certificate, Verdict
from scrollsmith.src.cli import main
from scrollsmith.src.errors import SearchFailedError
from scrollsmith.src.scroll_gen import ChainPlan, ConstructionResult, SweepOutcome, SweepResult
from scrollsmith.src.scroll_tools import SingularScrollReport
from scrollsmith.src.verification import (
    PAPER_EXPECTATIONS,
    PAPER_LAMBDA_PATH,
    load_projection,
    matrix_checksum,
)


def _certificate(verdict):
    return Certificate(spec={"u": 1, "v": 8, "N": 5}, lambda_checksum="0" * 64, verdict=verdict)

def test_foursquare(clean_env, capsys):
    assert main(["foursquare", "--r", "8", "--v", "8"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["plans"][0] == [4, 2, 2, 1]
    assert main(["foursquare", "--r", "8", "--v", "4"]) == 2

def test_foursquare_text_output(clean_env, capsys):
    assert main(["foursquare", "--r", "8", "--v", "4", "--format", "text"]) == 2
    assert capsys.readouterr().out.strip() == "no plan"

def test_dims(clean_env, capsys):
    assert main(["dims", "--D", "9", "--N", "5", "--r", "8"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["formulas"]["dim_hilbert"] == 59
    assert payload["formulas"]["dim_singular_lower_bound"] == 51
    assert payload["formulas"]["bound_r"] == 8
    assert [row["u"] for row in payload["strata"]] == [1, 2, 3, 4]

def test_dims_writes_file(clean_env, test_data_dir):
    out = test_data_dir / "dims.json"
    assert main(["dims", "--D", "9", "--N", "5", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["formulas"]["center_space_dim"] == 30

@pytest.mark.parametrize("argv", [
    [],
    ["--bogus"],
    ["construct", "--r", "x", "--v", "8"],
    ["construct", "--r", "8", "--v", "8", "--sweep", "0"],
    ["dims", "--D", "9"],
    ["dims", "--D", "3", "--N", "5"],
    ["foursquare", "--r", "8", "--v", "8", "--primes", "31,33"],
    ["foursquare", "--r", "8", "--v", "8", "--format", "xml"],
])
def test_usage_errors(clean_env, argv):
    assert main(argv) == 64

@pytest.mark.parametrize("primes", ["2", "3", "31,3"])
def test_paper_example_rejects_small_characteristic(clean_env, primes):
    assert main(["paper-example", "--primes", primes]) == 64

def test_construct_infeasible(clean_env, test_data_dir):
    assert main(["construct", "--r", "8", "--v", "4", "--out", str(test_data_dir)]) == 2
    assert not (test_data_dir / "lambda.json").exists()

def test_construct_search_failure(clean_env, mocker, test_data_dir):
    mocker.patch(
        "scrollsmith.src.cli.construct_scroll",
        side_effect=SearchFailedError("pick_frame", "no frame passed the tangent test"),
    )
    assert main(["construct", "--r", "8", "--v", "8", "--out", str(test_data_dir)]) == 3

def test_construct_writes_lambda_and_report(clean_env, mocker, test_data_dir,
                                            paper_projection, spec18):
    result = ConstructionResult(
        spec=spec18,
        plan=ChainPlan.default((4, 2, 2, 1)),
        frame=None,
        projection=paper_projection,
        reports={31: SingularScrollReport(spec18, 31, tangent_clearance=True)},
    )
    construct = mocker.patch("scrollsmith.src.cli.construct_scroll", return_value=result)
    argv = ["construct", "--r", "8", "--v", "8", "--seed", "4", "--out", str(test_data_dir)]
    assert main(argv) == 0
    assert construct.call_args.kwargs["seed"] == 4
    report = json.loads((test_data_dir / "report.json").read_text())
    assert report["plan"]["sizes"] == [4, 2, 2, 1]
    assert report["command"] == ["scrollsmith"] + argv
    assert load_projection(test_data_dir / "lambda.json").matrix == paper_projection.matrix

def test_construct_sweep(clean_env, mocker, test_data_dir):
    sweep = mocker.patch(
        "scrollsmith.src.cli.sweep_seeds",
        return_value=SweepResult([SweepOutcome(5, "ok", {31: 8}), SweepOutcome(6, "search_failed")]),
    )
    argv = ["construct", "--r", "8", "--v", "8", "--seed", "5", "--sweep", "2",
            "--out", str(test_data_dir)]
    assert main(argv) == 3
    assert list(sweep.call_args.args[2]) == [5, 6]
    payload = json.loads((test_data_dir / "sweep.json").read_text())
    assert payload["success_rate"] == 0.5
    assert payload["outcomes"][0]["pair_counts"] == {"31": 8}

def test_verify_failure(clean_env, mocker, capsys):
    verifier = mocker.patch("scrollsmith.src.cli.ScrollVerifier")
    verifier.return_value.verify.return_value = _certificate(Verdict.FAIL)
    assert main(["verify", "--lambda", str(PAPER_LAMBDA_PATH)]) == 1
    assert json.loads(capsys.readouterr().out)["verdict"] == "FAIL"

def test_verify_missing_file(clean_env, test_data_dir):
    assert main(["verify", "--lambda", str(test_data_dir / "absent.json")]) == 64

def test_paper_example_uses_reference_values(clean_env, mocker, capsys):
    verifier = mocker.patch("scrollsmith.src.cli.ScrollVerifier")
    verifier.return_value.verify.return_value = _certificate(Verdict.PASS)
    assert main(["paper-example", "--format", "text"]) == 0
    assert verifier.call_args.kwargs["expected"] == PAPER_EXPECTATIONS
    assert "verdict PASS" in capsys.readouterr().out

def test_construct_runs_end_to_end(clean_env, test_data_dir):
    argv = ["construct", "--r", "0", "--v", "4", "--seed", "1", "--primes", "31",
            "--out", str(test_data_dir)]
    assert main(argv) == 0
    projection = load_projection(test_data_dir / "lambda.json")
    report = json.loads((test_data_dir / "report.json").read_text())
    assert report["verdict"] == "PASS"
    assert report["plan"]["sizes"] == [1, 1, 1, 1]
    assert report["lambda_checksum"] == matrix_checksum(projection.matrix)
    assert report["reports"]["31"]["tangent_clearance"]

@pytest.mark.slow
def test_verify_a_constructed_projection(clean_env, test_data_dir):
    argv = ["construct", "--r", "8", "--v", "8", "--seed", "1", "--primes", "31",
            "--out", str(test_data_dir)]
    assert main(argv) == 0
    out = test_data_dir / "verify.json"
    assert main(["verify", "--lambda", str(test_data_dir / "lambda.json"), "--primes", "31",
                 "--out", str(out)]) == 0
    certificate = json.loads(out.read_text())
    assert certificate["verdict"] == "PASS"
    section = certificate["primes"]["31"]
    assert section["singular_pairs"]["pair_count"] >= 8
    assert section["cubics_dim"] >= 6
