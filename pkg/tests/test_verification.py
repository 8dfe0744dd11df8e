import json
import pytest

from scrollsmith.src.certificates import PrimeSection, StageResult, Verdict
from scrollsmith.src.config import RunConfig
from scrollsmith.src.errors import ConsistencyError, UnsupportedCharacteristicError
from scrollsmith.src.scroll_tools import ScrollSpec
from scrollsmith.src.utils import FileUtils
from scrollsmith.src.verification import (
    PAPER_EXPECTATIONS,
    PAPER_LAMBDA_PATH,
    ExpectedValues,
    ScrollVerifier,
    _compare,
    load_projection,
    matrix_checksum,
    projection_asset,
)


def _section(pair_count, cubics_dim=6, stages=()):
    return PrimeSection(
        prime=31,
        singular_pairs={"pair_count": pair_count},
        cubics_dim=cubics_dim,
        stages=list(stages),
    )

def test_shipped_projection(paper_projection):
    assert paper_projection.spec == ScrollSpec(1, 8, 5)
    assert paper_projection.matrix.shape == (11, 6)
    assert paper_projection.field.modulus is None
    asset = FileUtils.read_json(PAPER_LAMBDA_PATH)
    assert matrix_checksum(paper_projection.matrix) == asset["checksum"]

def test_tampered_projection_is_rejected(test_data_dir):
    asset = FileUtils.read_json(PAPER_LAMBDA_PATH)
    asset["matrix"]["entries"][3][0] = "121"
    path = FileUtils.write_json_atomic(test_data_dir / "lambda.json", asset)
    with pytest.raises(ConsistencyError):
        load_projection(path)

def test_projection_asset_reloads(paper_projection, test_data_dir):
    path = FileUtils.write_json_atomic(
        test_data_dir / "copy.json", projection_asset(paper_projection)
    )
    assert load_projection(path).matrix == paper_projection.matrix

def test_compare():
    assert _compare("rank", 53, None).passed
    assert _compare("rank", 53, 53).passed
    assert not _compare("rank", 52, 53).passed

def test_primes_dividing_six_are_rejected(paper_projection):
    verifier = ScrollVerifier(RunConfig(primes=(3,)))
    with pytest.raises(UnsupportedCharacteristicError):
        verifier.verify(paper_projection)

def test_invariants_pass(mocker, paper_projection):
    mocker.patch.object(ScrollVerifier, "_verify_prime", return_value=_section(8))
    certificate = ScrollVerifier(RunConfig(), PAPER_EXPECTATIONS, ["paper-example"]).verify(
        paper_projection
    )
    assert certificate.verdict == Verdict.PASS
    assert certificate.invariants.selfint == 41
    assert certificate.invariants.discriminant == 42
    assert certificate.invariants.rho == "13"
    assert certificate.invariants.section_chain["ideal"] == 6
    assert certificate.command == ["paper-example"]
    json.dumps(certificate.model_dump(mode="json"))

def test_invariants_fail_with_fewer_pairs(mocker, paper_projection):
    mocker.patch.object(ScrollVerifier, "_verify_prime", return_value=_section(7))
    certificate = ScrollVerifier(RunConfig(), PAPER_EXPECTATIONS).verify(paper_projection)
    assert certificate.verdict == Verdict.FAIL
    assert "selfint" in certificate.failed_stages()

def test_failing_prime_stage_fails_the_certificate(mocker, paper_projection):
    failed = StageResult(stage="cubics_dim", passed=False, observed=5, expected=6)
    mocker.patch.object(ScrollVerifier, "_verify_prime", return_value=_section(8, 5, [failed]))
    certificate = ScrollVerifier(RunConfig(), ExpectedValues()).verify(paper_projection)
    assert certificate.failed_stages() == ["31:cubics_dim"]
    assert certificate.verdict == Verdict.FAIL
