import pytest
from pathlib import Path
import numpy as np

from scrollsmith.src.algebra_tools.fields import ScalarField
from scrollsmith.src.algebra_tools.matrix import ExactMatrix
from scrollsmith.src.algebra_tools.poly import polynomial_ring
from scrollsmith.src.errors import InvalidProjectionError
from scrollsmith.src.scroll_tools import ProjectionMatrix, ScrollSpec
from scrollsmith.src.verification import load_paper_lambda


@pytest.fixture
def gf31():
    return ScalarField.prime(31)

@pytest.fixture
def gf7():
    return ScalarField.prime(7)

@pytest.fixture
def qq():
    return ScalarField.rationals()

@pytest.fixture
def rng():
    return np.random.default_rng(0)

@pytest.fixture
def spec18():
    return ScrollSpec(1, 8, 5)

@pytest.fixture
def spec14():
    return ScrollSpec(1, 4, 5)

@pytest.fixture
def z_ring31():
    return polynomial_ring(6, 31, prefix="z")

@pytest.fixture(scope="session")
def paper_projection():
    return load_paper_lambda()

@pytest.fixture
def random_projection():
    """Factory for full-rank random projections of a scroll over GF(p)."""
    def build(spec: ScrollSpec, p: int, rng: np.random.Generator) -> ProjectionMatrix:
        while True:
            matrix = ExactMatrix.random(p, spec.D + 2, spec.N + 1, rng)
            try:
                return ProjectionMatrix(spec, matrix)
            except InvalidProjectionError:
                continue
    return build

@pytest.fixture
def clean_env(monkeypatch, mocker):
    for name in ("THREADS", "PRIMES", "SEED", "LOG_LEVEL"):
        monkeypatch.delenv(f"SCROLLSMITH_{name}", raising=False)
    mocker.patch("scrollsmith.src.config.load_dotenv")
    return monkeypatch

@pytest.fixture
def test_data_dir(tmp_path):
    path = Path(tmp_path) / "test_data"
    path.mkdir()
    return path
