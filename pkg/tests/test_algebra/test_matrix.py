import pytest

from scrollsmith.src.algebra_tools.fields import ScalarField
from scrollsmith.src.algebra_tools.matrix import ExactMatrix, laplace_determinant
from scrollsmith.src.errors import ContextMismatchError


def _invertible(F, n, rng):
    while True:
        G = ExactMatrix.random(F, n, n, rng)
        if G.determinant():
            return G

def test_rank_depends_on_field(qq):
    entries = [[1, 1], [1, -1]]
    assert ExactMatrix(qq, entries).rank() == 2
    assert ExactMatrix(2, entries).rank() == 1

def test_rank_of_rational_matrix(qq):
    M = ExactMatrix(qq, [["1/2", "1", "3/4"], ["1", "2", "3/2"], ["0", "1", "5"]])
    assert M.rank() == 2
    assert M.shape == (3, 3)

def test_kernel_basis(gf31, rng):
    M = ExactMatrix.random(gf31, 4, 7, rng)
    kernel = M.kernel_basis()
    assert len(kernel) == M.cols - M.rank()
    for w in kernel:
        assert not any(M.apply(w))

def test_left_kernel_basis(gf31, rng):
    M = ExactMatrix.random(gf31, 7, 3, rng)
    left = M.left_kernel_basis()
    assert len(left) == M.rows - M.rank()
    for c in left:
        assert not any(M.left_apply(c))

def test_rank_invariant_under_column_change(gf31, rng):
    M = ExactMatrix.random(gf31, 5, 4, rng)
    M = ExactMatrix.vstack([M, M])
    G = _invertible(gf31, 4, rng)
    assert (M @ G).rank() == M.rank()

def test_determinant(qq, gf31, rng):
    assert ExactMatrix(qq, [[2, 1], [1, 1]]).determinant() == qq.one
    assert ExactMatrix(qq, [["1/2", "1"], ["1", "4"]]).determinant() == qq(1)
    A = ExactMatrix.random(gf31, 4, 4, rng)
    B = ExactMatrix.random(gf31, 4, 4, rng)
    assert (A @ B).determinant() == A.determinant() * B.determinant()
    with pytest.raises(ValueError):
        ExactMatrix.random(gf31, 2, 3, rng).determinant()

def test_laplace_matches_elimination(qq):
    entries = [[2, 0, 1], [1, 3, 2], [1, 1, 2]]
    M = ExactMatrix(qq, entries)
    assert laplace_determinant(M.entries) == M.determinant() == qq(6)

def test_minors_count(gf31, rng):
    M = ExactMatrix.random(gf31, 3, 4, rng)
    assert len(list(M.minors(3))) == 4

def test_rref_pivots(qq):
    reduced, pivots = ExactMatrix(qq, [[0, 2, 4], [0, 1, 2], [1, 0, 0]]).rref()
    assert pivots == [0, 1]
    assert reduced.row(0) == (qq(1), qq(0), qq(0))

def test_reduce_mod(qq):
    M = ExactMatrix(qq, [["1/2", "3"]])
    assert M.reduce_mod(7).to_ints() == [[4, 3]]
    with pytest.raises(ContextMismatchError):
        M.to_ints()

def test_construction_errors(qq, gf31):
    with pytest.raises(ValueError):
        ExactMatrix(qq, [[1, 2], [3]])
    with pytest.raises(ContextMismatchError):
        ExactMatrix.identity(qq, 2) @ ExactMatrix.identity(gf31, 2)
    with pytest.raises(ValueError):
        ExactMatrix.identity(qq, 2) @ ExactMatrix.zeros(qq, 3, 1)

def test_json_round_trip(qq):
    M = ExactMatrix(qq, [["1/3", "-2"], ["0", "7"]])
    data = M.to_json()
    assert data == {"rows": 2, "cols": 2, "modulus": None,
                    "entries": [["1/3", "-2"], ["0", "7"]]}
    assert ExactMatrix.from_json(data) == M
    with pytest.raises(ValueError):
        ExactMatrix.from_json({"rows": 2, "cols": 2})

def test_scale_columns_to_integers(qq):
    M = ExactMatrix(qq, [["1/2", "1"], ["1/3", "2"]]).scale_columns_to_integers()
    assert M.to_strings() == [["3", "1"], ["2", "2"]]

def test_from_columns(qq):
    M = ExactMatrix.from_columns(qq, [(1, 2, 3), (4, 5, 6)])
    assert M.shape == (3, 2)
    assert M.column(1) == (qq(4), qq(5), qq(6))
    assert M.transpose().shape == (2, 3)
