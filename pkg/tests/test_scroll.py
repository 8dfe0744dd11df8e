import pytest
import numpy as np

from scrollsmith.src.algebra_tools.matrix import ExactMatrix
from scrollsmith.src.algebra_tools.poly import evaluate
from scrollsmith.src.errors import InvalidProjectionError, UnsupportedCaseError
from scrollsmith.src.scroll_tools import (
    INFINITY,
    ProjectionMatrix,
    ScrollSpec,
    determinantal_pairs,
    exact_tangent_clearance,
    image_forms,
    iter_parameter_pairs,
    minor_ideal,
    normalize_point,
    projective_line,
    rational_points,
    rnc_derivative,
    ruling_matrix,
    scroll_param,
    singular_pairs,
    tangent_clearance,
    tangent_failures,
)


@pytest.fixture
def identity14(gf31):
    spec = ScrollSpec(1, 4, 6)
    return ProjectionMatrix(spec, ExactMatrix.identity(gf31, 7))

def test_scroll_spec_validation():
    spec = ScrollSpec(1, 8, 5)
    assert (spec.D, spec.m, spec.ambient_dim) == (9, 7, 10)
    assert ScrollSpec.from_dict(spec.to_dict()) == spec
    for bad in [(0, 4, 5), (3, 2, 5), (1, 4, 2), (1, 2, 5)]:
        with pytest.raises(ValueError):
            ScrollSpec(*bad)
    with pytest.raises(UnsupportedCaseError):
        ScrollSpec(2, 4, 5).require_u_one()
    with pytest.raises(ValueError):
        ScrollSpec(1, 3, 5).require_singular_range()

def test_projective_line():
    assert projective_line(3) == [0, 1, 2, INFINITY]
    assert len(list(iter_parameter_pairs(31))) == 496

def test_rnc_derivative(gf7):
    assert [gf7.to_int(x) for x in rnc_derivative(3, 2, gf7)] == [0, 1, 4, 5]
    assert [gf7.to_int(x) for x in rnc_derivative(3, INFINITY, gf7)] == [0, 0, 1, 0]

def test_minor_ideal_vanishes_on_scroll(gf31, spec14):
    minors = minor_ideal(spec14, gf31)
    assert len(minors) == 10
    for s, t in [(0, 1), (3, 7), (INFINITY, 5), (12, 0)]:
        point = scroll_param(spec14, s, t, gf31)
        assert all(not evaluate(f, point) for f in minors)

def test_projection_validation(gf31, spec14):
    with pytest.raises(InvalidProjectionError):
        ProjectionMatrix(spec14, ExactMatrix.zeros(gf31, 7, 5))
    with pytest.raises(InvalidProjectionError):
        ProjectionMatrix(spec14, ExactMatrix.zeros(gf31, 7, 6))

def test_ruling_matrix(gf31, spec14):
    with pytest.raises(ValueError):
        ruling_matrix(spec14, [1, 32], gf31)
    with pytest.raises(ValueError):
        ruling_matrix(spec14, [], gf31)
    single = ruling_matrix(spec14, [INFINITY], gf31)
    assert single.shape == (3, 7)
    assert single.rank() == 3
    assert ruling_matrix(spec14, [0, 1, 2], gf31).rank() == 5

@pytest.mark.parametrize("p", [7, 11, 13])
def test_singular_pairs_match_determinantal_scan(spec14, random_projection, rng, p):
    projection = random_projection(spec14, p, rng)
    report = singular_pairs(projection, p, check_tangents=False)
    found = {(pair.first, pair.second) for pair in report.pairs} | set(report.degenerate)
    assert found == set(determinantal_pairs(projection, p))
    assert report.prime == p
    assert all(point[next(i for i, x in enumerate(point) if x)] == 1
               for point in (pair.point for pair in report.pairs))

def test_singular_pairs_rejects_other_scroll_types(gf31):
    spec = ScrollSpec(2, 4, 5)
    projection = ProjectionMatrix(
        spec, ExactMatrix.from_columns(gf31, [[1 if i == j else 0 for i in range(8)]
                                              for j in range(6)])
    )
    with pytest.raises(UnsupportedCaseError):
        singular_pairs(projection, 31)

def test_tangent_clearance_without_projection(identity14):
    assert tangent_failures(identity14, 31) == []
    assert tangent_clearance(identity14, 31)
    assert exact_tangent_clearance(identity14)

def test_image_forms_of_embedded_scroll(identity14, gf31):
    forms = image_forms(identity14, 2)
    assert len(forms) == 10
    for s, t in [(2, 3), (INFINITY, 1), (5, 0)]:
        point = scroll_param(identity14.spec, s, t, gf31)
        assert all(not evaluate(f, point) for f in forms)
    assert image_forms(identity14, 1) == []

def test_rational_points(gf7):
    spec = ScrollSpec(1, 4, 6)
    projection = ProjectionMatrix(spec, ExactMatrix.identity(gf7, 7))
    points = rational_points(projection, 7)
    assert len(points) == 64
    assert all(point[next(i for i, x in enumerate(point) if x)] == 1 for point in points)

@pytest.mark.slow
@pytest.mark.parametrize("p", [7, 11, 13])
@pytest.mark.parametrize("spec", [ScrollSpec(1, 4, 5), ScrollSpec(1, 8, 5)], ids=["s14", "s18"])
def test_singular_pairs_match_determinantal_scan_on_many_projections(spec, random_projection, p):
    rng = np.random.default_rng(p)
    for _ in range(20):
        projection = random_projection(spec, p, rng)
        report = singular_pairs(projection, p, check_tangents=False)
        found = {(pair.first, pair.second) for pair in report.pairs} | set(report.degenerate)
        assert found == set(determinantal_pairs(projection, p))

def _invertible(p, n, rng):
    while True:
        change = ExactMatrix.random(p, n, n, rng)
        if change.rank() == n:
            return change

def _invert_param(s, p):
    if s == INFINITY:
        return 0
    if s == 0:
        return INFINITY
    return pow(int(s), -1, p)

def test_singular_pairs_invariant_under_target_change(spec18, random_projection):
    rng = np.random.default_rng(4)
    projection = random_projection(spec18, 13, rng)
    change = _invertible(13, 6, rng)
    before = singular_pairs(projection, 13, check_tangents=False)
    after = singular_pairs(projection.transform(change), 13, check_tangents=False)
    assert after.pair_set() == before.pair_set()
    moved = {frozenset((pair.first, pair.second)):
             normalize_point(change.left_apply(pair.point), change.field) for pair in before.pairs}
    assert {frozenset((pair.first, pair.second)): pair.point for pair in after.pairs} == moved

def test_singular_pairs_follow_inversion_of_the_line(spec18, random_projection):
    p = 13
    projection = random_projection(spec18, p, np.random.default_rng(6))
    # s -> 1/s reverses each coordinate block of the scroll
    flip = [1, 0] + list(reversed(range(2, spec18.D + 2)))
    flipped = ProjectionMatrix(spec18, projection.matrix.permuted(flip, range(spec18.N + 1)))
    before = singular_pairs(projection, p, check_tangents=False)
    after = singular_pairs(flipped, p, check_tangents=False)
    assert after.pair_count == before.pair_count
    expected = {(frozenset((_invert_param(pair.first, p), _invert_param(pair.second, p))), pair.point)
                for pair in before.pairs}
    assert {(frozenset((pair.first, pair.second)), pair.point) for pair in after.pairs} == expected

@pytest.fixture
def tangent_centered14(gf7):
    """Center e_2 = theta(0): the tangent span over s = 0 meets it."""
    columns = [[1 if i == j else 0 for i in range(7)] for j in (0, 1, 3, 4, 5, 6)]
    return ProjectionMatrix(ScrollSpec(1, 4, 5), ExactMatrix.from_columns(gf7, columns))

def test_tangent_clearance_detects_a_tangent_center(tangent_centered14):
    assert tangent_centered14.center_basis() != []
    assert tangent_failures(tangent_centered14, 7) == [0]
    assert not tangent_clearance(tangent_centered14, 7)
    assert not exact_tangent_clearance(tangent_centered14)
    report = singular_pairs(tangent_centered14, 7)
    assert report.directrix_clear
    assert not report.tangent_clearance
    assert not report.ramification_checked
