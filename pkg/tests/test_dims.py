import pytest

from scrollsmith.src.dim_tools import (
    DivisorClass,
    HilbertStratum,
    canonical_class,
    center_space_dim,
    codim_formulas,
    deformation_targets,
    dim_hilbert,
    dim_stratum,
    formula_table,
    h0_hirzebruch,
    h0_normal_bundle,
    h0_normal_bundle_general,
    h1_tangent,
    higher_cohomology_hirzebruch,
    higher_disc_feasibility,
    hilbert_polynomial_value,
    riemann_roch_chi,
    scroll_hyperplane_class,
    secant_degree,
    sigma_resolution_dim,
    stiefel_dim,
    stratum_table,
)


def test_hirzebruch_sections():
    assert h0_hirzebruch(7, 3, 3) == 58
    assert riemann_roch_chi(7, 3, 3) == 58
    assert higher_cohomology_hirzebruch(7, 3, 3, 1) == 0
    assert canonical_class(7).self_intersection == 8
    assert scroll_hyperplane_class(1, 8).self_intersection == 9
    with pytest.raises(ValueError):
        h0_hirzebruch(7, 0, 3)
    with pytest.raises(ValueError):
        DivisorClass(-1, 1, 1)

def test_hilbert_scheme_dimensions():
    assert dim_hilbert(9, 5) == 59
    assert dim_stratum(9, 5, 4) == 59
    assert dim_stratum(9, 5, 1) == 53
    assert dim_stratum(8, 5, 4) == dim_hilbert(8, 5) == 53
    assert h0_normal_bundle_general(5, 7, 1, 1) == 59
    assert h0_normal_bundle(5, 9) == 59
    with pytest.raises(ValueError):
        dim_hilbert(3, 5)
    with pytest.raises(ValueError):
        dim_stratum(9, 5, 5)

def test_hilbert_polynomial():
    assert hilbert_polynomial_value(9, 3) == 58
    assert hilbert_polynomial_value(9, 1) == 11

def test_codim_formulas():
    report = codim_formulas(5, 9, 1, 8)
    assert report.bound_r == 8
    assert report.bound_valid
    assert report.sigma_1 == 3
    assert report.guaranteed_r == 5
    assert report.secant_degree == secant_degree(9) == 21
    assert dim_hilbert(9, 5) - report.bound_r == 51
    with pytest.raises(ValueError):
        codim_formulas(5, 4)

def test_projection_parameter_spaces():
    assert center_space_dim(9, 5) == 30
    assert stiefel_dim(9, 5) == 65

@pytest.mark.parametrize("j", [1, 2, 3])
def test_sigma_resolution_dim(j):
    assert sigma_resolution_dim(5, 9, j) == 30 - j * (2 + j)

def test_sigma_resolution_dim_range():
    with pytest.raises(ValueError):
        sigma_resolution_dim(5, 9, 4)

def test_deformation_targets():
    assert deformation_targets(1, 8) == [(2, 7), (3, 6), (4, 5)]
    assert deformation_targets(2, 3) == []
    assert h1_tangent(7) == 6
    assert h1_tangent(1) == 0

@pytest.mark.parametrize("n, bound, status", [
    (4, 51, "unobstructed"),
    (5, 56, "obstructed"),
    (8, 59, "obstructed"),
    (9, 56, "unknown"),
])
def test_higher_disc_feasibility(n, bound, status):
    report = higher_disc_feasibility(n)
    assert report.lower_bound == bound
    assert report.status == status

def test_hilbert_stratum():
    stratum = HilbertStratum(9, 5, 1, r=8)
    assert (stratum.v, stratum.m, stratum.delta) == (8, 7, 0)
    assert stratum.codim == 6
    assert stratum.singular_lower_bound() == 51
    with pytest.raises(ValueError):
        HilbertStratum(9, 5, 5)

def test_tables():
    strata = stratum_table(9, 5)
    assert list(strata["u"]) == [1, 2, 3, 4]
    assert strata.iloc[-1]["codim"] == 0
    formulas = formula_table(9, 5, 8).set_index("quantity")["value"]
    assert formulas["dim_hilbert"] == 59
    assert formulas["dim_singular_lower_bound"] == 51
    assert formulas["center_space_dim"] == 30
