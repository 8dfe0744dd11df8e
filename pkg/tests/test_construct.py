import pytest
from itertools import combinations_with_replacement
from math import comb

from scrollsmith.src.errors import (
    BadPrimeError,
    ConsistencyError,
    PlanInfeasibleError,
    SearchFailedError,
)
from scrollsmith.src.scroll_gen import (
    ChainPlan,
    construct_scroll,
    four_square_plans,
    odd_square_form,
    pick_frame,
    step_two_failures,
    sweep_seeds,
    vandermonde_block,
    vandermonde_kernels,
)
from scrollsmith.src.scroll_tools import ScrollSpec


def _brute_plans(r, v):
    found = []
    for combo in combinations_with_replacement(range(1, r + 2), 4):
        sizes = tuple(sorted(combo, reverse=True))
        if sum(comb(k, 2) for k in sizes) == r and sum(sizes[:3]) <= v:
            found.append(sizes)
    return sorted(set(found), reverse=True)

@pytest.mark.parametrize("r", range(0, 21))
def test_four_square_plans_match_brute_force(r):
    for v in (3, 5, 8, 12):
        assert four_square_plans(r, v) == _brute_plans(r, v)

def test_four_square_plans_examples():
    assert four_square_plans(8, 8)[0] == (4, 2, 2, 1)
    assert (3, 3, 2, 2) in four_square_plans(8, 8)
    assert four_square_plans(8, 4) == []
    with pytest.raises(ValueError):
        four_square_plans(-1, 4)

def test_chain_plan_default():
    plan = ChainPlan.default((4, 2, 2, 1))
    assert plan.r == 8
    assert plan.parameters == ((0, 1, 2, 3), (4, 5), (6, 7), (8,))
    assert len(plan.planted_pairs()) == 8
    assert plan.to_dict()["sizes"] == [4, 2, 2, 1]

def test_chain_plan_validation():
    with pytest.raises(ValueError):
        ChainPlan.default((2, 4, 2, 1))
    with pytest.raises(ValueError):
        ChainPlan(7, (4, 2, 2, 1), ((0, 1, 2, 3), (4, 5), (6, 7), (8,)))
    with pytest.raises(ValueError):
        ChainPlan(8, (4, 2, 2, 1), ((0, 1, 2, 3), (3, 5), (6, 7), (8,)))
    with pytest.raises(ValueError):
        ChainPlan.default((4, 2, 2))

def test_plan_feasibility_and_primes():
    with pytest.raises(PlanInfeasibleError):
        ChainPlan.default((3, 3, 3, 1)).check_feasible(8)
    ChainPlan.default((4, 2, 2, 1)).check_feasible(8)
    with pytest.raises(BadPrimeError):
        ChainPlan.default((4, 2, 2, 1)).check_prime(7)

def test_odd_square_form():
    assert odd_square_form(ChainPlan.default((4, 2, 2, 1)), 8) == (7, 3, 3, 1)
    with pytest.raises(ConsistencyError):
        odd_square_form(ChainPlan.default((4, 2, 2, 1)), 7)

def test_vandermonde_kernels(spec18):
    plan = ChainPlan.default((4, 2, 2, 1))
    kernels = vandermonde_kernels(spec18, plan)
    assert [len(k) for k in kernels] == [5, 7, 7, 8]
    for chain, kernel in zip(plan.parameters, kernels):
        block = vandermonde_block(spec18, chain)
        assert all(not any(block.apply(w)) for w in kernel)
    with pytest.raises(BadPrimeError):
        vandermonde_kernels(spec18, plan, 7)

def test_pick_frame(spec18):
    frame = pick_frame(spec18, ChainPlan.default((4, 2, 2, 1)), seed=0)
    blocks = [vandermonde_block(spec18, chain) for chain in frame.plan.parameters]
    for i, vec in enumerate(frame.chain_vectors):
        for j, block in enumerate(blocks):
            hits = block.apply(vec)
            assert any(hits) if i == j else not any(hits)
    assert step_two_failures(spec18, frame.chain_vectors, 31) == []
    assert frame.attempts >= 1

def test_pick_frame_rejects_infeasible_plan(spec18):
    with pytest.raises(PlanInfeasibleError):
        pick_frame(spec18, ChainPlan.default((3, 3, 3, 1)))

def test_construct_scroll_infeasible():
    with pytest.raises(PlanInfeasibleError):
        construct_scroll(8, 4)
    with pytest.raises(PlanInfeasibleError):
        construct_scroll(8, 8, sizes=(3, 3, 3, 1))

def test_construct_scroll_small_case():
    result = construct_scroll(0, 4, seed=1)
    assert result.spec == ScrollSpec(1, 4, 5)
    assert result.plan.sizes == (1, 1, 1, 1)
    assert result.projection.matrix.shape == (7, 6)
    report = result.reports[31]
    assert report.tangent_clearance
    assert result.to_dict()["reports"]["31"]["prime"] == 31

def test_sweep_seeds_counts_outcomes(mocker):
    good = mocker.Mock(reports={31: mocker.Mock(pair_count=8)})
    mocker.patch(
        "scrollsmith.src.scroll_gen.construct_scroll",
        side_effect=[good, SearchFailedError("pick_frame", "exhausted"), PlanInfeasibleError("no plan")],
    )
    result = sweep_seeds(8, 8, [0, 1, 2])
    assert [o.status for o in result.outcomes] == ["ok", "search_failed", "infeasible"]
    assert result.outcomes[0].pair_counts == {31: 8}
    assert result.success_rate == pytest.approx(1 / 3)

@pytest.fixture(scope="module")
def constructed88():
    return construct_scroll(8, 8, seed=1)

@pytest.mark.slow
def test_construct_scroll_plants_every_pair(constructed88):
    report = constructed88.reports[31]
    assert report.pair_count >= 8
    assert report.tangent_clearance
    found = report.pair_set()
    for s1, s2 in constructed88.plan.planted_pairs():
        assert frozenset((s1 % 31, s2 % 31)) in found

@pytest.mark.slow
def test_construct_scroll_is_deterministic(constructed88):
    again = construct_scroll(8, 8, seed=1)
    assert again.projection.matrix == constructed88.projection.matrix
    assert again.plan == constructed88.plan

@pytest.mark.slow
def test_construct_scroll_seed_success_rate():
    sweep = sweep_seeds(8, 8, range(1, 11))
    assert len(sweep.outcomes) == 10
    assert sweep.success_rate >= 0.8
    for outcome in sweep.outcomes:
        if outcome.status == "ok":
            assert outcome.pair_counts[31] >= 8
