"""Constructing projected scrolls of type (1, v) with planted plane chains."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations
from math import comb, gcd, lcm
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from tqdm import tqdm

from scrollsmith.src.algebra_tools.fields import ScalarField, as_field
from scrollsmith.src.algebra_tools.matrix import ExactMatrix, Vector
from scrollsmith.src.errors import (
    BadPrimeError,
    ConsistencyError,
    InvalidProjectionError,
    PlanInfeasibleError,
    ScrollsmithError,
    SearchFailedError,
    UnsupportedCaseError,
)
from scrollsmith.src.scroll_tools import (
    ProjectionMatrix,
    ScrollSpec,
    SingularScrollReport,
    exact_tangent_clearance,
    pair_image,
    projective_line,
    rnc_derivative,
    rnc_point,
    singular_pairs,
    tangent_clearance,
)

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

CHAIN_COUNT = 4
SAMPLE_BOUND = 9


def four_square_plans(r: int, v: int) -> List[Tuple[int, int, int, int]]:
    """
    All chain sizes k1 >= k2 >= k3 >= k4 >= 1 with sum C(k_i, 2) = r and k1+k2+k3 <= v.

    Returned in lexicographically descending order; empty when infeasible.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    plans = []
    top = min(r + 1, v)
    for k1 in range(top, 0, -1):
        for k2 in range(k1, 0, -1):
            for k3 in range(k2, 0, -1):
                if k1 + k2 + k3 > v:
                    continue
                for k4 in range(k3, 0, -1):
                    if comb(k1, 2) + comb(k2, 2) + comb(k3, 2) + comb(k4, 2) == r:
                        plans.append((k1, k2, k3, k4))
    return plans


@dataclass(frozen=True)
class ChainPlan:
    """
    Singularity budget realized by four disjoint plane chains.

    Attributes:
        r (int): Number of planted singular points
        sizes (Tuple[int, ...]): Chain sizes k1 >= k2 >= k3 >= k4 >= 1
        parameters (Tuple[Tuple[int, ...], ...]): Ruling parameters of each chain
    """
    r: int
    sizes: Tuple[int, ...]
    parameters: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.sizes) != CHAIN_COUNT or len(self.parameters) != CHAIN_COUNT:
            raise ValueError("a plan has exactly four chains")
        if any(k < 1 for k in self.sizes) or list(self.sizes) != sorted(self.sizes, reverse=True):
            raise ValueError(f"chain sizes must be positive and non-increasing: {self.sizes}")
        if sum(comb(k, 2) for k in self.sizes) != self.r:
            raise ValueError(f"chain sizes {self.sizes} do not produce {self.r} singular points")
        for k, chain in zip(self.sizes, self.parameters):
            if len(chain) != k:
                raise ValueError(f"chain {chain} should have {k} parameters")
        flat = self.all_parameters
        if len(set(flat)) != len(flat):
            raise ValueError(f"ruling parameters must be distinct: {flat}")

    @classmethod
    def default(cls, sizes: Sequence[int]) -> "ChainPlan":
        """Consecutive parameters 0, 1, 2, ... assigned chain by chain."""
        sizes = tuple(int(k) for k in sizes)
        params, start = [], 0
        for k in sizes:
            params.append(tuple(range(start, start + k)))
            start += k
        return cls(sum(comb(k, 2) for k in sizes), sizes, tuple(params))

    @property
    def all_parameters(self) -> Tuple[int, ...]:
        return tuple(s for chain in self.parameters for s in chain)

    def check_feasible(self, v: int) -> None:
        """Every three chains fit in the kernel budget: k_a + k_b + k_c <= v."""
        for triple in combinations(self.sizes, 3):
            if sum(triple) > v:
                raise PlanInfeasibleError(
                    f"chains {triple} exceed v={v}; no frame vector survives three kernels"
                )

    def check_prime(self, p: int) -> None:
        reduced = {s % p for s in self.all_parameters}
        if len(reduced) != len(self.all_parameters):
            raise BadPrimeError(f"ruling parameters collide modulo {p}")

    def planted_pairs(self) -> List[Tuple[int, int]]:
        return [pair for chain in self.parameters for pair in combinations(chain, 2)]

    def to_dict(self) -> Dict[str, Any]:
        return {"r": self.r, "sizes": list(self.sizes), "parameters": [list(c) for c in self.parameters]}


def odd_square_form(plan: ChainPlan, v: int) -> Tuple[int, int, int, int]:
    """
    a_i = 2 k_i - 1, with 8r + 4 = sum a_i^2 and a1 + a2 + a3 <= 2v - 3.

    Raises:
        ConsistencyError: If either identity fails
    """
    odd = tuple(2 * k - 1 for k in plan.sizes)
    if 8 * plan.r + 4 != sum(a * a for a in odd):
        raise ConsistencyError(f"8r+4 != sum of squares for {odd}")
    if odd[0] + odd[1] + odd[2] > 2 * v - 3:
        raise ConsistencyError(f"{odd} violates a1+a2+a3 <= 2v-3 for v={v}")
    return odd


def vandermonde_block(spec: ScrollSpec, params: Sequence[int], field: Any = None) -> ExactMatrix:
    """P^B: one row theta(s) per parameter, v+1 columns."""
    F = as_field(field)
    return ExactMatrix(F, [rnc_point(spec.v, s, F) for s in params], cols=spec.v + 1)


def vandermonde_kernels(spec: ScrollSpec, plan: ChainPlan, field: Any = None) -> List[List[Vector]]:
    """Kernel basis of each chain's Vandermonde block; basis i has v+1-k_i vectors."""
    spec.require_u_one()
    F = as_field(field)
    if F.is_prime_field:
        plan.check_prime(F.modulus)
    return [vandermonde_block(spec, chain, F).kernel_basis() for chain in plan.parameters]


def _primitive_integer(vec: Sequence[Any], F: ScalarField) -> Vector:
    """Scale a rational vector to coprime integers."""
    den = 1
    for x in vec:
        den = lcm(den, F.denom(x))
    ints = [F.numer(x) * (den // F.denom(x)) for x in vec]
    common = 0
    for x in ints:
        common = gcd(common, x)
    common = common or 1
    return tuple(F(x // common) for x in ints)


@dataclass(frozen=True)
class FrameChoice:
    """
    B-block vectors v1..v4, one per chain.

    Vector i lies in the kernels of the three other chains' Vandermonde blocks
    and outside its own.
    """
    plan: ChainPlan
    chain_vectors: Tuple[Vector, ...]
    seed: Optional[int] = None
    attempts: int = 1

    def full_vectors(self, spec: ScrollSpec) -> List[Vector]:
        F = ScalarField.rationals()
        return [(F.zero,) * (spec.u + 1) + tuple(vec) for vec in self.chain_vectors]


def step_two_failures(spec: ScrollSpec, chain_vectors: Sequence[Vector], p: int) -> List[Any]:
    """Parameters s in P^1(F_p) where [theta(s)·v_i; theta'(s)·v_i] drops below rank 2."""
    F = ScalarField.prime(p)
    Q = ScalarField.rationals()
    columns = [[Q.reduce(x, F) for x in vec] for vec in chain_vectors]
    frame = ExactMatrix.from_columns(F, columns)
    failures = []
    for s in projective_line(p):
        tangent = ExactMatrix(F, [rnc_point(spec.v, s, F), rnc_derivative(spec.v, s, F)])
        if (tangent @ frame).rank() < 2:
            failures.append(s)
    return failures


def _perturb(plan: ChainPlan, rng: np.random.Generator, primes: Sequence[int]) -> ChainPlan:
    """Resample the ruling parameters as distinct small integers."""
    total = len(plan.all_parameters)
    pool = min(min(primes), max(2 * total, 16))
    drawn = [int(x) for x in rng.choice(pool, size=total, replace=False)]
    params, start = [], 0
    for k in plan.sizes:
        params.append(tuple(sorted(drawn[start:start + k])))
        start += k
    return replace(plan, parameters=tuple(params))


def pick_frame(
    spec: ScrollSpec,
    plan: ChainPlan,
    seed: int = 0,
    primes: Sequence[int] = (31,),
    retry_budget: int = 100,
    rng: Optional[np.random.Generator] = None,
    perturb_every: int = 10,
) -> FrameChoice:
    """
    Choose v1..v4 from (intersection of the other chains' kernels) minus the own kernel.

    Vectors are resampled until the tangent test passes at every prime; after
    every ``perturb_every`` failures the ruling parameters themselves are
    resampled.

    Raises:
        PlanInfeasibleError: If some admissible set is empty
        SearchFailedError: If the retry budget runs out
    """
    spec.require_u_one()
    plan.check_feasible(spec.v)
    for p in primes:
        plan.check_prime(p)
    rng = rng if rng is not None else np.random.default_rng(seed)
    F = ScalarField.rationals()
    failures: Dict[str, int] = {}
    for attempt in range(1, retry_budget + 1):
        blocks = [vandermonde_block(spec, chain, F) for chain in plan.parameters]
        vectors = []
        for i in range(CHAIN_COUNT):
            others = ExactMatrix.vstack([blocks[j] for j in range(CHAIN_COUNT) if j != i])
            space = others.kernel_basis()
            if not space or all(not any(blocks[i].apply(w)) for w in space):
                raise PlanInfeasibleError(f"no admissible vector for chain {i + 1} of {plan.sizes}")
            while True:
                coeffs = rng.integers(-SAMPLE_BOUND, SAMPLE_BOUND + 1, size=len(space))
                vec = [
                    sum((F(int(c)) * w[k] for c, w in zip(coeffs, space) if c), F.zero)
                    for k in range(spec.v + 1)
                ]
                if any(blocks[i].apply(vec)):
                    break
            vectors.append(_primitive_integer(vec, F))
        bad = {p: step_two_failures(spec, vectors, p) for p in primes}
        if not any(bad.values()):
            logger.info(f"Frame for {plan.sizes} found after {attempt} attempt(s)")
            return FrameChoice(plan, tuple(vectors), seed, attempt)
        for p, s_values in bad.items():
            if s_values:
                failures[f"tangent_test_mod_{p}"] = failures.get(f"tangent_test_mod_{p}", 0) + 1
        logger.debug(f"Attempt {attempt}: tangent test fails at {bad}")
        if attempt % perturb_every == 0:
            plan = _perturb(plan, rng, primes)
            logger.warning(f"Perturbed ruling parameters to {plan.parameters}")
    logger.error(f"Frame search for {plan.sizes} exhausted {retry_budget} attempts")
    raise SearchFailedError("pick_frame", f"no frame passed the tangent test in {retry_budget} attempts",
                            {"attempts": retry_budget, "failures": failures})


def planted_pairs_intact(projection: ProjectionMatrix, plan: ChainPlan, p: int) -> bool:
    """Every intra-chain pair meets in a genuine point modulo p."""
    reduced = projection.reduce_mod(p)
    for s1, s2 in plan.planted_pairs():
        rank, point = pair_image(reduced, s1 % p, s2 % p)
        if rank != 3 or point is None:
            return False
    return True


def complete_projection(
    spec: ScrollSpec,
    frame: FrameChoice,
    seed: int = 0,
    primes: Sequence[int] = (31,),
    retry_budget: int = 100,
    rng: Optional[np.random.Generator] = None,
    exact_clearance: bool = False,
) -> ProjectionMatrix:
    """
    Append random v5, v6 and accept once Λ = (v1, ..., v6) passes every check.

    A candidate is accepted when rank(Λ) = 6 over QQ and modulo every prime,
    tangent clearance holds modulo every prime, and all planted pairs still
    meet in a point.
    """
    if spec.N != CHAIN_COUNT + 1:
        raise UnsupportedCaseError("four-chain projections land in P^5")
    rng = rng if rng is not None else np.random.default_rng(seed)
    F = ScalarField.rationals()
    base = frame.full_vectors(spec)
    rejected: Dict[str, int] = {}
    for attempt in range(1, retry_budget + 1):
        extra = [
            tuple(F(int(x)) for x in rng.integers(-SAMPLE_BOUND, SAMPLE_BOUND + 1, size=spec.D + 2))
            for _ in range(2)
        ]
        matrix = ExactMatrix.from_columns(F, base + extra)
        try:
            projection = ProjectionMatrix(spec, matrix)
            reason = None
            for p in primes:
                reduced = projection.reduce_mod(p)
                if not tangent_clearance(reduced, p):
                    reason = f"tangent_clearance_mod_{p}"
                    break
                if not planted_pairs_intact(reduced, frame.plan, p):
                    reason = f"planted_pairs_mod_{p}"
                    break
            if reason is None and exact_clearance and not exact_tangent_clearance(projection):
                reason = "exact_clearance"
        except InvalidProjectionError:
            reason = "rank"
        if reason is None:
            logger.info(f"Projection completed after {attempt} attempt(s)")
            return projection
        rejected[reason] = rejected.get(reason, 0) + 1
        logger.debug(f"Completion attempt {attempt} rejected: {reason}")
    logger.error(f"Completion exhausted {retry_budget} attempts: {rejected}")
    raise SearchFailedError("complete_projection", f"no completion accepted in {retry_budget} attempts",
                            {"attempts": retry_budget, "rejected": rejected})


@dataclass
class ConstructionResult:
    """Λ over QQ together with the plan, the frame and one report per prime."""
    spec: ScrollSpec
    plan: ChainPlan
    frame: FrameChoice
    projection: ProjectionMatrix
    reports: Dict[int, SingularScrollReport] = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "seed": self.seed,
            "plan": self.plan.to_dict(),
            "reports": {str(p): report.to_dict() for p, report in self.reports.items()},
        }


def construct_scroll(
    r: int,
    v: int,
    seed: int = 0,
    primes: Sequence[int] = (31,),
    retry_budget: int = 100,
    exact_clearance: bool = False,
    progress: bool = False,
    sizes: Optional[Sequence[int]] = None,
) -> ConstructionResult:
    """
    Build a scroll of type (1, v) in P^5 with at least r singular points.

    Args:
        r: Singularity budget
        v: Second scroll degree (D = v + 1)
        seed: Seed for numpy's default generator
        primes: Verification primes
        retry_budget: Attempts per randomized stage
        exact_clearance: Also require the gcd-based clearance certificate
        progress: Show tqdm bars during pair scans
        sizes: Chain sizes to use instead of the first feasible plan

    Returns:
        ConstructionResult: Λ and one SingularScrollReport per prime

    Raises:
        PlanInfeasibleError: If no plan realizes (r, v)
        SearchFailedError: If a randomized stage or the final check fails
    """
    spec = ScrollSpec(1, v, 5)
    plans = four_square_plans(r, v)
    if sizes is not None:
        if tuple(sizes) not in plans:
            raise PlanInfeasibleError(f"chain sizes {tuple(sizes)} do not realize r={r}, v={v}")
        chosen = tuple(sizes)
    elif not plans:
        raise PlanInfeasibleError(f"no four-chain plan gives r={r} with v={v}")
    else:
        chosen = plans[0]
    plan = ChainPlan.default(chosen)
    odd_square_form(plan, v)
    logger.info(f"Constructing {spec} with chains {plan.sizes} (seed {seed}, primes {list(primes)})")
    rng = np.random.default_rng(seed)
    try:
        frame = pick_frame(spec, plan, seed, primes, retry_budget, rng=rng)
        projection = complete_projection(spec, frame, seed, primes, retry_budget, rng=rng,
                                         exact_clearance=exact_clearance)
    except ScrollsmithError as e:
        logger.error(f"Construction failed: {e}")
        raise
    result = ConstructionResult(spec, frame.plan, frame, projection, seed=seed)
    for p in primes:
        report = singular_pairs(projection, p, progress=progress)
        if report.pair_count < r or not report.tangent_clearance:
            raise SearchFailedError(
                "verify", f"GF({p}) found {report.pair_count} pairs, clearance {report.tangent_clearance}",
                {"prime": p, "pairs": report.pair_count, "expected": r},
            )
        result.reports[p] = report
    return result


@dataclass
class SweepOutcome:
    seed: int
    status: str
    pair_counts: Dict[int, int] = field(default_factory=dict)
    message: str = ""


@dataclass
class SweepResult:
    outcomes: List[SweepOutcome]

    @property
    def success_rate(self) -> float:
        if not self.outcomes:
            return 0.0
        return sum(o.status == "ok" for o in self.outcomes) / len(self.outcomes)


def _sweep_one(args: Tuple[int, int, int, Tuple[int, ...], int]) -> SweepOutcome:
    r, v, seed, primes, retry_budget = args
    try:
        result = construct_scroll(r, v, seed, primes, retry_budget)
    except PlanInfeasibleError as e:
        return SweepOutcome(seed, "infeasible", message=str(e))
    except SearchFailedError as e:
        return SweepOutcome(seed, "search_failed", message=str(e))
    return SweepOutcome(seed, "ok", {p: rep.pair_count for p, rep in result.reports.items()})


def sweep_seeds(
    r: int,
    v: int,
    seeds: Sequence[int],
    primes: Sequence[int] = (31,),
    threads: int = 1,
    retry_budget: int = 100,
    progress: bool = False,
) -> SweepResult:
    """Run construct_scroll for each seed, in a process pool when threads > 1."""
    jobs = [(r, v, int(seed), tuple(primes), retry_budget) for seed in seeds]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_sweep_one, jobs))
    else:
        iterator = tqdm(jobs, desc="seeds") if progress else jobs
        outcomes = [_sweep_one(job) for job in iterator]
    result = SweepResult(outcomes)
    logger.info(f"Seed sweep for r={r}, v={v}: success rate {result.success_rate:.0%}")
    return result
