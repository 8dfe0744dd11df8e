"""Cubic fourfolds through a projected scroll: search, smoothness, Fano deformations, invariants."""
from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations
from math import comb, factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from sympy import Rational
from tqdm import tqdm

from scrollsmith.src.algebra_tools.fields import DEFAULT_PRIME, ScalarField
from scrollsmith.src.algebra_tools.jets import JetPoly
from scrollsmith.src.algebra_tools.matrix import ExactMatrix
from scrollsmith.src.algebra_tools.poly import (
    MultiPoly,
    evaluate,
    is_homogeneous,
    monomials_of_degree,
    partial_derivatives,
    polynomial_ring,
    ring_field,
    total_degree,
)
from scrollsmith.src.dim_tools import h0_hirzebruch, scroll_hyperplane_class
from scrollsmith.src.errors import (
    ConsistencyError,
    ContainmentError,
    ContextMismatchError,
    SearchFailedError,
    UnsupportedCharacteristicError,
)
from scrollsmith.src.groebner_tools import IdealBasis, MonomialOrder, is_projectively_empty
from scrollsmith.src.scroll_tools import (
    ProjectionMatrix,
    ScrollSpec,
    image_forms,
    image_line,
    projective_line,
)

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SYMMETRY_DEDUCTIONS = (4, 3, 4)


@dataclass(frozen=True)
class CubicForm:
    """A nonzero homogeneous cubic; usually in z_0..z_5."""
    poly: MultiPoly

    def __post_init__(self):
        if self.poly and (not is_homogeneous(self.poly) or total_degree(self.poly) != 3):
            raise ValueError(f"{self.poly} is not a cubic form")

    @property
    def field(self) -> ScalarField:
        return ring_field(self.poly.ring)

    @property
    def nvars(self) -> int:
        return self.poly.ring.ngens

    def __call__(self, point: Sequence[Any]) -> Any:
        return evaluate(self.poly, point)

    def scaled(self, factor: Any) -> "CubicForm":
        return CubicForm(self.poly * self.poly.ring.domain.convert(factor))

    def reduce_mod(self, p: int) -> "CubicForm":
        if self.field.modulus == p:
            return self
        if self.field.is_prime_field:
            raise ContextMismatchError(f"cannot move a cubic over {self.field} to GF({p})")
        target = ScalarField.prime(p)
        ring = polynomial_ring(self.nvars, target, names=[str(x) for x in self.poly.ring.symbols])
        return CubicForm(ring.from_dict({
            m: self.field.reduce(c, target) for m, c in self.poly.items()
        }))

    def to_terms(self) -> List[Dict[str, Any]]:
        return [{"coeff": self.field.format(c), "exps": list(m)} for m, c in self.poly.terms()]


def _require_char(F: ScalarField, forbidden: Sequence[int]) -> None:
    if F.characteristic in forbidden:
        raise UnsupportedCharacteristicError(
            f"characteristic {F.characteristic} is not supported here"
        )


def polarization_tensor(f: CubicForm) -> Dict[Tuple[int, int, int], Any]:
    """
    Symmetric coefficients t_ijk (i <= j <= k) with f(w) = sum over ordered triples t_ijk w_i w_j w_k.

    A monomial c·w^alpha contributes t = c·alpha!/6.
    """
    F = f.field
    _require_char(F, (2, 3))
    six = F(6)
    tensor = {}
    for monom, coeff in f.poly.iterterms():
        index = tuple(i for i, e in enumerate(monom) for _ in range(e))
        weight = 1
        for e in monom:
            weight *= factorial(e)
        tensor[index] = coeff * F(weight) / six
    return tensor


def polarize(f: CubicForm, x: Sequence[Any], y: Sequence[Any], z: Sequence[Any]) -> Any:
    """
    The symmetric trilinear form T with T(w, w, w) = f(w).

    Entries may be field elements, polynomials or jets; y_j z_k products are
    shared between the terms that need them.

    Raises:
        UnsupportedCharacteristicError: In characteristic 2 or 3
    """
    n = f.nvars
    if not len(x) == len(y) == len(z) == n:
        raise ValueError(f"polarization needs three vectors of length {n}")
    tensor = polarization_tensor(f)
    products: Dict[Tuple[int, int], Any] = {}
    contracted: List[Any] = [None] * n
    for index, t in tensor.items():
        for i, j, k in set(permutations(index)):
            if (j, k) not in products:
                products[(j, k)] = y[j] * z[k]
            term = products[(j, k)] * t
            contracted[i] = term if contracted[i] is None else contracted[i] + term
    total = None
    for i, w in enumerate(contracted):
        if w is None:
            continue
        term = x[i] * w
        total = term if total is None else total + term
    if total is None:
        return f.field.zero
    return total


def fano_equations(f: CubicForm, b: Any, check_rank: bool = True) -> List[Any]:
    """
    T(b1,b1,b1), T(b1,b1,b2), T(b1,b2,b2), T(b2,b2,b2) for the line spanned by b1, b2.

    ``b`` is a 2 x n ExactMatrix or a pair of rows (polynomials or jets).
    """
    if isinstance(b, ExactMatrix):
        if b.rows != 2:
            raise ValueError("a line needs exactly two spanning rows")
        if check_rank and b.rank() != 2:
            raise ValueError("rows spanning the line are dependent")
        b1, b2 = b.row(0), b.row(1)
    else:
        b1, b2 = b
    return [
        polarize(f, b1, b1, b1),
        polarize(f, b1, b1, b2),
        polarize(f, b1, b2, b2),
        polarize(f, b2, b2, b2),
    ]


def find_containing_cubics(projection: ProjectionMatrix) -> List[CubicForm]:
    """Basis of the cubics through the projected scroll (interpolation)."""
    return [CubicForm(g) for g in image_forms(projection, 3)]


def jacobian_ideal(f: CubicForm) -> IdealBasis:
    return IdealBasis.from_generators(partial_derivatives(f.poly), MonomialOrder.grevlex(),
                                      ring=f.poly.ring)


class CubicStatus(str, Enum):
    SMOOTH = "smooth"
    SINGULAR = "singular"


@dataclass(frozen=True)
class CubicVerdict:
    """
    Classification of a cubic.

    Attributes:
        status (CubicStatus): smooth or singular
        certificate (str): "jacobian_empty", "rational_point" or "jacobian_nonempty"
        witness (Optional[Tuple[int, ...]]): A rational singular point when one was found
    """
    status: CubicStatus
    certificate: str
    witness: Optional[Tuple[int, ...]] = None

    @property
    def is_smooth(self) -> bool:
        return self.status == CubicStatus.SMOOTH


def _singular_at(partials: Sequence[MultiPoly], point: Sequence[Any]) -> bool:
    return all(not evaluate(g, point) for g in partials)


def scan_projective_space(
    polys: Sequence[MultiPoly], limit: int
) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """
    Search P^n(F_p) for a common zero.

    Returns (scanned, witness); scanned is False when the space has more than
    ``limit`` points.
    """
    ring = polys[0].ring
    F = ring_field(ring)
    if not F.is_prime_field:
        return False, None
    p = F.modulus
    n = ring.ngens
    if (p**n - 1) // (p - 1) > limit:
        return False, None
    terms = [[(F.to_int(c), m) for m, c in g.iterterms()] for g in polys]
    for lead in range(n):
        free = n - lead - 1
        grid = np.indices((p,) * free).reshape(free, -1).T if free else np.zeros((1, 0), dtype=np.int64)
        pts = np.zeros((grid.shape[0], n), dtype=np.int64)
        pts[:, lead] = 1
        pts[:, lead + 1:] = grid
        mask = np.ones(len(pts), dtype=bool)
        for g_terms in terms:
            value = np.zeros(len(pts), dtype=np.int64)
            for c, monom in g_terms:
                term = np.full(len(pts), c, dtype=np.int64)
                for i, e in enumerate(monom):
                    for _ in range(e):
                        term = term * pts[:, i] % p
                value = (value + term) % p
            mask &= value == 0
            if not mask.any():
                break
        hits = np.flatnonzero(mask)
        if hits.size:
            return True, tuple(int(x) for x in pts[hits[0]])
    return True, None


def classify_cubic(
    f: CubicForm,
    prescan_points: Sequence[Sequence[Any]] = (),
    prescan_limit: int = 2_000_000,
) -> CubicVerdict:
    """
    Smooth or singular, via the Jacobian criterion.

    Rational points in ``prescan_points`` and, when small enough, all of
    P^n(F_p) are tried first; otherwise the Jacobian ideal's Groebner basis
    decides projective emptiness.

    Raises:
        ValueError: For the zero form
        UnsupportedCharacteristicError: In characteristic 3
    """
    if not f.poly:
        raise ValueError("the zero form defines no hypersurface")
    _require_char(f.field, (3,))
    partials = partial_derivatives(f.poly)
    for point in prescan_points:
        if _singular_at(partials, point):
            return CubicVerdict(CubicStatus.SINGULAR, "rational_point", tuple(int(x) for x in point))
    nonzero = [g for g in partials if g]
    if not nonzero:
        return CubicVerdict(CubicStatus.SINGULAR, "jacobian_nonempty")
    scanned, witness = scan_projective_space(nonzero, prescan_limit)
    if witness is not None:
        return CubicVerdict(CubicStatus.SINGULAR, "rational_point", witness)
    if is_projectively_empty(jacobian_ideal(f).groebner()):
        return CubicVerdict(CubicStatus.SMOOTH, "jacobian_empty")
    return CubicVerdict(CubicStatus.SINGULAR, "jacobian_nonempty")


def _combine(basis: Sequence[CubicForm], coeffs: Sequence[Any]) -> CubicForm:
    ring = basis[0].poly.ring
    total = ring.zero
    for c, g in zip(coeffs, basis):
        if c:
            total += g.poly * c
    return CubicForm(total)


def singular_member_at(basis: Sequence[CubicForm], point: Sequence[Any]) -> List[CubicForm]:
    """Basis of the members of span(basis) whose gradient vanishes at ``point``."""
    if not basis:
        return []
    F = basis[0].field
    gradients = [[evaluate(g, point) for g in partial_derivatives(f.poly)] for f in basis]
    conditions = ExactMatrix.from_columns(F, gradients)
    return [_combine(basis, vec) for vec in conditions.kernel_basis()]


@dataclass
class CubicSearchResult:
    smooth: Optional[CubicForm] = None
    smooth_verdict: Optional[CubicVerdict] = None
    singular: Optional[CubicForm] = None
    singular_verdict: Optional[CubicVerdict] = None
    candidates: int = 0


def search_cubics(
    basis: Sequence[CubicForm],
    scroll_points: Sequence[Sequence[Any]] = (),
    seed: int = 0,
    budget: int = 200,
    prescan_limit: int = 2_000_000,
    progress: bool = False,
) -> CubicSearchResult:
    """
    Find one smooth and one singular cubic in span(basis).

    Singular: a member singular at a rational point of the scroll when one
    exists. Smooth: each basis cubic, then up to ``budget`` random
    combinations; the lowest candidate index wins.

    Raises:
        SearchFailedError: If either kind is missing after the budget
    """
    if not basis:
        raise SearchFailedError("cubic_search", "no cubic contains the scroll")
    F = basis[0].field
    rng = np.random.default_rng(seed)
    result = CubicSearchResult()
    for point in scroll_points[:1]:
        members = singular_member_at(basis, point)
        if members:
            result.singular = members[0]
            result.singular_verdict = CubicVerdict(
                CubicStatus.SINGULAR, "rational_point", tuple(int(x) for x in point)
            )
            logger.info(f"Singular member found at scroll point {tuple(point)}")
    candidates = list(basis)
    candidates += [
        _combine(basis, [F.random_element(rng) for _ in basis]) for _ in range(budget)
    ]
    iterator = tqdm(candidates, desc="cubics") if progress else candidates
    for index, cubic in enumerate(iterator, start=1):
        if not cubic.poly:
            continue
        verdict = classify_cubic(cubic, scroll_points, prescan_limit)
        result.candidates = index
        if verdict.is_smooth and result.smooth is None:
            result.smooth, result.smooth_verdict = cubic, verdict
        elif not verdict.is_smooth and result.singular is None:
            result.singular, result.singular_verdict = cubic, verdict
        if result.smooth is not None and result.singular is not None:
            break
    if result.smooth is None or result.singular is None:
        missing = "smooth" if result.smooth is None else "singular"
        logger.error(f"No {missing} cubic among {result.candidates} candidates")
        raise SearchFailedError("cubic_search", f"no {missing} cubic found",
                                {"candidates": result.candidates})
    logger.info(f"Cubic search settled after {result.candidates} candidate(s)")
    return result


def ruling_curve(projection: ProjectionMatrix) -> Tuple[List[MultiPoly], List[MultiPoly]]:
    """
    R = Q·Λ with Q = [[r, s, 0, ...], [0, 0, r^v, r^(v-1) s, ..., s^v]].

    Each row is a vector of forms in (r, s): the line of the ruling over [r : s].
    """
    spec = projection.spec
    spec.require_u_one()
    ring = polynomial_ring(2, projection.field, names=["r", "s"])
    r, s = ring.gens
    top = [r, s] + [ring.zero] * (spec.v + 1)
    bottom = [ring.zero, ring.zero] + [r ** (spec.v - i) * s**i for i in range(spec.v + 1)]
    lam = projection.matrix

    def times_lambda(row: List[MultiPoly]) -> List[MultiPoly]:
        return [
            sum((row[i] * lam[i, j] for i in range(spec.D + 2) if row[i] and lam[i, j]), ring.zero)
            for j in range(spec.N + 1)
        ]

    return times_lambda(top), times_lambda(bottom)


@dataclass
class FanoDeformationReport:
    """
    First-order deformations of the ruling curve inside the Fano variety of lines.

    Attributes:
        unknowns (int): Coefficients of the perturbation dR
        equations (int): Linear equations collected from the four Fano equations
        rank (int): Rank over GF(prime), a lower bound for the rank over QQ
        symmetries (Tuple[int, int, int]): GL(2), Aut(P^1) and equation rescaling deductions
        prime (int): Field of the computation
    """
    unknowns: int
    equations: int
    rank: int
    symmetries: Tuple[int, int, int] = SYMMETRY_DEDUCTIONS
    prime: int = DEFAULT_PRIME
    equation_degrees: Tuple[int, ...] = ()

    @property
    def dimension(self) -> int:
        return self.unknowns - self.rank - sum(self.symmetries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "unknowns": self.unknowns,
            "equations": self.equations,
            "equation_degrees": list(self.equation_degrees),
            "rank": self.rank,
            "symmetries": list(self.symmetries),
            "dimension": self.dimension,
            "prime": self.prime,
            "bound": "dimension is an upper bound; rank over GF(p) bounds the rational rank from below",
        }


def _jet_rows(
    rows: Tuple[List[MultiPoly], List[MultiPoly]], v: int
) -> Tuple[List[JetPoly], List[JetPoly], int]:
    """Attach one unknown per coefficient: linear forms on row 1, degree-v forms on row 2."""
    top, bottom = rows
    ring = top[0].ring
    r, s = ring.gens
    linear = [r, s]
    octic = [r ** (v - i) * s**i for i in range(v + 1)]
    size = len(top) * (len(linear) + len(octic))
    zero = ring.zero
    jets_top, jets_bottom = [], []
    index = 0
    for base, monomials, out in ((top, linear, jets_top), (bottom, octic, jets_bottom)):
        for entry in base:
            gradient = [zero] * size
            for mono in monomials:
                gradient[index] = mono
                index += 1
            out.append(JetPoly(entry, gradient))
    return jets_top, jets_bottom, size


def fano_deformation_dim(
    projection: ProjectionMatrix,
    f: CubicForm,
    p: int = DEFAULT_PRIME,
) -> FanoDeformationReport:
    """
    Rank of the first-order deformation system of the ruling curve inside F_1(X).

    Substitutes R + dR into the four Fano equations with jet arithmetic and
    collects the coefficient of every (r, s)-monomial.

    Raises:
        UnsupportedCharacteristicError: If p divides 6
        ContainmentError: If the cubic does not contain the scroll
    """
    if p in (2, 3):
        raise UnsupportedCharacteristicError(f"p={p} divides 6")
    projection = projection.reduce_mod(p)
    spec = projection.spec
    spec.require_u_one()
    f = f.reduce_mod(p)
    F = projection.field
    rows = ruling_curve(projection)
    jets_top, jets_bottom, size = _jet_rows(rows, spec.v)
    logger.info(f"Assembling the deformation system with {size} unknowns over GF({p})")
    equations = fano_equations(f, (jets_top, jets_bottom))
    degrees = (3, spec.v + 2, 2 * spec.v + 1, 3 * spec.v)
    matrix_rows = []
    for equation, degree in zip(equations, degrees):
        if not isinstance(equation, JetPoly):
            continue
        if equation.base:
            monom, coeff = equation.base.terms()[0]
            raise ContainmentError(
                f"cubic does not contain the scroll: r^{monom[0]} s^{monom[1]} has coefficient "
                f"{F.format(coeff)}"
            )
        for monom in monomials_of_degree(2, degree):
            matrix_rows.append(equation.gradient_coefficients(monom))
    system = ExactMatrix(F, matrix_rows, cols=size)
    report = FanoDeformationReport(
        unknowns=size,
        equations=len(matrix_rows),
        rank=system.rank(),
        prime=p,
        equation_degrees=degrees,
    )
    logger.info(
        f"Deformation system: {report.equations} equations, rank {report.rank}, "
        f"dimension {report.dimension}"
    )
    return report


def rulings_on_cubic(projection: ProjectionMatrix, f: CubicForm, p: int = DEFAULT_PRIME) -> bool:
    """Every F_p-rational ruling's image lies on {f = 0}."""
    projection = projection.reduce_mod(p)
    f = f.reduce_mod(p)
    for s in projective_line(p):
        if any(fano_equations(f, image_line(projection, s), check_rank=False)):
            return False
    return True


def selfint_from_double_points(D: int, r_dp: int) -> int:
    """<S,S>_X = 2 r + 3D - 2 for a scroll with r double points in a cubic fourfold."""
    if D < 3 or r_dp < 0:
        raise ValueError("need D >= 3 and r >= 0")
    return 2 * r_dp + 3 * D - 2


def discriminant(D: int, selfint: int) -> int:
    """Determinant of the lattice spanned by h² and S: 3<S,S> - D²."""
    return 3 * selfint - D * D


def unirational_degree(D: int, g_H: int, selfint: int) -> Rational:
    """rho = D(D-2)/2 + (2 - 2 g_H) - <S,S>/2; a parametrization exists when rho > 0."""
    return Rational(D * (D - 2), 2) + (2 - 2 * g_H) - Rational(selfint, 2)


@dataclass(frozen=True)
class DiscriminantRecord:
    n: int
    degree: int
    selfint: int
    singularities: int
    discriminant: int
    section_genus: int
    rho: Rational

    @property
    def rho_is_odd(self) -> bool:
        return self.rho.is_integer and int(self.rho) % 2 == 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "degree": self.degree,
            "selfint": self.selfint,
            "singularities": self.singularities,
            "discriminant": self.discriminant,
            "section_genus": self.section_genus,
            "rho": str(self.rho),
        }


def discriminant_table(n: int) -> DiscriminantRecord:
    """
    Row n of the scroll table: degree 2n+1 with n(n-2) double points.

    Raises:
        ConsistencyError: If the two discriminant identities disagree
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    D = 2 * n + 1
    r_dp = n * (n - 2)
    selfint = selfint_from_double_points(D, r_dp)
    if selfint != 2 * n * n + 2 * n + 1:
        raise ConsistencyError(f"self-intersection {selfint} for n={n}")
    d = discriminant(D, selfint)
    if d != 2 * (n * n + n + 1):
        raise ConsistencyError(f"discriminant {d} != 2(n^2+n+1) for n={n}")
    return DiscriminantRecord(n, D, selfint, r_dp, d, 0, unirational_degree(D, 0, selfint))


@dataclass(frozen=True)
class SectionChain:
    """h^0(F_m, O(3h)) -> h^0(S, O_S(3)) -> h^0(I_S(3))."""
    upstairs: int
    on_surface: int
    ambient: int
    ideal: int
    consistent: bool

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def section_chain(spec: ScrollSpec, pair_count: int, cubics_dim: Optional[int] = None) -> SectionChain:
    """
    Bookkeeping for cubic sections: each double point identifies two sections.

    With ``cubics_dim`` given, the predicted ideal dimension is checked against it.
    """
    h = scroll_hyperplane_class(spec.u, spec.v)
    upstairs = h0_hirzebruch(h.m, 3 * h.a, 3 * h.b)
    on_surface = upstairs - pair_count
    ambient = comb(spec.N + 3, 3)
    ideal = max(0, ambient - on_surface)
    consistent = cubics_dim is None or cubics_dim == ideal
    if not consistent:
        logger.warning(f"Section count predicts {ideal} cubics, interpolation found {cubics_dim}")
    return SectionChain(upstairs, on_surface, ambient, ideal, consistent)
