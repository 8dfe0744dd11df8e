"""Rational normal scrolls S_{u,v}, their projections, and finite-field scans."""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union
import logging

import networkx as nx
from tqdm import tqdm

from scrollsmith.src.algebra_tools.fields import DEFAULT_PRIME, FieldLike, ScalarField, as_field
from scrollsmith.src.algebra_tools.matrix import ExactMatrix, Vector, laplace_determinant
from scrollsmith.src.algebra_tools.poly import MultiPoly, monomials_of_degree, polynomial_ring
from scrollsmith.src.errors import (
    ContextMismatchError,
    InvalidProjectionError,
    UnsupportedCaseError,
)

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

INFINITY = "inf"
Param = Union[int, str]


@dataclass(frozen=True)
class ScrollSpec:
    """
    Discrete type of a scroll S_{u,v} projected into P^N.

    Attributes:
        u (int): Degree of the directrix
        v (int): Degree of the second rational normal curve
        N (int): Target projective dimension
    """
    u: int
    v: int
    N: int = 5

    def __post_init__(self):
        if self.u < 1:
            raise ValueError("u must be at least 1")
        if self.v < self.u:
            raise ValueError("v must be at least u")
        if self.N < 3:
            raise ValueError("N must be at least 3")
        if self.N > self.D + 1:
            raise ValueError(f"N={self.N} exceeds the span dimension D+1={self.D + 1}")

    @property
    def D(self) -> int:
        return self.u + self.v

    @property
    def m(self) -> int:
        return self.v - self.u

    @property
    def ambient_dim(self) -> int:
        """The scroll spans P^{D+1}."""
        return self.D + 1

    def require_singular_range(self) -> None:
        if not self.D >= self.N >= 5:
            raise ValueError(f"singular-scroll pipelines need D >= N >= 5, got D={self.D}, N={self.N}")

    def require_u_one(self) -> None:
        if self.u != 1:
            raise UnsupportedCaseError(f"only scrolls with u = 1 are supported, got u={self.u}")

    def to_dict(self) -> Dict[str, int]:
        return {"u": self.u, "v": self.v, "N": self.N}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScrollSpec":
        return cls(int(data["u"]), int(data["v"]), int(data["N"]))


@dataclass(frozen=True)
class ProjectionMatrix:
    """
    A (D+2) x (N+1) matrix whose columns v_1..v_{N+1} define P^{D+1} --> P^N.

    A point x maps to x·Λ; the center is the left kernel of Λ.
    """
    spec: ScrollSpec
    matrix: ExactMatrix

    def __post_init__(self):
        expected = (self.spec.D + 2, self.spec.N + 1)
        if self.matrix.shape != expected:
            raise InvalidProjectionError(
                f"projection for {self.spec} must be {expected[0]}x{expected[1]}, "
                f"got {self.matrix.rows}x{self.matrix.cols}"
            )
        rank = self.matrix.rank()
        if rank != self.spec.N + 1:
            raise InvalidProjectionError(
                f"projection has rank {rank} over {self.matrix.field}, needs {self.spec.N + 1}"
            )

    @property
    def field(self) -> ScalarField:
        return self.matrix.field

    def frame_vectors(self) -> List[Vector]:
        return self.matrix.columns()

    def center_basis(self) -> List[Vector]:
        """Spanning vectors of the center Q (empty when N = D+1)."""
        return self.matrix.left_kernel_basis()

    def reduce_mod(self, p: int) -> "ProjectionMatrix":
        """Reduce into GF(p); raises InvalidProjectionError when p drops the rank."""
        if self.field.modulus == p:
            return self
        if self.field.is_prime_field:
            raise ContextMismatchError(f"cannot move a projection over {self.field} to GF({p})")
        return ProjectionMatrix(self.spec, self.matrix.reduce_mod(p))

    def over(self, p: Optional[int]) -> "ProjectionMatrix":
        return self if p is None else self.reduce_mod(p)

    def transform(self, change: ExactMatrix) -> "ProjectionMatrix":
        """Right multiplication by an invertible (N+1)x(N+1) matrix."""
        return ProjectionMatrix(self.spec, self.matrix @ change)

    def apply(self, point: Sequence[Any]) -> Vector:
        return self.matrix.left_apply(point)

    def to_json(self) -> Dict[str, Any]:
        return {"spec": self.spec.to_dict(), "matrix": self.matrix.to_json()}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "ProjectionMatrix":
        return cls(ScrollSpec.from_dict(data["spec"]), ExactMatrix.from_json(data["matrix"]))


def is_infinity(s: Param) -> bool:
    return isinstance(s, str) and s == INFINITY


def projective_line(p: int) -> List[Param]:
    """P^1(F_p) as 0..p-1 followed by infinity."""
    return list(range(p)) + [INFINITY]


def param_key(s: Param) -> Tuple[int, int]:
    return (1, 0) if is_infinity(s) else (0, int(s))


def directrix_point(u: int, s: Param, field: FieldLike = None) -> Vector:
    """a(s) = (1, s, ..., s^u); a(inf) = e_u."""
    return rnc_point(u, s, field)


def rnc_point(degree: int, s: Param, field: FieldLike = None) -> Vector:
    """theta(s) = (1, s, ..., s^degree); theta(inf) = e_degree."""
    F = as_field(field)
    if is_infinity(s):
        return tuple(F.one if i == degree else F.zero for i in range(degree + 1))
    x = F(s)
    out = [F.one]
    for _ in range(degree):
        out.append(out[-1] * x)
    return tuple(out)


def rnc_derivative(degree: int, s: Param, field: FieldLike = None) -> Vector:
    """theta'(s) = (0, 1, 2s, ..., degree s^(degree-1)); at infinity e_(degree-1)."""
    F = as_field(field)
    if is_infinity(s):
        return tuple(F.one if i == degree - 1 else F.zero for i in range(degree + 1))
    powers = rnc_point(degree, s, F)
    return (F.zero,) + tuple(F(i) * powers[i - 1] for i in range(1, degree + 1))


def _pad_a(spec: ScrollSpec, vec: Sequence[Any], F: ScalarField) -> Vector:
    return tuple(vec) + (F.zero,) * (spec.v + 1)


def _pad_b(spec: ScrollSpec, vec: Sequence[Any], F: ScalarField) -> Vector:
    return (F.zero,) * (spec.u + 1) + tuple(vec)


def scroll_param(spec: ScrollSpec, s: Param, t: Any, field: FieldLike = None) -> Vector:
    """
    Point (1, s, ..., s^u, t, ts, ..., ts^v) of S_{u,v} in P^{D+1}.

    At s = inf the top coefficients of both blocks are returned: (e_u, t·e_v).
    """
    F = as_field(field)
    t = F(t)
    a = rnc_point(spec.u, s, F)
    b = rnc_point(spec.v, s, F)
    return tuple(a) + tuple(t * x for x in b)


def minor_ideal(spec: ScrollSpec, field: FieldLike = None) -> List[MultiPoly]:
    """
    The 2x2 minors cutting out S_{u,v} in P^{D+1}.

    The 2 x D matrix has first-block columns (x_i, x_{i+1}) for i < u and
    second-block columns (x_j, x_{j+1}) for u+1 <= j <= D.
    """
    ring = polynomial_ring(spec.D + 2, field)
    x = ring.gens
    columns = [(x[i], x[i + 1]) for i in range(spec.u)]
    columns += [(x[j], x[j + 1]) for j in range(spec.u + 1, spec.D + 1)]
    return [
        top_a * bottom_b - top_b * bottom_a
        for (top_a, bottom_a), (top_b, bottom_b) in combinations(columns, 2)
    ]


def ruling_matrix(
    spec: ScrollSpec, s_values: Sequence[Param], field: FieldLike = None
) -> ExactMatrix:
    """
    Rows spanning the union of the rulings over ``s_values``.

    For k >= 2 the rows are a(s_1), a(s_2), theta(s_1), ..., theta(s_k); for
    k = 1 the second row is the remaining directrix direction.
    """
    spec.require_u_one()
    F = as_field(field)
    if not s_values:
        raise ValueError("at least one ruling parameter is required")
    keys = [INFINITY if is_infinity(s) else F.format(F(s)) for s in s_values]
    if len(set(keys)) != len(keys):
        raise ValueError(f"ruling parameters must be distinct: {list(s_values)}")
    rows = [_pad_a(spec, directrix_point(spec.u, s_values[0], F), F)]
    if len(s_values) >= 2:
        rows.append(_pad_a(spec, directrix_point(spec.u, s_values[1], F), F))
    else:
        other = (F.one, F.zero) if is_infinity(s_values[0]) else (F.zero, F.one)
        rows.append(_pad_a(spec, other, F))
    rows += [_pad_b(spec, rnc_point(spec.v, s, F), F) for s in s_values]
    return ExactMatrix(F, rows, cols=spec.D + 2)


def tangent_span_matrix(spec: ScrollSpec, s: Param, field: FieldLike = None) -> ExactMatrix:
    """M(s): rows e_0, e_1, theta(s), theta'(s); spans every tangent plane along the ruling."""
    spec.require_u_one()
    F = as_field(field)
    e0 = _pad_a(spec, (F.one, F.zero), F)
    e1 = _pad_a(spec, (F.zero, F.one), F)
    return ExactMatrix(
        F,
        [e0, e1, _pad_b(spec, rnc_point(spec.v, s, F), F),
         _pad_b(spec, rnc_derivative(spec.v, s, F), F)],
        cols=spec.D + 2,
    )


@dataclass(frozen=True)
class SingularPair:
    """Two rulings whose images meet, and the meeting point (normalized)."""
    first: Param
    second: Param
    point: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"rulings": [self.first, self.second], "point": list(self.point)}


@dataclass
class SingularScrollReport:
    """
    Outcome of the pair scan over P^1(F_p).

    Attributes:
        spec (ScrollSpec): Scroll type
        prime (int): Scan field
        pairs (List[SingularPair]): Pairs with rank(P·Λ) = 3, sorted by parameter
        degenerate (List[Tuple[Param, Param]]): Pairs with rank(P·Λ) < 3 or a collapsing ruling
        tangent_clearance (bool): Result of the tangent-variety check
        directrix_clear (bool): The directrix maps to a line
    """
    spec: ScrollSpec
    prime: int
    pairs: List[SingularPair] = field(default_factory=list)
    degenerate: List[Tuple[Param, Param]] = field(default_factory=list)
    tangent_clearance: bool = False
    directrix_clear: bool = False
    ramification_checked: bool = False

    @property
    def pair_count(self) -> int:
        return len(self.pairs)

    @property
    def distinct_points(self) -> int:
        return len({pair.point for pair in self.pairs})

    def pair_set(self) -> set:
        return {frozenset((pair.first, pair.second)) for pair in self.pairs}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "prime": self.prime,
            "pair_count": self.pair_count,
            "distinct_points": self.distinct_points,
            "pairs": [pair.to_dict() for pair in self.pairs],
            "degenerate": [list(pair) for pair in self.degenerate],
            "tangent_clearance": self.tangent_clearance,
            "directrix_clear": self.directrix_clear,
            "ramification_checked": self.ramification_checked,
        }


def normalize_point(vec: Sequence[Any], F: ScalarField) -> Tuple[int, ...]:
    """Scale so that the first nonzero coordinate is 1 (GF(p) only)."""
    lead = next((x for x in vec if x), None)
    if lead is None:
        raise ValueError("the zero vector is not a projective point")
    inv = F.one / lead
    return tuple(F.to_int(x * inv) for x in vec)


def _projected(projection: ProjectionMatrix, p: int) -> ProjectionMatrix:
    spec = projection.spec
    spec.require_u_one()
    if projection.field.is_prime_field and projection.field.modulus != p:
        raise ContextMismatchError(f"projection lives over {projection.field}, scan asked for GF({p})")
    return projection.reduce_mod(p)


def image_point(projection: ProjectionMatrix, s: Param, t: Any) -> Vector:
    """Image x·Λ of the scroll point with parameters (s, t)."""
    return projection.apply(scroll_param(projection.spec, s, t, projection.field))


def image_line(projection: ProjectionMatrix, s: Param) -> ExactMatrix:
    """2 x (N+1) matrix whose rows span the image of the ruling over s."""
    spec = projection.spec
    F = projection.field
    rows = [
        _pad_a(spec, directrix_point(spec.u, s, F), F),
        _pad_b(spec, rnc_point(spec.v, s, F), F),
    ]
    return ExactMatrix(F, rows, cols=spec.D + 2) @ projection.matrix


def pair_image(
    projection: ProjectionMatrix, s1: Param, s2: Param
) -> Tuple[int, Optional[Tuple[int, ...]]]:
    """Rank of P(s1,s2)·Λ and, for rank 3, the common point of the two image lines."""
    F = projection.field
    image = ruling_matrix(projection.spec, [s1, s2], F) @ projection.matrix
    rank = image.rank()
    if rank != 3:
        return rank, None
    kernel = image.left_kernel_basis()
    c = kernel[0]
    # rows are ordered a(s1), a(s2), theta(s1), theta(s2)
    point = [c[0] * x + c[2] * y for x, y in zip(image.row(0), image.row(2))]
    if not any(point):
        return rank, None
    return rank, normalize_point(point, F)


def iter_parameter_pairs(p: int) -> Iterator[Tuple[Param, Param]]:
    """The C(p+1, 2) unordered pairs of distinct points of P^1(F_p)."""
    return combinations(projective_line(p), 2)


def singular_pairs(
    projection: ProjectionMatrix,
    p: int = DEFAULT_PRIME,
    progress: bool = False,
    check_tangents: bool = True,
) -> SingularScrollReport:
    """
    Scan all unordered ruling pairs over P^1(F_p) for meeting images.

    Args:
        projection: Projection over QQ or GF(p)
        p: Scan prime
        progress: Show a tqdm bar
        check_tangents: Also run tangent_clearance and record it

    Returns:
        SingularScrollReport: Pairs of rank 3 with their image points;
        rank < 3 (or a ruling collapsing to a point) goes to ``degenerate``

    Raises:
        InvalidProjectionError: If Λ loses rank modulo p
        UnsupportedCaseError: If u != 1
    """
    projection = _projected(projection, p)
    spec = projection.spec
    report = SingularScrollReport(spec=spec, prime=p)
    total = (p + 1) * p // 2
    logger.info(f"Scanning {total} ruling pairs of {spec} over GF({p})")
    pairs = iter_parameter_pairs(p)
    if progress:
        pairs = tqdm(pairs, total=total, desc=f"pairs mod {p}")
    for s1, s2 in pairs:
        rank, point = pair_image(projection, s1, s2)
        if rank > 3:
            continue
        if rank < 3 or point is None:
            logger.warning(f"Degenerate ruling pair ({s1}, {s2}): rank {rank}")
            report.degenerate.append((s1, s2))
            continue
        report.pairs.append(SingularPair(s1, s2, point))
    report.pairs.sort(key=lambda pair: (param_key(pair.first), param_key(pair.second)))
    if check_tangents:
        report.directrix_clear = directrix_clearance(projection)
        report.tangent_clearance = report.directrix_clear and not tangent_failures(projection, p)
        report.ramification_checked = report.tangent_clearance
    logger.info(
        f"GF({p}): {report.pair_count} singular pairs, {report.distinct_points} distinct points, "
        f"{len(report.degenerate)} degenerate, tangent clearance {report.tangent_clearance}"
    )
    return report


def determinantal_pairs(projection: ProjectionMatrix, p: int = DEFAULT_PRIME) -> List[Tuple[Param, Param]]:
    """Pairs for which every 4x4 minor of P(s1,s2)·Λ vanishes."""
    projection = _projected(projection, p)
    F = projection.field
    hits = []
    for s1, s2 in iter_parameter_pairs(p):
        image = ruling_matrix(projection.spec, [s1, s2], F) @ projection.matrix
        if all(not value for _, _, value in image.minors(4)):
            hits.append((s1, s2))
    return hits


def directrix_clearance(projection: ProjectionMatrix) -> bool:
    """The directrix plane e_0, e_1 maps to a line: rank(A·Λ) = 2."""
    spec = projection.spec
    spec.require_u_one()
    F = projection.field
    rows = [_pad_a(spec, (F.one, F.zero), F), _pad_a(spec, (F.zero, F.one), F)]
    return (ExactMatrix(F, rows, cols=spec.D + 2) @ projection.matrix).rank() == 2


def tangent_failures(projection: ProjectionMatrix, p: int = DEFAULT_PRIME) -> List[Param]:
    """Parameters s in P^1(F_p) where rank(M(s)·Λ) < 4."""
    projection = _projected(projection, p)
    spec = projection.spec
    F = projection.field
    if spec.N == spec.D + 1:
        return []
    return [
        s for s in projective_line(p)
        if (tangent_span_matrix(spec, s, F) @ projection.matrix).rank() < 4
    ]


def tangent_clearance(projection: ProjectionMatrix, p: int = DEFAULT_PRIME) -> bool:
    """
    Sufficient test that the center misses the tangent planes along every F_p-rational ruling.

    Checks rank(M(s)·Λ) = 4 for all s in P^1(F_p) and rank(A·Λ) = 2 for the
    directrix plane. M(s) spans the P^3 <e_0, e_1, theta(s), theta'(s)> that
    contains every tangent plane along the ruling, so a center meeting that
    P^3 away from the tangent planes is rejected too. A False result does not
    prove that some tangent plane meets the center.
    """
    projection = _projected(projection, p)
    if projection.spec.N == projection.spec.D + 1:
        return True
    if not directrix_clearance(projection):
        logger.warning("Directrix collapses under the projection")
        return False
    failures = tangent_failures(projection, p)
    if failures:
        logger.debug(f"Tangent spans meet the center at s in {failures}")
    return not failures


def exact_tangent_clearance(projection: ProjectionMatrix) -> bool:
    """
    Clearance over the algebraic closure of the projection's field.

    The 4x4 minors of M(s)·Λ are polynomials in s; the check passes iff their
    gcd is a nonzero constant and M(inf)·Λ has rank 4.
    """
    spec = projection.spec
    spec.require_u_one()
    if spec.N == spec.D + 1:
        return True
    F = projection.field
    ring = polynomial_ring(1, F, names=["s"])
    (s,) = ring.gens
    theta = [s**j for j in range(spec.v + 1)]
    dtheta = [ring.zero] + [j * s ** (j - 1) for j in range(1, spec.v + 1)]
    rows = [
        [ring.one] + [ring.zero] * (spec.D + 1),
        [ring.zero, ring.one] + [ring.zero] * spec.D,
        [ring.zero] * (spec.u + 1) + theta,
        [ring.zero] * (spec.u + 1) + dtheta,
    ]
    lam = projection.matrix
    product = [
        [sum((row[i] * lam[i, j] for i in range(spec.D + 2) if row[i] and lam[i, j]), ring.zero)
         for j in range(spec.N + 1)]
        for row in rows
    ]
    gcd = ring.zero
    for cols in combinations(range(spec.N + 1), 4):
        minor = laplace_determinant([[r[j] for j in cols] for r in product])
        if minor:
            gcd = minor if not gcd else gcd.gcd(minor)
    if not gcd or gcd.degree() > 0:
        logger.info(f"Tangent minors share the factor {gcd}")
        return False
    return (tangent_span_matrix(spec, INFINITY, F) @ lam).rank() == 4


def image_forms(projection: ProjectionMatrix, degree: int) -> List[MultiPoly]:
    """
    Basis of the degree-d forms in z_0..z_N vanishing on the projected scroll.

    Substitutes z = (1, s, ..., t s^v)·Λ into every degree-d monomial and takes
    the kernel of the coefficient matrix in (s, t).
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    spec = projection.spec
    F = projection.field
    st = polynomial_ring(2, F, names=["s", "t"])
    s, t = st.gens
    param = [s**i for i in range(spec.u + 1)] + [t * s**j for j in range(spec.v + 1)]
    lam = projection.matrix
    z = [
        sum((param[i] * lam[i, j] for i in range(spec.D + 2) if lam[i, j]), st.zero)
        for j in range(spec.N + 1)
    ]
    monomials = monomials_of_degree(spec.N + 1, degree)
    powers: Dict[Tuple[int, int], MultiPoly] = {}
    images = []
    for monom in monomials:
        term = st.one
        for j, e in enumerate(monom):
            if e:
                if (j, e) not in powers:
                    powers[(j, e)] = z[j] ** e
                term = term * powers[(j, e)]
        images.append(term)
    rows_index: Dict[Tuple[int, ...], int] = {}
    for image in images:
        for mon in image.itermonoms():
            rows_index.setdefault(mon, len(rows_index))
    grid = [[F.zero] * len(monomials) for _ in range(len(rows_index))]
    for col, image in enumerate(images):
        for mon, coeff in image.iterterms():
            grid[rows_index[mon]][col] = coeff
    target = polynomial_ring(spec.N + 1, F, prefix="z")
    if not grid:
        kernel = ExactMatrix.identity(F, len(monomials)).columns()
    else:
        kernel = ExactMatrix(F, grid, cols=len(monomials)).kernel_basis()
    forms = [
        target.from_dict({monomials[i]: c for i, c in enumerate(vec) if c}) for vec in kernel
    ]
    logger.info(f"{len(forms)} forms of degree {degree} vanish on the projected {spec}")
    return forms


def plane_chains(report: SingularScrollReport, projection: ProjectionMatrix) -> List[Tuple[Param, ...]]:
    """
    Maximal plane k-chains among the reported rulings.

    Candidates are the maximal cliques of the pair graph; a clique counts when
    the images of all its rulings span a single 2-plane.
    """
    projection = _projected(projection, report.prime)
    graph = nx.Graph()
    graph.add_edges_from((pair.first, pair.second) for pair in report.pairs)
    chains = []
    for clique in nx.find_cliques(graph):
        if len(clique) < 2:
            continue
        members = sorted(clique, key=param_key)
        span = ExactMatrix.vstack([image_line(projection, s) for s in members])
        if span.rank() == 3:
            chains.append(tuple(members))
    chains.sort(key=lambda chain: (-len(chain), [param_key(s) for s in chain]))
    return chains


def rational_points(projection: ProjectionMatrix, p: int = DEFAULT_PRIME) -> List[Tuple[int, ...]]:
    """Distinct images of the F_p-points of the scroll, directrix included."""
    projection = _projected(projection, p)
    spec = projection.spec
    F = projection.field
    seen: Dict[Tuple[int, ...], None] = {}
    for s in projective_line(p):
        candidates = [scroll_param(spec, s, t, F) for t in range(p)]
        candidates.append(_pad_b(spec, rnc_point(spec.v, s, F), F))
        for point in candidates:
            image = projection.apply(point)
            if any(image):
                seen.setdefault(normalize_point(image, F), None)
    return list(seen)
