"""Closed-form dimension, codimension and cohomology counts for scrolls and their Hilbert schemes."""
from dataclasses import dataclass
from math import comb
from typing import Any, Dict, List, Tuple
import logging

import pandas as pd
from sympy import Rational

from scrollsmith.src.errors import ConsistencyError

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

CHI_TANGENT = 6
OBSTRUCTION_THRESHOLD = 55


@dataclass(frozen=True)
class DivisorClass:
    """
    Class a·g + b·f on the Hirzebruch surface F_m.

    g is the positive section (g² = m) and f the fiber (f² = 0, f·g = 1).
    """
    m: int
    a: int
    b: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("the Hirzebruch index m must be non-negative")

    @property
    def is_ample(self) -> bool:
        return self.a > 0 and self.b > 0

    def dot(self, other: "DivisorClass") -> int:
        return intersection_number(self.m, self, other)

    @property
    def self_intersection(self) -> int:
        return self.dot(self)


def intersection_number(m: int, x: DivisorClass, y: DivisorClass) -> int:
    """(a g + b f)·(c g + d f) = ac·m + ad + bc."""
    return x.a * y.a * m + x.a * y.b + x.b * y.a


def canonical_class(m: int) -> DivisorClass:
    """K = -2g + (m-2)f, with K² = 8."""
    K = DivisorClass(m, -2, m - 2)
    if K.self_intersection != 8:
        raise ConsistencyError(f"K^2 = {K.self_intersection} on F_{m}")
    return K


def scroll_hyperplane_class(u: int, v: int) -> DivisorClass:
    """Hyperplane class g + u f of S_{u,v}; its square is the degree D = u+v."""
    if u < 1 or v < u:
        raise ValueError("need 1 <= u <= v")
    return DivisorClass(v - u, 1, u)


def riemann_roch_chi(m: int, a: int, b: int) -> int:
    """chi(O(h)) = 1 + (h² - h·K)/2."""
    h = DivisorClass(m, a, b)
    value = 1 + Rational(h.self_intersection - h.dot(canonical_class(m)), 2)
    if not value.is_integer:
        raise ConsistencyError(f"Euler characteristic {value} is not an integer")
    return int(value)


def h0_hirzebruch(m: int, a: int, b: int) -> int:
    """
    h^0(F_m, O(a g + b f)) = (a+1)(am/2 + b + 1) for ample classes.

    Higher cohomology vanishes on ample classes, so this equals riemann_roch_chi.

    Raises:
        ValueError: If the class is not ample
    """
    if not DivisorClass(m, a, b).is_ample:
        raise ValueError(f"class {a}g+{b}f on F_{m} is not ample")
    value = (a + 1) * (Rational(a * m, 2) + b + 1)
    if not value.is_integer:
        raise ConsistencyError(f"h0 = {value} is not an integer")
    return int(value)


def higher_cohomology_hirzebruch(m: int, a: int, b: int, i: int) -> int:
    """h^i for i > 0 of an ample class: always 0."""
    if i <= 0:
        raise ValueError("use h0_hirzebruch for i = 0")
    if not DivisorClass(m, a, b).is_ample:
        raise ValueError(f"class {a}g+{b}f on F_{m} is not ample")
    return 0


def h0_normal_bundle(N: int, D: int) -> int:
    """h^0(N_{S/P^N}) = (N+1)(D+2) - 7 for a scroll of degree D."""
    return (N + 1) * (D + 2) - 7


def h0_normal_bundle_general(N: int, m: int, a: int, b: int) -> int:
    """(N+1)(a+1)(am/2 + b + 1) - 7 for an embedding by a g + b f."""
    return (N + 1) * h0_hirzebruch(m, a, b) - 7


def chi_tangent() -> int:
    return CHI_TANGENT


def h1_tangent(m: int) -> int:
    """h^1(F_m, T) = m - 1 for m >= 2; F_0 and F_1 are rigid."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return max(0, m - 1)


def dim_hilbert(D: int, N: int) -> int:
    """Dimension of the component of scrolls of degree D in P^N."""
    if not D + 1 >= N >= 3:
        raise ValueError(f"need D+1 >= N >= 3, got D={D}, N={N}")
    return h0_normal_bundle(N, D)


def dim_stratum(D: int, N: int, u: int) -> int:
    """(D+2)N + 2u - 4 - delta_{u,v} for scrolls of type (u, D-u)."""
    if not D + 1 >= N >= 3:
        raise ValueError(f"need D+1 >= N >= 3, got D={D}, N={N}")
    if not 1 <= u <= D / 2:
        raise ValueError(f"need 1 <= u <= D/2, got u={u}, D={D}")
    delta = int(u == D - u)
    return (D + 2) * N + 2 * u - 4 - delta


def sigma_codim(N: int, j: int) -> int:
    """Codimension j(N-3+j) of the locus where the center meets the secant variety in dimension j-1."""
    if j < 1:
        raise ValueError("j must be at least 1")
    return j * (N - 3 + j)


def singular_bound(N: int, r: int) -> int:
    """Codimension bound r(N-4) for scrolls with r singular points."""
    return r * (N - 4)


def bound_valid(N: int, D: int, r: int) -> bool:
    return r * N <= (D + 2) ** 2 - 1


def guaranteed_r(D: int, N: int) -> int:
    return D - N + 1


def secant_degree(D: int) -> int:
    """Degree of the secant variety of a scroll of degree D."""
    if D < 2:
        raise ValueError("D must be at least 2")
    return comb(D - 2, 2)


def grassmannian_dim(k: int, n: int) -> int:
    """Dimension of the Grassmannian of k-planes in P^n."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    return (k + 1) * (n - k)


def center_space_dim(D: int, N: int) -> int:
    """Projection centers: (D-N)-planes in P^{D+1}."""
    return grassmannian_dim(D - N, D + 1)


def stiefel_dim(D: int, N: int) -> int:
    """Projective Stiefel variety of (D+2) x (N+1) frames."""
    return (D + 2) * (N + 1) - 1


def sigma_stabilization_index(D: int, N: int) -> int:
    return min(4, D - N + 1)


def sigma_resolution_dim(N: int, D: int, j: int) -> int:
    """
    Dimension of the resolving Grassmannian bundle of sigma_j.

    A G(3-j, D-N+4-j)-bundle over G(N-4+j, D-3); equals dim G(N, D+1) - j(N-3+j).
    """
    if not 1 <= j <= min(3, D - N + 1):
        raise ValueError(f"j={j} outside 1..{min(3, D - N + 1)}")
    value = grassmannian_dim(3 - j, D - N + 4 - j) + grassmannian_dim(N - 4 + j, D - 3)
    expected = grassmannian_dim(N, D + 1) - sigma_codim(N, j)
    if value != expected:
        raise ConsistencyError(f"resolution dimension {value} != {expected}")
    return value


def deformation_targets(u: int, v: int) -> List[Tuple[int, int]]:
    """Types (u+k, v-k), 1 <= k <= m/2, whose strata contain S_{u,v} in their closure."""
    if u < 1 or v < u:
        raise ValueError("need 1 <= u <= v")
    return [(u + k, v - k) for k in range(1, (v - u) // 2 + 1)]


def hilbert_polynomial(D: int) -> Tuple[Rational, Rational, Rational]:
    """Coefficients of P_S(x) = D/2 x² + (D/2 + 1) x + 1."""
    if D < 1:
        raise ValueError("D must be positive")
    return Rational(D, 2), Rational(D, 2) + 1, Rational(1)


def hilbert_polynomial_value(D: int, x: int) -> int:
    a, b, c = hilbert_polynomial(D)
    value = a * x * x + b * x + c
    if not value.is_integer:
        raise ConsistencyError(f"P_S({x}) = {value} is not an integer")
    return int(value)


@dataclass(frozen=True)
class CodimReport:
    sigma_j: int
    sigma_1: int
    bound_r: int
    bound_valid: bool
    guaranteed_r: int
    secant_degree: int

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def codim_formulas(N: int, D: int, j: int = 1, r: int = 1) -> CodimReport:
    """All codimension counts for singular scrolls of degree D in P^N (D >= N >= 5)."""
    if not D >= N >= 5:
        raise ValueError(f"need D >= N >= 5, got D={D}, N={N}")
    if r < 0:
        raise ValueError("r must be non-negative")
    valid = bound_valid(N, D, r)
    if not valid:
        logger.warning(f"Codimension bound for r={r} is outside its range (rN > (D+2)^2 - 1)")
    return CodimReport(
        sigma_j=sigma_codim(N, j),
        sigma_1=sigma_codim(N, 1),
        bound_r=singular_bound(N, r),
        bound_valid=valid,
        guaranteed_r=guaranteed_r(D, N),
        secant_degree=secant_degree(D),
    )


@dataclass(frozen=True)
class HilbertStratum:
    """
    Scrolls of type (u, v) with r singular points in P^N.

    Attributes:
        D (int): Degree
        N (int): Target dimension
        u (int): Directrix degree
        r (int): Number of singular points
    """
    D: int
    N: int
    u: int
    r: int = 0

    def __post_init__(self):
        if not 1 <= self.u <= self.D / 2:
            raise ValueError(f"need 1 <= u <= D/2, got u={self.u}, D={self.D}")
        if not self.D + 1 >= self.N >= 3:
            raise ValueError(f"need D+1 >= N >= 3, got D={self.D}, N={self.N}")

    @property
    def v(self) -> int:
        return self.D - self.u

    @property
    def m(self) -> int:
        return self.v - self.u

    @property
    def delta(self) -> int:
        return int(self.u == self.v)

    @property
    def dim_hilbert(self) -> int:
        return dim_hilbert(self.D, self.N)

    @property
    def dim(self) -> int:
        return dim_stratum(self.D, self.N, self.u)

    @property
    def codim(self) -> int:
        return self.dim_hilbert - self.dim

    def singular_lower_bound(self) -> int:
        """dim H_D^r >= dim H_D - r(N-4) while the bound is valid."""
        if not bound_valid(self.N, self.D, self.r):
            raise ValueError(f"bound invalid for r={self.r}")
        return self.dim_hilbert - singular_bound(self.N, self.r)


@dataclass(frozen=True)
class HigherDiscReport:
    n: int
    lower_bound: int
    threshold: int
    status: str

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def higher_disc_feasibility(n: int) -> HigherDiscReport:
    """
    Compare dim H_{2n+1}^{n(n-2)} >= -n² + 14n + 11 with the cubic-fourfold threshold 55.

    5 <= n <= 8 is obstructed (a generic such scroll lies on no cubic fourfold);
    n >= 9 is reported as unknown.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    bound = -n * n + 14 * n + 11
    if n >= 9:
        status = "unknown"
    elif bound >= OBSTRUCTION_THRESHOLD:
        status = "obstructed"
    else:
        status = "unobstructed"
    return HigherDiscReport(n, bound, OBSTRUCTION_THRESHOLD, status)


def stratum_table(D: int, N: int) -> pd.DataFrame:
    """One row per scroll type (u, D-u) with its stratum dimension and codimension."""
    rows = []
    total = dim_hilbert(D, N)
    for u in range(1, D // 2 + 1):
        dim = dim_stratum(D, N, u)
        rows.append({"u": u, "v": D - u, "m": D - 2 * u, "dim": dim, "codim": total - dim})
    return pd.DataFrame(rows, columns=["u", "v", "m", "dim", "codim"])


def formula_table(D: int, N: int, r: int) -> pd.DataFrame:
    """Every formula output for (D, N, r) as a two-column table."""
    codims = codim_formulas(N, D, 1, r)
    total = dim_hilbert(D, N)
    a, b, c = hilbert_polynomial(D)
    rows = [
        ("dim_hilbert", total),
        ("dim_stratum_u1", dim_stratum(D, N, 1)),
        ("dim_stratum_balanced", dim_stratum(D, N, D // 2)),
        ("bound_r", codims.bound_r),
        ("bound_valid", codims.bound_valid),
        ("dim_singular_lower_bound", total - codims.bound_r),
        ("sigma_1", codims.sigma_1),
        ("guaranteed_r", codims.guaranteed_r),
        ("secant_degree", codims.secant_degree),
        ("center_space_dim", center_space_dim(D, N)),
        ("stiefel_dim", stiefel_dim(D, N)),
        ("sigma_stabilization_index", sigma_stabilization_index(D, N)),
        ("hilbert_polynomial", f"{a} x^2 + {b} x + {c}"),
        ("chi_tangent", chi_tangent()),
    ]
    return pd.DataFrame(rows, columns=["quantity", "value"])
