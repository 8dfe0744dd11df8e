"""Multivariate polynomials over GF(p)/QQ on top of sympy's sparse PolyRing."""
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

from sympy.polys.orderings import MonomialOrder as SympyOrder
from sympy.polys.rings import PolyElement, PolyRing

from scrollsmith.src.algebra_tools.fields import FieldLike, ScalarField, as_field
from scrollsmith.src.errors import ArityError, ContextMismatchError, NonHomogeneousError

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

MultiPoly = PolyElement
Monomial = Tuple[int, ...]


@lru_cache(maxsize=None)
def _ring(names: Tuple[str, ...], field: ScalarField, order: Any) -> PolyRing:
    return PolyRing(names, field.domain, order)


def polynomial_ring(
    nvars: int,
    field: FieldLike,
    order: Any = "grevlex",
    prefix: str = "x",
    names: Optional[Sequence[str]] = None,
) -> PolyRing:
    """
    Polynomial ring in ``nvars`` variables x0..x{n-1} over a ScalarField.

    Args:
        nvars: Number of variables
        field: ScalarField, prime, or None for QQ
        order: sympy monomial order (name or MonomialOrder instance)
        prefix: Variable name prefix when ``names`` is not given
        names: Explicit variable names

    Returns:
        PolyRing: A cached sympy ring
    """
    if names is None:
        names = [f"{prefix}{i}" for i in range(nvars)]
    if len(names) != nvars:
        raise ValueError("names must have one entry per variable")
    return _ring(tuple(names), as_field(field), order)


def ring_field(ring: PolyRing) -> ScalarField:
    domain = ring.domain
    if domain.is_FiniteField:
        return ScalarField.prime(int(domain.mod))
    if domain.is_QQ:
        return ScalarField.rationals()
    raise ContextMismatchError(f"unsupported coefficient domain {domain}")


def with_order(ring: PolyRing, order: SympyOrder) -> PolyRing:
    return _ring(tuple(str(s) for s in ring.symbols), ring_field(ring), order)


def change_ring(f: MultiPoly, ring: PolyRing) -> MultiPoly:
    """Move f into a ring with the same variables (e.g. another monomial order)."""
    if f.ring == ring:
        return f
    if f.ring.ngens != ring.ngens:
        raise ArityError("rings have different variable counts")
    return ring.from_dict(dict(f.items()))


def monomials_of_degree(nvars: int, degree: int) -> List[Monomial]:
    """All exponent vectors of total degree ``degree``, lex-descending."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exps = [0] * nvars
        for i in combo:
            exps[i] += 1
        out.append(tuple(exps))
    return out


def total_degree(f: MultiPoly) -> int:
    if not f:
        return -1
    return max(sum(m) for m in f.itermonoms())


def is_homogeneous(f: MultiPoly) -> bool:
    degrees = {sum(m) for m in f.itermonoms()}
    return len(degrees) <= 1


def require_homogeneous(polys: Sequence[MultiPoly]) -> None:
    for f in polys:
        if not is_homogeneous(f):
            raise NonHomogeneousError(f"{f} is not homogeneous")


def evaluate(f: MultiPoly, point: Sequence[Any]) -> Any:
    """Value of f at a point of the coefficient field."""
    ring = f.ring
    if len(point) != ring.ngens:
        raise ArityError(f"expected {ring.ngens} coordinates, got {len(point)}")
    domain = ring.domain
    values = [domain.convert(x) for x in point]
    total = domain.zero
    for monom, coeff in f.iterterms():
        term = coeff
        for x, e in zip(values, monom):
            if e:
                term *= x**e
        total += term
    return total


def substitute(f: MultiPoly, images: Sequence[MultiPoly]) -> MultiPoly:
    """Compose f with polynomials of another ring: f(images[0], ..., images[n-1])."""
    if len(images) != f.ring.ngens:
        raise ArityError(f"expected {f.ring.ngens} images, got {len(images)}")
    target = images[0].ring
    result = target.zero
    powers: Dict[Tuple[int, int], MultiPoly] = {}
    for monom, coeff in f.iterterms():
        term = target.ground_new(target.domain.convert(coeff, f.ring.domain))
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                term = term * powers[key]
        result += term
    return result


def partial_derivatives(f: MultiPoly) -> List[MultiPoly]:
    return [f.diff(x) for x in f.ring.gens]


def poly_to_json(f: MultiPoly) -> List[Dict[str, Any]]:
    field = ring_field(f.ring)
    return [
        {"coeff": field.format(coeff), "exps": list(monom)}
        for monom, coeff in f.terms()
    ]


def poly_from_json(ring: PolyRing, terms: Sequence[Dict[str, Any]]) -> MultiPoly:
    field = ring_field(ring)
    data = {}
    for term in terms:
        exps = tuple(int(e) for e in term["exps"])
        if len(exps) != ring.ngens:
            raise ArityError(f"exponent vector {exps} does not fit {ring.ngens} variables")
        data[exps] = field.parse(str(term["coeff"]))
    return ring.from_dict(data)


def ideal_to_json(ring: PolyRing, polys: Sequence[MultiPoly]) -> Dict[str, Any]:
    return {
        "ring": {
            "variables": [str(s) for s in ring.symbols],
            "modulus": ring_field(ring).modulus,
        },
        "polynomials": [poly_to_json(f) for f in polys],
    }


def ideal_from_json(
    data: Dict[str, Any], order: Any = "grevlex"
) -> Tuple[PolyRing, List[MultiPoly]]:
    header = data["ring"]
    names = list(header["variables"])
    ring = polynomial_ring(len(names), header.get("modulus"), order=order, names=names)
    return ring, [poly_from_json(ring, terms) for terms in data["polynomials"]]
