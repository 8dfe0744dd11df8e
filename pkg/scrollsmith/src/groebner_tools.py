"""Buchberger's algorithm over GF(p) and QQ, and the services built on it."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple
import logging

from sympy.polys.orderings import ProductOrder, grevlex, lex
from sympy.polys.rings import PolyRing

from scrollsmith.src.algebra_tools.poly import (
    Monomial,
    MultiPoly,
    change_ring,
    ideal_from_json,
    ideal_to_json,
    is_homogeneous,
    monomials_of_degree,
    polynomial_ring,
    require_homogeneous,
    ring_field,
    with_order,
)
from scrollsmith.src.errors import ContextMismatchError

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class OrderKind(str, Enum):
    """Supported monomial orders."""
    GREVLEX = "grevlex"
    LEX = "lex"
    BLOCK = "block"


@dataclass(frozen=True)
class _BlockSlice:
    start: int
    stop: Optional[int] = None

    def __call__(self, monomial: Monomial) -> Monomial:
        return tuple(monomial[self.start:self.stop])


@dataclass(frozen=True)
class MonomialOrder:
    """
    A monomial order on exponent vectors.

    Attributes:
        kind (OrderKind): grevlex, lex, or block elimination
        block_size (int): Size of the first (eliminated) block for BLOCK orders;
            both blocks are ordered by grevlex
    """
    kind: OrderKind = OrderKind.GREVLEX
    block_size: int = 0

    def __post_init__(self):
        if self.kind == OrderKind.BLOCK and self.block_size < 1:
            raise ValueError("block orders need block_size >= 1")
        if self.kind != OrderKind.BLOCK and self.block_size:
            raise ValueError("block_size only applies to block orders")

    @classmethod
    def grevlex(cls) -> "MonomialOrder":
        return cls(OrderKind.GREVLEX)

    @classmethod
    def lex(cls) -> "MonomialOrder":
        return cls(OrderKind.LEX)

    @classmethod
    def block(cls, size: int) -> "MonomialOrder":
        return cls(OrderKind.BLOCK, size)

    def sympy_order(self) -> Any:
        if self.kind == OrderKind.GREVLEX:
            return grevlex
        if self.kind == OrderKind.LEX:
            return lex
        return ProductOrder(
            (grevlex, _BlockSlice(0, self.block_size)),
            (grevlex, _BlockSlice(self.block_size, None)),
        )

    def key(self, monomial: Monomial) -> Any:
        return self.sympy_order()(tuple(monomial))

    def compare(self, a: Monomial, b: Monomial) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)


@dataclass(frozen=True)
class IdealBasis:
    """
    Generators of a polynomial ideal together with the order they refer to.

    When ``reduced`` is set the generators form the reduced Groebner basis.
    """
    ring: PolyRing
    generators: Tuple[MultiPoly, ...]
    order: MonomialOrder = field(default_factory=MonomialOrder)
    reduced: bool = False

    @classmethod
    def from_generators(
        cls,
        gens: Sequence[MultiPoly],
        order: Optional[MonomialOrder] = None,
        ring: Optional[PolyRing] = None,
    ) -> "IdealBasis":
        order = order or MonomialOrder()
        if ring is None:
            if not gens:
                raise ValueError("the zero ideal needs an explicit ring")
            ring = gens[0].ring
        ring = with_order(ring, order.sympy_order())
        return cls(ring, tuple(change_ring(f, ring) for f in gens if f), order, False)

    @property
    def is_zero(self) -> bool:
        return not self.generators

    def leading_monomials(self) -> List[Monomial]:
        return [g.LM for g in self.generators]

    def is_homogeneous(self) -> bool:
        return all(is_homogeneous(g) for g in self.generators)

    def groebner(self) -> "IdealBasis":
        return self if self.reduced else buchberger(self.generators, self.order, ring=self.ring)

    def normal_form(self, f: MultiPoly) -> MultiPoly:
        return normal_form(f, self)

    def contains(self, f: MultiPoly) -> bool:
        return not normal_form(f, self.groebner())

    def to_json(self) -> Dict[str, Any]:
        data = ideal_to_json(self.ring, self.generators)
        data["order"] = {"kind": self.order.kind.value, "block_size": self.order.block_size}
        data["reduced"] = self.reduced
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "IdealBasis":
        spec = data.get("order", {"kind": "grevlex", "block_size": 0})
        order = MonomialOrder(OrderKind(spec["kind"]), int(spec.get("block_size", 0)))
        ring, gens = ideal_from_json(data, order=order.sympy_order())
        return cls(ring, tuple(g for g in gens if g), order, bool(data.get("reduced", False)))


def _normalize(f: MultiPoly) -> MultiPoly:
    """Monic over GF(p); integer content one with positive lead over QQ."""
    if not f.ring.domain.is_QQ:
        return f.monic()
    _, f = f.clear_denoms()
    cont = f.content()
    if cont:
        f = f.quo_ground(cont)
    if f.LC < 0:
        f = -f
    return f


def spoly(f: MultiPoly, g: MultiPoly, lmf: Optional[Monomial] = None,
          lmg: Optional[Monomial] = None) -> MultiPoly:
    """Return the s-polynomial of f and g."""
    if f.ring != g.ring:
        raise ContextMismatchError("polynomials must be in same ring")
    lmf = f.LM if lmf is None else lmf
    lmg = g.LM if lmg is None else lmg
    R = f.ring
    lcm = R.monomial_lcm(lmf, lmg)
    s1 = f.mul_term((R.monomial_div(lcm, lmf), g.LC))
    s2 = g.mul_term((R.monomial_div(lcm, lmg), f.LC))
    return s1 - s2


def select(G: Sequence[MultiPoly], P: Set[Pair]) -> Pair:
    """Normal strategy: the pair whose lcm is smallest; ties broken by index."""
    R = G[0].ring
    return min(P, key=lambda p: (R.order(R.monomial_lcm(G[p[0]].LM, G[p[1]].LM)), p))


def update(G: List[MultiPoly], P: Set[Pair], f: MultiPoly,
           lmG: Sequence[Monomial]) -> Tuple[List[MultiPoly], Set[Pair]]:
    """Add f to the basis and prune the pair set with the Gebauer-Moeller criteria."""
    lmf = f.LM
    R = f.ring
    lcm = R.monomial_lcm
    mul = R.monomial_mul
    div = R.monomial_div

    P = {p for p in P if (not div(lcm(lmG[p[0]], lmG[p[1]]), lmf) or
                          lcm(lmG[p[0]], lmG[p[1]]) == lcm(lmG[p[0]], lmf) or
                          lcm(lmG[p[0]], lmG[p[1]]) == lcm(lmG[p[1]], lmf))}
    lcm_dict: Dict[Monomial, List[int]] = {}
    for i in range(len(G)):
        lcm_dict.setdefault(lcm(lmG[i], lmf), []).append(i)
    minimalized_lcms: List[Monomial] = []
    for L in sorted(lcm_dict.keys(), key=R.order):
        if all(not div(L, L_) for L_ in minimalized_lcms):
            minimalized_lcms.append(L)
    P_ = set()
    for L in minimalized_lcms:
        if not any(lcm(lmG[i], lmf) == mul(lmG[i], lmf) for i in lcm_dict[L]):
            P_.add((min(lcm_dict[L]), len(G)))
    return G + [f], P | P_


def minimalize(G: Sequence[MultiPoly]) -> List[MultiPoly]:
    """Return a minimal Groebner basis from an arbitrary Groebner basis G."""
    if not G:
        return []
    R = G[0].ring
    Gmin: List[MultiPoly] = []
    for f in sorted(G, key=lambda h: R.order(h.LM)):
        if all(not R.monomial_div(f.LM, g.LM) for g in Gmin):
            Gmin.append(f)
    return Gmin


def interreduce(G: Sequence[MultiPoly]) -> List[MultiPoly]:
    """Return the reduced Groebner basis from a minimal Groebner basis G."""
    Gred = []
    for i in range(len(G)):
        others = list(G[:i]) + list(G[i + 1:])
        g = G[i].rem(others) if others else G[i]
        Gred.append(g.monic())
    return Gred


def buchberger(
    gens: Sequence[MultiPoly],
    order: Optional[MonomialOrder] = None,
    ring: Optional[PolyRing] = None,
) -> IdealBasis:
    """
    Reduced Groebner basis of the ideal generated by ``gens``.

    Args:
        gens: Generators, all in one ring
        order: Monomial order (default grevlex)
        ring: Needed only when ``gens`` is empty

    Returns:
        IdealBasis: The reduced basis, sorted by leading monomial

    Raises:
        ContextMismatchError: If generators come from different rings
    """
    order = order or MonomialOrder()
    if gens:
        base = gens[0].ring
        for f in gens:
            if f.ring.symbols != base.symbols or f.ring.domain != base.domain:
                raise ContextMismatchError("generators live in different rings")
    elif ring is None:
        raise ValueError("the zero ideal needs an explicit ring")
    else:
        base = ring
    R = with_order(base, order.sympy_order())
    F = [_normalize(change_ring(f, R)) for f in gens if f]
    if not F:
        return IdealBasis(R, (), order, True)

    G: List[MultiPoly] = []
    lmG: List[Monomial] = []
    P: Set[Pair] = set()
    for f in F:
        G, P = update(G, P, f, lmG)
        lmG.append(f.LM)

    reductions = 0
    while P:
        i, j = select(G, P)
        P.remove((i, j))
        s = spoly(G[i], G[j], lmf=lmG[i], lmg=lmG[j])
        r = s.rem(G)
        reductions += 1
        if r:
            r = _normalize(r)
            G, P = update(G, P, r, lmG)
            lmG.append(r.LM)

    basis = interreduce(minimalize(G))
    basis.sort(key=lambda g: R.order(g.LM))
    logger.debug(
        f"Buchberger: {len(F)} generators -> {len(basis)} basis elements "
        f"after {reductions} reductions"
    )
    return IdealBasis(R, tuple(basis), order, True)


def normal_form(f: MultiPoly, basis: IdealBasis) -> MultiPoly:
    """Remainder of f on division by the basis generators."""
    f = change_ring(f, basis.ring)
    if basis.is_zero or not f:
        return f
    return f.rem(list(basis.generators))


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def standard_monomials(basis: IdealBasis, degree: int) -> List[Monomial]:
    """Degree-d monomials outside the leading-term ideal."""
    basis = basis.groebner()
    leads = basis.leading_monomials()
    return [
        m for m in monomials_of_degree(basis.ring.ngens, degree)
        if not any(_divides(lm, m) for lm in leads)
    ]


def graded_piece_dim(basis: IdealBasis, degree: int) -> int:
    """
    Dimension of the degree-d slice of a homogeneous ideal.

    Counts degree-d monomials minus standard monomials of the leading-term ideal.

    Raises:
        NonHomogeneousError: If a generator is not homogeneous
    """
    require_homogeneous(basis.generators)
    if basis.is_zero:
        return 0
    total = len(monomials_of_degree(basis.ring.ngens, degree))
    return total - len(standard_monomials(basis, degree))


def is_projectively_empty(basis: IdealBasis) -> bool:
    """True iff every variable has a pure power among the leading monomials."""
    basis = basis.groebner()
    leads = basis.leading_monomials()
    n = basis.ring.ngens
    for i in range(n):
        if not any(
            lm[i] > 0 and all(lm[j] == 0 for j in range(n) if j != i) for lm in leads
        ):
            return False
    return True


def eliminate(basis: IdealBasis, keep: Iterable[int]) -> IdealBasis:
    """
    Intersect the ideal with the subring in the kept variables.

    The ideal must use a block order whose first block is exactly the set of
    eliminated variables.

    Args:
        basis: Ideal in a block order
        keep: Indices of the variables to keep

    Returns:
        IdealBasis: Reduced grevlex basis in a ring on the kept variables
    """
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one variable")
    ring = basis.ring
    eliminated = [i for i in range(ring.ngens) if i not in keep]
    if (basis.order.kind != OrderKind.BLOCK
            or eliminated != list(range(basis.order.block_size))):
        raise ValueError(
            "eliminate needs a block order whose first block is the eliminated variables"
        )
    G = basis.groebner()
    names = [str(ring.symbols[i]) for i in keep]
    sub = polynomial_ring(len(keep), ring_field(ring), names=names)
    kept = []
    for g in G.generators:
        if all(m[i] == 0 for m in g.itermonoms() for i in eliminated):
            kept.append(sub.from_dict({tuple(m[i] for i in keep): c for m, c in g.items()}))
    logger.info(
        f"Elimination kept {len(kept)} of {len(G.generators)} basis elements"
    )
    return buchberger(kept, MonomialOrder.grevlex(), ring=sub)
