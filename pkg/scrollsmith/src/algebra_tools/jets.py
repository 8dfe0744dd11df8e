"""First-order jets: a base polynomial plus one gradient component per unknown."""
from typing import Any, Dict, Sequence, Tuple, Union
import logging

from sympy.polys.rings import PolyElement, PolyRing

from scrollsmith.src.algebra_tools.poly import MultiPoly
from scrollsmith.src.errors import ArityError, ContextMismatchError

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class JetPoly:
    """
    Element of K[r,s][eps_1..eps_n] / (eps_i eps_j): base + sum_i eps_i * gradient[i].

    Products drop every second-order term, so (a+ex)(b+ey) = ab + e(ay+bx).
    """

    __slots__ = ("base", "gradient")

    def __init__(self, base: MultiPoly, gradient: Sequence[MultiPoly]):
        self.base = base
        self.gradient: Tuple[MultiPoly, ...] = tuple(gradient)
        ring = base.ring
        for g in self.gradient:
            if g.ring != ring:
                raise ContextMismatchError("gradient lives in a different ring")

    @classmethod
    def constant(cls, base: MultiPoly, size: int) -> "JetPoly":
        return cls(base, (base.ring.zero,) * size)

    @classmethod
    def unknown(cls, base: MultiPoly, index: int, direction: MultiPoly, size: int) -> "JetPoly":
        """base + eps_index * direction."""
        if not 0 <= index < size:
            raise ArityError(f"unknown index {index} outside 0..{size - 1}")
        zero = base.ring.zero
        return cls(base, tuple(direction if i == index else zero for i in range(size)))

    @property
    def ring(self) -> PolyRing:
        return self.base.ring

    @property
    def size(self) -> int:
        return len(self.gradient)

    def is_constant(self) -> bool:
        return not any(self.gradient)

    def _coerce(self, other: Any) -> "JetPoly":
        if isinstance(other, JetPoly):
            if other.size != self.size:
                raise ArityError(f"gradient sizes differ: {self.size} vs {other.size}")
            return other
        if isinstance(other, PolyElement):
            return JetPoly.constant(other, self.size)
        return JetPoly.constant(self.ring.ground_new(self.ring.domain.convert(other)), self.size)

    def __add__(self, other: Any) -> "JetPoly":
        other = self._coerce(other)
        return JetPoly(
            self.base + other.base,
            tuple(a + b if b else a for a, b in zip(self.gradient, other.gradient)),
        )

    __radd__ = __add__

    def __neg__(self) -> "JetPoly":
        return JetPoly(-self.base, tuple(-g for g in self.gradient))

    def __sub__(self, other: Any) -> "JetPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "JetPoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "JetPoly":
        if not isinstance(other, (JetPoly, PolyElement)):
            scalar = self.ring.domain.convert(other)
            return JetPoly(self.base * scalar, tuple(g * scalar if g else g for g in self.gradient))
        other = self._coerce(other)
        a, b = self.base, other.base
        zero = self.ring.zero
        gradient = []
        for x, y in zip(self.gradient, other.gradient):
            if x and y:
                gradient.append(a * y + b * x)
            elif y:
                gradient.append(a * y)
            elif x:
                gradient.append(b * x)
            else:
                gradient.append(zero)
        return JetPoly(a * b, gradient)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "JetPoly":
        if exponent < 0:
            raise ValueError("negative powers are not jets")
        if exponent == 0:
            return JetPoly.constant(self.ring.one, self.size)
        # (a + e x)^n = a^n + e n a^(n-1) x
        lower = self.base ** (exponent - 1)
        factor = lower * self.ring.domain.convert(exponent)
        return JetPoly(lower * self.base, tuple(factor * g if g else g for g in self.gradient))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JetPoly):
            return NotImplemented
        return self.base == other.base and self.gradient == other.gradient

    def __repr__(self) -> str:
        nonzero = sum(1 for g in self.gradient if g)
        return f"JetPoly(base={self.base}, nonzero_gradient={nonzero}/{self.size})"

    def gradient_coefficients(self, monom: Tuple[int, ...]) -> Tuple[Any, ...]:
        """Coefficient of one base monomial in every gradient component."""
        zero = self.ring.domain.zero
        return tuple(g.get(monom, zero) if g else zero for g in self.gradient)


def jet_eval(f: MultiPoly, args: Sequence[JetPoly]) -> JetPoly:
    """
    Substitute jets into a polynomial, exact to first order.

    Args:
        f: Polynomial in len(args) variables
        args: One jet per variable, all with the same base ring and size

    Returns:
        JetPoly: f(args); the base is f at the base points and the gradient is
        the directional derivative

    Raises:
        ArityError: If the argument count does not match f's variable count
    """
    if len(args) != f.ring.ngens:
        raise ArityError(f"expected {f.ring.ngens} arguments, got {len(args)}")
    if not args:
        raise ArityError("jet_eval needs at least one argument to fix the base ring")
    ring = args[0].ring
    size = args[0].size
    for arg in args:
        if arg.ring != ring or arg.size != size:
            raise ContextMismatchError("jet arguments disagree on ring or gradient size")
    if f.ring.domain != ring.domain:
        raise ContextMismatchError(f"coefficients over {f.ring.domain}, jets over {ring.domain}")
    powers: Dict[Tuple[int, int], JetPoly] = {}
    result = JetPoly.constant(ring.zero, size)
    for monom, coeff in f.iterterms():
        term: Union[JetPoly, None] = None
        for i, e in enumerate(monom):
            if not e:
                continue
            key = (i, e)
            if key not in powers:
                powers[key] = args[i] ** e
            term = powers[key] if term is None else term * powers[key]
        if term is None:
            term = JetPoly.constant(ring.ground_new(coeff), size)
        else:
            term = term * coeff
        result = result + term
    return result
