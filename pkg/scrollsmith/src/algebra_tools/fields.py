"""Scalar fields: prime fields GF(p) and the rationals, both backed by sympy domains."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union
import logging

import numpy as np
from sympy import Rational, isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.domains.domain import Domain

from scrollsmith.src.errors import BadPrimeError, ContextMismatchError

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DEFAULT_PRIME = 31


@dataclass(frozen=True)
class ScalarField:
    """
    Field of definition for every exact computation.

    Attributes:
        modulus (Optional[int]): The prime p for GF(p), None for the rationals
    """
    modulus: Optional[int] = None
    domain: Domain = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.modulus is not None:
            if not isprime(self.modulus):
                raise ValueError(f"modulus must be prime, got {self.modulus}")
            object.__setattr__(self, "domain", GF(self.modulus))
        else:
            object.__setattr__(self, "domain", QQ)

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "ScalarField":
        return cls(modulus=p)

    @classmethod
    def rationals(cls) -> "ScalarField":
        return cls(modulus=None)

    @property
    def is_prime_field(self) -> bool:
        return self.modulus is not None

    @property
    def characteristic(self) -> int:
        return self.modulus or 0

    @property
    def zero(self) -> Any:
        return self.domain.zero

    @property
    def one(self) -> Any:
        return self.domain.one

    def __str__(self) -> str:
        return f"GF({self.modulus})" if self.modulus else "QQ"

    def __call__(self, value: Any) -> Any:
        """Coerce ints, Fractions, sympy Rationals, strings or domain elements."""
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (bool, np.bool_)):
            value = int(value)
        if isinstance(value, np.integer):
            value = int(value)
        if isinstance(value, int):
            return self.domain(value)
        if isinstance(value, (Fraction, Rational)):
            return self.from_ratio(int(value.numerator), int(value.denominator))
        if self.domain.of_type(value):
            return value
        if QQ.of_type(value):
            return self.from_ratio(int(QQ.numer(value)), int(QQ.denom(value)))
        raise ContextMismatchError(f"cannot coerce {value!r} into {self}")

    def from_ratio(self, numerator: int, denominator: int) -> Any:
        if denominator == 0:
            raise ZeroDivisionError("zero denominator")
        if self.modulus is None:
            return QQ(numerator, denominator)
        if denominator % self.modulus == 0:
            raise BadPrimeError(
                f"prime {self.modulus} divides the denominator {denominator}"
            )
        return self.domain(numerator) / self.domain(denominator)

    def parse(self, text: str) -> Any:
        """Parse a decimal string, rationals written ``"a/b"``."""
        text = text.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return self.from_ratio(int(num), int(den))
        return self.domain(int(text))

    def format(self, value: Any) -> str:
        if self.modulus is not None:
            return str(self.to_int(value))
        num, den = self.numer(value), self.denom(value)
        return str(num) if den == 1 else f"{num}/{den}"

    def to_int(self, value: Any) -> int:
        """Canonical integer representative in [0, p)."""
        if self.modulus is None:
            if self.denom(value) != 1:
                raise ValueError(f"{self.format(value)} is not an integer")
            return self.numer(value)
        return int(self.domain.to_int(value)) % self.modulus

    def numer(self, value: Any) -> int:
        if self.modulus is not None:
            return self.to_int(value)
        return int(QQ.numer(value))

    def denom(self, value: Any) -> int:
        if self.modulus is not None:
            return 1
        return int(QQ.denom(value))

    def reduce(self, value: Any, target: "ScalarField") -> Any:
        """Map a value of this field into ``target`` (QQ -> GF(p) or identity)."""
        if target == self:
            return value
        if self.modulus is not None:
            raise ContextMismatchError(f"cannot map {self} into {target}")
        return target.from_ratio(self.numer(value), self.denom(value))

    def random_element(
        self, rng: np.random.Generator, bound: Optional[int] = None
    ) -> Any:
        """Uniform element of GF(p), or an integer in [-bound, bound] over QQ."""
        if self.modulus is not None and bound is None:
            return self.domain(int(rng.integers(0, self.modulus)))
        bound = 9 if bound is None else bound
        return self.domain(int(rng.integers(-bound, bound + 1)))

    def elements(self):
        """All elements of a prime field in canonical order."""
        if self.modulus is None:
            raise ValueError("the rationals cannot be enumerated")
        return [self.domain(i) for i in range(self.modulus)]

    def require_same(self, other: "ScalarField") -> None:
        if other != self:
            raise ContextMismatchError(f"scalar fields differ: {self} vs {other}")


Scalar = Any
FieldLike = Union[ScalarField, int, None]


def as_field(value: FieldLike) -> ScalarField:
    """Accept a ScalarField, a prime, or None (rationals)."""
    if isinstance(value, ScalarField):
        return value
    return ScalarField(modulus=value)
