"""Relative quadratic extensions L = K(sqrt(delta)) of Q or a quadratic field K."""

import logging
from dataclasses import dataclass
from typing import Optional

from sympy import legendre_symbol, primefactors

from bttrep.arithmetic.ideals import (
    PrimePlace,
    places_over,
    residue_lift,
    residues_mod_power,
    valuation_at,
    valuation_or_none,
)
from bttrep.arithmetic.numfield import NfElement, QuadraticField, real_sign, sqrt_in_field
from bttrep.core.errors import FieldMismatchError, SquareElementError, UnsupportedFieldError
from bttrep.core.models import LocalExtensionType, PlaceType

logger = logging.getLogger(__name__)


def _is_residue_square(u: NfElement, P: PrimePlace) -> bool:
    r = residue_lift(u, P)
    if P.kind is PlaceType.INERT:
        # squares of F_{p^2} are the elements whose norm is a square in F_p
        return legendre_symbol(int(r.norm()) % P.p, P.p) == 1
    return legendre_symbol(int(r.rational()) % P.p, P.p) == 1


def best_square_approximation(u: NfElement, P: PrimePlace, digits: int) -> tuple[NfElement, Optional[int]]:
    """
    The x mod P^digits maximising v(u - x^2), with that valuation.

    A valuation of None means u = x^2 exactly.
    """
    best_x, best = P.field.zero(), -1
    for x in residues_mod_power(P, digits):
        v = valuation_or_none(u - x * x, P)
        if v is None:
            return x, None
        if v > best:
            best_x, best = x, v
    return best_x, best


def local_quadratic_type(P: PrimePlace, delta: NfElement) -> LocalExtensionType:
    """
    How the place P behaves in K(sqrt(delta)).

    Odd places are decided by residue squares. At dyadic places a unit u is
    a local square iff u = x^2 mod 4*pi, and gives an unramified extension
    iff u = x^2 mod 4.
    """
    if delta.field != P.field:
        raise FieldMismatchError(f"{delta} is not in {P.field}")
    v = valuation_at(delta, P)
    if v % 2:
        return LocalExtensionType.RAMIFIED
    u = delta / P.uniformizer**v
    if P.p != 2:
        return LocalExtensionType.SPLIT if _is_residue_square(u, P) else LocalExtensionType.INERT
    e = P.e
    _, best = best_square_approximation(u, P, e + 1)
    if best is None or best >= 2 * e + 1:
        return LocalExtensionType.SPLIT
    _, best = best_square_approximation(u, P, e)
    if best is None or best >= 2 * e:
        return LocalExtensionType.INERT
    return LocalExtensionType.RAMIFIED


def relevant_places(K: QuadraticField, delta: NfElement) -> list[PrimePlace]:
    """Places over 2 and over the primes dividing the norm of delta."""
    norm = delta.norm()
    primes = {2} | set(primefactors(norm.numerator)) | set(primefactors(norm.denominator))
    return places_over(primes, K)


def ramified_places(K: QuadraticField, delta: NfElement) -> list[PrimePlace]:
    places = relevant_places(K, delta)
    return [P for P in places if local_quadratic_type(P, delta) is LocalExtensionType.RAMIFIED]


def relative_quadratic_unramified(
    K: QuadraticField, delta: NfElement, allow_infinite_ramification: bool = False
) -> bool:
    """
    True iff K(sqrt(delta))/K is unramified at every finite place, and at the
    real places unless ``allow_infinite_ramification`` is set.

    Raises:
        SquareElementError: If delta is a square in K.
    """
    if sqrt_in_field(delta) is not None:
        raise SquareElementError(f"{delta} is a square in {K}")
    if not allow_infinite_ramification and not K.is_imaginary:
        conjugates = [delta] if K.is_rational else [delta, delta.conj()]
        if any(real_sign(x) < 0 for x in conjugates):
            logger.debug("K(sqrt(%s)) ramifies at a real place", delta)
            return False
    ramified = ramified_places(K, delta)
    logger.debug("K(sqrt(%s))/%s ramifies at %s", delta, K, [P.label for P in ramified])
    return not ramified


@dataclass(frozen=True)
class RelativeQuadraticElement:
    """The element x + y*sqrt(delta) of L = K(sqrt(delta))."""

    x: NfElement
    y: NfElement
    delta: NfElement

    @classmethod
    def of(cls, delta: NfElement, x, y=0) -> "RelativeQuadraticElement":
        K = delta.field
        x = x if isinstance(x, NfElement) else K.element(x)
        y = y if isinstance(y, NfElement) else K.element(y)
        return cls(x, y, delta)

    @classmethod
    def sqrt_delta(cls, delta: NfElement) -> "RelativeQuadraticElement":
        return cls.of(delta, 0, 1)

    def _lift(self, other) -> "RelativeQuadraticElement":
        if isinstance(other, RelativeQuadraticElement):
            if other.delta != self.delta:
                raise FieldMismatchError("elements of different relative extensions")
            return other
        return RelativeQuadraticElement.of(self.delta, other)

    def __add__(self, other):
        other = self._lift(other)
        return RelativeQuadraticElement(self.x + other.x, self.y + other.y, self.delta)

    __radd__ = __add__

    def __neg__(self):
        return RelativeQuadraticElement(-self.x, -self.y, self.delta)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        return RelativeQuadraticElement(
            self.x * other.x + self.delta * self.y * other.y, self.x * other.y + self.y * other.x, self.delta
        )

    __rmul__ = __mul__

    def sigma(self) -> "RelativeQuadraticElement":
        return RelativeQuadraticElement(self.x, -self.y, self.delta)

    def norm(self) -> NfElement:
        return self.x * self.x - self.delta * self.y * self.y

    def trace(self) -> NfElement:
        return 2 * self.x

    def inverse(self) -> "RelativeQuadraticElement":
        n = self.norm()
        if n.is_zero:
            raise ZeroDivisionError("zero has no inverse")
        return RelativeQuadraticElement(self.x / n, -self.y / n, self.delta)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, k: int) -> "RelativeQuadraticElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = RelativeQuadraticElement.of(self.delta, 1)
        for _ in range(k):
            result = result * self
        return result

    @property
    def is_zero(self) -> bool:
        return self.x.is_zero and self.y.is_zero

    def __str__(self) -> str:
        return f"({self.x}) + ({self.y})*sqrt({self.delta})"


def extension_valuation(
    z: RelativeQuadraticElement, P: PrimePlace, kind: LocalExtensionType
) -> Optional[int]:
    """
    Integer-normalised valuation of z at the place of L over P; None for zero.

    Raises:
        UnsupportedFieldError: At split places, where two extension places exist.
    """
    if z.is_zero:
        return None
    v = valuation_at(z.norm(), P)
    if kind is LocalExtensionType.RAMIFIED:
        return v
    if kind is LocalExtensionType.INERT:
        return v // 2
    raise UnsupportedFieldError(f"{P} splits in K(sqrt({z.delta}))")
