"""
Exact arithmetic in Q and quadratic fields.

Elements are stored as exact rationals. A quadratic element keeps the pair
(x, y) meaning x + y*sqrt(d); the ring of integers uses the basis {1, w}
with w = sqrt(d), or w = (1 + sqrt(d))/2 when d = 1 mod 4. The rational
field is represented as ``QuadraticField(1)`` with degree 1.
"""

import logging
import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from sympy.ntheory.factor_ import core

from bttrep.core.errors import FieldMismatchError, UnsupportedFieldError

logger = logging.getLogger(__name__)

Rational = int | Fraction


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and sympy rationals to ``Fraction``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "p") and hasattr(value, "q"):
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"Cannot convert {value!r} to an exact rational")


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Return the non-negative rational square root of q, if it exists."""
    if q < 0:
        return None
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


class NumberField(ABC):
    """Hooks every field type implements on coordinate tuples."""

    @property
    @abstractmethod
    def degree(self) -> int: ...

    @property
    @abstractmethod
    def tag(self) -> str: ...

    @abstractmethod
    def _mul(self, u: tuple, v: tuple) -> tuple: ...

    @abstractmethod
    def _conj(self, u: tuple) -> tuple: ...

    @abstractmethod
    def _norm(self, u: tuple) -> Fraction: ...

    @abstractmethod
    def _trace(self, u: tuple) -> Fraction: ...

    @abstractmethod
    def _inverse(self, u: tuple) -> tuple: ...

    @abstractmethod
    def format(self, u: tuple) -> str: ...

    def element(self, *coords: Rational) -> "NfElement":
        """Build an element from leading coordinates, padding with zeros."""
        padded = list(coords) + [0] * (self.degree - len(coords))
        return NfElement(self, tuple(as_fraction(c) for c in padded))

    def zero(self) -> "NfElement":
        return self.element(0)

    def one(self) -> "NfElement":
        return self.element(1)

    def __str__(self) -> str:
        return self.tag


@dataclass(frozen=True)
class QuadraticField(NumberField):
    """Q(sqrt(d)) for squarefree d; d = 1 stands for Q itself."""

    d: int

    def __post_init__(self):
        if self.d == 0 or core(abs(self.d)) != abs(self.d):
            raise ValueError(f"d must be a non-zero squarefree integer, got {self.d}")

    @classmethod
    def rationals(cls) -> "QuadraticField":
        return cls(1)

    @property
    def is_rational(self) -> bool:
        return self.d == 1

    @property
    def is_imaginary(self) -> bool:
        return self.d < 0

    @property
    def is_real(self) -> bool:
        return self.d > 1

    @property
    def degree(self) -> int:
        return 1 if self.is_rational else 2

    @property
    def omega_is_half(self) -> bool:
        return not self.is_rational and self.d % 4 == 1

    @property
    def discriminant(self) -> int:
        if self.is_rational:
            return 1
        return self.d if self.omega_is_half else 4 * self.d

    @property
    def omega_trace(self) -> int:
        return 1 if self.omega_is_half else 0

    @property
    def omega_norm(self) -> int:
        return (1 - self.d) // 4 if self.omega_is_half else -self.d

    @property
    def tag(self) -> str:
        return "Q" if self.is_rational else f"Q(sqrt({self.d}))"

    def sqrt_d(self) -> "NfElement":
        if self.is_rational:
            raise UnsupportedFieldError("Q has no square root generator")
        return self.element(0, 1)

    def omega(self) -> "NfElement":
        if self.is_rational:
            return self.one()
        return self.element(Fraction(1, 2), Fraction(1, 2)) if self.omega_is_half else self.element(0, 1)

    def basis(self) -> list["NfElement"]:
        """The ring basis {1, w}, or {1} for Q."""
        return [self.one()] if self.is_rational else [self.one(), self.omega()]

    def to_basis(self, x: "NfElement") -> tuple[Fraction, ...]:
        """Coordinates of x in the ring basis."""
        if self.is_rational:
            return x.coords
        a, b = x.coords
        if self.omega_is_half:
            return (a - b, 2 * b)
        return (a, b)

    def from_basis(self, coords: Sequence[Rational]) -> "NfElement":
        if self.is_rational:
            return self.element(coords[0])
        a, b = (as_fraction(c) for c in coords)
        if self.omega_is_half:
            return self.element(a + b / 2, b / 2)
        return self.element(a, b)

    def _mul(self, u, v):
        if self.is_rational:
            return (u[0] * v[0],)
        return (u[0] * v[0] + self.d * u[1] * v[1], u[0] * v[1] + u[1] * v[0])

    def _conj(self, u):
        return u if self.is_rational else (u[0], -u[1])

    def _norm(self, u):
        return u[0] if self.is_rational else u[0] * u[0] - self.d * u[1] * u[1]

    def _trace(self, u):
        return u[0] if self.is_rational else 2 * u[0]

    def _inverse(self, u):
        if self.is_rational:
            return (1 / u[0],)
        n = self._norm(u)
        return tuple(c / n for c in self._conj(u))

    def format(self, u) -> str:
        x = u[0]
        y = Fraction(0) if self.is_rational else u[1]
        if y == 0:
            return str(x)
        radical = f"{abs(y)}*sqrt({self.d})"
        if x == 0:
            return radical if y > 0 else f"-{radical}"
        return f"{x}{'+' if y > 0 else '-'}{radical}"

    def parse(self, text: str) -> "NfElement":
        return parse_element(text, self)


@dataclass(frozen=True)
class NfElement:
    """An exact element of a number field."""

    field: NumberField
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.field.degree:
            raise ValueError(f"{self.field} needs {self.field.degree} coordinates, got {len(self.coords)}")

    def _coerce(self, other) -> "NfElement":
        if isinstance(other, NfElement):
            if other.field != self.field:
                raise FieldMismatchError(f"Operands in {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NfElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return NfElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NfElement(self.field, self.field._mul(self.coords, other.coords))

    __rmul__ = __mul__

    def inverse(self) -> "NfElement":
        if self.is_zero:
            raise ZeroDivisionError("zero has no inverse")
        return NfElement(self.field, self.field._inverse(self.coords))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> "NfElement":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "NfElement":
        return NfElement(self.field, self.field._conj(self.coords))

    def norm(self) -> Fraction:
        return self.field._norm(self.coords)

    def trace(self) -> Fraction:
        return self.field._trace(self.coords)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self) -> bool:
        return not self.is_zero

    @property
    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def denominator(self) -> int:
        """Least positive integer m with m*x in the ring of integers."""
        basis_coords = self.field.to_basis(self) if isinstance(self.field, QuadraticField) else self.coords
        return math.lcm(*(c.denominator for c in basis_coords))

    @property
    def is_integral(self) -> bool:
        return self.denominator() == 1

    def sort_key(self) -> tuple:
        return tuple((c.numerator, c.denominator) for c in self.coords)

    def __str__(self) -> str:
        return self.field.format(self.coords)

    def __repr__(self) -> str:
        return f"NfElement({self.field}, {self})"


# region Functional arithmetic


def _same_field(x: NfElement, y: NfElement) -> None:
    if x.field != y.field:
        raise FieldMismatchError(f"Operands in {x.field} and {y.field}")


def nf_add(x: NfElement, y: NfElement) -> NfElement:
    _same_field(x, y)
    return x + y


def nf_mul(x: NfElement, y: NfElement) -> NfElement:
    _same_field(x, y)
    return x * y


def nf_conj(x: NfElement) -> NfElement:
    return x.conj()


def nf_norm(x: NfElement) -> Fraction:
    return x.norm()


def nf_trace(x: NfElement) -> Fraction:
    return x.trace()


# endregion

# region Parsing

_TERM = re.compile(r"^(?P<coef>\d+(?:/\d+)?)?(?:(?P<star>\*)?sqrt\((?P<rad>~?\d+)\))?$")


def parse_element(text: str, field: QuadraticField) -> NfElement:
    """
    Parse the exact string form ``"a/b + c/d*sqrt(D)"``.

    Args:
        text: The element, e.g. ``"3+1*sqrt(-5)"``, ``"-sqrt(-1)"`` or ``"7/2"``.
        field: The field it lives in; D must equal the field's d.

    Returns:
        The parsed element.

    Raises:
        ValueError: On malformed input or a radicand that does not match the field.
    """
    compact = text.replace(" ", "").replace("sqrt(-", "sqrt(~")
    if not compact:
        raise ValueError("empty element string")
    terms = re.findall(r"[+-]?[^+-]+", compact)
    if "".join(terms) != compact:
        raise ValueError(f"malformed element string: {text!r}")
    x, y = Fraction(0), Fraction(0)
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        body = term.lstrip("+-")
        match = _TERM.match(body)
        if not match or (match.group("coef") is None and match.group("rad") is None):
            raise ValueError(f"malformed term {term!r} in {text!r}")
        if match.group("star") and match.group("coef") is None:
            raise ValueError(f"malformed term {term!r} in {text!r}")
        coef = Fraction(match.group("coef")) if match.group("coef") else Fraction(1)
        if match.group("rad") is None:
            x += sign * coef
            continue
        radicand = int(match.group("rad").replace("~", "-"))
        if field.is_rational or radicand != field.d:
            raise ValueError(f"sqrt({radicand}) does not belong to {field}")
        y += sign * coef
    return field.element(x, y)


def parse_field(text: str) -> QuadraticField:
    """Parse ``"Q"``, ``"Q(sqrt(-5))"`` or a bare integer d."""
    compact = text.replace(" ", "")
    if compact in ("Q", "QQ", "1"):
        return QuadraticField.rationals()
    match = re.fullmatch(r"Q\(sqrt\((-?\d+)\)\)", compact) or re.fullmatch(r"(-?\d+)", compact)
    if not match:
        raise ValueError(f"unrecognised field descriptor {text!r}")
    return QuadraticField(int(match.group(1)))


# endregion

# region Signs, squares and units


def real_sign(x: NfElement) -> int:
    """Exact sign of x under the real embedding with sqrt(d) > 0."""
    field_ = x.field
    if not isinstance(field_, QuadraticField) or field_.is_imaginary:
        raise UnsupportedFieldError(f"{field_} has no real embedding")
    a = x.coords[0]
    b = Fraction(0) if field_.is_rational else x.coords[1]
    if b == 0 or a == 0:
        return _sign(a) or _sign(b)
    if _sign(a) == _sign(b):
        return _sign(a)
    return _sign(a) if a * a > b * b * field_.d else _sign(b)


def is_totally_positive(x: NfElement) -> bool:
    return real_sign(x) > 0 and real_sign(x.conj()) > 0


def sqrt_in_field(x: NfElement) -> Optional[NfElement]:
    """A square root of x inside its own quadratic field, or None."""
    field_ = x.field
    if x.is_zero:
        return x
    a = x.coords[0]
    if field_.is_rational:
        root = rational_sqrt(a)
        return field_.element(root) if root is not None else None
    b = x.coords[1]
    if b == 0:
        root = rational_sqrt(a)
        if root is not None:
            return field_.element(root)
        root = rational_sqrt(a / field_.d)
        return field_.element(0, root) if root is not None else None
    s = rational_sqrt(a * a - field_.d * b * b)
    if s is None:
        return None
    for half in ((a + s) / 2, (a - s) / 2):
        u = rational_sqrt(half)
        if u:
            candidate = field_.element(u, b / (2 * u))
            if candidate * candidate == x:
                return candidate
    return None


@lru_cache(maxsize=None)
def fundamental_unit(K: QuadraticField) -> NfElement:
    """
    The fundamental unit u > 1 of a real quadratic field.

    Walks the continued fraction of w; the first convergent p/q with
    p - q*w of norm +-1 gives the unit, normalised to exceed 1.

    Raises:
        UnsupportedFieldError: For Q and imaginary fields (use ``torsion_generator``).
    """
    if not K.is_real:
        raise UnsupportedFieldError(f"{K} has no fundamental unit; use torsion_generator")
    d, root = K.d, math.isqrt(K.d)
    P, Q = (1, 2) if K.omega_is_half else (0, 1)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    for _ in range(10**6):
        a = (P + root) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        candidate = K.from_basis((h, -k))
        if abs(candidate.norm()) == 1:
            for unit in (candidate, -candidate, candidate.conj(), -candidate.conj()):
                if real_sign(unit - 1) > 0:
                    logger.debug("Fundamental unit of %s is %s", K, unit)
                    return unit
        P = a * Q - P
        Q = (d - P * P) // Q
    raise UnsupportedFieldError(f"continued fraction of {K} did not close")


def torsion_generator(K: QuadraticField) -> tuple[NfElement, int]:
    """A generator of the roots of unity of K and its order."""
    if K.d == -1:
        return K.element(0, 1), 4
    if K.d == -3:
        return K.omega(), 6
    return K.element(-1), 2


def unit_group_generators(K: QuadraticField) -> list[NfElement]:
    """Torsion generator, plus the fundamental unit for real fields."""
    generators = [torsion_generator(K)[0]]
    if K.is_real:
        generators.append(fundamental_unit(K))
    return generators


def root_of_unity(K: QuadraticField, order: int) -> NfElement:
    """A primitive root of unity of the given order in K."""
    generator, w = torsion_generator(K)
    if order < 1 or w % order:
        raise FieldMismatchError(f"{K} has no primitive root of unity of order {order}")
    return generator ** (w // order)


# endregion
