"""2x2 matrices over a number field and finite matrix groups."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from bttrep.arithmetic.numfield import NfElement, NumberField, QuadraticField, parse_element
from bttrep.core.errors import BoundExceededError, FieldMismatchError

logger = logging.getLogger(__name__)

Entry = NfElement | int | Fraction | str


def _entry(field: NumberField, value: Entry) -> NfElement:
    if isinstance(value, NfElement):
        if value.field != field:
            raise FieldMismatchError(f"entry {value} is not in {field}")
        return value
    if isinstance(value, str):
        if not isinstance(field, QuadraticField):
            raise TypeError("string entries need a quadratic field")
        return parse_element(value, field)
    return field.element(value)


@dataclass(frozen=True)
class Matrix2:
    """The matrix [[a, b], [c, d]]."""

    a: NfElement
    b: NfElement
    c: NfElement
    d: NfElement

    def __post_init__(self):
        if len({self.a.field, self.b.field, self.c.field, self.d.field}) != 1:
            raise FieldMismatchError("matrix entries live in different fields")

    @classmethod
    def of(cls, field: NumberField, rows: Sequence[Sequence[Entry]]) -> "Matrix2":
        """Build from row-major entries given as elements, rationals or exact strings."""
        (a, b), (c, d) = rows
        return cls(*(_entry(field, x) for x in (a, b, c, d)))

    @classmethod
    def identity(cls, field: NumberField) -> "Matrix2":
        return cls.diag(field, 1, 1)

    @classmethod
    def diag(cls, field: NumberField, x: Entry, y: Entry) -> "Matrix2":
        return cls.of(field, [[x, 0], [0, y]])

    @property
    def field(self) -> NumberField:
        return self.a.field

    def entries(self) -> tuple[NfElement, NfElement, NfElement, NfElement]:
        return self.a, self.b, self.c, self.d

    def rows(self) -> list[list[NfElement]]:
        return [[self.a, self.b], [self.c, self.d]]

    @cached_property
    def det(self) -> NfElement:
        return self.a * self.d - self.b * self.c

    def trace(self) -> NfElement:
        return self.a + self.d

    def __mul__(self, other):
        if isinstance(other, Matrix2):
            return Matrix2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        return Matrix2(*(x * other for x in self.entries()))

    def __rmul__(self, other):
        return Matrix2(*(other * x for x in self.entries()))

    def __add__(self, other: "Matrix2") -> "Matrix2":
        return Matrix2(*(x + y for x, y in zip(self.entries(), other.entries())))

    def __sub__(self, other: "Matrix2") -> "Matrix2":
        return Matrix2(*(x - y for x, y in zip(self.entries(), other.entries())))

    def __neg__(self) -> "Matrix2":
        return Matrix2(*(-x for x in self.entries()))

    def inverse(self) -> "Matrix2":
        det = self.det
        if det.is_zero:
            raise ZeroDivisionError("singular matrix")
        return Matrix2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __pow__(self, k: int) -> "Matrix2":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = Matrix2.identity(self.field), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate_by(self, t: "Matrix2") -> "Matrix2":
        """t^-1 * self * t."""
        return t.inverse() * self * t

    def apply(self, vector: Sequence[NfElement]) -> tuple[NfElement, NfElement]:
        x, y = vector
        return self.a * x + self.b * y, self.c * x + self.d * y

    def columns(self) -> tuple[tuple[NfElement, NfElement], tuple[NfElement, NfElement]]:
        return (self.a, self.c), (self.b, self.d)

    @property
    def is_identity(self) -> bool:
        return self == Matrix2.identity(self.field)

    @property
    def is_scalar(self) -> bool:
        return self.b.is_zero and self.c.is_zero and self.a == self.d

    @property
    def is_diagonal(self) -> bool:
        return self.b.is_zero and self.c.is_zero

    @property
    def is_integral(self) -> bool:
        return all(x.is_integral for x in self.entries())

    def sort_key(self) -> tuple:
        return tuple(x.sort_key() for x in self.entries())

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.rows()]

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def evaluate_word(word: str, images: dict[str, Matrix2], field: NumberField) -> Matrix2:
    """Evaluate a word like ``"abA"`` where capitals are inverses."""
    result = Matrix2.identity(field)
    for letter in word:
        if letter in images:
            result = result * images[letter]
        elif letter.lower() in images:
            result = result * images[letter.lower()].inverse()
        else:
            raise KeyError(f"unknown generator {letter!r} in word {word!r}")
    return result


def group_closure(generators: Iterable[Matrix2], bound: int = 512) -> list[Matrix2]:
    """
    All elements of the finite group generated by the matrices.

    Raises:
        BoundExceededError: If more than ``bound`` elements appear.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("at least one generator is required")
    identity = Matrix2.identity(gens[0].field)
    elements = {identity}
    frontier = [identity]
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                product = g * h
                if product not in elements:
                    elements.add(product)
                    new.append(product)
                    if len(elements) > bound:
                        raise BoundExceededError(f"group closure exceeds {bound} elements", bound=bound)
        frontier = new
    logger.debug("Group closure has %d elements", len(elements))
    return sorted(elements, key=Matrix2.sort_key)


def eigen_data(r: Matrix2) -> tuple[NfElement, NfElement, NfElement]:
    """Trace t, determinant n and discriminant t^2 - 4n of r."""
    t, n = r.trace(), r.det
    return t, n, t * t - 4 * n
