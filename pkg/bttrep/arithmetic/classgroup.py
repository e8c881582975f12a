"""
Ideal class groups of Q and quadratic fields.

Imaginary fields label classes by reduced binary quadratic forms. Real fields
use a closure over small prime ideals with principality decided by an exact,
bounded search for a generator.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

from sympy import primerange

from bttrep.arithmetic.ideals import FracIdeal, factor_rational_prime
from bttrep.arithmetic.numfield import NfElement, QuadraticField, fundamental_unit
from bttrep.core.errors import BoundExceededError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BinaryForm:
    """The form a x^2 + b x y + c y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def normalize(self) -> "BinaryForm":
        a, b, c = self.a, self.b, self.c
        r = (a - b) // (2 * a)
        return BinaryForm(a, b + 2 * r * a, a * r * r + b * r + c)

    def reduced(self) -> "BinaryForm":
        """Reduction of a positive definite form."""
        form = self.normalize()
        a, b, c = form.a, form.b, form.c
        while not (a < c or (a == c and b >= 0)):
            s = (c + b) // (2 * c)
            a, b, c = c, -b + 2 * s * c, c * s * s - b * s + a
        return BinaryForm(a, b, c)

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


def reduced_forms(D: int) -> list[BinaryForm]:
    """All primitive reduced positive definite forms of discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (a == c and b < 0) or math.gcd(a, b, c) != 1:
                continue
            forms.append(BinaryForm(a, b, c))
        a += 1
    return forms


def _primitive_part(I: FracIdeal) -> tuple[Fraction, int, NfElement]:
    """Write I = q * [a, beta] with beta = b + w; returns (q, a, beta)."""
    K = I.field
    (A, B), (_, C) = I.hnf
    return Fraction(C, I.den), A // C, K.element(Fraction(B, C)) + K.omega()


def ideal_to_form(I: FracIdeal) -> BinaryForm:
    """The norm form N(x a + y beta) / a of the primitive part of I."""
    _, a, beta = _primitive_part(I)
    return BinaryForm(a, int(beta.trace()), int(beta.norm()) // a)


def form_to_ideal(K: QuadraticField, form: BinaryForm) -> FracIdeal:
    beta = K.element(Fraction(form.b - K.omega_trace, 2)) + K.omega()
    return FracIdeal.from_generators(K, [K.element(form.a), beta])


def _unit_bound(K: QuadraticField) -> int:
    u, v = fundamental_unit(K).coords
    return math.ceil(u) + math.ceil(abs(v) * (math.isqrt(K.d) + 1))


def _search_order(limit: int):
    yield 0
    for k in range(1, limit + 1):
        yield k
        yield -k


def is_principal(I: FracIdeal) -> Optional[NfElement]:
    """
    A generator of I, or None when I is not principal.

    Solves N(x a + y beta) = +-a for the primitive part [a, beta] of I exactly;
    y runs over a range outside of which no (unit-adjusted) generator can lie,
    so a failed search proves non-principality.

    Examples:
        >>> K = QuadraticField(-5)
        >>> is_principal(FracIdeal.from_rational(K, 7))
        NfElement(Q(sqrt(-5)), 7)
    """
    K = I.field
    if K.is_rational:
        return K.element(I.smallest_integer())
    scale, a, beta = _primitive_part(I)
    b, c, D = int(beta.trace()), int(beta.norm()) // a, K.discriminant
    if K.is_imaginary:
        limit, signs = math.isqrt(4 * a // -D), (1,)
    else:
        E = _unit_bound(K)
        limit, signs = math.isqrt((E + 1) ** 2 * a // D) + 1, (1, -1)
    for y in _search_order(limit):
        candidates = set()
        for s in signs:
            disc = D * y * y + 4 * a * s
            if disc < 0:
                continue
            root = math.isqrt(disc)
            if root * root != disc:
                continue
            for numerator in (-b * y + root, -b * y - root):
                if numerator % (2 * a) == 0:
                    candidates.add(numerator // (2 * a))
        if candidates:
            x = min(candidates, key=lambda v: (abs(v), v < 0))
            return (x * K.element(a) + y * beta) * scale
    return None


class ClassGroup:
    """
    A finite abelian group of ideal classes.

    Classes are indices into ``representatives`` (index 0 is the principal
    class). The group is decomposed into cyclic factors with a discrete-log
    table mapping each class to its exponent vector.
    """

    def __init__(
        self, field: QuadraticField, representatives: list[FracIdeal], locator: Callable[[FracIdeal], int]
    ):
        self.field = field
        self.representatives = representatives
        self._locate = locator
        self._products: dict[tuple[int, int], int] = {}
        self.generators, self.orders, self._dlog = self._decompose()

    @property
    def order(self) -> int:
        return len(self.representatives)

    def class_of(self, I: FracIdeal) -> int:
        return self._locate(I)

    def mul(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in self._products:
            self._products[key] = self._locate(self.representatives[i] * self.representatives[j])
        return self._products[key]

    def power(self, i: int, k: int) -> int:
        result = 0
        for _ in range(k % self.order if self.order else 0):
            result = self.mul(result, i)
        return result

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = self.mul(x, i)
            k += 1
        return k

    def dlog(self, i: int) -> tuple[int, ...]:
        return self._dlog[i]

    def is_square(self, i: int) -> bool:
        return all(e % 2 == 0 for e, m in zip(self._dlog[i], self.orders) if m % 2 == 0)

    def two_torsion(self) -> list[int]:
        return [i for i in range(self.order) if self.mul(i, i) == 0]

    def _decompose(self):
        # greedy: lift an element of maximal order modulo H to one of the same exact order
        subgroup = {0: ()}
        generators: list[int] = []
        orders: list[int] = []
        while len(subgroup) < self.order:
            ranked = sorted(range(self.order), key=lambda i: (-self._order_modulo(i, subgroup), i))
            m = self._order_modulo(ranked[0], subgroup)
            y = self._lift_of_exact_order(ranked, m, subgroup)
            extended = {}
            for h, exps in subgroup.items():
                z = h
                for j in range(m):
                    extended[z] = exps + (j,)
                    z = self.mul(z, y)
            subgroup = extended
            generators.append(y)
            orders.append(m)
        width = len(orders)
        dlog = {z: e + (0,) * (width - len(e)) for z, e in subgroup.items()}
        logger.debug("Class group of %s has structure %s", self.field, orders)
        return generators, orders, dlog

    def _lift_of_exact_order(self, ranked: list[int], m: int, subgroup: dict[int, tuple]) -> int:
        for x in ranked:
            if self._order_modulo(x, subgroup) < m:
                break
            for h in sorted(subgroup):
                y = self.mul(x, h)
                if self.power(y, m) == 0:
                    return y
        raise RuntimeError(f"no element of exact order {m} found in {self.field}")

    def _order_modulo(self, x: int, subgroup: dict[int, tuple]) -> int:
        k, y = 1, x
        while y not in subgroup:
            y = self.mul(y, x)
            k += 1
        return k

    def __repr__(self) -> str:
        return f"ClassGroup({self.field}, order={self.order}, structure={self.orders})"


def _closure_representatives(K: QuadraticField, bound: int) -> list[FracIdeal]:
    """Classes reached by products of prime ideals of norm at most ``bound``."""
    places = [P for p in primerange(2, bound + 1) for P in factor_rational_prime(p, K)]
    gens = [P.ideal for P in places if P.ideal.norm() <= bound]
    reps = [FracIdeal.unit(K)]
    frontier = list(reps)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x * g
                if _find_equivalent(y, reps) is None:
                    reps.append(y)
                    new.append(y)
        frontier = new
    return reps


def _find_equivalent(I: FracIdeal, reps: list[FracIdeal]) -> Optional[int]:
    for index, rep in enumerate(reps):
        if is_principal(I / rep) is not None:
            return index
    return None


def minkowski_class_number(K: QuadraticField) -> int:
    """Class number from prime ideals below the Minkowski bound and principality tests."""
    if K.is_rational:
        return 1
    D = abs(K.discriminant)
    bound = math.isqrt(D) if K.is_imaginary else math.isqrt(D) // 2 + 1
    return len(_closure_representatives(K, bound))


@lru_cache(maxsize=None)
def class_group(K: QuadraticField, bound: int = 1_000_000, real_bound: int = 20_000) -> ClassGroup:
    """
    The ideal class group of K.

    Args:
        K: The field.
        bound: Largest |discriminant| accepted for imaginary fields.
        real_bound: Largest discriminant accepted for real fields.

    Raises:
        BoundExceededError: If the discriminant exceeds its bound.
    """
    if K.is_rational:
        return ClassGroup(K, [FracIdeal.unit(K)], lambda _: 0)
    D = K.discriminant
    if K.is_imaginary:
        if -D > bound:
            raise BoundExceededError(f"|disc| = {-D} exceeds {bound}", bound=bound)
        forms = sorted(reduced_forms(D), key=lambda f: (f.a, abs(f.b), f.b < 0))
        index = {form: i for i, form in enumerate(forms)}
        reps = [form_to_ideal(K, form) for form in forms]
        group = ClassGroup(K, reps, lambda I: index[ideal_to_form(I).reduced()])
    else:
        if D > real_bound:
            raise BoundExceededError(f"disc = {D} exceeds {real_bound}", bound=real_bound)
        reps = _closure_representatives(K, math.isqrt(D) // 2 + 1)

        def locate(I: FracIdeal) -> int:
            found = _find_equivalent(I, reps)
            if found is None:
                raise BoundExceededError(f"ideal {I} outside the computed classes of {K}")
            return found

        group = ClassGroup(K, reps, locate)
    logger.info("Class group of %s: order %d, structure %s", K, group.order, group.orders)
    return group


def two_torsion_subgroup(G: ClassGroup) -> list[tuple[int, FracIdeal]]:
    """The classes of order dividing 2 with representative ideals; its length is h_K(2)."""
    return [(i, G.representatives[i]) for i in G.two_torsion()]


def artin_distance_trivial(D: FracIdeal, G: ClassGroup) -> bool:
    """True iff the class of D is a square in the class group."""
    return G.is_square(G.class_of(D))
