"""Cyclotomic integers Z[zeta_n] as residues modulo the cyclotomic polynomial."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional

from sympy import Poly, QQ, Rational, cyclotomic_poly, resultant, symbols, totient
from sympy.ntheory.factor_ import core, factorint

from bttrep.arithmetic.numfield import NfElement, NumberField, QuadraticField, as_fraction, rational_sqrt

logger = logging.getLogger(__name__)

_X = symbols("x")


@lru_cache(maxsize=None)
def _phi(n: int) -> Poly:
    return Poly(cyclotomic_poly(n, _X), _X, domain=QQ)


@dataclass(frozen=True)
class CyclotomicClass:
    """Either ``Prime(p)`` (generates the prime ideal above p) or ``Unit``."""

    prime: Optional[int] = None

    @property
    def is_unit(self) -> bool:
        return self.prime is None

    def __str__(self) -> str:
        return "Unit" if self.is_unit else f"Prime({self.prime})"


@dataclass(frozen=True)
class CyclotomicField(NumberField):
    """Q(zeta_n); coordinates are the coefficients of 1, zeta, ..., zeta^(deg-1)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")

    @property
    def degree(self) -> int:
        return int(totient(self.n))

    @property
    def tag(self) -> str:
        return f"Q(zeta_{self.n})"

    def zeta(self) -> NfElement:
        if self.degree == 1:
            return self.element(1 if self.n == 1 else -1)
        return self.element(0, 1)

    def _to_poly(self, u: tuple) -> Poly:
        return Poly([Rational(c.numerator, c.denominator) for c in reversed(u)], _X, domain=QQ)

    def _from_poly(self, f: Poly) -> tuple:
        f = f.rem(_phi(self.n))
        coeffs = [as_fraction(c) for c in reversed(f.all_coeffs())]
        coeffs += [Fraction(0)] * (self.degree - len(coeffs))
        return tuple(coeffs[: self.degree])

    def _mul(self, u, v):
        return self._from_poly(self._to_poly(u) * self._to_poly(v))

    def _conj(self, u):
        f = self._to_poly(u).compose(Poly(_X ** (self.n - 1), _X, domain=QQ))
        return self._from_poly(f)

    def _norm(self, u):
        return as_fraction(resultant(_phi(self.n).as_expr(), self._to_poly(u).as_expr(), _X))

    def _trace(self, u):
        f = self._to_poly(u)
        total = Fraction(0)
        for j in range(self.degree):
            column = self._from_poly(f * Poly(_X**j, _X, domain=QQ))
            total += column[j]
        return total

    def _inverse(self, u):
        return self._from_poly(self._to_poly(u).invert(_phi(self.n)))

    def format(self, u) -> str:
        terms = []
        for k, c in enumerate(u):
            if c == 0:
                continue
            power = "" if k == 0 else ("zeta" if k == 1 else f"zeta^{k}")
            if not power:
                terms.append(str(c))
            elif c == 1:
                terms.append(power)
            elif c == -1:
                terms.append(f"-{power}")
            else:
                terms.append(f"{c}*{power}")
        return "+".join(terms).replace("+-", "-") if terms else "0"


def prime_power_base(n: int) -> Optional[int]:
    """The prime p when n = p^t with t >= 1, else None."""
    factors = factorint(n)
    return next(iter(factors)) if len(factors) == 1 else None


def one_minus_zeta_class(n: int) -> CyclotomicClass:
    """
    Classify the ideal generated by 1 - zeta_n.

    The norm of 1 - zeta_n is the value of the cyclotomic polynomial at 1;
    it is p when n is a power of p and 1 otherwise.

    Raises:
        ValueError: If n < 2.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    norm = int(_phi(n).eval(1))
    if norm == 1:
        return CyclotomicClass()
    logger.debug("1 - zeta_%d has norm %d", n, norm)
    return CyclotomicClass(prime=norm)


def unit_congruent_to(m: int, n: int) -> NfElement:
    """The unit 1 + zeta + ... + zeta^(m'-1) of Z[zeta_n], m' = m mod n, congruent to m mod (1 - zeta)."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if gcd(m, n) != 1:
        raise ValueError(f"gcd({m}, {n}) != 1")
    field_ = CyclotomicField(n)
    zeta = field_.zeta()
    total, power = field_.zero(), field_.one()
    for _ in range(m % n):
        total = total + power
        power = power * zeta
    return total


def _partner_order(n: int) -> int:
    # -zeta_n is a primitive root of this order
    if n % 2:
        return 2 * n
    if n % 4 == 2:
        return n // 2
    return n


def rho_pm2_classification(n: int) -> tuple[CyclotomicClass, CyclotomicClass, bool]:
    """
    Classify rho - 2 and rho + 2 for rho = zeta_n + zeta_n^-1.

    rho - 2 = -(1 - zeta)(1 - zeta^-1) behaves like 1 - zeta_n, and rho + 2
    like 1 - (-zeta_n). Both generate the same ideal exactly when n is a power of 2.
    """
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    minus = one_minus_zeta_class(n)
    partner = _partner_order(n)
    plus = one_minus_zeta_class(partner) if partner >= 2 else CyclotomicClass()
    associates = prime_power_base(n) == 2
    return minus, plus, associates


def _coprime_residues(n: int) -> list[int]:
    return [k for k in range(1, n) if gcd(k, n) == 1]


def dihedral_field(n: int, k: int = 1) -> tuple[QuadraticField, NfElement]:
    """
    The field of definition of rho = zeta_n^k + zeta_n^-k and rho inside it.

    Only fields Q and quadratic are representable. rho is identified among the
    two conjugates by comparing cos(2 pi k / n): a smaller min(k, n - k) gives
    the larger root.

    Raises:
        ValueError: If n < 3, k is not coprime to n, or the field has degree > 2.
    """
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    if gcd(k, n) != 1:
        raise ValueError(f"k = {k} is not coprime to n = {n}")
    cyc = CyclotomicField(n)
    zeta = cyc.zeta()
    rho_cyc = zeta**k + zeta ** (n - k % n)
    real_degree = cyc.degree // 2
    if real_degree == 1:
        return QuadraticField.rationals(), QuadraticField.rationals().element(rho_cyc.trace() / 2)
    if real_degree != 2:
        raise ValueError(f"Q(zeta_{n} + zeta_{n}^-1) has degree {real_degree} > 2")
    # rho and its conjugate rho' satisfy x^2 - S x + P
    s = rho_cyc.trace() / 2
    squares = (rho_cyc * rho_cyc).trace() / 2
    p = (s * s - squares) / 2
    disc = s * s - 4 * p
    d = int(core(int(disc)))
    f = rational_sqrt(disc / d)
    K = QuadraticField(d)
    reduced = [min(j, n - j) for j in _coprime_residues(n)]
    larger = min(k % n, n - k % n) == min(reduced)
    rho = K.element(s / 2, (f if larger else -f) / 2)
    logger.debug("rho for n=%d, k=%d is %s in %s", n, k, rho, K)
    return K, rho
