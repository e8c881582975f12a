"""
Fractional ideals, finite places and exact valuations for Q and quadratic fields.

Ideals are Z-lattices over the ring basis {1, w}, kept in Hermite normal
form with a positive denominator, so structural equality is ideal equality.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm, prod
from typing import Iterable, Optional, Sequence

from sympy import isprime, jacobi_symbol, multiplicity
from sympy.ntheory.modular import crt
from sympy.ntheory.residue_ntheory import sqrt_mod

from bttrep.arithmetic import lattice
from bttrep.arithmetic.numfield import NfElement, QuadraticField
from bttrep.core.errors import ApproximationError, FieldMismatchError, ZeroValuationError
from bttrep.core.models import PlaceType

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FracIdeal:
    """A non-zero fractional ideal: the Z-span of the columns of ``hnf`` divided by ``den``."""

    field: QuadraticField
    hnf: lattice.IntRows
    den: int

    @classmethod
    def from_generators(cls, field: QuadraticField, generators: Iterable[NfElement]) -> "FracIdeal":
        vectors = []
        for g in generators:
            if g.field != field:
                raise FieldMismatchError(f"generator {g} is not in {field}")
            for b in field.basis():
                vectors.append(field.to_basis(g * b))
        int_vectors, den = lattice.scale_to_integers(vectors)
        W = lattice.hnf_of_vectors(int_vectors)
        if not lattice.is_full_rank(W) or len(W) != field.degree:
            raise ValueError("the zero ideal is not a fractional ideal")
        content = gcd(den, *(x for row in W for x in row))
        W = tuple(tuple(x // content for x in row) for row in W)
        return cls(field, W, den // content)

    @classmethod
    def principal(cls, x: NfElement) -> "FracIdeal":
        return cls.from_generators(x.field, [x])

    @classmethod
    def unit(cls, field: QuadraticField) -> "FracIdeal":
        return cls.principal(field.one())

    @classmethod
    def from_rational(cls, field: QuadraticField, q: int | Fraction) -> "FracIdeal":
        return cls.principal(field.element(q))

    def basis(self) -> list[NfElement]:
        """The Z-basis read off the columns of the HNF."""
        size = self.field.degree
        columns = [[Fraction(self.hnf[i][j], self.den) for i in range(size)] for j in range(size)]
        return [self.field.from_basis(col) for col in columns]

    def norm(self) -> Fraction:
        return Fraction(lattice.determinant(self.hnf), self.den**self.field.degree)

    def contains(self, x: NfElement) -> bool:
        if x.field != self.field:
            raise FieldMismatchError(f"{x} is not in {self.field}")
        return lattice.contains(self.hnf, [c * self.den for c in self.field.to_basis(x)])

    __contains__ = contains

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    def __mul__(self, other: "FracIdeal") -> "FracIdeal":
        if isinstance(other, NfElement):
            other = FracIdeal.principal(other)
        if other.field != self.field:
            raise FieldMismatchError(f"ideals in {self.field} and {other.field}")
        return FracIdeal.from_generators(self.field, [x * y for x in self.basis() for y in other.basis()])

    def conj(self) -> "FracIdeal":
        return FracIdeal.from_generators(self.field, [x.conj() for x in self.basis()])

    def inverse(self) -> "FracIdeal":
        if self.field.is_rational:
            return FracIdeal.principal(self.basis()[0].inverse())
        scale = self.field.element(1 / self.norm())
        return FracIdeal.from_generators(self.field, [x.conj() * scale for x in self.basis()])

    def __truediv__(self, other: "FracIdeal") -> "FracIdeal":
        return self * other.inverse()

    def __pow__(self, k: int) -> "FracIdeal":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = FracIdeal.unit(self.field), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def smallest_integer(self) -> Fraction:
        """Generator of the intersection with Q."""
        return Fraction(self.hnf[0][0], self.den)

    def __str__(self) -> str:
        return "(" + ", ".join(str(x) for x in self.basis()) + ")"


@dataclass(frozen=True)
class PrimePlace:
    """
    A finite place of K.

    ``uniformizer`` has valuation exactly 1 and is the local parameter used for
    digit expansions; ``root`` is the residue of w for residue degree 1.
    """

    field: QuadraticField
    p: int
    kind: PlaceType
    ideal: FracIdeal
    uniformizer: NfElement
    root: Optional[int]
    index: int = 1

    @property
    def e(self) -> int:
        return 2 if self.kind is PlaceType.RAMIFIED else 1

    @property
    def f(self) -> int:
        return 2 if self.kind is PlaceType.INERT else 1

    @property
    def residue_size(self) -> int:
        return self.p**self.f

    @property
    def label(self) -> str:
        if self.kind in (PlaceType.RATIONAL, PlaceType.INERT):
            return str(self.p)
        return f"{self.p}_{self.index}"

    def __str__(self) -> str:
        return self.label


def _omega_roots_mod(K: QuadraticField, p: int) -> list[int]:
    t, n = K.omega_trace, K.omega_norm
    if p == 2:
        return [r for r in range(2) if (r * r - t * r + n) % 2 == 0]
    inv2 = pow(2, -1, p)
    roots = sqrt_mod(K.discriminant % p, p, all_roots=True) or []
    return sorted({(t + s) * inv2 % p for s in roots})


def _kronecker_kind(K: QuadraticField, p: int) -> PlaceType:
    D = K.discriminant
    if p == 2:
        if D % 2 == 0:
            return PlaceType.RAMIFIED
        return PlaceType.SPLIT if D % 8 == 1 else PlaceType.INERT
    if D % p == 0:
        return PlaceType.RAMIFIED
    return PlaceType.SPLIT if jacobi_symbol(D % p, p) == 1 else PlaceType.INERT


@lru_cache(maxsize=None)
def factor_rational_prime(p: int, K: QuadraticField) -> tuple[PrimePlace, ...]:
    """
    The places of K above the rational prime p.

    Examples:
        >>> [P.kind for P in factor_rational_prime(3, QuadraticField(-5))]
        [<PlaceType.SPLIT: 'split'>, <PlaceType.SPLIT: 'split'>]
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    prime = K.element(p)
    if K.is_rational:
        return (PrimePlace(K, p, PlaceType.RATIONAL, FracIdeal.principal(prime), prime, None),)
    kind = _kronecker_kind(K, p)
    omega = K.omega()
    if kind is PlaceType.INERT:
        return (PrimePlace(K, p, kind, FracIdeal.principal(prime), prime, None),)
    roots = _omega_roots_mod(K, p)
    if kind is PlaceType.RAMIFIED:
        r = roots[0]
        pi = omega + ((-r) % p)
        if multiplicity(p, int(pi.norm())) != 1:
            pi = omega - r
        ideal = FracIdeal.from_generators(K, [prime, pi])
        return (PrimePlace(K, p, kind, ideal, pi, r),)
    places = []
    for index, r in enumerate(roots, start=1):
        ideal = FracIdeal.from_generators(K, [prime, omega - r])
        places.append(PrimePlace(K, p, kind, ideal, prime, r, index))
    logger.debug("%d splits in %s with w roots %s", p, K, roots)
    return tuple(places)


def places_over(primes: Iterable[int], K: QuadraticField) -> list[PrimePlace]:
    return [P for p in sorted(set(primes)) for P in factor_rational_prime(p, K)]


def place_by_label(K: QuadraticField, label: str) -> PrimePlace:
    p, _, index = label.partition("_")
    for P in factor_rational_prime(int(p), K):
        if P.index == (int(index) if index else 1):
            return P
    raise ValueError(f"no place labelled {label!r} in {K}")


# region Valuations


def _vp(p: int, q: Fraction) -> int:
    return multiplicity(p, q.numerator) - multiplicity(p, q.denominator)


def valuation_at(x: NfElement, P: PrimePlace) -> int:
    """
    The exact valuation of x at P, normalised so the uniformizer has valuation 1.

    Raises:
        ZeroValuationError: If x is zero.
        FieldMismatchError: If x is not in the field of P.
    """
    if x.field != P.field:
        raise FieldMismatchError(f"{x} is not in {P.field}")
    if x.is_zero:
        raise ZeroValuationError("valuation of 0 is +infinity")
    K, p = P.field, P.p
    if K.is_rational:
        return _vp(p, x.coords[0])
    a, b = K.to_basis(x)
    den = lcm(a.denominator, b.denominator)
    A, B = int(a * den), int(b * den)
    content = gcd(A, B)
    A, B = A // content, B // content
    base = P.e * (multiplicity(p, content) - multiplicity(p, den))
    if P.kind is PlaceType.INERT:
        return base
    primitive_norm = int(K.from_basis((A, B)).norm())
    if P.kind is PlaceType.SPLIT and (A + B * P.root) % p:
        return base
    return base + multiplicity(p, primitive_norm)


def valuation_by_membership(x: NfElement, P: PrimePlace) -> int:
    """Valuation from HNF membership in powers of P; slow reference implementation."""
    if x.is_zero:
        raise ZeroValuationError("valuation of 0 is +infinity")
    den = x.denominator()
    y = x * den
    k = 0
    while y in P.ideal ** (k + 1):
        k += 1
    return k - P.e * multiplicity(P.p, den)


def valuation_or_none(x: NfElement, P: PrimePlace) -> Optional[int]:
    """Valuation, with None standing for +infinity."""
    return None if x.is_zero else valuation_at(x, P)


def ideal_valuation(I: FracIdeal, P: PrimePlace) -> int:
    """Minimum valuation over a Z-basis."""
    return min(valuation_at(x, P) for x in I.basis() if not x.is_zero)


# endregion

# region Residues and digits


def residue_lifts(P: PrimePlace) -> list[NfElement]:
    """The fixed residue-lift table: 0..p-1, plus w-multiples for inert places."""
    K, p = P.field, P.p
    if P.kind is PlaceType.INERT:
        omega = K.omega()
        return [K.element(a) + b * omega for b in range(p) for a in range(p)]
    return [K.element(a) for a in range(p)]


def residue_lift(x: NfElement, P: PrimePlace) -> NfElement:
    """The lift r in the residue table with x - r in P; x must be P-integral."""
    K, p = P.field, P.p
    basis_coords = (x.coords[0],) if K.is_rational else K.to_basis(x)
    den = lcm(*(c.denominator for c in basis_coords))
    if den % p:
        inv = pow(den, -1, p)
        ints = [int(c * den) * inv % p for c in basis_coords]
        if K.is_rational:
            return K.element(ints[0])
        if P.kind is PlaceType.INERT:
            return K.element(ints[0]) + ints[1] * K.omega()
        return K.element((ints[0] + ints[1] * P.root) % p)
    for r in residue_lifts(P):
        diff = x - r
        if diff.is_zero or valuation_at(diff, P) >= 1:
            return r
    raise ValueError(f"{x} is not integral at {P}")


def residues_mod_power(P: PrimePlace, n: int) -> list[NfElement]:
    """All canonical representatives sum d_k u^k, k < n, of O modulo P^n."""
    lifts = residue_lifts(P)
    reps = [P.field.zero()]
    for k in range(n):
        power = P.uniformizer**k
        reps = [r + d * power for r in reps for d in lifts]
    return reps


def reduce_mod_power(x: NfElement, P: PrimePlace, n: int) -> NfElement:
    """
    Canonical representative of x modulo P^n.

    The digit expansion sum d_k u^k over the residue table, from k = v(x) up
    to n - 1, with u the place's uniformizer; zero when v(x) >= n.

    Raises:
        ArithmeticError: If a digit fails to raise the valuation of the remainder.
    """
    u = P.uniformizer
    result = P.field.zero()
    rest = x
    previous = None
    while not rest.is_zero:
        v = valuation_at(rest, P)
        if v >= n:
            break
        if previous is not None and v <= previous:
            raise ArithmeticError(f"reducing {x} modulo {P}^{n} stalled at valuation {v}")
        previous = v
        power = u**v
        digit = residue_lift(rest / power, P)
        term = digit * power
        result = result + term
        rest = rest - term
    return result


# endregion

# region Approximation


def _group_targets(targets):
    by_place: dict[PrimePlace, tuple[NfElement, int]] = {}
    for P, value, required in targets:
        if P in by_place:
            raise ValueError(f"place {P} appears twice")
        by_place[P] = (value, required)
    return by_place


def _split_idempotent(P: PrimePlace, Q: PrimePlace, r1: int, r2: int) -> NfElement:
    """y with y = 1 mod P^r1 and y = 0 mod Q^r2 for the two places over a split p."""
    K, p = P.field, P.p
    s = (P.ideal**r1).hnf[0][1]
    s_bar = (Q.ideal**r2).hnf[0][1]
    z = pow(s_bar - s, -1, p**r1)
    return z * (K.element(s_bar) + K.omega())


def crt_approximate(targets: Sequence[tuple[PrimePlace, NfElement, int]]) -> NfElement:
    """
    An element a with v_P(a - a_P) > M_P at every target and v >= 0 elsewhere.

    Denominators are cleared by an integer N supported on the target primes,
    the scaled targets are replaced by integral digit expansions, the places
    over each prime are combined with an idempotent and the primes with
    integer CRT.

    Args:
        targets: Triples (place, target value, precision M); places pairwise distinct.

    Returns:
        The approximating element.
    """
    if not targets:
        raise ValueError("no approximation targets")
    K = targets[0][0].field
    by_place = _group_targets(targets)
    primes = sorted({P.p for P in by_place})
    exponents = dict.fromkeys(primes, 0)
    for P, (value, _) in by_place.items():
        if not value.is_zero:
            deficit = max(0, -valuation_at(value, P))
            exponents[P.p] = max(exponents[P.p], -(-deficit // P.e))
    N = prod(p ** exponents[p] for p in primes)
    scaled = K.element(N)

    # required valuation of N*a - N*a_P at each place over a target prime
    requirements: dict[PrimePlace, tuple[NfElement, int]] = {}
    for p in primes:
        for P in factor_rational_prime(p, K):
            v_N = valuation_at(scaled, P)
            if P in by_place:
                value, precision = by_place[P]
                requirements[P] = (value * N, precision + 1 + v_N)
            elif v_N > 0:
                requirements[P] = (K.zero(), v_N)

    local_solutions: dict[int, NfElement] = {}
    moduli: dict[int, int] = {}
    for p in primes:
        over_p = [(P, req) for P, req in requirements.items() if P.p == p and req[1] > 0]
        digits = [(P, reduce_mod_power(value, P, r), r) for P, (value, r) in over_p]
        if not digits:
            local_solutions[p], moduli[p] = K.zero(), 1
            continue
        moduli[p] = p ** max(-(-r // P.e) for P, _, r in digits)
        if len(digits) == 1:
            local_solutions[p] = digits[0][1]
            continue
        (P1, c1, r1), (P2, c2, r2) = digits
        y1 = _split_idempotent(P1, P2, r1, r2)
        local_solutions[p] = c1 * y1 + c2 * (1 - y1)
        logger.debug("Split idempotent at %s/%s: %s", P1, P2, y1)

    active = [p for p in primes if moduli[p] > 1]
    if len(active) <= 1:
        b = sum((local_solutions[p] for p in active), K.zero())
    else:
        mods = [moduli[p] for p in active]
        b = K.zero()
        for p in active:
            idempotent = int(crt(mods, [1 if q == p else 0 for q in active])[0])
            b = b + idempotent * local_solutions[p]
    result = b / N
    for P, (value, precision) in by_place.items():
        diff = result - value
        if not (diff.is_zero or valuation_at(diff, P) > precision):
            raise ApproximationError(f"approximation failed at {P}", place=P.label)
    return result


# endregion


@dataclass(frozen=True)
class SteinitzWitness:
    """Steinitz class of a lattice over Z: always trivial, witnessed by a free basis."""

    is_trivial: bool
    basis: tuple[NfElement, ...]


def relative_steinitz_class(I: FracIdeal) -> SteinitzWitness:
    """The Steinitz class of I as a module over Z together with its free Z-basis."""
    return SteinitzWitness(True, tuple(I.basis()))


def module_coordinates(vector: Sequence[NfElement]) -> list[Fraction]:
    """Coordinates of a vector of K^n over the Z-basis {b e_i}."""
    return [c for x in vector for c in x.field.to_basis(x)]


def module_hnf(vectors: Sequence[Sequence[NfElement]]) -> tuple[lattice.IntRows, int]:
    """
    The O_K-span of vectors of K^n as a Z-lattice: HNF rows and denominator.

    Two spans are equal iff both results are equal.
    """
    K = vectors[0][0].field
    spanning = [module_coordinates([b * x for x in v]) for v in vectors for b in K.basis()]
    int_vectors, den = lattice.scale_to_integers(spanning)
    W = lattice.hnf_of_vectors(int_vectors)
    content = gcd(den, *(x for row in W for x in row))
    return tuple(tuple(x // content for x in row) for row in W), den // content
