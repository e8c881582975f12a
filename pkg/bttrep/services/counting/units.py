"""Unit actions on side branches and the invariants mu_{I'}."""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

from bttrep.arithmetic.classgroup import ClassGroup
from bttrep.arithmetic.ideals import FracIdeal, PrimePlace
from bttrep.arithmetic.matrix import Matrix2
from bttrep.arithmetic.numfield import NfElement, QuadraticField
from bttrep.arithmetic.relative import RelativeQuadraticElement, extension_valuation, local_quadratic_type
from bttrep.core.errors import UnsupportedFieldError
from bttrep.core.models import LocalExtensionType
from bttrep.services.counting.classdata import UGenerator
from bttrep.tree.branch import ProductVertex, SideBranchProduct, ideal_ILK
from bttrep.tree.localtree import moebius_apply

logger = logging.getLogger(__name__)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def unit_orbits(
    members: Sequence[ProductVertex], matrices: Sequence[Matrix2]
) -> list[list[ProductVertex]]:
    """Orbits of the coordinate-wise Moebius action of the matrices on the product vertices."""
    index = {m.vertices: i for i, m in enumerate(members)}
    forest = _UnionFind(range(len(members)))
    for i, member in enumerate(members):
        for g in matrices:
            image = tuple(moebius_apply(g, v) for v in member.vertices)
            j = index.get(image)
            if j is None:
                logger.debug("%s moves %s outside the side branch", g, member.label)
                continue
            forest.union(i, j)
    orbits: dict[int, list[ProductVertex]] = {}
    for i, member in enumerate(members):
        orbits.setdefault(forest.find(i), []).append(member)
    return [orbits[root] for root in sorted(orbits)]


def count_unit_orbits(product_: SideBranchProduct, unit_gens: Sequence[NfElement]) -> int:
    """Number of orbits of z -> u^-1 z, u running over the unit generators, on the side-branch product."""
    if not product_.members:
        return 0
    if not unit_gens:
        return len(product_.members)
    K = unit_gens[0].field
    matrices = [Matrix2.diag(K, 1, u) for u in unit_gens]
    orbits = unit_orbits(product_.members, matrices)
    logger.debug("%d unit orbits on %d product vertices", len(orbits), len(product_.members))
    return len(orbits)


# region mu


@dataclass(frozen=True)
class MuResult:
    mu: int
    classes: tuple[int, ...]
    witnesses: tuple[RelativeQuadraticElement, ...]


def _required_exponents(
    K: QuadraticField, delta: NfElement, exponents: dict[PrimePlace, int]
) -> dict[PrimePlace, tuple[LocalExtensionType, int]]:
    """I' * I[L/K] as valuations of the extension places over each place of K."""
    conductor = ideal_ILK(K, delta)
    required = {}
    for P in set(exponents) | set(conductor):
        kind = local_quadratic_type(P, delta)
        k = exponents.get(P, 0)
        if kind is LocalExtensionType.SPLIT:
            if k:
                raise UnsupportedFieldError(f"mu at {P}, which splits in K(sqrt({delta}))")
            continue
        if kind is LocalExtensionType.RAMIFIED:
            required[P] = (kind, 2 * k + conductor[P])
        elif k:
            required[P] = (kind, k)
    return required


def _congruent_to_one(
    x: RelativeQuadraticElement, required: dict[PrimePlace, tuple[LocalExtensionType, int]]
) -> bool:
    ratio = x.sigma() / x - 1
    if ratio.is_zero:
        return True
    return all(extension_valuation(ratio, P, kind) >= k for P, (kind, k) in required.items())


def _subgroup_closure(classes: set[int], group: ClassGroup) -> set[int]:
    closed = set(classes) | {0}
    frontier = list(closed)
    while frontier:
        new = []
        for x in frontier:
            for y in list(closed):
                z = group.mul(x, y)
                if z not in closed:
                    closed.add(z)
                    new.append(z)
        frontier = new
    return closed


def mu_invariants(
    K: QuadraticField,
    delta: NfElement,
    exponents: dict[PrimePlace, int],
    group: ClassGroup,
    u_generators: Sequence[UGenerator] = (),
    units: Sequence[RelativeQuadraticElement] = (),
    exponent_bound: int = 12,
) -> MuResult:
    """
    mu_{I'}: the order of the image in the 2-torsion of the class group of
    U_{I'} = {l in U : sigma(l)/l = 1 mod I' I[L/K]}.

    ``exponents`` is I' as a place-exponent vector. An element l of U is
    tested up to K* O_L*, i.e. l * u for u in the span of ``units`` with
    exponents below ``exponent_bound``.
    """
    required = _required_exponents(K, delta, exponents)
    one = RelativeQuadraticElement.of(delta, 1)
    unit_products = [one]
    for exps in product(range(exponent_bound), repeat=len(units)):
        if any(exps):
            value = one
            for u, k in zip(units, exps):
                value = value * u**k
            unit_products.append(value)
    found: set[int] = {0}
    witnesses = [one]
    for choice in product((0, 1), repeat=len(u_generators)):
        if not any(choice):
            continue
        element, ideal = one, FracIdeal.unit(K)
        for gen, take in zip(u_generators, choice):
            if take:
                element, ideal = element * gen.element, ideal * gen.ideal
        witness = next((element * u for u in unit_products if _congruent_to_one(element * u, required)), None)
        if witness is not None:
            found.add(group.class_of(ideal))
            witnesses.append(witness)
    image = _subgroup_closure(found, group)
    logger.debug("mu at %s is %d", {P.label: k for P, k in exponents.items()}, len(image))
    return MuResult(len(image), tuple(sorted(image)), tuple(witnesses))


def mu_function(
    K: QuadraticField,
    delta: NfElement,
    group: ClassGroup,
    u_generators: Sequence[UGenerator] = (),
    units: Sequence[RelativeQuadraticElement] = (),
    exponent_bound: int = 12,
) -> Callable[[dict[PrimePlace, int]], int]:
    """A memoised I' -> mu_{I'}."""
    cache: dict[tuple, int] = {}

    def mu(exponents: dict[PrimePlace, int]) -> int:
        key = tuple(sorted((P.label, k) for P, k in exponents.items() if k))
        if key not in cache:
            trimmed = {P: k for P, k in exponents.items() if k}
            cache[key] = mu_invariants(K, delta, trimmed, group, u_generators, units, exponent_bound).mu
        return cache[key]

    return mu


# endregion
