"""
The Bruhat-Tits tree of PGL2 at a finite place.

A vertex v_a^[n] is the ball {x : v(x - a) >= n} and the homothety class of
the lattice spanned by (a, 1) and (u^n, 0), u the place's uniformizer. Its
maximal order is T M2(O_P) T^-1 with T = [[a, u^n], [1, 0]]. Centers are kept
reduced modulo P^n so that equal vertices are equal dataclasses.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from bttrep.arithmetic.ideals import (
    PrimePlace,
    reduce_mod_power,
    residue_lifts,
    valuation_at,
    valuation_or_none,
)
from bttrep.arithmetic.matrix import Matrix2
from bttrep.arithmetic.numfield import NfElement
from bttrep.core.errors import BoundExceededError, FieldMismatchError

logger = logging.getLogger(__name__)

DEFAULT_RESIDUE_BOUND = 64
DEFAULT_LEVEL_FLOOR = -64


@dataclass(frozen=True)
class TreeVertex:
    place: PrimePlace
    center: NfElement
    level: int

    def sort_key(self) -> tuple:
        return self.level, self.center.sort_key()

    @property
    def label(self) -> str:
        return f"v_{{{self.center}}}^{{[{self.level}]}}"

    def __str__(self) -> str:
        return self.label

    def __lt__(self, other: "TreeVertex") -> bool:
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True)
class ProjPoint:
    """A point of the projective line: a field element, or infinity when ``value`` is None."""

    value: Optional[NfElement] = None

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "oo" if self.is_infinity else str(self.value)


INFINITY = ProjPoint()


def vertex(place: PrimePlace, center, level: int, level_floor: int = DEFAULT_LEVEL_FLOOR) -> TreeVertex:
    """The canonical vertex v_center^[level]."""
    if level < level_floor:
        raise BoundExceededError(f"level {level} below the floor {level_floor}", bound=level_floor)
    if not isinstance(center, NfElement):
        center = place.field.element(center)
    return TreeVertex(place, reduce_mod_power(center, place, level), level)


def root_vertex(place: PrimePlace) -> TreeVertex:
    """v_0^[0], the vertex of M2(O_P)."""
    return vertex(place, 0, 0)


def _same_place(v: TreeVertex, w: TreeVertex) -> None:
    if v.place != w.place:
        raise FieldMismatchError(f"vertices at {v.place} and {w.place}")


def vertex_eq(v: TreeVertex, w: TreeVertex) -> bool:
    _same_place(v, w)
    return v == w


def uniformizer_power(place: PrimePlace, n: int) -> NfElement:
    return place.uniformizer**n


def neighbors(v: TreeVertex, bound: int = DEFAULT_RESIDUE_BOUND, level_floor: int = DEFAULT_LEVEL_FLOOR):
    """
    The residue_size + 1 neighbours of v: the enclosing ball, then one sub-ball per residue lift.

    Raises:
        BoundExceededError: If the residue field is larger than ``bound``.
    """
    place = v.place
    if place.residue_size > bound:
        raise BoundExceededError(
            f"residue field of size {place.residue_size} at {place} exceeds {bound}", bound=bound
        )
    step = uniformizer_power(place, v.level)
    result = [vertex(place, v.center, v.level - 1, level_floor)]
    result.extend(vertex(place, v.center + d * step, v.level + 1, level_floor) for d in residue_lifts(place))
    return result


def tree_distance(v: TreeVertex, w: TreeVertex) -> int:
    _same_place(v, w)
    m = min(v.level, w.level)
    difference = valuation_or_none(v.center - w.center, v.place)
    if difference is not None:
        m = min(m, difference)
    return v.level + w.level - 2 * m


def ball(center: TreeVertex, radius: int, bound: int = DEFAULT_RESIDUE_BOUND) -> list[TreeVertex]:
    """All vertices within ``radius`` of ``center``, by breadth-first search."""
    seen = {center: 0}
    queue = deque([center])
    while queue:
        current = queue.popleft()
        if seen[current] == radius:
            continue
        for w in neighbors(current, bound):
            if w not in seen:
                seen[w] = seen[current] + 1
                queue.append(w)
    return sorted(seen)


# region Visual limits and the Moebius action


def incenter(z1: ProjPoint, z2: ProjPoint, z3: ProjPoint, place: PrimePlace) -> TreeVertex:
    """
    The vertex lying on all three paths between the given ends.

    It is the smallest ball containing at least two of the three points, where
    a ball never contains infinity.
    """
    points = [z1, z2, z3]
    if len(set(points)) < 3:
        raise ValueError("incenter needs three distinct points")
    finite = [z.value for z in points if not z.is_infinity]
    if len(finite) == 2:
        x, y = finite
        return vertex(place, x, valuation_at(x - y, place))
    pairs = [(finite[i], finite[j]) for i in range(3) for j in range(i + 1, 3)]
    x, y = max(pairs, key=lambda pair: valuation_at(pair[0] - pair[1], place))
    return vertex(place, x, valuation_at(x - y, place))


def moebius_point(g: Matrix2, z: ProjPoint) -> ProjPoint:
    """z -> (a z + b) / (c z + d) on the projective line."""
    if z.is_infinity:
        return INFINITY if g.c.is_zero else ProjPoint(g.a / g.c)
    denominator = g.c * z.value + g.d
    if denominator.is_zero:
        return INFINITY
    return ProjPoint((g.a * z.value + g.b) / denominator)


def moebius_apply(g: Matrix2, v: TreeVertex) -> TreeVertex:
    """g * v, the incenter of the image of the triplet (a, a + u^n, oo)."""
    if g.det.is_zero:
        raise ValueError("singular matrix")
    a = v.center
    triplet = [ProjPoint(a), ProjPoint(a + uniformizer_power(v.place, v.level)), INFINITY]
    images = [moebius_point(g, z) for z in triplet]
    assert len(set(images)) == 3, "an invertible matrix maps distinct points to distinct points"
    return incenter(*images, v.place)


def vertex_matrix(v: TreeVertex) -> Matrix2:
    """T = [[a, u^n], [1, 0]], whose columns span a lattice of v."""
    K = v.place.field
    return Matrix2(v.center, uniformizer_power(v.place, v.level), K.one(), K.zero())


def _min_valuation(entries: Iterable[NfElement], place: PrimePlace) -> Optional[int]:
    values = [valuation_at(x, place) for x in entries if not x.is_zero]
    return min(values) if values else None


def order_contains(v: TreeVertex, m: Matrix2) -> bool:
    """True iff T^-1 m T is integral at the place, i.e. m lies in the maximal order of v."""
    if m.field != v.place.field:
        raise FieldMismatchError(f"matrix over {m.field}, vertex at {v.place}")
    conjugated = m.conjugate_by(vertex_matrix(v))
    low = _min_valuation(conjugated.entries(), v.place)
    return low is None or low >= 0


def conjugation_matches(g: Matrix2, v: TreeVertex, w: TreeVertex) -> bool:
    """True iff g D_v g^-1 = D_w, i.e. T_w^-1 g T_v is a scalar times an invertible integral matrix."""
    _same_place(v, w)
    M = vertex_matrix(w).inverse() * g * vertex_matrix(v)
    low = _min_valuation(M.entries(), v.place)
    return valuation_at(M.det, v.place) == 2 * low


def residual_invariant_lines(v: TreeVertex, gens: Sequence[Matrix2], bound: int = DEFAULT_RESIDUE_BOUND):
    """
    The neighbours of v whose orders also contain every generator.

    A neighbour is a line of the residual plane; it is kept when it is an
    eigenline of every reduced generator.

    Raises:
        ValueError: If a generator is not in the order of v.
    """
    place = v.place
    if place.residue_size > bound:
        raise BoundExceededError(f"residue field at {place} exceeds {bound}", bound=bound)
    T = vertex_matrix(v)
    reduced = []
    for g in gens:
        if not order_contains(v, g):
            raise ValueError(f"{g} is not in the order of {v}")
        reduced.append(g.conjugate_by(T))

    def divisible(x: NfElement) -> bool:
        return x.is_zero or valuation_at(x, place) >= 1

    result = []
    if all(divisible(m.b) for m in reduced):
        result.append(vertex(place, v.center, v.level - 1))
    step = uniformizer_power(place, v.level)
    for s in residue_lifts(place):
        if all(divisible(m.c + (m.d - m.a) * s - m.b * s * s) for m in reduced):
            result.append(vertex(place, v.center + s * step, v.level + 1))
    return result


# endregion

# region Lattices and apartments


def lattice_to_vertex(vectors: Sequence[tuple[NfElement, NfElement]], place: PrimePlace) -> TreeVertex:
    """The vertex of the O_P-lattice spanned by the given vectors of K^2."""
    pivots = [(valuation_at(y, place), index) for index, (_, y) in enumerate(vectors) if not y.is_zero]
    if not pivots:
        raise ValueError("vectors do not span a lattice")
    _, j = min(pivots)
    xj, yj = vectors[j]
    center = xj / yj
    residual = [(x - (y / yj) * xj) / yj for x, y in vectors]
    level = _min_valuation(residual, place)
    if level is None:
        raise ValueError("vectors do not span a lattice")
    return vertex(place, center, level)


def distance_to_geodesic(v: TreeVertex, z1: ProjPoint, z2: ProjPoint) -> int:
    """Distance from v to the maximal path with ends z1 and z2."""
    if z1.is_infinity:
        z1, z2 = z2, z1
    K = v.place.field
    if z2.is_infinity:
        g = Matrix2(K.one(), -z1.value, K.zero(), K.one())
    else:
        g = Matrix2(K.one(), -z1.value, K.one(), -z2.value)
    image = moebius_apply(g, v)
    if image.center.is_zero:
        return 0
    return max(0, image.level - valuation_at(image.center, v.place))


# endregion
