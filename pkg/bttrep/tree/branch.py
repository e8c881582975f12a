"""
Branches: the maximal orders containing a matrix or a finite matrix group, at one place.

The closed forms (split, unramified, ramified) predict the shape; ``branch_bfs``
walks the tree with the residual-line test and is the ground truth.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

from sympy import primefactors

from bttrep.arithmetic.classgroup import ClassGroup, artin_distance_trivial
from bttrep.arithmetic.ideals import FracIdeal, PrimePlace, places_over, residue_lift, valuation_at
from bttrep.arithmetic.lattice import determinant, hnf_of_vectors, integer_rank, rank_mod_p
from bttrep.arithmetic.matrix import Matrix2, eigen_data, group_closure
from bttrep.arithmetic.numfield import NfElement, QuadraticField, sqrt_in_field
from bttrep.arithmetic.relative import (
    RelativeQuadraticElement,
    best_square_approximation,
    extension_valuation,
    local_quadratic_type,
    ramified_places,
)
from bttrep.core.errors import (
    DegenerateEigenvaluesError,
    FieldMismatchError,
    InfiniteBranchError,
    ReducibleRepresentationError,
    UnsupportedFieldError,
)
from bttrep.core.models import BranchShape, LocalExtensionType
from bttrep.tree.localtree import (
    DEFAULT_RESIDUE_BOUND,
    INFINITY,
    ProjPoint,
    TreeVertex,
    distance_to_geodesic,
    lattice_to_vertex,
    moebius_apply,
    neighbors,
    order_contains,
    residual_invariant_lines,
    root_vertex,
    tree_distance,
    vertex,
)

logger = logging.getLogger(__name__)

DEFAULT_DEPTH_BOUND = 12


@dataclass(frozen=True)
class FoliageEntry:
    vertex: TreeVertex
    anchor: TreeVertex
    depth: int


@dataclass
class BranchReport:
    """
    The branch at one place.

    For apartment tubes ``vertices`` is a truncation around the projection of
    v_0 and membership is decided by ``contains``; all other shapes are finite
    and listed completely.
    """

    place: PrimePlace
    shape: BranchShape
    vertices: list[TreeVertex]
    stem: list[TreeVertex]
    foliage: list[FoliageEntry]
    radius: int = 0
    ends: Optional[tuple[ProjPoint, ProjPoint]] = None

    @property
    def is_finite(self) -> bool:
        return self.shape is not BranchShape.APARTMENT_TUBE

    def contains(self, v: TreeVertex) -> bool:
        if self.shape is BranchShape.APARTMENT_TUBE:
            return distance_to_geodesic(v, *self.ends) <= self.radius
        return v in set(self.vertices)

    def anchor_of(self, v: TreeVertex) -> TreeVertex:
        if v in self.stem:
            return v
        for entry in self.foliage:
            if entry.vertex == v:
                return entry.anchor
        raise KeyError(f"{v} is not in the branch at {self.place}")

    def __len__(self) -> int:
        return len(self.vertices)

    def summary(self) -> dict:
        return {
            "place": self.place.label,
            "shape": self.shape.value,
            "radius": self.radius,
            "vertex_count": len(self.vertices),
            "stem": [v.label for v in self.stem],
            "foliage": [
                {"vertex": e.vertex.label, "anchor": e.anchor.label, "depth": e.depth} for e in self.foliage
            ],
        }


def _classify(vertices: list[TreeVertex], stem: list[TreeVertex]) -> list[FoliageEntry]:
    entries = []
    for v in vertices:
        if v in stem:
            continue
        distances = sorted((tree_distance(v, s), s) for s in stem)
        depth, anchor = distances[0]
        entries.append(FoliageEntry(v, anchor, depth))
    return entries


def _eigen_setup(r: Matrix2, place: PrimePlace):
    if r.field != place.field:
        raise FieldMismatchError(f"matrix over {r.field}, place of {place.field}")
    t, n, delta = eigen_data(r)
    if delta.is_zero:
        raise DegenerateEigenvaluesError(f"{r} has a repeated eigenvalue")
    return t, n, delta


# region Closed forms


def _project_to_geodesic(v: TreeVertex, z1: ProjPoint, z2: ProjPoint) -> TreeVertex:
    """The vertex of the path z1 -- z2 nearest to v."""
    K = v.place.field
    if z1.is_infinity:
        z1, z2 = z2, z1
    if z2.is_infinity:
        g = Matrix2(K.one(), -z1.value, K.zero(), K.one())
    else:
        g = Matrix2(K.one(), -z1.value, K.one(), -z2.value)
    image = moebius_apply(g, v)
    level = image.level if image.center.is_zero else min(image.level, valuation_at(image.center, v.place))
    return moebius_apply(g.inverse(), vertex(v.place, 0, level))


def tube_vertices(
    ends: tuple[ProjPoint, ProjPoint],
    width: int,
    place: PrimePlace,
    depth: int,
    bound: int = DEFAULT_RESIDUE_BOUND,
) -> list[TreeVertex]:
    """Vertices of the tube within ``depth`` of the projection of v_0 onto its path."""
    start = _project_to_geodesic(root_vertex(place), *ends)
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for w in neighbors(current, bound):
            if w in seen or tree_distance(start, w) > depth:
                continue
            if distance_to_geodesic(w, *ends) <= width:
                seen.add(w)
                queue.append(w)
    return sorted(seen)


def branch_split(r: Matrix2, place: PrimePlace, depth: int = 3) -> BranchReport:
    """
    The tube of width v(1 - a/b) around the path joining the fixed points of r.

    Raises:
        FieldMismatchError: If the eigenvalues of r are not in K.
        DegenerateEigenvaluesError: If they are equal or have different valuations.
    """
    t, n, delta = _eigen_setup(r, place)
    s = sqrt_in_field(delta)
    if s is None:
        raise FieldMismatchError(f"eigenvalues of {r} are not in {r.field}")
    a, b = (t + s) / 2, (t - s) / 2
    if valuation_at(a, place) != valuation_at(b, place):
        raise DegenerateEigenvaluesError(f"eigenvalues {a}, {b} have different valuations at {place}")
    width = valuation_at(1 - a / b, place)
    if r.c.is_zero:
        ends = (INFINITY, ProjPoint(r.b / (r.d - r.a)))
    else:
        ends = (ProjPoint((a - r.d) / r.c), ProjPoint((b - r.d) / r.c))
    vertices = tube_vertices(ends, width, place, depth)
    stem = [v for v in vertices if distance_to_geodesic(v, *ends) == 0]
    foliage = [
        FoliageEntry(v, _project_to_geodesic(v, *ends), distance_to_geodesic(v, *ends))
        for v in vertices
        if v not in stem
    ]
    logger.debug("Split branch of %s at %s: tube of width %d", r, place, width)
    return BranchReport(place, BranchShape.APARTMENT_TUBE, vertices, stem, foliage, width, ends)


def eigen_root(r: Matrix2) -> Matrix2:
    """2r - t, a square root of t^2 - 4n inside K[r]."""
    return r * 2 - r.trace() * Matrix2.identity(r.field)


def relative_matrix(z: RelativeQuadraticElement, root: Matrix2) -> Matrix2:
    """The image of x + y sqrt(delta) under sqrt(delta) -> root."""
    return z.x * Matrix2.identity(root.field) + z.y * root


def _integral_closure_vertex(generator: Matrix2, place: PrimePlace) -> TreeVertex:
    """The vertex of O^2 + generator O^2, for an integral generator of a local ring."""
    K = place.field
    e1, e2 = (K.one(), K.zero()), (K.zero(), K.one())
    return lattice_to_vertex([e1, e2, generator.apply(e1), generator.apply(e2)], place)


def _unramified_generator(delta: NfElement, place: PrimePlace) -> RelativeQuadraticElement:
    """An element generating the ring of integers of the unramified extension K_P(sqrt(delta))."""
    v = valuation_at(delta, place)
    pi = place.uniformizer
    u = delta / pi**v
    scale = pi ** (v // 2)
    if place.p != 2:
        return RelativeQuadraticElement.of(delta, 0, 1 / scale)
    x, _ = best_square_approximation(u, place, place.e)
    return RelativeQuadraticElement.of(delta, x / 2, 1 / (2 * scale))


def extension_uniformizer(place: PrimePlace, delta: NfElement) -> RelativeQuadraticElement:
    """A uniformizer of the ramified extension K_P(sqrt(delta))."""
    pi = place.uniformizer
    v = valuation_at(delta, place)
    if v % 2:
        return RelativeQuadraticElement.of(delta, 0, 1 / pi ** ((v - 1) // 2))
    u = delta / pi**v
    x, t = best_square_approximation(u, place, place.e)
    if t is None or t % 2 == 0:
        raise ValueError(f"K(sqrt({delta})) is not ramified at {place}")
    scale = pi ** ((t - 1) // 2)
    return RelativeQuadraticElement.of(delta, x / scale, 1 / (scale * pi ** (v // 2)))


def kappa(place: PrimePlace, delta: NfElement) -> int:
    """
    omega(sigma(z)/z - 1) for a uniformizer z of the ramified extension.

    Examples:
        >>> kappa(factor_rational_prime(2, QuadraticField(1))[0], QuadraticField(1).element(-1))
        1
    """
    if local_quadratic_type(place, delta) is not LocalExtensionType.RAMIFIED:
        raise ValueError(f"K(sqrt({delta})) is unramified at {place}")
    z = extension_uniformizer(place, delta)
    return extension_valuation(z.sigma() / z - 1, place, LocalExtensionType.RAMIFIED)


def ideal_ILK(K: QuadraticField, delta: NfElement) -> dict[PrimePlace, int]:
    """I[L/K] as exponents of the extension primes over the ramified places; empty when unramified."""
    return {P: kappa(P, delta) + 1 for P in ramified_places(K, delta)}


def _ball_size(q: int, radius: int) -> int:
    return 1 + (q + 1) * (q**radius - 1) // (q - 1)


def _edge_ball_size(q: int, radius: int) -> int:
    return 2 * (q ** (radius + 1) - 1) // (q - 1)


def branch_unramified(r: Matrix2, place: PrimePlace, depth_bound: int = DEFAULT_DEPTH_BOUND) -> BranchReport:
    """
    The ball of radius omega(1 - a/b) around the vertex of the integral closure of K_P[r].

    Raises:
        FieldMismatchError: If K_P(sqrt(delta)) is not the unramified quadratic extension.
    """
    t, n, delta = _eigen_setup(r, place)
    if local_quadratic_type(place, delta) is not LocalExtensionType.INERT:
        raise FieldMismatchError(f"eigenvalues of {r} are not in the unramified extension at {place}")
    root = eigen_root(r)
    seed = _integral_closure_vertex(relative_matrix(_unramified_generator(delta, place), root), place)
    predicted = (valuation_at(delta, place) - valuation_at(n, place)) // 2
    report = branch_bfs([r], place, seeds=[seed], depth_bound=max(depth_bound, predicted + 1))
    if report.stem != [seed] or report.radius != predicted:
        logger.warning("Unramified branch of %s at %s differs from its closed form", r, place)
    report.radius = predicted
    report.shape = BranchShape.VERTEX_BALL
    return report


def branch_ramified(r: Matrix2, place: PrimePlace, depth_bound: int = DEFAULT_DEPTH_BOUND) -> BranchReport:
    """
    Empty when omega(det r) is odd, otherwise the ball of radius (omega(1 - a/b) - kappa - 1)/2
    around the edge of the integral closure of K_P[r].
    """
    t, n, delta = _eigen_setup(r, place)
    if local_quadratic_type(place, delta) is not LocalExtensionType.RAMIFIED:
        raise FieldMismatchError(f"eigenvalues of {r} are not in a ramified extension at {place}")
    if valuation_at(n, place) % 2:
        return BranchReport(place, BranchShape.EMPTY, [], [], [])
    k = kappa(place, delta)
    gap = valuation_at(delta, place) - valuation_at(n, place) - k - 1
    assert gap >= 0 and gap % 2 == 0, f"edge-ball radius {gap}/2 is not a non-negative integer"
    predicted = gap // 2
    root = eigen_root(r)
    Z = relative_matrix(extension_uniformizer(place, delta), root)
    first = _integral_closure_vertex(Z, place)
    second = moebius_apply(Z, first)
    report = branch_bfs([r], place, seeds=[first, second], depth_bound=max(depth_bound, predicted + 1))
    if sorted(report.stem) != sorted([first, second]) or report.radius != predicted:
        logger.warning("Ramified branch of %s at %s differs from its closed form", r, place)
    report.radius = predicted
    report.shape = BranchShape.EDGE_BALL
    return report


def local_branch(r: Matrix2, place: PrimePlace, depth_bound: int = DEFAULT_DEPTH_BOUND) -> BranchReport:
    """Dispatch on the local behaviour of the eigenvalues of r."""
    _, _, delta = _eigen_setup(r, place)
    kind = local_quadratic_type(place, delta)
    if kind is LocalExtensionType.SPLIT:
        if sqrt_in_field(delta) is None:
            raise UnsupportedFieldError(f"eigenvalues of {r} split at {place} but are not in {r.field}")
        return branch_split(r, place)
    if kind is LocalExtensionType.INERT:
        return branch_unramified(r, place, depth_bound)
    return branch_ramified(r, place, depth_bound)


def global_invariance_test(r: Matrix2) -> bool:
    """
    True iff a/b is a unit and a/b = 1 mod I[L/K], for the eigenvalues a, b of r.

    Raises:
        DegenerateEigenvaluesError: If the eigenvalues lie in K.
    """
    K = r.field
    t, n, delta = eigen_data(r)
    if delta.is_zero or sqrt_in_field(delta) is not None:
        raise DegenerateEigenvaluesError(f"eigenvalues of {r} lie in {K}; use branch_split")
    if not (t * t / n).is_integral:
        return False
    for P, exponent in ideal_ILK(K, delta).items():
        if valuation_at(delta, P) - valuation_at(n, P) < exponent:
            return False
    return True


# endregion

# region Exceptional places and the oracle walk


def _basis_vector(x: NfElement) -> list[int]:
    K = x.field
    coords = x.coords if K.is_rational else K.to_basis(x)
    return [int(c) for c in coords]


def _residue_vector(x: NfElement, place: PrimePlace) -> list[int]:
    r = residue_lift(x, place)
    if place.f == 1:
        return [int(r.rational())]
    return _basis_vector(r)


def exceptional_places(
    gens: Sequence[Matrix2], K: QuadraticField, group_order_bound: int = 512
) -> list[PrimePlace]:
    """
    The places where the O_K-span of the group is not M2(O_P).

    Raises:
        ValueError: If a generator is not integral.
        ReducibleRepresentationError: If the span has rank below 4.
    """
    if not all(g.is_integral for g in gens):
        raise ValueError("generators must be integral")
    elements = group_closure(gens, group_order_bound)
    basis = [K.one()] if K.is_rational else K.basis()
    spanning = [b * g for g in elements for b in basis]
    vectors = [[c for x in m.entries() for c in _basis_vector(x)] for m in spanning]
    size = 4 * K.degree
    if integer_rank(vectors) < size:
        raise ReducibleRepresentationError("the group does not span M2(K)")
    index = abs(determinant(hnf_of_vectors(vectors)))
    logger.debug("Monomial span of %d elements has index %d", len(elements), index)
    result = []
    for P in places_over(primefactors(index), K):
        residues = [[c for x in m.entries() for c in _residue_vector(x, P)] for m in spanning]
        if rank_mod_p(residues, P.p) < 4 * P.f:
            result.append(P)
    return result


def default_seed(gens: Sequence[Matrix2], place: PrimePlace, group_order_bound: int = 512) -> TreeVertex:
    """v_0 when it contains every generator, otherwise the vertex of sum g O^2 over the group."""
    v0 = root_vertex(place)
    if all(order_contains(v0, g) for g in gens):
        return v0
    vectors = [column for g in group_closure(gens, group_order_bound) for column in g.columns()]
    seed = lattice_to_vertex(vectors, place)
    logger.info("Seeding the branch at %s from the invariant lattice %s", place, seed)
    return seed


def tree_center(vertices: list[TreeVertex]) -> list[TreeVertex]:
    """The one or two central vertices of a finite subtree, by stripping leaves."""
    remaining = set(vertices)
    while len(remaining) > 2:
        leaves = [
            v for v in remaining if sum(1 for w in remaining if w != v and tree_distance(v, w) == 1) <= 1
        ]
        remaining.difference_update(leaves)
    return sorted(remaining)


def branch_bfs(
    gens: Sequence[Matrix2],
    place: PrimePlace,
    seeds: Optional[Sequence[TreeVertex]] = None,
    depth_bound: int = DEFAULT_DEPTH_BOUND,
    bound: int = DEFAULT_RESIDUE_BOUND,
    stem: Optional[Sequence[TreeVertex]] = None,
) -> BranchReport:
    """
    Every vertex whose order contains the generators, found by breadth-first search.

    The stem is ``stem`` when the vertices of the integral closure of the
    commutative algebra are known, and the centre of the vertex set otherwise.

    Raises:
        ValueError: If a seed does not contain every generator.
        InfiniteBranchError: If the search goes further than ``depth_bound`` from the seeds.
    """
    if seeds is None:
        seeds = [default_seed(gens, place)]
    for s in seeds:
        if not all(order_contains(s, g) for g in gens):
            raise ValueError(f"seed {s} does not contain every generator")
    if stem is not None and not stem:
        raise ValueError("the stem must not be empty")
    distance = {s: 0 for s in seeds}
    queue = deque(sorted(distance))
    while queue:
        current = queue.popleft()
        for w in sorted(residual_invariant_lines(current, gens, bound)):
            if w in distance:
                continue
            distance[w] = distance[current] + 1
            if distance[w] > depth_bound:
                raise InfiniteBranchError(
                    f"branch at {place} reaches beyond depth {depth_bound}", depth_bound=depth_bound
                )
            queue.append(w)
    vertices = sorted(distance)
    if stem is None:
        stem = tree_center(vertices)
    else:
        missing = [v for v in stem if v not in distance]
        if missing:
            raise ValueError(f"stem vertices {missing} are not in the branch")
        stem = sorted(stem)
    foliage = _classify(vertices, stem)
    radius = max((e.depth for e in foliage), default=0)
    q = place.residue_size
    if len(stem) == 1 and len(vertices) == _ball_size(q, radius):
        shape = BranchShape.VERTEX_BALL
    elif len(stem) == 2 and len(vertices) == _edge_ball_size(q, radius):
        shape = BranchShape.EDGE_BALL
    else:
        shape = BranchShape.EXPLICIT
    logger.info("Branch at %s: %d vertices, %s", place, len(vertices), shape.value)
    return BranchReport(place, shape, vertices, stem, foliage, radius)


def check_maximality(
    report: BranchReport, gens: Sequence[Matrix2], bound: int = DEFAULT_RESIDUE_BOUND
) -> bool:
    """Every listed vertex contains the generators and every missing neighbour fails."""
    members = set(report.vertices)
    for v in report.vertices:
        if not all(order_contains(v, g) for g in gens):
            return False
        for w in neighbors(v, bound):
            if w not in members and all(order_contains(w, g) for g in gens):
                return False
    return True


# endregion

# region Side-branch products


@dataclass(frozen=True)
class ProductVertex:
    """A tuple of vertices, one per place, with ideal-valued distances."""

    vertices: tuple[TreeVertex, ...]
    anchors: tuple[TreeVertex, ...]
    to_anchor: FracIdeal
    to_base: FracIdeal
    artin_trivial: bool

    @property
    def label(self) -> str:
        return " x ".join(v.label for v in self.vertices) or "v_0"


@dataclass
class SideBranchProduct:
    places: list[PrimePlace]
    base: tuple[TreeVertex, ...]
    depth_bounds: dict[PrimePlace, int]
    members: list[ProductVertex] = field(default_factory=list)

    def artin_trivial_members(self) -> list[ProductVertex]:
        return [m for m in self.members if m.artin_trivial]

    def __len__(self) -> int:
        return len(self.members)


def _distance_ideal(K: QuadraticField, pairs) -> FracIdeal:
    result = FracIdeal.unit(K)
    for place, v, w in pairs:
        result = result * place.ideal ** tree_distance(v, w)
    return result


def side_branch_product(
    reports: Sequence[BranchReport], group: ClassGroup, base: Optional[Sequence[TreeVertex]] = None
) -> SideBranchProduct:
    """
    The product over places of the finite branch reports.

    Each tuple carries its distance ideal to the tuple of anchors and to the
    base tuple (v_0 at each place by default), and whether the latter has a
    trivial Artin class.
    """
    K = group.field
    places = [report.place for report in reports]
    base = tuple(base) if base is not None else tuple(root_vertex(P) for P in places)
    for report in reports:
        if not report.is_finite:
            raise ValueError(f"the branch at {report.place} is infinite")
    depth_bounds = {report.place: report.radius for report in reports}
    members = []
    for combo in product(*(report.vertices for report in reports)):
        anchors = tuple(report.anchor_of(v) for report, v in zip(reports, combo))
        to_anchor = _distance_ideal(K, zip(places, combo, anchors))
        to_base = _distance_ideal(K, zip(places, combo, base))
        trivial = artin_distance_trivial(to_base, group)
        members.append(ProductVertex(combo, anchors, to_anchor, to_base, trivial))
    logger.debug("Side-branch product over %s has %d vertices", [P.label for P in places], len(members))
    return SideBranchProduct(places, base, depth_bounds, members)


# endregion
