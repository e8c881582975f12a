"""
Counting conjugacy classes of integral 2-dimensional representations.

Every count is computed twice where a closed form exists: once from the
closed form and once from per-vertex bookkeeping over the side-branch
product. Disagreements are logged and recorded in the report trace.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

from sympy.ntheory.factor_ import core

from bttrep.arithmetic.classgroup import ClassGroup, class_group, two_torsion_subgroup
from bttrep.arithmetic.cyclotomic import dihedral_field, prime_power_base
from bttrep.arithmetic.ideals import (
    PrimePlace,
    factor_rational_prime,
    module_hnf,
    residues_mod_power,
    valuation_at,
)
from bttrep.arithmetic.lattice import integer_rank, scale_to_integers
from bttrep.arithmetic.matrix import Matrix2, eigen_data, evaluate_word, group_closure
from bttrep.arithmetic.numfield import (
    NfElement,
    QuadraticField,
    root_of_unity,
    sqrt_in_field,
    unit_group_generators,
)
from bttrep.arithmetic.relative import relative_quadratic_unramified, relevant_places
from bttrep.core.errors import (
    FieldMismatchError,
    ReducibleRepresentationError,
    RelatorError,
    UnsupportedFieldError,
)
from bttrep.core.models import BranchShape, Classification, CountingRule, GroupKind
from bttrep.services.counting.classdata import ClassDataTable
from bttrep.services.counting.units import mu_function, unit_orbits
from bttrep.tree.branch import (
    DEFAULT_DEPTH_BOUND,
    BranchReport,
    FoliageEntry,
    ProductVertex,
    SideBranchProduct,
    branch_bfs,
    branch_split,
    eigen_root,
    exceptional_places,
    local_branch,
    relative_matrix,
    side_branch_product,
)
from bttrep.tree.localtree import DEFAULT_RESIDUE_BOUND, root_vertex, tree_distance, vertex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CountingOptions:
    """Bounds and data shared by all counting operations."""

    discriminant_bound: int = 1_000_000
    real_discriminant_bound: int = 20_000
    bfs_depth_bound: int = DEFAULT_DEPTH_BOUND
    residue_enumeration_bound: int = DEFAULT_RESIDUE_BOUND
    group_order_bound: int = 512
    unit_exponent_bound: int = 12
    allow_infinite_ramification: bool = False
    class_data: ClassDataTable = field(default_factory=ClassDataTable)

    def class_group(self, K: QuadraticField) -> ClassGroup:
        return class_group(K, self.discriminant_bound, self.real_discriminant_bound)


DEFAULT_OPTIONS = CountingOptions()


# region Representations


def default_relators(kind: GroupKind, order: Optional[int]) -> list[str]:
    """Relators in the generator letters a, b, with capitals for inverses."""
    if kind is GroupKind.CYCLIC:
        return ["a" * order]
    if kind is GroupKind.DIHEDRAL:
        return ["a" * order, "bb", "baba"]
    if kind is GroupKind.QUATERNION8:
        return ["aaaa", "aaBB", "abAAAB"]
    return []


@dataclass
class RepSpec:
    """A finite group given by generator images in GL2(K) and the relators they must satisfy."""

    group: GroupKind
    field: QuadraticField
    images: dict[str, Matrix2]
    relators: list[str] = field(default_factory=list)
    order: Optional[int] = None

    @property
    def generators(self) -> list[Matrix2]:
        return [self.images[letter] for letter in sorted(self.images)]

    def check_relators(self) -> None:
        """
        Raises:
            RelatorError: If a relator does not evaluate to the identity.
        """
        for word in self.relators:
            try:
                value = evaluate_word(word, self.images, self.field)
            except KeyError as e:
                raise RelatorError(f"relator {word!r} uses an unknown generator", relator=word) from e
            if not value.is_identity:
                raise RelatorError(f"relator {word!r} is violated", relator=word)


@dataclass(frozen=True)
class ClassificationResult:
    classification: Classification
    witness: str


def _commute(gens: Sequence[Matrix2]) -> bool:
    return all(g * h == h * g for g in gens for h in gens)


def _is_split(r: Matrix2) -> bool:
    _, _, delta = eigen_data(r)
    return r.is_scalar or sqrt_in_field(delta) is not None


def classify(rep: RepSpec, group_order_bound: int = 512) -> ClassificationResult:
    """
    Decomposable, indecomposable abelian, or absolutely irreducible, with a witness.

    Raises:
        RelatorError: If the images violate the relators.
    """
    rep.check_relators()
    gens = rep.generators
    if _commute(gens):
        non_split = [g for g in gens if not _is_split(g)]
        if not non_split:
            witness = "commuting generators with eigenvalues in K"
            return ClassificationResult(Classification.DECOMPOSABLE, witness)
        t, n, _ = eigen_data(non_split[0])
        witness = f"minimal polynomial x^2 - ({t})x + ({n})"
        return ClassificationResult(Classification.INDECOMPOSABLE_ABELIAN, witness)
    K = rep.field
    vectors = []
    # the Q-span of w * g over the ring basis w is the K-span of the group
    for g in group_closure(gens, group_order_bound):
        for w in K.basis():
            vectors.append([c for x in (w * g).entries() for c in K.to_basis(x)])
    int_vectors, _ = scale_to_integers(vectors)
    rank = integer_rank(int_vectors)
    if rank < 4 * K.degree:
        raise ReducibleRepresentationError(f"non-commuting images span a space of rank {rank}")
    return ClassificationResult(Classification.ABSOLUTELY_IRREDUCIBLE, f"the group spans M2(K) (rank {rank})")


def integral_conjugate(
    gens: Sequence[Matrix2], group_order_bound: int = 512
) -> tuple[list[Matrix2], Matrix2]:
    """
    Generators conjugated into GL2(O_K), with the conjugating matrix B (new = B^-1 g B).

    B is a basis of the invariant lattice sum g O_K^2.

    Raises:
        UnsupportedFieldError: If no basis of the invariant lattice is found among its spanning vectors.
    """
    K = gens[0].field
    identity = Matrix2.identity(K)
    if all(g.is_integral for g in gens):
        return list(gens), identity
    columns = [c for g in group_closure(gens, group_order_bound) for c in g.columns()]
    target = module_hnf(columns)
    if K.is_rational:
        W, den = target
        B = Matrix2.of(K, [[Fraction(x, den) for x in row] for row in W])
        logger.info("Conjugated the representation into GL2(Z) by %s", B)
        return [g.conjugate_by(B) for g in gens], B
    candidates = [c for c in columns if any(not x.is_zero for x in c)]
    for i, v in enumerate(candidates):
        for w in candidates[i + 1 :]:
            B = Matrix2(v[0], w[0], v[1], w[1])
            if B.det.is_zero or module_hnf([v, w]) != target:
                continue
            logger.info("Conjugated the representation into GL2(O_K) by %s", B)
            return [g.conjugate_by(B) for g in gens], B
    raise UnsupportedFieldError("the invariant lattice has no basis among its spanning vectors")


# endregion

# region Reports


@dataclass(frozen=True)
class SymbolicCount:
    multiplier: int
    symbol: str
    source: str

    def to_dict(self) -> dict:
        return {"multiplier": self.multiplier, "symbol": self.symbol, "source": self.source}

    def __str__(self) -> str:
        return f"{self.multiplier}*{self.symbol}"


@dataclass(frozen=True)
class VertexRecord:
    vertices: tuple[str, ...]
    artin_trivial: bool
    multiplicity: int
    distance: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "artin_trivial": self.artin_trivial,
            "multiplicity": self.multiplicity,
            "distance": self.distance,
        }


# "theorem" labels of the count JSON
THEOREM_LABELS = {
    CountingRule.DECOMPOSABLE_ORBITS: "t5",
    CountingRule.ABELIAN_FIELD_OF_DEFINITION: "p42",
    CountingRule.ABELIAN_UNIT_SUM: "t6",
    CountingRule.IRREDUCIBLE_BRANCH: "t7",
    CountingRule.DIHEDRAL: "t4",
}
NON_PRIME_POWER_LABEL = "p63"
FIELD_OF_DEFINITION_LABEL = "p64"


@dataclass
class CountReport:
    total: int | SymbolicCount
    rule: CountingRule
    classification: Classification
    field: QuadraticField
    records: list[VertexRecord] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)
    orbit_total: Optional[int] = None
    branches: list[BranchReport] = field(default_factory=list)
    product: Optional[SideBranchProduct] = None
    generators: list[Matrix2] = field(default_factory=list)
    chi_order: Optional[int] = None
    # product members behind each record, in the same order
    members: list[ProductVertex] = field(default_factory=list)
    delta: Optional[NfElement] = None
    # B with generators = B^-1 (input generators) B
    base_change: Optional[Matrix2] = None
    # overrides the label of the rule for the decomposable special cases
    theorem: Optional[str] = None

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.total, SymbolicCount)

    @property
    def bookkeeping_total(self) -> int:
        return sum(r.multiplicity for r in self.records)

    @property
    def theorem_label(self) -> str:
        return self.theorem or THEOREM_LABELS[self.rule]

    def to_dict(self) -> dict:
        return {
            "count": self.total.to_dict() if self.is_symbolic else self.total,
            "theorem": self.theorem_label,
            "rule": self.rule.value,
            "classification": self.classification.value,
            "field": str(self.field),
            "vertices": [" x ".join(r.vertices) or "v_0" for r in self.records],
            "per_vertex_multiplicity": [r.multiplicity for r in self.records],
            "records": [r.to_dict() for r in self.records],
            "orbit_total": self.orbit_total,
            "trace": self.trace,
        }


def place_exponents(member: ProductVertex) -> dict:
    """I', the distance of each vertex to its anchor on the stem, keyed by place."""
    return {v.place: tree_distance(v, a) for v, a in zip(member.vertices, member.anchors)}


def _distance_exponents(member: ProductVertex) -> dict[str, int]:
    return {P.label: k for P, k in place_exponents(member).items() if k}


def _record(member, multiplicity: int) -> VertexRecord:
    labels = tuple(v.label for v in member.vertices)
    return VertexRecord(labels, member.artin_trivial, multiplicity, _distance_exponents(member))


def h2(group: ClassGroup) -> int:
    """h_K(2), the order of the 2-torsion of the class group."""
    return len(two_torsion_subgroup(group))


# endregion

# region Decomposable representations


def _multiplicative_order(x: NfElement, bound: int = 24) -> int:
    power = x
    for k in range(1, bound + 1):
        if power == x.field.one():
            return k
        power = power * x
    raise ValueError(f"{x} is not a root of unity")


def character_order(gens: Sequence[Matrix2]) -> int:
    """Order of the character b/a of a decomposable representation, from the eigenvalue ratios."""
    order = 1
    for g in gens:
        t, n, delta = eigen_data(g)
        s = sqrt_in_field(delta)
        a, b = (t + s) / 2, (t - s) / 2
        k = _multiplicative_order(b / a)
        order = lcm(order, k)
    return order


def decomposable_side_branch(place, width: int) -> BranchReport:
    """The side branch at v_0 of the diagonal tube: v_0 and v_a^[n], a a unit, 1 <= n <= width."""
    v0 = root_vertex(place)
    foliage = []
    for n in range(1, width + 1):
        for a in residues_mod_power(place, n):
            if not a.is_zero and valuation_at(a, place) == 0:
                foliage.append(FoliageEntry(vertex(place, a, n), v0, n))
    vertices = [v0] + sorted(e.vertex for e in foliage)
    return BranchReport(place, BranchShape.EXPLICIT, vertices, [v0], foliage, width)


def _field_of_definition_of_root(chi_order: int, K: QuadraticField) -> bool:
    if chi_order <= 2:
        return K.is_rational
    if chi_order in (3, 6):
        return K.d == -3
    if chi_order == 4:
        return K.d == -1
    return False


def count_decomposable(
    chi_order: int, K: QuadraticField, options: CountingOptions = DEFAULT_OPTIONS
) -> CountReport:
    """
    Representations conjugate to diag(1, chi), chi of order ``chi_order``.

    h_K when chi_order is not a prime power; otherwise O * h_K with O the
    number of unit orbits on the side branch at v_0, which is 2 h_K when K is
    the field of definition of chi.

    Raises:
        FieldMismatchError: If chi_order is a prime power and K has no root of unity of that order.
    """
    if chi_order < 2:
        raise ValueError("the character must be non-trivial")
    G = options.class_group(K)
    h = G.order
    report = CountReport(0, CountingRule.DECOMPOSABLE_ORBITS, Classification.DECOMPOSABLE, K)
    report.chi_order = chi_order
    p = prime_power_base(chi_order)
    if p is None:
        report.total = h
        report.records = [VertexRecord((), True, h, {})]
        report.theorem = NON_PRIME_POWER_LABEL
        report.product = side_branch_product([], G)
        report.members = list(report.product.members)
        report.orbit_total = 1
        report.trace.append(f"{chi_order} is not a prime power: 1 - chi is a unit, count h_K = {h}")
        return report
    chi = root_of_unity(K, chi_order)
    branches = []
    for P in factor_rational_prime(p, K):
        width = valuation_at(1 - chi, P)
        if width:
            branches.append(decomposable_side_branch(P, width))
    product_ = side_branch_product(branches, G)
    matrices = [Matrix2.diag(K, 1, u) for u in unit_group_generators(K)]
    orbits = unit_orbits(product_.members, matrices)
    report.total = len(orbits) * h
    report.orbit_total = len(orbits)
    report.branches, report.product = branches, product_
    report.records = [_record(orbit[0], h) for orbit in orbits]
    report.members = [orbit[0] for orbit in orbits]
    report.trace.append(f"{len(orbits)} unit orbits on {len(product_)} side-branch vertices, times h_K = {h}")
    if _field_of_definition_of_root(chi_order, K):
        closed = 2 * h
        report.theorem = FIELD_OF_DEFINITION_LABEL
        report.trace.append(f"K is the field of definition of chi: closed form 2 h_K = {closed}")
        if closed != report.total:
            logger.warning("Decomposable count %d differs from the closed form %d", report.total, closed)
            report.trace.append(f"discrepancy: orbit count {report.total} vs closed form {closed}")
    logger.info("Decomposable count for chi of order %d over %s: %s", chi_order, K, report.total)
    return report


# endregion

# region Abelian representations


def squarefree_kernel(q: Fraction) -> int:
    """The squarefree d with q in d * (Q*)^2."""
    sign = -1 if q < 0 else 1
    return sign * core(abs(q.numerator * q.denominator))


def selectivity_check(K: QuadraticField, delta: NfElement, allow_infinite_ramification: bool = False) -> bool:
    """True iff K(sqrt(delta))/K is unramified, so that the order embeds in only half of the classes."""
    selective = relative_quadratic_unramified(K, delta, allow_infinite_ramification)
    if selective:
        logger.info("K(sqrt(%s))/%s is selective: containing orders fill half of the classes", delta, K)
    return selective


def _abelian_generator(gens: Sequence[Matrix2]) -> Matrix2:
    for g in gens:
        if not _is_split(g):
            return g
    raise FieldMismatchError("every generator has its eigenvalues in K")


def abelian_branches(
    gens: Sequence[Matrix2], K: QuadraticField, options: CountingOptions = DEFAULT_OPTIONS
) -> list[BranchReport]:
    """Branches at the places where they are not the single vertex v_0."""
    r = _abelian_generator(gens)
    _, _, delta = eigen_data(r)
    reports = []
    for P in relevant_places(K, delta):
        report = local_branch(r, P, options.bfs_depth_bound)
        if report.shape is BranchShape.APARTMENT_TUBE:
            if report.radius:
                raise UnsupportedFieldError(f"L/K splits at {P} with a tube of width {report.radius}")
            continue
        if len(gens) > 1 and report.stem:
            report = branch_bfs(
                gens,
                P,
                seeds=report.stem,
                depth_bound=options.bfs_depth_bound,
                bound=options.residue_enumeration_bound,
                stem=report.stem,
            )
        if report.vertices == [root_vertex(P)]:
            continue
        reports.append(report)
    return reports


def _is_field_of_definition(t: NfElement, n: NfElement, K: QuadraticField) -> bool:
    return K.is_rational or not (t.is_rational and n.is_rational)


def count_indecomposable_abelian(
    gens: Sequence[Matrix2], K: QuadraticField, options: CountingOptions = DEFAULT_OPTIONS
) -> CountReport:
    """
    Count representations whose image spans a quadratic extension L of K.

    Over the field of definition the count is h_{L/K} (h_L over Q). Otherwise
    it is h_{L/K} times the sum of mu_(1)/mu_{I'} over the Artin-trivial vertex
    tuples, I' the distance to the stem; a selective L/K whose stem is not
    Artin-trivial gives 0.

    Raises:
        ClassDataMissingError: When mu needs unit data for L that is not configured.
    """
    r = _abelian_generator(gens)
    t, n, delta = eigen_data(r)
    report = CountReport(0, CountingRule.ABELIAN_UNIT_SUM, Classification.INDECOMPOSABLE_ABELIAN, K)
    report.generators, report.delta = list(gens), delta
    reports = abelian_branches(gens, K, options)
    G = options.class_group(K)
    if any(not rep.vertices for rep in reports):
        empty = [rep.place.label for rep in reports if not rep.vertices]
        report.trace.append(f"no maximal order contains the image at {empty}: count 0")
        return report
    product_ = side_branch_product(reports, G)
    report.branches, report.product = reports, product_
    stem_tuple = tuple(rep.stem[0] for rep in reports)
    stem_member = next(m for m in product_.members if m.vertices == stem_tuple)
    data = options.class_data.find(K, delta) if not K.is_rational else None
    source = data.source if data else options.class_data.source

    if _is_field_of_definition(t, n, K):
        report.rule = CountingRule.ABELIAN_FIELD_OF_DEFINITION
        report.members = [stem_member]
        if K.is_rational:
            L = QuadraticField(squarefree_kernel(delta.rational()))
            h_L = options.class_group(L).order
            report.total = h_L
            report.records = [_record(stem_member, h_L)]
            report.trace.append(f"K = Q is the field of definition: count h_L = {h_L} for L = {L}")
        else:
            h_rel = data.h_rel if data else None
            report.records = [_record(stem_member, h_rel or 1)]
            report.total = h_rel if h_rel else SymbolicCount(1, "h_{L/K}", source)
            report.trace.append("K is the field of definition: count h_{L/K}")
        return report

    if selectivity_check(K, delta, options.allow_infinite_ramification) and not stem_member.artin_trivial:
        report.trace.append("selective extension and no stem order is isomorphic to M2(O_K): count 0")
        return report

    if h2(G) > 1:
        data = options.class_data.require(K, delta)
    u_generators = data.u_generators if data else ()
    units = data.units if data else ()
    mu = mu_function(K, delta, G, u_generators, units, options.unit_exponent_bound)
    mu_1 = mu({})
    report.trace.append(f"mu_(1) = {mu_1}")

    multiplier = 0
    for member in product_.artin_trivial_members():
        multiplicity = mu_1 // mu(place_exponents(member))
        multiplier += multiplicity
        report.records.append(_record(member, multiplicity))
        report.members.append(member)
    tuples = len(report.records)
    report.trace.append(f"sum of mu_(1)/mu_I' over {tuples} Artin-trivial tuples: {multiplier}")
    if units:
        matrices = [relative_matrix(u, eigen_root(r)) for u in units]
        orbit_total = 0
        for orbit in unit_orbits(product_.members, matrices):
            if orbit[0].artin_trivial:
                orbit_total += mu_1 // mu(place_exponents(orbit[0]))
        report.orbit_total = orbit_total
        if orbit_total != multiplier:
            logger.warning("Vertex bookkeeping gives %d, unit orbits give %d", multiplier, orbit_total)
            report.trace.append(f"discrepancy: unit orbits {orbit_total} vs vertices {multiplier}")

    if multiplier == 0:
        report.total = 0
    elif data is not None and data.h_rel is not None:
        report.total = multiplier * data.h_rel
    else:
        report.total = SymbolicCount(multiplier, "h_{L/K}", source)
    logger.info("Abelian count over %s: %s", K, report.total)
    return report


# endregion

# region Absolutely irreducible representations


def count_absolutely_irreducible(
    gens: Sequence[Matrix2], K: QuadraticField, options: CountingOptions = DEFAULT_OPTIONS
) -> CountReport:
    """h_K(2) times the number of vertex tuples of the branch product with trivial Artin distance to v_0."""
    integral, B = integral_conjugate(gens, options.group_order_bound)
    places = exceptional_places(integral, K, options.group_order_bound)
    branches = [
        branch_bfs(integral, P, depth_bound=options.bfs_depth_bound, bound=options.residue_enumeration_bound)
        for P in places
    ]
    G = options.class_group(K)
    product_ = side_branch_product(branches, G)
    multiplicity = h2(G)
    trivial = product_.artin_trivial_members()
    report = CountReport(
        multiplicity * len(trivial), CountingRule.IRREDUCIBLE_BRANCH, Classification.ABSOLUTELY_IRREDUCIBLE, K
    )
    report.branches, report.product, report.generators = branches, product_, integral
    report.base_change = B
    report.records = [_record(m, multiplicity) for m in trivial]
    report.members = trivial
    report.trace.append(
        f"exceptional places {[P.label for P in places]}; {len(trivial)} of {len(product_)} tuples are "
        f"Artin-trivial; h_K(2) = {multiplicity}"
    )
    logger.info("Absolutely irreducible count over %s: %d", K, report.total)
    return report


def dihedral_matrices(n: int, k: int = 1) -> tuple[QuadraticField, Matrix2, Matrix2]:
    """R = [[0, -1], [1, rho]] and S = [[0, 1], [1, 0]] over the field of definition of rho."""
    K, rho = dihedral_field(n, k)
    R = Matrix2(K.zero(), -K.one(), K.one(), rho)
    S = Matrix2.of(K, [[0, 1], [1, 0]])
    return K, R, S


def count_dihedral(n: int, k: int = 1, options: CountingOptions = DEFAULT_OPTIONS) -> CountReport:
    """
    2 h_K(2) when n is a prime power or twice one, h_K(2) otherwise, over K = Q(rho).

    Fields of definition of degree above 2 get a symbolic count.
    """
    special = prime_power_base(n) is not None or (n % 2 == 0 and prime_power_base(n // 2) is not None)
    factor = 2 if special else 1
    try:
        K, R, S = dihedral_matrices(n, k)
    except ValueError as e:
        if "degree" not in str(e):
            raise
        Q = QuadraticField.rationals()
        report = CountReport(
            SymbolicCount(factor, "h_K(2)", f"Q(zeta_{n} + zeta_{n}^-1)"),
            CountingRule.DIHEDRAL,
            Classification.ABSOLUTELY_IRREDUCIBLE,
            Q,
        )
        report.trace.append(str(e))
        return report
    G = options.class_group(K)
    closed = factor * h2(G)
    oracle = count_absolutely_irreducible([R, S], K, options)
    report = CountReport(closed, CountingRule.DIHEDRAL, Classification.ABSOLUTELY_IRREDUCIBLE, K)
    report.records, report.members = oracle.records, oracle.members
    report.branches, report.product = oracle.branches, oracle.product
    report.generators = [R, S]
    report.trace.append(f"n = {n}: closed form {factor} h_K(2) = {closed}")
    report.trace.extend(oracle.trace)
    if oracle.total != closed:
        logger.warning("Dihedral closed form %d differs from the branch count %d", closed, oracle.total)
        report.trace.append(f"discrepancy: branch count {oracle.total}")
    return report


# endregion


def branch_at_place(
    rep: RepSpec, place: PrimePlace, depth: int = 2, options: CountingOptions = DEFAULT_OPTIONS
) -> Optional[BranchReport]:
    """
    The branch of the group image at one place, or None where it is the single vertex v_0.

    Apartment tubes of decomposable representations are truncated at ``depth``
    around the projection of v_0.
    """
    if place.field != rep.field:
        raise FieldMismatchError(f"{place} is not a place of {rep.field}")
    result = classify(rep, options.group_order_bound)
    if result.classification is Classification.DECOMPOSABLE:
        tubes = [branch_split(g, place, depth) for g in rep.generators if not g.is_scalar]
        return min(tubes, key=lambda report: report.radius, default=None)
    if result.classification is Classification.INDECOMPOSABLE_ABELIAN:
        reports = abelian_branches(rep.generators, rep.field, options)
    else:
        integral, _ = integral_conjugate(rep.generators, options.group_order_bound)
        if place not in exceptional_places(integral, rep.field, options.group_order_bound):
            return None
        reports = [
            branch_bfs(
                integral,
                place,
                depth_bound=options.bfs_depth_bound,
                bound=options.residue_enumeration_bound,
            )
        ]
    return next((report for report in reports if report.place == place), None)


def theta_multiplicity(
    classification: Classification,
    K: QuadraticField,
    mu_1: int = 1,
    options: CountingOptions = DEFAULT_OPTIONS,
) -> int:
    """Classes of representations per maximal order: h_K(2) / |Theta|."""
    if K.is_rational:
        return 1
    h = h2(options.class_group(K))
    if classification is Classification.INDECOMPOSABLE_ABELIAN:
        return h // mu_1
    return h


class CountingService:
    """
    Counting service: dispatches a representation to the counting rule of its classification.
    """

    def __init__(self, options: CountingOptions = DEFAULT_OPTIONS):
        self.options = options

    def classify(self, rep: RepSpec) -> ClassificationResult:
        return classify(rep, self.options.group_order_bound)

    def count(self, rep: RepSpec) -> CountReport:
        result = self.classify(rep)
        K = rep.field
        k = _dihedral_parameter(rep)
        if k is not None:
            report = count_dihedral(rep.order, k, self.options)
            report.trace.insert(0, result.witness)
            return report
        if result.classification is Classification.DECOMPOSABLE:
            report = count_decomposable(character_order(rep.generators), K, self.options)
        elif result.classification is Classification.INDECOMPOSABLE_ABELIAN:
            report = count_indecomposable_abelian(rep.generators, K, self.options)
        else:
            report = count_absolutely_irreducible(rep.generators, K, self.options)
        report.trace.insert(0, result.witness)
        return report

    def count_decomposable(self, chi_order: int, K: QuadraticField) -> CountReport:
        return count_decomposable(chi_order, K, self.options)

    def count_dihedral(self, n: int, k: int = 1) -> CountReport:
        return count_dihedral(n, k, self.options)

    def selectivity_check(self, K: QuadraticField, delta: NfElement) -> bool:
        return selectivity_check(K, delta, self.options.allow_infinite_ramification)

    def theta_multiplicity(self, classification: Classification, K: QuadraticField, mu_1: int = 1) -> int:
        return theta_multiplicity(classification, K, mu_1, self.options)

    def branch_at_place(self, rep: RepSpec, place: PrimePlace, depth: int = 2) -> Optional[BranchReport]:
        return branch_at_place(rep, place, depth, self.options)


def _dihedral_parameter(rep: RepSpec) -> Optional[int]:
    """The k for which the images are the standard R, S of zeta_n^k + zeta_n^-k, if any."""
    n = rep.order
    if rep.group is not GroupKind.DIHEDRAL or not n or n < 3:
        return None
    for k in range(1, n // 2 + 1):
        if gcd(k, n) != 1:
            continue
        try:
            K, R, S = dihedral_matrices(n, k)
        except ValueError:
            return None
        if K == rep.field and rep.images.get("a") == R and rep.images.get("b") == S:
            return k
    return None
