"""
Explicit integral representatives for counted classes.

A class is labelled by a vertex tuple of the side-branch product and an ideal
class A of K. Its representative is obtained from the input generators by
conjugating with a matrix whose columns are a free basis of the lattice
{(x + c t, t) : x in A N, t in A}, where N is the distance ideal of the tuple
and c matches the centers of its vertices. The lattice is free exactly when
A^2 N is principal; for decomposable representations N may be moved along
the diagonal apartment by an ideal D to reach every class A.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from sympy import primefactors

from bttrep.arithmetic.classgroup import ClassGroup, is_principal, two_torsion_subgroup
from bttrep.arithmetic.ideals import (
    FracIdeal,
    PrimePlace,
    crt_approximate,
    ideal_valuation,
    module_hnf,
    places_over,
    valuation_at,
)
from bttrep.arithmetic.matrix import Matrix2, eigen_data, evaluate_word
from bttrep.arithmetic.numfield import NfElement, QuadraticField, sqrt_in_field
from bttrep.core.errors import ApproximationError, SymbolicCountError, UnsupportedFieldError
from bttrep.core.models import Classification, CountingRule
from bttrep.services.counting.counting import (
    DEFAULT_OPTIONS,
    CountingOptions,
    CountReport,
    RepSpec,
    place_exponents,
)
from bttrep.services.counting.units import mu_invariants
from bttrep.tree.branch import ProductVertex
from bttrep.tree.localtree import TreeVertex, lattice_to_vertex, vertex

logger = logging.getLogger(__name__)

Vector = tuple[NfElement, NfElement]


# region Strong approximation


@dataclass(frozen=True)
class ApproxTarget:
    place: PrimePlace
    target: Matrix2
    precision: int

    def __post_init__(self):
        if self.target.det != self.target.field.one():
            raise ValueError(f"target {self.target} does not have determinant 1")


def _upper(K: QuadraticField, s) -> Matrix2:
    return Matrix2.of(K, [[1, s], [0, 1]])


def _lower(K: QuadraticField, s) -> Matrix2:
    return Matrix2.of(K, [[1, 0], [s, 1]])


def _shift_for(targets: Sequence[ApproxTarget]) -> int:
    # U(s) * T has a non-zero upper right entry at every target
    s = 0
    while any((t.target.b + s * t.target.d).is_zero for t in targets):
        s += 1
    return s


def _parameters(target: Matrix2, s: int) -> tuple[NfElement, NfElement, NfElement]:
    """(x, b, y) with U(s) * target = L(x) U(b) L(y)."""
    a, b = target.a + s * target.c, target.b + s * target.d
    return (target.d - 1) / b, b, (a - 1) / b


def _min_valuation(values: Sequence[NfElement], P: PrimePlace) -> int:
    return min((valuation_at(x, P) for x in values if not x.is_zero), default=0)


def _meets_contract(T: Matrix2, target: ApproxTarget) -> bool:
    for x, y in zip(T.entries(), target.target.entries()):
        difference = x - y
        if not difference.is_zero and valuation_at(difference, target.place) <= target.precision:
            return False
    return True


def sl2_approximate(targets: Sequence[ApproxTarget], retries: int = 6) -> Matrix2:
    """
    A global matrix of determinant 1 close to each target at its place and integral elsewhere.

    Each target is written as U(-s) L(x) U(b) L(y) and the three parameters
    are approximated simultaneously by CRT. The precision is raised by 2 on
    every retry until the entry-wise contract holds.

    Raises:
        ApproximationError: If the contract still fails after ``retries`` attempts.
    """
    if not targets:
        raise ValueError("no approximation targets")
    if len({t.place for t in targets}) != len(targets):
        raise ValueError("approximation places must be pairwise distinct")
    K = targets[0].target.field
    s = _shift_for(targets)
    parameters = [_parameters(t.target, s) for t in targets]
    for attempt in range(retries):
        globals_ = []
        for k in range(3):
            crt_targets = []
            for t, params in zip(targets, parameters):
                slack = max(0, -_min_valuation(params, t.place))
                crt_targets.append((t.place, params[k], t.precision + 2 * slack + 2 * attempt))
            globals_.append(crt_approximate(crt_targets))
        x, b, y = globals_
        T = _upper(K, -s) * _lower(K, x) * _upper(K, b) * _lower(K, y)
        if all(_meets_contract(T, t) for t in targets):
            logger.debug("Strong approximation met its contract after %d attempt(s)", attempt + 1)
            return T
        logger.debug("Strong approximation attempt %d missed its contract, raising precision", attempt + 1)
    places = [t.place.label for t in targets]
    raise ApproximationError(f"no approximation after {retries} attempts", places=places)


# endregion

# region Free bases and conjugators


def _small_elements(I: FracIdeal, bound: int = 3) -> list[NfElement]:
    basis = I.basis()
    elements = [
        sum((c * b for c, b in zip(coeffs, basis)), I.field.zero())
        for coeffs in product(range(-bound, bound + 1), repeat=len(basis))
        if any(coeffs)
    ]
    return sorted(elements, key=lambda x: (abs(x.norm()), x.sort_key()))


def _solve_in_basis(target: NfElement, v1: NfElement, v2: NfElement) -> Optional[tuple[int, int]]:
    """Integers (s1, s2) with s1 v1 + s2 v2 = target, if any."""
    K = target.field
    (p, q), (r, s), (e, f) = K.to_basis(v1), K.to_basis(v2), K.to_basis(target)
    det = p * s - q * r
    s1, s2 = (e * s - f * r) / det, (p * f - q * e) / det
    if Fraction(s1).denominator == 1 and Fraction(s2).denominator == 1:
        return int(s1), int(s2)
    return None


def product_module_hnf(I: FracIdeal, J: FracIdeal):
    """HNF of I x J as a Z-lattice, comparable with ``module_hnf`` of spanning vectors."""
    K = I.field
    vectors = [(x, K.zero()) for x in I.basis()] + [(K.zero(), y) for y in J.basis()]
    return module_hnf(vectors)


def free_basis_of_ideal_pair(I: FracIdeal, J: FracIdeal) -> Optional[tuple[Vector, Vector]]:
    """
    Two vectors forming an O_K-basis of I x J, or None when I J is not principal.

    With I J = (gamma): pick a in I and b in J with a I^-1 + b J^-1 = O_K; then
    gamma = a d - b c for some c in I, d in J, and (a, b), (c, d) is a basis.
    """
    if I.field != J.field:
        raise ValueError("ideals in different fields")
    K = I.field
    gamma = is_principal(I * J)
    if gamma is None:
        return None
    alpha = is_principal(I)
    if alpha is not None:
        basis = ((alpha, K.zero()), (K.zero(), gamma / alpha))
    else:
        basis = _bezout_basis(I, J, gamma)
    if module_hnf(list(basis)) != product_module_hnf(I, J):
        raise ValueError(f"vectors {basis} do not span {I} x {J}")
    return basis


def _bezout_basis(I: FracIdeal, J: FracIdeal, gamma: NfElement) -> tuple[Vector, Vector]:
    K = I.field
    unit = FracIdeal.unit(K)
    I_inv, J_inv = I.inverse(), J.inverse()
    i1, i2 = I.basis()
    j1, j2 = J.basis()
    for a in _small_elements(I):
        for b in _small_elements(J):
            generators = [a * x for x in I_inv.basis()] + [b * y for y in J_inv.basis()]
            if FracIdeal.from_generators(K, generators) != unit:
                continue
            index = int(abs((FracIdeal.principal(a) * J).norm() / gamma.norm()))
            for t1 in range(index):
                for t2 in range(index):
                    coords = _solve_in_basis(gamma - t1 * b * i1 - t2 * b * i2, a * j1, a * j2)
                    if coords is None:
                        continue
                    d = coords[0] * j1 + coords[1] * j2
                    c = -(t1 * i1 + t2 * i2)
                    logger.debug("Free basis of %s x %s from a = %s, b = %s", I, J, a, b)
                    return (a, b), (c, d)
    raise ValueError(f"no coprime pair found in {I} x {J}")


def _level_ideal(K: QuadraticField, vertices: Sequence[TreeVertex]) -> FracIdeal:
    ideal = FracIdeal.unit(K)
    for v in vertices:
        ideal = ideal * v.place.ideal**v.level
    return ideal


def conjugator_to_vertices(K: QuadraticField, vertices: Sequence[TreeVertex]) -> Matrix2:
    """
    T = [[a, eta], [1, 0]] carrying M2(O_K) to the order of each vertex at its place and fixing it elsewhere.

    eta generates the product of P^level and a matches every center modulo P^level.

    Raises:
        UnsupportedFieldError: If the product of P^level is not principal.
    """
    eta = is_principal(_level_ideal(K, vertices))
    if eta is None:
        labels = [v.label for v in vertices]
        raise UnsupportedFieldError(f"the level ideal of {labels} is not principal")
    targets = [(v.place, v.center, v.level - 1) for v in vertices if v.level > 0]
    a = crt_approximate(targets) if targets else K.zero()
    return Matrix2(a, eta, K.one(), K.zero())


def conjugator_to_vertex(v: TreeVertex) -> Matrix2:
    return conjugator_to_vertices(v.place.field, [v])


@dataclass(frozen=True)
class CosetRep:
    index: int
    class_index: int
    ideal: FracIdeal
    matrix: Matrix2


def normalizer_coset_reps(group: ClassGroup) -> list[CosetRep]:
    """One matrix per non-trivial 2-torsion class J, its columns a free basis of J x J."""
    reps = []
    torsion = two_torsion_subgroup(group)
    for index, (class_index, J) in enumerate(torsion):
        if class_index == 0:
            continue
        basis = free_basis_of_ideal_pair(J, J)
        assert basis is not None, "J^2 is principal for a 2-torsion class"
        (x1, y1), (x2, y2) = basis
        reps.append(CosetRep(index, class_index, J, Matrix2(x1, x2, y1, y2)))
    return reps


# endregion

# region Representatives


def verify_integral_rep(
    matrices: Sequence[Matrix2], relators: Sequence[str], letters: Optional[Sequence[str]] = None
) -> bool:
    """
    True iff every matrix lies in GL2(O_K) and every relator evaluates to the identity.

    The matrices are the images of ``letters``, by default a, b, c, ... in order.
    """
    if not matrices:
        return False
    if not all(m.is_integral and not m.det.is_zero and m.det.inverse().is_integral for m in matrices):
        return False
    images = dict(zip(letters or "abcdefgh", matrices))
    field_ = matrices[0].field
    try:
        return all(evaluate_word(word, images, field_).is_identity for word in relators)
    except KeyError:
        return False


@dataclass(frozen=True)
class Representative:
    vertex: str
    coset: int
    generators: tuple[Matrix2, ...]
    conjugator: Matrix2
    conjugated_at: Optional[str] = None

    @property
    def label(self) -> dict:
        label = {"vertex": self.vertex, "coset": self.coset}
        if self.conjugated_at is not None:
            label["conjugated_at"] = self.conjugated_at
        return label

    def to_dict(self) -> dict:
        return {"label": self.label, "generators": [m.to_strings() for m in self.generators]}


def eigenbasis(gens: Sequence[Matrix2]) -> Matrix2:
    """Columns are common eigenvectors of commuting matrices with eigenvalues in K."""
    K = gens[0].field
    for g in gens:
        if g.is_scalar:
            continue
        t, _, delta = eigen_data(g)
        s = sqrt_in_field(delta)
        if s is None:
            raise UnsupportedFieldError(f"{g} has no eigenvalues in {K}")
        columns = []
        for lam in ((t + s) / 2, (t - s) / 2):
            if not g.c.is_zero:
                columns.append((lam - g.d, g.c))
            elif not g.b.is_zero:
                columns.append((g.b, lam - g.a))
            else:
                columns.append((K.one(), K.zero()) if g.a == lam else (K.zero(), K.one()))
        (x1, y1), (x2, y2) = columns
        return Matrix2(x1, x2, y1, y2)
    return Matrix2.identity(K)


def _left_eigenvector(m: Matrix2, lam: NfElement) -> Vector:
    K = m.field
    if not m.c.is_zero:
        return m.c, lam - m.a
    if not m.b.is_zero:
        return lam - m.d, m.b
    return (K.one(), K.zero()) if m.a == lam else (K.zero(), K.one())


def locate_decomposable_vertex(base: Matrix2, conjugate: Matrix2, place: PrimePlace) -> TreeVertex:
    """
    The side-branch vertex at v_0 of the lattice T O_K^2, where base T = T conjugate.

    ``base`` is diagonal. T is determined up to the diagonal torus, so the
    vertex is moved along the apartment into the side branch at v_0; the
    answer is defined up to the unit action.
    """
    if not base.is_diagonal:
        raise ValueError("the base representation must be diagonal")
    (x1, y1), (x2, y2) = _left_eigenvector(conjugate, base.a), _left_eigenvector(conjugate, base.d)
    T = Matrix2(x1, y1, x2, y2)
    v = lattice_to_vertex(list(T.columns()), place)
    k = v.level if v.center.is_zero else min(v.level, valuation_at(v.center, place))
    return vertex(place, v.center / place.uniformizer**k, v.level - k)


def ideal_exponents(D: FracIdeal) -> dict[PrimePlace, int]:
    """The places dividing the integral ideal D with their exponents."""
    if not D.is_integral:
        raise ValueError(f"{D} is not integral")
    places = places_over(primefactors(int(D.norm())), D.field)
    return {P: k for P in places if (k := ideal_valuation(D, P))}


def lattice_conjugator(
    K: QuadraticField, vertices: Sequence[TreeVertex], A: FracIdeal, D: Optional[FracIdeal] = None
) -> Matrix2:
    """
    A matrix whose columns are a free basis of {(x + c t, t) : x in A N, t in A}.

    N is D times the product of P^level. c matches every center modulo
    P^level; at a place with v_P(D) = k > 0 the lattice is moved along the
    apartment by diag(pi^k, 1), so c matches pi^k times the center modulo
    P^(level + k) there.

    Args:
        K: The field.
        vertices: One vertex per place, in canonical form.
        A: The ideal class of the second coordinate.
        D: An integral ideal, the unit ideal by default.

    Raises:
        UnsupportedFieldError: If A^2 N is not principal, so the lattice is not free.
    """
    D = D or FracIdeal.unit(K)
    shifts = ideal_exponents(D)
    centers = {v.place: (v.level, v.center) for v in vertices}
    targets = []
    for P in list(centers) + [P for P in shifts if P not in centers]:
        (level, center), k = centers.get(P, (0, K.zero())), shifts.get(P, 0)
        if level + k:
            targets.append((P, P.uniformizer**k * center, level + k - 1))
    c = crt_approximate(targets) if targets else K.zero()
    N = D * _level_ideal(K, vertices)
    basis = free_basis_of_ideal_pair(A * N, A)
    if basis is None:
        raise UnsupportedFieldError(f"the lattice of {[v.label for v in vertices]} over {A} is not free")
    (x1, y1), (x2, y2) = basis
    return Matrix2.of(K, [[1, c], [0, 1]]) * Matrix2(x1, x2, y1, y2)


def square_roots(group: ClassGroup, i: int) -> list[int]:
    """The classes x with x^2 = i; a coset of the 2-torsion, or empty when i is not a square."""
    return [x for x in range(group.order) if group.mul(x, x) == i]


def inverse_class(group: ClassGroup, i: int) -> int:
    return group.power(i, group.order - 1)


def _shift_label(D: FracIdeal) -> Optional[str]:
    exponents = ideal_exponents(D)
    return " x ".join(f"{P.label}^{k}" for P, k in exponents.items()) or None


def _coset_representatives(full: Sequence[int], sub: Sequence[int], group: ClassGroup) -> list[int]:
    chosen: list[int] = []
    for x in sorted(full):
        if all(group.mul(x, y) not in sub for y in chosen):
            chosen.append(x)
    return chosen


class SynthesisService:
    """
    Synthesis service: builds verified representatives for every class a ``CountReport`` counts.
    """

    def __init__(self, options: CountingOptions = DEFAULT_OPTIONS, approximation_retries: int = 6):
        self.options = options
        self.approximation_retries = approximation_retries

    def sl2_approximate(self, targets: Sequence[ApproxTarget]) -> Matrix2:
        return sl2_approximate(targets, self.approximation_retries)

    def free_basis_of_ideal_pair(self, I: FracIdeal, J: FracIdeal) -> Optional[tuple[Vector, Vector]]:
        return free_basis_of_ideal_pair(I, J)

    def conjugator_to_vertex(self, v: TreeVertex) -> Matrix2:
        return conjugator_to_vertex(v)

    def normalizer_coset_reps(self, K: QuadraticField) -> list[CosetRep]:
        return normalizer_coset_reps(self.options.class_group(K))

    def verify_integral_rep(
        self, matrices: Sequence[Matrix2], relators: Sequence[str], letters: Optional[Sequence[str]] = None
    ) -> bool:
        return verify_integral_rep(matrices, relators, letters)

    def synthesize_representatives(self, rep: RepSpec, report: CountReport) -> list[Representative]:
        """
        Exactly ``report.total`` representatives, each integral, relator-exact and distinctly labelled.

        Decomposable classes run over every ideal class A of K; the others over
        the square roots of the inverse distance class, one coset of the
        2-torsion, cut down by the unit image for abelian representations.

        Raises:
            SymbolicCountError: If the count is only known symbolically.
            UnsupportedFieldError: If the count needs ideal classes of the
                quartic field L = K(sqrt(delta)).
        """
        if report.is_symbolic:
            raise SymbolicCountError(f"the count {report.total} is symbolic", report=report)
        if report.total == 0:
            return []
        K = rep.field
        G = self.options.class_group(K)
        decomposable = report.classification is Classification.DECOMPOSABLE

        if decomposable:
            base_change = eigenbasis(rep.generators)
            gens = [g.conjugate_by(base_change) for g in rep.generators]
        else:
            base_change = report.base_change or Matrix2.identity(K)
            gens = report.generators or rep.generators

        result = []
        for member, classes in zip(report.members, self._classes_per_member(report, G)):
            level_class = G.class_of(_level_ideal(K, member.vertices))
            for class_index in classes:
                D = None
                if decomposable:
                    square = G.mul(class_index, class_index)
                    D = G.representatives[inverse_class(G, G.mul(square, level_class))]
                C = lattice_conjugator(K, member.vertices, G.representatives[class_index], D)
                images = tuple(g.conjugate_by(C) for g in gens)
                if not verify_integral_rep(images, rep.relators, sorted(rep.images)):
                    raise UnsupportedFieldError(f"conjugating by {C} gives a non-integral representation")
                shifted = _shift_label(D) if D is not None else None
                result.append(Representative(member.label, class_index, images, base_change * C, shifted))
        if len(result) != report.total:
            logger.warning("Synthesized %d representatives for a count of %s", len(result), report.total)
        logger.info("Synthesized %d representatives over %s", len(result), K)
        return result

    def _classes_per_member(self, report: CountReport, G: ClassGroup) -> list[list[int]]:
        if report.classification is Classification.DECOMPOSABLE:
            return [list(range(G.order)) for _ in report.members]
        K = report.field
        roots = [
            square_roots(G, inverse_class(G, G.class_of(_level_ideal(K, member.vertices))))
            for member in report.members
        ]
        if report.classification is not Classification.INDECOMPOSABLE_ABELIAN:
            return roots
        if report.rule is CountingRule.ABELIAN_FIELD_OF_DEFINITION:
            if report.total != 1:
                raise UnsupportedFieldError(
                    f"representatives for h_{{L/K}} = {report.total} need the quartic field L"
                )
            return [r[:1] for r in roots]
        delta = report.delta
        data = self.options.class_data.find(K, delta)
        if data is not None and data.h_rel not in (None, 1):
            raise UnsupportedFieldError(
                f"representatives for h_{{L/K}} = {data.h_rel} need the quartic field L"
            )
        u_generators = data.u_generators if data else ()
        units = data.units if data else ()

        def image(member: Optional[ProductVertex]) -> tuple[int, ...]:
            exponents = {} if member is None else {P: k for P, k in place_exponents(member).items() if k}
            bound = self.options.unit_exponent_bound
            return mu_invariants(K, delta, exponents, G, u_generators, units, bound).classes

        full = image(None)
        return [
            [G.mul(r[0], t) for t in _coset_representatives(full, image(member), G)] if r else []
            for member, r in zip(report.members, roots)
        ]


# endregion
