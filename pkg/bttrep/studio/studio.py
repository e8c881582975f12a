"""
Studio

This module provides the main BttStudio class, the high-level interface the
command line tool drives. It coordinates the counting and synthesis services
and speaks in the pydantic parameter objects of ``bttrep.studio.schemas``.
"""

import json
import logging
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from sympy import primerange

from bttrep.arithmetic.classgroup import two_torsion_subgroup
from bttrep.arithmetic.cyclotomic import dihedral_field
from bttrep.arithmetic.ideals import PrimePlace, factor_rational_prime, place_by_label
from bttrep.arithmetic.matrix import Matrix2
from bttrep.arithmetic.numfield import (
    NfElement,
    QuadraticField,
    fundamental_unit,
    parse_field,
    root_of_unity,
    torsion_generator,
)
from bttrep.core.errors import FieldMismatchError, SymbolicCountError, UnsupportedFieldError
from bttrep.core.models import BranchShape, GroupKind
from bttrep.services.counting.counting import CountReport, RepSpec, default_relators, dihedral_matrices
from bttrep.studio.protocols import CountingServiceProtocol, SynthesisServiceProtocol
from bttrep.studio.regression import RegressionCase, default_cases, run_regression
from bttrep.studio.schemas import (
    EnumerationOutput,
    FieldInfoOutput,
    GroupInput,
    JobSpec,
    RepresentativeOutput,
)
from bttrep.tree.branch import BranchReport
from bttrep.tree.dot import branch_to_dot
from bttrep.tree.localtree import root_vertex

logger = logging.getLogger(__name__)

SMALL_PRIME_BOUND = 30


def _coerce(x: NfElement, K: QuadraticField) -> NfElement:
    if x.field == K:
        return x
    if x.is_rational:
        return K.element(x.rational())
    raise FieldMismatchError(f"{x} is not in {K}")


def _matrix_in(m: Matrix2, K: QuadraticField) -> Matrix2:
    return Matrix2(*(_coerce(x, K) for x in m.entries()))


def _character_trace(n: int, k: int) -> tuple[QuadraticField, NfElement]:
    try:
        return dihedral_field(n, k)
    except ValueError as e:
        raise UnsupportedFieldError(str(e), order=n) from e


def standard_images(
    group: GroupInput, K: Optional[QuadraticField]
) -> tuple[QuadraticField, dict[str, Matrix2]]:
    """
    Generator images for a job that gives none.

    Cyclic groups map to diag(1, zeta^k) when zeta is in K, and to the companion
    matrix of x^2 - (zeta^k + zeta^-k) x + 1 otherwise. Dihedral groups use the
    standard R, S; the quaternion group uses i -> [[0, 1], [-1, 0]], j -> diag(i, -i).

    Raises:
        FieldMismatchError: If the character is not defined over K.
        UnsupportedFieldError: If its field of definition has degree above 2.
    """
    n, k = group.order, group.character
    if group.kind is GroupKind.CYCLIC:
        try:
            return K, {"a": Matrix2.diag(K, 1, root_of_unity(K, n) ** k)}
        except FieldMismatchError:
            logger.debug("%s has no primitive %d-th root of unity, using a companion matrix", K, n)
        _, rho = _character_trace(n, k)
        return K, {"a": Matrix2(K.zero(), -K.one(), K.one(), _coerce(rho, K))}
    if group.kind is GroupKind.DIHEDRAL:
        _character_trace(n, k)
        K_rho, R, S = dihedral_matrices(n, k)
        if K is None or K == K_rho:
            return K_rho, {"a": R, "b": S}
        return K, {"a": _matrix_in(R, K), "b": _matrix_in(S, K)}
    if group.kind is GroupKind.QUATERNION8:
        i = root_of_unity(K, 4)
        return K, {"a": Matrix2.of(K, [[0, 1], [-1, 0]]), "b": Matrix2.diag(K, i, -i)}
    raise ValueError("presentations need explicit generator matrices")


class BttStudio:
    """
    BttStudio is the main class for counting and constructing integral representations.

    This class provides an interface for:
    - Turning job specifications into representations
    - Counting their integral conjugacy classes
    - Enumerating verified representatives
    - Exporting local branches as graphviz dot
    - Field utilities and the regression corpus

    The studio uses dependency injection for the counting and synthesis services.
    """

    def __init__(
        self,
        counting_service: CountingServiceProtocol,
        synthesis_service: SynthesisServiceProtocol,
        branch_depth: int = 2,
    ):
        """
        Initialize the studio with required services.

        Args:
            counting_service: Service classifying and counting representations.
            synthesis_service: Service building representatives.
            branch_depth: Default truncation depth of apartment tubes in dot exports.
        """
        self.counting_service = counting_service
        self.synthesis_service = synthesis_service
        self.branch_depth = branch_depth

    # region Jobs

    @staticmethod
    def load_job(path: str | Path) -> JobSpec:
        """
        Load and validate a job file.

        Raises:
            FileNotFoundError: If the file does not exist.
            pydantic.ValidationError: If the job does not match the schema.
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Job file not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            return JobSpec.model_validate(json.load(f))

    def build_rep(self, job: JobSpec) -> RepSpec:
        """
        The representation a job describes.

        Raises:
            RelatorError: If the images violate the relators.
        """
        K = job.parsed_field()
        images = job.parsed_generators()
        if images is None:
            K, images = standard_images(job.group, K)
        relators = job.group.relators or default_relators(job.group.kind, job.group.order)
        rep = RepSpec(job.group.kind, K, images, list(relators), job.group.order)
        rep.check_relators()
        return rep

    # endregion

    # region Counting

    def _prepare(self, job: JobSpec) -> tuple[Optional[RepSpec], CountReport]:
        group = job.group
        if group.kind is GroupKind.DIHEDRAL and job.field is None and not job.generators:
            report = self.counting_service.count_dihedral(group.order, group.character)
            if report.is_symbolic:
                return None, report
            return self.build_rep(job), report
        rep = self.build_rep(job)
        return rep, self.counting_service.count(rep)

    def count(self, job: JobSpec) -> CountReport:
        """
        Count the integral conjugacy classes of the job's representation.

        Returns:
            The count report; its total is symbolic when degree-4 class data is missing.
        """
        _, report = self._prepare(job)
        logger.info("Count for %s: %s", job.group.kind.value, report.total)
        return report

    # endregion

    # region Enumeration

    def enumerate(self, job: JobSpec) -> EnumerationOutput:
        """
        One verified representative per conjugacy class.

        Raises:
            SymbolicCountError: If the count is only known symbolically.
        """
        rep, report = self._prepare(job)
        if report.is_symbolic:
            raise SymbolicCountError(f"the count {report.total} is symbolic", report=report)
        representatives = self.synthesis_service.synthesize_representatives(rep, report)
        letters = sorted(rep.images)
        verified = len(representatives) == report.total and all(
            self.synthesis_service.verify_integral_rep(r.generators, rep.relators, letters)
            for r in representatives
        )
        return EnumerationOutput(
            count=report.total,
            field=str(rep.field),
            rule=report.rule.value,
            representatives=[RepresentativeOutput(**r.to_dict()) for r in representatives],
            verified=verified,
        )

    # endregion

    # region Branches

    def _branch(
        self, job: JobSpec, place_label: str, depth: Optional[int]
    ) -> tuple[PrimePlace, Optional[BranchReport]]:
        rep = self.build_rep(job)
        place = place_by_label(rep.field, place_label)
        depth = self.branch_depth if depth is None else depth
        return place, self.counting_service.branch_at_place(rep, place, depth)

    def branch_report(
        self, job: JobSpec, place_label: str, depth: Optional[int] = None
    ) -> Optional[BranchReport]:
        """The branch at one place, None where it is the single vertex v_0."""
        return self._branch(job, place_label, depth)[1]

    def branch(
        self,
        job: JobSpec,
        place_label: str,
        dot_path: Optional[str | Path] = None,
        depth: Optional[int] = None,
    ) -> str:
        """
        Export the branch at one place as graphviz dot.

        Places where the branch is only v_0 give the single-vertex graph with a note.

        Args:
            job: The representation.
            place_label: Place label such as ``"2_1"`` or ``"3"``.
            dot_path: Where to write the dot file, if anywhere.
            depth: Truncation depth for apartment tubes.

        Returns:
            The dot source.
        """
        place, report = self._branch(job, place_label, depth)
        note = ""
        if report is None:
            v0 = root_vertex(place)
            report = BranchReport(place, BranchShape.VERTEX_BALL, [v0], [v0], [])
            note = f"{place.label} is not exceptional: the branch is v_0 alone"
            logger.warning("Place %s is not exceptional for this representation", place.label)
        source = branch_to_dot(report, title=f"branch at {place.label}", note=note)
        if dot_path is not None:
            Path(dot_path).write_text(source, encoding="utf-8")
            logger.info("Wrote the branch at %s to %s", place.label, dot_path)
        return source

    # endregion

    # region Field utilities

    def field_info(self, descriptor: str) -> FieldInfoOutput:
        """Discriminant, ring basis, class group, units and small-prime factorizations of a field."""
        K = parse_field(descriptor)
        G = self.counting_service.options.class_group(K)
        torsion, order = torsion_generator(K)
        primes = {}
        for p in primerange(2, SMALL_PRIME_BOUND):
            primes[str(p)] = [
                {"label": P.label, "kind": P.kind.value, "ideal": str(P.ideal)}
                for P in factor_rational_prime(int(p), K)
            ]
        return FieldInfoOutput(
            field=str(K),
            discriminant=K.discriminant,
            ring_basis=[str(b) for b in K.basis()],
            class_number=G.order,
            class_group_structure=list(G.orders),
            two_torsion=[str(ideal) for _, ideal in two_torsion_subgroup(G)],
            torsion_unit=str(torsion),
            torsion_order=order,
            fundamental_unit=str(fundamental_unit(K)) if K.is_real else None,
            primes=primes,
        )

    # endregion

    # region Regression

    def verify_paper(
        self, name_filter: Optional[str] = None, cases: Optional[Sequence[RegressionCase]] = None
    ) -> pd.DataFrame:
        """
        Run the regression corpus.

        Args:
            name_filter: A tag or a substring of case names selecting the cases to run.
            cases: The corpus; the shipped one by default.

        Returns:
            One row per case with columns case, group, expected, actual, passed.
        """
        return run_regression(self, default_cases() if cases is None else cases, name_filter)

    # endregion
