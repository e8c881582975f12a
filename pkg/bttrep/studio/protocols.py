"""
Studio Protocols

This module defines protocol interfaces for the services used by the studio.
"""

from typing import Optional, Protocol, Sequence

from bttrep.arithmetic.ideals import FracIdeal, PrimePlace
from bttrep.arithmetic.matrix import Matrix2
from bttrep.arithmetic.numfield import NfElement, QuadraticField
from bttrep.core.models import Classification
from bttrep.services.counting.counting import ClassificationResult, CountingOptions, CountReport, RepSpec
from bttrep.services.synthesis.synthesis import ApproxTarget, CosetRep, Representative
from bttrep.tree.branch import BranchReport
from bttrep.tree.localtree import TreeVertex


class CountingServiceProtocol(Protocol):
    """
    Protocol for the Counting Service.

    Defines the interface that any counting service must implement
    to be compatible with the studio.
    """

    options: CountingOptions

    def classify(self, rep: RepSpec) -> ClassificationResult:
        """Classify a representation."""
        ...

    def count(self, rep: RepSpec) -> CountReport:
        """Count the integral conjugacy classes of a representation."""
        ...

    def count_decomposable(self, chi_order: int, K: QuadraticField) -> CountReport:
        """Count decomposable representations with a character of the given order."""
        ...

    def count_dihedral(self, n: int, k: int = 1) -> CountReport:
        """Count integral representations of the dihedral group of order 2n."""
        ...

    def selectivity_check(self, K: QuadraticField, delta: NfElement) -> bool:
        """Whether K(sqrt(delta))/K is selective."""
        ...

    def theta_multiplicity(self, classification: Classification, K: QuadraticField, mu_1: int = 1) -> int:
        """Classes of representations per maximal order."""
        ...

    def branch_at_place(self, rep: RepSpec, place: PrimePlace, depth: int = 2) -> Optional[BranchReport]:
        """The branch of the group image at one place."""
        ...


class SynthesisServiceProtocol(Protocol):
    """
    Protocol for the Synthesis Service.

    Defines the interface that any synthesis service must implement
    to be compatible with the studio.
    """

    def sl2_approximate(self, targets: Sequence[ApproxTarget]) -> Matrix2:
        """A global SL2 matrix close to local targets."""
        ...

    def free_basis_of_ideal_pair(self, I: FracIdeal, J: FracIdeal):
        """A basis of I x J when IJ is principal."""
        ...

    def conjugator_to_vertex(self, v: TreeVertex) -> Matrix2:
        """A matrix moving v_0 to v."""
        ...

    def normalizer_coset_reps(self, K: QuadraticField) -> list[CosetRep]:
        """Representatives of the normalizer cosets of GL2(O_K)."""
        ...

    def verify_integral_rep(
        self, matrices: Sequence[Matrix2], relators: Sequence[str], letters: Optional[Sequence[str]] = None
    ) -> bool:
        """Whether the matrices form an integral representation."""
        ...

    def synthesize_representatives(self, rep: RepSpec, report: CountReport) -> list[Representative]:
        """One representative per conjugacy class counted by the report."""
        ...
