"""
Enumerations shared across bttrep.

The string values are part of the JSON output.
"""

from enum import Enum


class PlaceType(str, Enum):
    """Splitting type of a rational prime at a place."""

    RATIONAL = "rational"
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


class LocalExtensionType(str, Enum):
    """Local behaviour of a quadratic extension at a place."""

    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


class Classification(str, Enum):
    """Classification of a 2-dimensional representation over K."""

    DECOMPOSABLE = "decomposable"
    INDECOMPOSABLE_ABELIAN = "indecomposable-abelian"
    ABSOLUTELY_IRREDUCIBLE = "absolutely-irreducible"


class GroupKind(str, Enum):
    """Group descriptors understood by the job schema."""

    CYCLIC = "cyclic"
    DIHEDRAL = "dihedral"
    QUATERNION8 = "quaternion8"
    PRESENTATION = "presentation"


class CountingRule(str, Enum):
    """Which counting rule produced a count."""

    DECOMPOSABLE_ORBITS = "decomposable-orbits"
    ABELIAN_FIELD_OF_DEFINITION = "abelian-field-of-definition"
    ABELIAN_UNIT_SUM = "abelian-unit-sum"
    IRREDUCIBLE_BRANCH = "irreducible-branch"
    DIHEDRAL = "dihedral"


class BranchShape(str, Enum):
    """Shape of a local branch."""

    APARTMENT_TUBE = "apartment-tube"
    VERTEX_BALL = "single-vertex-ball"
    EDGE_BALL = "edge-ball"
    EXPLICIT = "explicit"
    EMPTY = "empty"
