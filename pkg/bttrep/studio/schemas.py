"""
Studio Schemas

This module contains the Pydantic models used as parameter objects (inputs/outputs)
for the studio operations. Field elements travel as exact strings such as
``"3+sqrt(-5)"`` or ``"1/2*sqrt(-5)"``; decimal notation is rejected.
"""

import re
from typing import Dict, List, Optional

from pydantic import BaseModel, field_validator, model_validator

from bttrep.arithmetic.matrix import Matrix2
from bttrep.arithmetic.numfield import QuadraticField, parse_field
from bttrep.core.models import GroupKind

_LETTER = re.compile(r"^[a-z]$")
_DECIMAL = re.compile(r"\d\.\d|\.\d|\d\.")

# region Job Input Schemas


class GroupInput(BaseModel):
    """Input schema for a group descriptor."""

    kind: GroupKind
    order: Optional[int] = None
    character: int = 1
    relators: Optional[List[str]] = None

    @field_validator("order")
    @classmethod
    def validate_order(cls, v):
        if v is not None and v < 1:
            raise ValueError("group order must be positive")
        return v

    @field_validator("character")
    @classmethod
    def validate_character(cls, v):
        if v < 1:
            raise ValueError("character index must be positive")
        return v

    @field_validator("relators")
    @classmethod
    def validate_relators(cls, v):
        if v is None:
            return v
        for word in v:
            if not word or not word.isalpha():
                raise ValueError(f"relator {word!r} must be a non-empty word in generator letters")
        return v

    @model_validator(mode="after")
    def validate_order_for_kind(self):
        if self.kind in (GroupKind.CYCLIC, GroupKind.DIHEDRAL) and self.order is None:
            raise ValueError(f"{self.kind.value} groups need an order")
        if self.kind is GroupKind.CYCLIC and self.order < 2:
            raise ValueError("cyclic groups need order at least 2")
        if self.kind is GroupKind.DIHEDRAL and self.order < 3:
            raise ValueError("dihedral groups need n at least 3")
        if self.kind is GroupKind.QUATERNION8:
            self.order = 8
        return self


class JobOptions(BaseModel):
    """Per-job overrides of the configured bounds, and output paths."""

    class_data_path: Optional[str] = None
    bfs_depth_bound: Optional[int] = None
    group_order_bound: Optional[int] = None
    dot_path: Optional[str] = None
    dot_depth: int = 2
    place: Optional[str] = None

    @field_validator("bfs_depth_bound", "group_order_bound")
    @classmethod
    def validate_bound(cls, v):
        if v is not None and v < 1:
            raise ValueError("bounds must be positive")
        return v

    @field_validator("dot_depth")
    @classmethod
    def validate_dot_depth(cls, v):
        if v < 0:
            raise ValueError("dot_depth must not be negative")
        return v


class JobSpec(BaseModel):
    """
    A counting or enumeration job.

    ``field`` may be omitted for dihedral groups without explicit generators;
    the field of definition of the character is used then.
    """

    field: Optional[str] = None
    group: GroupInput
    generators: Optional[Dict[str, List[List[str]]]] = None
    options: JobOptions = JobOptions()

    @field_validator("field")
    @classmethod
    def validate_field(cls, v):
        if v is not None:
            parse_field(v)
        return v

    @field_validator("generators")
    @classmethod
    def validate_generators(cls, v):
        if v is None:
            return v
        if not v:
            raise ValueError("generators must not be empty")
        for letter, rows in v.items():
            if not _LETTER.match(letter):
                raise ValueError(f"generator name {letter!r} must be a single lower-case letter")
            if len(rows) != 2 or any(len(row) != 2 for row in rows):
                raise ValueError(f"generator {letter!r} must be a 2x2 matrix")
            for entry in (x for row in rows for x in row):
                if _DECIMAL.search(entry):
                    raise ValueError(f"decimal notation is not exact: {entry!r}")
        return v

    @model_validator(mode="after")
    def validate_job(self):
        if self.field is None and (self.group.kind is not GroupKind.DIHEDRAL or self.generators):
            raise ValueError("a field is required unless the job is a dihedral group without generators")
        if self.group.kind is GroupKind.PRESENTATION:
            if not self.generators:
                raise ValueError("presentations require explicit generator matrices")
            if not self.group.relators:
                raise ValueError("presentations require relators")
        if self.generators:
            K = parse_field(self.field)
            for letter, rows in self.generators.items():
                try:
                    Matrix2.of(K, rows)
                except ValueError as e:
                    raise ValueError(f"generator {letter!r}: {e}") from e
        if self.group.relators and self.generators:
            letters = set(self.generators)
            for word in self.group.relators:
                unknown = set(word.lower()) - letters
                if unknown:
                    raise ValueError(f"relator {word!r} uses unknown generators {sorted(unknown)}")
        return self

    def parsed_field(self) -> Optional[QuadraticField]:
        return parse_field(self.field) if self.field is not None else None

    def parsed_generators(self) -> Optional[dict[str, Matrix2]]:
        if not self.generators:
            return None
        K = self.parsed_field()
        return {letter: Matrix2.of(K, rows) for letter, rows in self.generators.items()}


# endregion

# region Output Schemas


class RepresentativeOutput(BaseModel):
    label: dict
    generators: List[List[List[str]]]


class EnumerationOutput(BaseModel):
    """Output schema for enumerated representatives."""

    count: int
    field: str
    rule: str
    representatives: List[RepresentativeOutput]
    verified: bool


class FieldInfoOutput(BaseModel):
    """Output schema for field utilities."""

    field: str
    discriminant: int
    ring_basis: List[str]
    class_number: int
    class_group_structure: List[int]
    two_torsion: List[str]
    torsion_unit: str
    torsion_order: int
    fundamental_unit: Optional[str] = None
    primes: Dict[str, List[Dict[str, str]]]


class RegressionRow(BaseModel):
    """One row of the regression table."""

    case: str
    group: str
    expected: str
    actual: str
    passed: bool


# endregion

