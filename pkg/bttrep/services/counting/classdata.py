"""
Class data for relative quadratic extensions L = K(sqrt(delta)).

Counting in the abelian case needs facts about the degree-4 field L that the
quadratic backend does not compute: the relative class number h_{L/K}, units
of L, and generators of the ideals of K that become principal in L. They are
read from a JSON table referenced by ``BttConfig.class_data_path``.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, field_validator

from bttrep.arithmetic.ideals import FracIdeal
from bttrep.arithmetic.numfield import NfElement, QuadraticField, parse_element, parse_field, sqrt_in_field
from bttrep.arithmetic.relative import RelativeQuadraticElement
from bttrep.core.errors import ClassDataMissingError

logger = logging.getLogger(__name__)


def _check_pair(value: List[str]) -> List[str]:
    if len(value) != 2:
        raise ValueError("an element of L is given as [x, y] meaning x + y*sqrt(delta)")
    return value


class UGeneratorRecord(BaseModel):
    """An element of L generating the extension of an ideal of K."""

    element: List[str]
    ideal: List[str]

    @field_validator("element")
    @classmethod
    def validate_element(cls, v):
        return _check_pair(v)

    @field_validator("ideal")
    @classmethod
    def validate_ideal(cls, v):
        if not v:
            raise ValueError("an ideal needs at least one generator")
        return v


class ClassDataRecord(BaseModel):
    """Facts about L = K(sqrt(delta)) for one pair (K, delta)."""

    field: str
    delta: str
    h_rel: Optional[int] = None
    u_generators: List[UGeneratorRecord] = []
    units: List[List[str]] = []
    source: str = ""

    @field_validator("field")
    @classmethod
    def validate_field(cls, v):
        parse_field(v)
        return v

    @field_validator("h_rel")
    @classmethod
    def validate_h_rel(cls, v):
        if v is not None and v < 1:
            raise ValueError("h_rel must be a positive integer")
        return v

    @field_validator("units")
    @classmethod
    def validate_units(cls, v):
        return [_check_pair(pair) for pair in v]


class ClassDataFile(BaseModel):
    records: List[ClassDataRecord] = []


@dataclass(frozen=True)
class UGenerator:
    element: RelativeQuadraticElement
    ideal: FracIdeal


@dataclass(frozen=True)
class ExtensionData:
    """Parsed class data, expressed over the caller's delta."""

    field: QuadraticField
    delta: NfElement
    h_rel: Optional[int]
    u_generators: tuple[UGenerator, ...]
    units: tuple[RelativeQuadraticElement, ...]
    source: str


class ClassDataTable:
    """Lookup of ``ExtensionData`` by field and delta, up to squares of K."""

    def __init__(self, records: Optional[List[ClassDataRecord]] = None, source: str = "configuration"):
        self.records = records or []
        self.source = source

    @classmethod
    def from_json(cls, path: str | Path) -> "ClassDataTable":
        path = Path(path)
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if isinstance(data, list):
            data = {"records": data}
        table = ClassDataFile.model_validate(data)
        logger.info("Loaded %d class-data records from %s", len(table.records), path)
        return cls(table.records, source=str(path))

    def find(self, K: QuadraticField, delta: NfElement) -> Optional[ExtensionData]:
        for record in self.records:
            if parse_field(record.field) != K:
                continue
            stored = parse_element(record.delta, K)
            ratio = sqrt_in_field(delta / stored)
            if ratio is None:
                continue
            return self._convert(record, K, stored, ratio, delta)
        return None

    def require(self, K: QuadraticField, delta: NfElement) -> ExtensionData:
        """
        Raises:
            ClassDataMissingError: If no record describes K(sqrt(delta)).
        """
        data = self.find(K, delta)
        if data is None:
            raise ClassDataMissingError(
                f"no class data for {K}(sqrt({delta})) in {self.source}", field=str(K), delta=str(delta)
            )
        return data

    def _convert(
        self,
        record: ClassDataRecord,
        K: QuadraticField,
        stored: NfElement,
        ratio: NfElement,
        delta: NfElement,
    ) -> ExtensionData:
        # sqrt(delta) = ratio * sqrt(stored)
        def element(pair: List[str]) -> RelativeQuadraticElement:
            x, y = (parse_element(c, K) for c in pair)
            return RelativeQuadraticElement(x, y / ratio, delta)

        u_generators = tuple(
            UGenerator(
                element(g.element), FracIdeal.from_generators(K, [parse_element(c, K) for c in g.ideal])
            )
            for g in record.u_generators
        )
        units = tuple(element(pair) for pair in record.units)
        return ExtensionData(K, delta, record.h_rel, u_generators, units, record.source or self.source)
