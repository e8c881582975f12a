"""
Regression corpus for ``btt verify-paper``.

Each case computes one published value through the studio (or the library
functions behind it) and compares it, as a string, to the expected value.
The result is a pandas DataFrame with one row per case.
"""

import logging
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Callable, Optional, Sequence

import pandas as pd

from bttrep.arithmetic.ideals import module_hnf, place_by_label
from bttrep.arithmetic.matrix import Matrix2
from bttrep.arithmetic.numfield import parse_field
from bttrep.core.errors import BttError
from bttrep.core.models import GroupKind
from bttrep.services.counting.classdata import ClassDataRecord, ClassDataTable
from bttrep.services.counting.counting import CountingService, RepSpec, count_absolutely_irreducible
from bttrep.services.synthesis.synthesis import locate_decomposable_vertex
from bttrep.studio.schemas import JobSpec, RegressionRow
from bttrep.tree.localtree import root_vertex, vertex

if TYPE_CHECKING:
    from bttrep.studio.studio import BttStudio

logger = logging.getLogger(__name__)

COLUMNS = ["case", "group", "expected", "actual", "passed"]


@dataclass(frozen=True)
class RegressionCase:
    name: str
    group: str
    tags: tuple[str, ...]
    expected: str
    run: Callable[["BttStudio"], str]

    def matches(self, name_filter: Optional[str]) -> bool:
        return not name_filter or name_filter in self.tags or name_filter in self.name


def _job(field: Optional[str], kind: str, order: Optional[int] = None, generators=None, **group) -> JobSpec:
    payload = {"field": field, "group": {"kind": kind, "order": order, **group}}
    if generators is not None:
        payload["generators"] = generators
    return JobSpec.model_validate(payload)


def _count(job: JobSpec) -> Callable[["BttStudio"], str]:
    def run(studio: "BttStudio") -> str:
        return str(studio.count(job).total)

    return run


def _enumerate(job: JobSpec) -> Callable[["BttStudio"], str]:
    def run(studio: "BttStudio") -> str:
        output = studio.enumerate(job)
        status = "verified" if output.verified else "unverified"
        return f"{len(output.representatives)} {status}"

    return run


def _verify(field: str, relators: Sequence[str], images: Sequence[dict]) -> Callable[["BttStudio"], str]:
    def run(studio: "BttStudio") -> str:
        K = parse_field(field)
        failing = []
        for index, rows in enumerate(images):
            letters = sorted(rows)
            matrices = [Matrix2.of(K, rows[letter]) for letter in letters]
            if not studio.synthesis_service.verify_integral_rep(matrices, relators, letters):
                failing.append(str(index))
        return "all verified" if not failing else "failing " + ",".join(failing)

    return run


# region Involutions over Q(sqrt(-5))

SQRT5 = "Q(sqrt(-5))"

INVOLUTIONS = {
    "v0": [["1", "0"], ["0", "-1"]],
    "w": [["-1", "0"], ["1+sqrt(-5)", "1"]],
    "u1": [["-1", "0"], ["1", "1"]],
    "u2": [["-1", "0"], ["2+sqrt(-5)", "1"]],
}

TWISTED_INVOLUTIONS = {
    "v0": [["33+16*sqrt(-5)", "104+8*sqrt(-5)"], ["-2-10*sqrt(-5)", "-33-16*sqrt(-5)"]],
    "w": [["-25-32*sqrt(-5)", "-136-40*sqrt(-5)"], ["-11+15*sqrt(-5)", "25+32*sqrt(-5)"]],
    "u1": [["-45-20*sqrt(-5)", "-136-8*sqrt(-5)"], ["4+13*sqrt(-5)", "45+20*sqrt(-5)"]],
    "u2": [["-37-36*sqrt(-5)", "-168-40*sqrt(-5)"], ["-9+18*sqrt(-5)", "37+36*sqrt(-5)"]],
}


def _locate_involutions(studio: "BttStudio") -> str:
    K = parse_field(SQRT5)
    P = place_by_label(K, "2_1")
    named = {
        root_vertex(P): "v0",
        vertex(P, 1, 1): "w",
        vertex(P, 1, 2): "u1",
        vertex(P, K.element(2, 1), 2): "u2",
    }
    base = Matrix2.of(K, INVOLUTIONS["v0"])
    found = []
    for rows in INVOLUTIONS.values():
        v = locate_decomposable_vertex(base, Matrix2.of(K, rows), P)
        found.append(named.get(v, v.label))
    return ",".join(found)


def _ideal_pair_lattice(studio: "BttStudio") -> str:
    K = parse_field(SQRT5)
    P = place_by_label(K, "2_1")
    basis = studio.synthesis_service.free_basis_of_ideal_pair(P.ideal, P.ideal)
    if basis is None:
        return "no free basis"
    s = K.element(0, 1)
    expected = module_hnf([(3 + s, 4 + 2 * s), (K.element(8), 13 + s)])
    return "same span" if module_hnf(list(basis)) == expected else "different span"


# endregion

# region Quaternion and dihedral images

QUATERNION_IMAGES = [
    {
        "a": [["1", "1-sqrt(-1)"], ["-1-sqrt(-1)", "-1"]],
        "b": [["sqrt(-1)", "1+sqrt(-1)"], ["0", "-sqrt(-1)"]],
    },
    {"a": [["-sqrt(-1)", "0"], ["-2", "sqrt(-1)"]], "b": [["sqrt(-1)", "1"], ["0", "-sqrt(-1)"]]},
    {"a": [["-1", "1"], ["-2", "1"]], "b": [["sqrt(-1)", "-sqrt(-1)"], ["0", "-sqrt(-1)"]]},
]

D4_IMAGES = [
    {"a": [["-1", "-2"], ["1", "1"]], "b": [["1", "2"], ["0", "-1"]]},
    {"a": [["-sqrt(-5)", "-2"], ["-2", "sqrt(-5)"]], "b": [["sqrt(-5)", "2"], ["3", "-sqrt(-5)"]]},
]


def _quaternion_branch(studio: "BttStudio") -> str:
    job = _job("Q(sqrt(-1))", "quaternion8")
    report = studio.branch_report(job, "2_1")
    return str(len(report)) if report is not None else "1"


def _dihedral_suite(studio: "BttStudio") -> str:
    return ",".join(str(studio.counting_service.count_dihedral(n).total) for n in (3, 4, 5, 8, 12))


def _dihedral_oracle(studio: "BttStudio") -> str:
    disagreeing = []
    options = studio.counting_service.options
    for n in (3, 4, 5, 8, 12):
        report = studio.counting_service.count_dihedral(n)
        oracle = count_absolutely_irreducible(report.generators, report.field, options)
        if oracle.total != report.total:
            disagreeing.append(str(n))
    return "agree" if not disagreeing else "disagree at " + ",".join(disagreeing)


# endregion

# region Relative class data

RELATIVE_RECORD = {
    "field": SQRT5,
    "delta": "-1",
    "h_rel": None,
    "u_generators": [{"element": ["1", "1"], "ideal": ["2", "1+sqrt(-5)"]}],
    "units": [["0", "1"], ["1/2", "1/2*sqrt(-5)"]],
}


def _relative_multiplier(studio: "BttStudio") -> str:
    table = ClassDataTable([ClassDataRecord.model_validate(RELATIVE_RECORD)], source="regression corpus")
    options = replace(studio.counting_service.options, class_data=table)
    K = parse_field(SQRT5)
    rep = RepSpec(GroupKind.CYCLIC, K, {"a": Matrix2.of(K, [[0, -1], [1, 0]])}, ["aaaa"], 4)
    return str(CountingService(options).count(rep).total)


# endregion


def default_cases() -> list[RegressionCase]:
    """The shipped regression corpus."""
    c2 = _job(SQRT5, "cyclic", 2)
    quaternion = _job("Q(sqrt(-1))", "quaternion8")
    d4 = _job(SQRT5, "dihedral", 4)
    involutions = [{"a": m} for m in [*INVOLUTIONS.values(), *TWISTED_INVOLUTIONS.values()]]
    c2_group, q8_group, d4_group = "C2 / Q(sqrt(-5))", "Q8 / Q(i)", "D4 / Q(sqrt(-5))"
    dihedral_group = "D_n, n = 3,4,5,8,12"
    return [
        RegressionCase("c2-sqrt-5-count", c2_group, ("c2-sqrt-5",), "8", _count(c2)),
        RegressionCase("c2-sqrt-5-enumerate", c2_group, ("c2-sqrt-5",), "8 verified", _enumerate(c2)),
        RegressionCase(
            "c2-sqrt-5-involutions",
            c2_group,
            ("c2-sqrt-5",),
            "all verified",
            _verify(SQRT5, ["aa"], involutions),
        ),
        RegressionCase(
            "c2-sqrt-5-vertex-labels", c2_group, ("c2-sqrt-5",), "v0,w,u1,u2", _locate_involutions
        ),
        RegressionCase("ideal-pair-lattice", "O_K-lattices", ("lattice",), "same span", _ideal_pair_lattice),
        RegressionCase("quaternion-count", q8_group, ("quaternion",), "4", _count(quaternion)),
        RegressionCase("quaternion-branch", q8_group, ("quaternion",), "4", _quaternion_branch),
        RegressionCase(
            "quaternion-images",
            q8_group,
            ("quaternion",),
            "all verified",
            _verify("Q(sqrt(-1))", ["aaaa", "aaBB", "abAAAB"], QUATERNION_IMAGES),
        ),
        RegressionCase(
            "quaternion-enumerate", q8_group, ("quaternion",), "4 verified", _enumerate(quaternion)
        ),
        RegressionCase("d4-count", d4_group, ("d4",), "6", _count(d4)),
        RegressionCase(
            "d4-conjugate-pairs",
            d4_group,
            ("d4",),
            "all verified",
            _verify(SQRT5, ["aaaa", "bb", "baba"], D4_IMAGES),
        ),
        RegressionCase("d4-enumerate", d4_group, ("d4",), "6 verified", _enumerate(d4)),
        RegressionCase("c3-q", "C3 / Q", ("abelian",), "1", _count(_job("Q", "cyclic", 3))),
        RegressionCase("c4-q", "C4 / Q", ("abelian",), "1", _count(_job("Q", "cyclic", 4))),
        RegressionCase(
            "c6-sqrt-15", "C6 / Q(sqrt(-15))", ("abelian",), "0", _count(_job("Q(sqrt(-15))", "cyclic", 6))
        ),
        RegressionCase(
            "c4-sqrt-5-multiplier", "C4 / Q(sqrt(-5))", ("class-data",), "13*h_{L/K}", _relative_multiplier
        ),
        RegressionCase("dihedral-suite", dihedral_group, ("dihedral",), "2,2,2,2,1", _dihedral_suite),
        RegressionCase("dihedral-oracle", dihedral_group, ("dihedral",), "agree", _dihedral_oracle),
    ]


def run_regression(
    studio: "BttStudio", cases: Sequence[RegressionCase], name_filter: Optional[str] = None
) -> pd.DataFrame:
    """
    Run the selected cases and tabulate them.

    Raises:
        ValueError: If the filter selects no case.
    """
    selected = [case for case in cases if case.matches(name_filter)]
    if not selected:
        raise ValueError(f"no regression case matches {name_filter!r}")
    rows = []
    for case in selected:
        try:
            actual = case.run(studio)
        except BttError as e:
            logger.warning("Regression case %s raised %s", case.name, e)
            actual = f"error: {type(e).__name__}"
        passed = actual == case.expected
        if not passed:
            logger.warning("Regression case %s: expected %s, got %s", case.name, case.expected, actual)
        row = RegressionRow(
            case=case.name, group=case.group, expected=case.expected, actual=actual, passed=passed
        )
        rows.append(row.model_dump())
    return pd.DataFrame(rows, columns=COLUMNS)
