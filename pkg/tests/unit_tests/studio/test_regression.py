import pytest

from bttrep.core.errors import UnsupportedFieldError
from bttrep.studio.regression import COLUMNS, RegressionCase, default_cases, run_regression


def constant(value):
    def run(studio):
        return value

    return run


def failing(studio):
    raise UnsupportedFieldError("not here")


@pytest.fixture()
def cases() -> list[RegressionCase]:
    return [
        RegressionCase("first-count", "C2 / Q", ("small",), "2", constant("2")),
        RegressionCase("second-count", "C2 / Q", ("small",), "3", constant("4")),
        RegressionCase("unsupported", "D7", ("large",), "2*h_K(2)", failing),
    ]


class TestRunRegression:
    """Test tabulating regression cases"""

    def test_table(self, studio, cases):
        """One row per case with the compared strings"""
        table = run_regression(studio, cases)
        assert list(table.columns) == COLUMNS
        assert table["passed"].tolist() == [True, False, False]
        assert table.loc[1, "actual"] == "4"

    def test_errors_become_rows(self, studio, cases):
        """Library errors are reported in the actual column"""
        table = run_regression(studio, cases, "large")
        assert table["actual"].tolist() == ["error: UnsupportedFieldError"]

    def test_filter_by_name(self, studio, cases):
        """Substrings of names select cases"""
        assert run_regression(studio, cases, "second")["case"].tolist() == ["second-count"]

    def test_empty_selection_raises_error(self, studio, cases):
        """A filter matching nothing is an error"""
        with pytest.raises(ValueError, match="no regression case"):
            run_regression(studio, cases, "absent")


class TestDefaultCases:
    """Test the shipped corpus"""

    def test_names_are_unique(self):
        """Case names identify rows"""
        names = [case.name for case in default_cases()]
        assert len(names) == len(set(names))

    def test_tags(self):
        """Every documented tag selects a case"""
        tags = {tag for case in default_cases() for tag in case.tags}
        assert tags == {"c2-sqrt-5", "lattice", "quaternion", "d4", "abelian", "class-data", "dihedral"}

    @pytest.mark.parametrize("name_filter", ["abelian", "class-data", "lattice", "c2-sqrt-5-count"])
    def test_cheap_cases_pass(self, studio, name_filter):
        """Counts that need no synthesis"""
        table = studio.verify_paper(name_filter)
        assert table["passed"].all(), table.to_string()
