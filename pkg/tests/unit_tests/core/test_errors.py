import pytest

from bttrep.core.errors import (
    BoundExceededError,
    BttError,
    ClassDataMissingError,
    FieldMismatchError,
    RelatorError,
    SymbolicCountError,
    ZeroValuationError,
)
from bttrep.core.models import Classification, CountingRule, GroupKind


class TestErrors:
    """Test the exception hierarchy"""

    def test_details_are_kept(self) -> None:
        """Keyword details travel with the error"""
        error = BoundExceededError("too many", bound=512)
        assert str(error) == "too many"
        assert error.details == {"bound": 512}

    @pytest.mark.parametrize("error_class", [FieldMismatchError, ZeroValuationError, RelatorError])
    def test_input_errors_are_value_errors(self, error_class) -> None:
        """Invalid input can be caught as ValueError"""
        with pytest.raises(ValueError):
            raise error_class("bad input")

    def test_missing_data_is_not_a_value_error(self) -> None:
        """Missing configuration is a library error only"""
        error = ClassDataMissingError("no class data")
        assert isinstance(error, BttError)
        assert not isinstance(error, ValueError)

    def test_symbolic_count_carries_report(self) -> None:
        """The report is an attribute, not a detail"""
        error = SymbolicCountError("symbolic", report="report")
        assert error.report == "report"
        assert error.details == {}


class TestModels:
    """Test the shared enums"""

    def test_values_are_strings(self) -> None:
        """Enum values appear as-is in JSON output"""
        assert GroupKind("quaternion8") is GroupKind.QUATERNION8
        assert Classification.DECOMPOSABLE == "decomposable"
        assert CountingRule.DIHEDRAL.value == "dihedral"
