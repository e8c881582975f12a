"""
Integration tests for the ``btt`` command line tool.

Each test writes a job file, runs ``main`` with real services and checks the
exit code together with the JSON printed on stdout.
"""

import json

import pytest

from bttrep import cli
from bttrep.studio.regression import RELATIVE_RECORD, RegressionCase
from tests.utils.factories import write_class_data, write_job

C2_SQRT_MINUS_5 = {"field": "Q(sqrt(-5))", "group": {"kind": "cyclic", "order": 2}}
C4_SQRT_MINUS_5 = {
    "field": "Q(sqrt(-5))",
    "group": {"kind": "cyclic", "order": 4},
    "generators": {"a": [["0", "-1"], ["1", "0"]]},
}
DIHEDRAL_7 = {"group": {"kind": "dihedral", "order": 7}}
QUATERNION = {"field": "Q(sqrt(-1))", "group": {"kind": "quaternion8"}}


def run(capsys, *argv: str) -> tuple[int, str]:
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


class TestCount:
    """btt count"""

    def test_count(self, capsys, tmp_path):
        """C2 over Q(sqrt(-5)) has 8 classes"""
        code, out = run(capsys, "count", "--job", str(write_job(tmp_path, C2_SQRT_MINUS_5)))
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["count"] == 8
        assert payload["rule"] == "decomposable-orbits"
        assert payload["theorem"] == "t5"
        assert payload["orbit_total"] == 4

    def test_rational_cyclic_group(self, capsys, tmp_path):
        """C3 over Q has a unique class"""
        job = write_job(tmp_path, {"field": "Q", "group": {"kind": "cyclic", "order": 3}})
        code, out = run(capsys, "count", "--job", str(job))
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["count"] == 1
        assert payload["theorem"] == "p42"

    def test_symbolic_count_is_printed(self, capsys, tmp_path):
        """D7 counts as 2 h_K(2) over the cubic field"""
        code, out = run(capsys, "count", "--job", str(write_job(tmp_path, DIHEDRAL_7)))
        assert code == cli.EXIT_OK
        assert json.loads(out)["count"]["multiplier"] == 2

    def test_missing_class_data(self, capsys, tmp_path):
        """C4 over Q(sqrt(-5)) needs class data of the quartic field"""
        code, out = run(capsys, "count", "--job", str(write_job(tmp_path, C4_SQRT_MINUS_5)))
        assert code == cli.EXIT_UNSUPPORTED
        assert json.loads(out)["error"]["type"] == "ClassDataMissingError"

    def test_class_data_from_option(self, capsys, tmp_path):
        """--config points at the class data table"""
        job = write_job(tmp_path, C4_SQRT_MINUS_5)
        table = write_class_data(tmp_path, [RELATIVE_RECORD])
        code, out = run(capsys, "count", "--job", str(job), "--config", str(table))
        assert code == cli.EXIT_OK
        assert json.loads(out)["count"]["multiplier"] == 13

    def test_class_data_from_job_options(self, capsys, tmp_path):
        """options.class_data_path in the job works as well"""
        table = write_class_data(tmp_path, [RELATIVE_RECORD])
        job = write_job(tmp_path, {**C4_SQRT_MINUS_5, "options": {"class_data_path": str(table)}})
        code, out = run(capsys, "count", "--job", str(job))
        assert code == cli.EXIT_OK
        assert json.loads(out)["count"]["multiplier"] == 13


class TestInvalidInput:
    """Exit code 2"""

    def test_invalid_field(self, capsys, tmp_path):
        """Field descriptors are validated"""
        job = write_job(tmp_path, {"field": "Q(i)", "group": {"kind": "cyclic", "order": 2}})
        code, out = run(capsys, "count", "--job", str(job))
        assert code == cli.EXIT_SCHEMA
        assert json.loads(out)["error"]["type"] == "ValidationError"

    def test_missing_job(self, capsys, tmp_path):
        """Absent job files are reported"""
        code, out = run(capsys, "count", "--job", str(tmp_path / "absent.json"))
        assert code == cli.EXIT_SCHEMA
        assert "Job file not found" in json.loads(out)["error"]["message"]

    def test_malformed_json(self, capsys, tmp_path):
        """Job files must be JSON"""
        job = tmp_path / "job.json"
        job.write_text("{field: Q", encoding="utf-8")
        code, out = run(capsys, "count", "--job", str(job))
        assert code == cli.EXIT_SCHEMA
        assert json.loads(out)["error"]["type"] == "JSONDecodeError"

    def test_field_mismatch(self, capsys, tmp_path):
        """diag(1, i) needs i in the field"""
        job = write_job(tmp_path, {"field": "Q(sqrt(-5))", "group": {"kind": "quaternion8"}})
        code, out = run(capsys, "count", "--job", str(job))
        assert code == cli.EXIT_SCHEMA
        assert json.loads(out)["error"]["type"] == "FieldMismatchError"

    def test_missing_command(self):
        """argparse exits on its own"""
        with pytest.raises(SystemExit):
            cli.main([])


class TestEnumerate:
    """btt enumerate"""

    def test_enumerate(self, capsys, tmp_path):
        """Four verified representatives of Q8 over Q(i)"""
        code, out = run(capsys, "enumerate", "--job", str(write_job(tmp_path, QUATERNION)))
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["count"] == 4
        assert payload["verified"] is True
        assert len(payload["representatives"]) == 4

    def test_symbolic_count(self, capsys, tmp_path):
        """Symbolic counts cannot be enumerated"""
        code, out = run(capsys, "enumerate", "--job", str(write_job(tmp_path, DIHEDRAL_7)))
        assert code == cli.EXIT_SYMBOLIC
        payload = json.loads(out)
        assert payload["error"]["type"] == "SymbolicCountError"
        assert payload["report"]["count"]["symbol"] == "h_K(2)"


class TestBranch:
    """btt branch"""

    def test_branch_to_stdout(self, capsys, tmp_path):
        """Without --dot the source is printed"""
        job = write_job(tmp_path, QUATERNION)
        code, out = run(capsys, "branch", "--job", str(job), "--place", "2_1")
        assert code == cli.EXIT_OK
        assert out.startswith("digraph")

    def test_branch_to_file(self, capsys, tmp_path):
        """--dot writes the file and prints where"""
        job = write_job(tmp_path, QUATERNION)
        dot = tmp_path / "branch.dot"
        code, out = run(capsys, "branch", "--job", str(job), "--place", "2_1", "--dot", str(dot))
        assert code == cli.EXIT_OK
        assert json.loads(out) == {"dot": str(dot), "place": "2_1"}
        assert dot.read_text(encoding="utf-8").startswith("digraph")

    def test_place_from_job_options(self, capsys, tmp_path):
        """options.place is used when --place is absent"""
        job = write_job(tmp_path, {**QUATERNION, "options": {"place": "2_1"}})
        code, out = run(capsys, "branch", "--job", str(job))
        assert code == cli.EXIT_OK
        assert "digraph" in out

    def test_missing_place(self, capsys, tmp_path):
        """A place is required"""
        code, out = run(capsys, "branch", "--job", str(write_job(tmp_path, QUATERNION)))
        assert code == cli.EXIT_SCHEMA
        assert "a place is required" in json.loads(out)["error"]["message"]


class TestVerifyPaper:
    """btt verify-paper"""

    def test_passing_cases(self, capsys):
        """The abelian cases pass"""
        code, out = run(capsys, "verify-paper", "--filter", "abelian")
        assert code == cli.EXIT_OK
        assert "c3-q" in out

    def test_unknown_filter(self, capsys):
        """A filter matching nothing is invalid input"""
        code, out = run(capsys, "verify-paper", "--filter", "absent")
        assert code == cli.EXIT_SCHEMA
        assert "no regression case matches" in json.loads(out)["error"]["message"]

    def test_failing_case(self, capsys, mocker):
        """A wrong expected value fails the run"""
        mocker.patch(
            "bttrep.studio.studio.default_cases",
            return_value=[RegressionCase("c2-q", "C2 / Q", ("small",), "3", lambda studio: "2")],
        )
        code, out = run(capsys, "verify-paper")
        assert code == cli.EXIT_REGRESSION
        assert "c2-q" in out


class TestFieldInfo:
    """btt field-info"""

    def test_field_info(self, capsys):
        """Q(sqrt(-5)) has class number 2"""
        code, out = run(capsys, "field-info", "Q(sqrt(-5))")
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["class_number"] == 2
        assert payload["discriminant"] == -20

    def test_invalid_descriptor(self, capsys):
        """Only Q(sqrt(d)) descriptors are understood"""
        code, out = run(capsys, "field-info", "Q(i)")
        assert code == cli.EXIT_SCHEMA
        assert "unrecognised field descriptor" in json.loads(out)["error"]["message"]
