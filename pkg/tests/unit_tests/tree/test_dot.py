from bttrep.arithmetic.matrix import Matrix2
from bttrep.tree.branch import branch_ramified, branch_split
from bttrep.tree.dot import branch_to_dot, write_dot
from tests.utils.factories import create_rotation


class TestBranchToDot:
    """Test the graphviz export"""

    def test_edge_branch(self, Q, q2):
        """Both vertices are in the stem and joined by a solid edge"""
        text = branch_to_dot(branch_ramified(create_rotation(Q), q2), title="rotation")
        assert text.startswith('digraph "rotation" {')
        assert '\tgraph [label="2"]' in text
        assert text.count("doublecircle") == 2
        assert '"0@0" -> "1@1" [style=solid];' in text
        assert "dashed" not in text
        assert text.endswith("}\n")

    def test_foliage_edges_are_dashed(self, Q, q2):
        """Edges into the foliage are dashed"""
        text = branch_to_dot(branch_split(Matrix2.diag(Q, 1, -1), q2))
        assert text.count("[style=dashed]") == 5
        assert text.count("[style=solid]") == 6

    def test_note(self, Q, q2):
        """A note node is added on request"""
        text = branch_to_dot(branch_ramified(create_rotation(Q), q2), note='place "2"')
        assert '"note" [shape = note, label="place \\"2\\""];' in text

    def test_write_dot(self, Q, q2, tmp_path):
        """The graph is written to the given path"""
        report = branch_ramified(create_rotation(Q), q2)
        path = write_dot(report, tmp_path / "branch.gv", title="rotation")
        assert path.read_text(encoding="utf-8") == branch_to_dot(report, title="rotation")
