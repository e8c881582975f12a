from fractions import Fraction

import pytest

from bttrep.arithmetic.ideals import place_by_label
from bttrep.arithmetic.matrix import Matrix2
from bttrep.core.errors import BoundExceededError, FieldMismatchError
from bttrep.tree.localtree import (
    INFINITY,
    ProjPoint,
    ball,
    conjugation_matches,
    distance_to_geodesic,
    incenter,
    lattice_to_vertex,
    moebius_apply,
    neighbors,
    order_contains,
    residual_invariant_lines,
    root_vertex,
    tree_distance,
    vertex,
)
from tests.utils.factories import create_matrix, create_rotation


class TestVertices:
    """Test canonical vertices and distances"""

    def test_centers_are_reduced(self, q2):
        """v_5^[2] = v_1^[2] and v_7^[0] = v_0^[0]"""
        assert vertex(q2, 5, 2) == vertex(q2, 1, 2)
        assert vertex(q2, 7, 0) == root_vertex(q2)
        assert vertex(q2, 3, -1) == vertex(q2, 0, -1)

    def test_label(self, q2):
        """Vertices print as v_a^[n]"""
        assert root_vertex(q2).label == "v_{0}^{[0]}"
        assert vertex(q2, 1, 1).label == "v_{1}^{[1]}"

    def test_level_floor_raises_error(self, q2):
        """Levels below the floor are refused"""
        with pytest.raises(BoundExceededError, match="below the floor"):
            vertex(q2, 0, -5, level_floor=-4)

    @pytest.mark.parametrize("fixture, count", [("q2", 3), ("q3", 4), ("P2", 3)])
    def test_neighbors(self, request, fixture, count):
        """A vertex has residue_size + 1 neighbours"""
        place = request.getfixturevalue(fixture)
        v = root_vertex(place)
        around = neighbors(v)
        assert len(around) == count
        assert all(tree_distance(v, w) == 1 for w in around)

    def test_large_residue_field_raises_error(self, K5):
        """The inert place 11 has 121 residues"""
        with pytest.raises(BoundExceededError, match="exceeds 64"):
            neighbors(root_vertex(place_by_label(K5, "11")))

    @pytest.mark.parametrize(
        "first, second, distance",
        [((0, 0), (1, 2), 2), ((0, 2), (1, 2), 4), ((0, 3), (4, 3), 2), ((0, 5), (0, -1), 6)],
    )
    def test_tree_distance(self, q2, first, second, distance):
        """Distances between balls"""
        assert tree_distance(vertex(q2, *first), vertex(q2, *second)) == distance

    def test_distance_across_places_raises_error(self, q2, q3):
        """Vertices at different places are not comparable"""
        with pytest.raises(FieldMismatchError):
            tree_distance(root_vertex(q2), root_vertex(q3))

    def test_ball(self, q2, q3):
        """Balls of radius 1 and 2"""
        assert len(ball(root_vertex(q2), 1)) == 4
        assert len(ball(root_vertex(q2), 2)) == 10
        assert len(ball(root_vertex(q3), 1)) == 5


class TestMoebiusAction:
    """Test ends, incenters and the action of GL2"""

    def test_incenter_with_infinity(self, Q, q2):
        """The incenter of (0, 4, oo) is v_0^[2]"""
        points = ProjPoint(Q.zero()), ProjPoint(Q.element(4)), INFINITY
        assert incenter(*points, q2) == vertex(q2, 0, 2)

    def test_incenter_of_finite_points(self, Q, q2):
        """The two closest points decide"""
        points = [ProjPoint(Q.element(x)) for x in (0, 1, 2)]
        assert incenter(*points, q2) == vertex(q2, 0, 1)

    def test_incenter_needs_distinct_points(self, Q, q2):
        """Repeated points raise"""
        with pytest.raises(ValueError, match="distinct"):
            incenter(INFINITY, INFINITY, ProjPoint(Q.one()), q2)

    def test_identity_fixes_vertices(self, Q, q2):
        """The identity acts trivially"""
        v = vertex(q2, 1, 2)
        assert moebius_apply(Matrix2.identity(Q), v) == v

    def test_diagonal_moves_along_the_apartment(self, Q, q2):
        """diag(2, 1) maps v_0^[0] to v_0^[1] and diag(1, 2) to v_0^[-1]"""
        v0 = root_vertex(q2)
        assert moebius_apply(Matrix2.diag(Q, 2, 1), v0) == vertex(q2, 0, 1)
        assert moebius_apply(Matrix2.diag(Q, 1, 2), v0) == vertex(q2, 0, -1)

    def test_rotation_fixes_the_root(self, Q, q2):
        """[[0, -1], [1, 0]] lies in M2(Z_2)"""
        assert moebius_apply(create_rotation(Q), root_vertex(q2)) == root_vertex(q2)

    def test_singular_matrix_raises_error(self, Q, q2):
        """Only invertible matrices act"""
        with pytest.raises(ValueError, match="singular"):
            moebius_apply(create_matrix(Q, [[1, 1], [1, 1]]), root_vertex(q2))

    def test_conjugation_matches(self, Q, q2):
        """g D_v g^-1 = D_w exactly when g v = w"""
        g = Matrix2.diag(Q, 2, 1)
        assert conjugation_matches(g, root_vertex(q2), vertex(q2, 0, 1))
        assert not conjugation_matches(g, root_vertex(q2), root_vertex(q2))


class TestOrders:
    """Test maximal orders and invariant lines"""

    def test_order_contains(self, Q, q2):
        """Membership in the maximal order of a vertex"""
        assert order_contains(root_vertex(q2), create_rotation(Q))
        assert not order_contains(root_vertex(q2), Matrix2.diag(Q, 1, Fraction(1, 2)))
        assert order_contains(vertex(q2, 0, 1), create_matrix(Q, [[1, 0], [1, 1]]))
        assert not order_contains(vertex(q2, 0, 1), create_matrix(Q, [[1, 1], [0, 1]]))
        assert order_contains(vertex(q2, 0, 2), Matrix2.diag(Q, 1, -1))

    def test_order_contains_foreign_matrix_raises_error(self, K5, q2):
        """Matrix and vertex share a field"""
        with pytest.raises(FieldMismatchError):
            order_contains(root_vertex(q2), Matrix2.identity(K5))

    def test_residual_invariant_lines(self, Q, q2, q3):
        """diag(1, -1) keeps two lines mod 3 and every line mod 2"""
        r = Matrix2.diag(Q, 1, -1)
        assert len(residual_invariant_lines(root_vertex(q3), [r])) == 2
        assert len(residual_invariant_lines(root_vertex(q2), [r])) == 3
        assert residual_invariant_lines(root_vertex(q3), [create_rotation(Q)]) == []

    def test_residual_lines_outside_the_order_raise_error(self, Q, q2):
        """Generators must lie in the order of the vertex"""
        with pytest.raises(ValueError, match="not in the order"):
            residual_invariant_lines(root_vertex(q2), [Matrix2.diag(Q, 1, Fraction(1, 2))])


class TestLattices:
    """Test lattices and apartments"""

    def test_standard_lattice(self, Q, q2):
        """Z^2 is the root vertex"""
        e1, e2 = (Q.one(), Q.zero()), (Q.zero(), Q.one())
        assert lattice_to_vertex([e1, e2], q2) == root_vertex(q2)

    def test_lattice_of_a_vertex_matrix(self, Q, q2):
        """The columns (1, 1) and (4, 0) span a lattice of v_1^[2]"""
        vectors = [(Q.one(), Q.one()), (Q.element(4), Q.zero())]
        assert lattice_to_vertex(vectors, q2) == vertex(q2, 1, 2)

    def test_degenerate_lattice_raises_error(self, Q, q2):
        """Vectors on one line span no lattice"""
        with pytest.raises(ValueError, match="do not span"):
            lattice_to_vertex([(Q.one(), Q.zero()), (Q.element(2), Q.zero())], q2)

    def test_distance_to_geodesic(self, Q, q2):
        """Distance to the path from 0 to infinity"""
        ends = ProjPoint(Q.zero()), INFINITY
        assert distance_to_geodesic(vertex(q2, 1, 2), *ends) == 2
        assert distance_to_geodesic(vertex(q2, 0, 7), *ends) == 0
        assert distance_to_geodesic(vertex(q2, 2, 2), *ends) == 1
