"""
Randomised and exhaustive checks of the Moebius action and of branches.

Every random test draws from ``random.Random`` with a fixed seed.
"""

import random

import pytest

from bttrep.arithmetic.ideals import place_by_label
from bttrep.arithmetic.matrix import Matrix2
from bttrep.arithmetic.numfield import QuadraticField, root_of_unity
from bttrep.tree.branch import branch_bfs, branch_split, check_maximality, local_branch
from bttrep.tree.localtree import (
    INFINITY,
    ProjPoint,
    ball,
    conjugation_matches,
    distance_to_geodesic,
    moebius_apply,
    neighbors,
    order_contains,
    residual_invariant_lines,
    root_vertex,
    tree_distance,
    vertex,
)
from tests.utils.factories import create_matrix, create_random_element, create_random_matrix, create_rotation

SEED = 20260417
PLACES = [(1, "2"), (1, "3"), (-5, "2_1"), (-1, "5_1")]

ORDER_THREE = [[0, -1], [1, -1]]
ORDER_SIX = [[1, -1], [1, 0]]
SWAP = [[0, 1], [1, 0]]


def random_vertex(K: QuadraticField, label: str, rng: random.Random):
    return vertex(place_by_label(K, label), create_random_element(K, rng, 30), rng.randint(0, 4))


def finite_branches():
    """(generators, place) pairs whose branch is finite"""
    Q, Ki, K5 = QuadraticField(1), QuadraticField(-1), QuadraticField(-5)
    quaternion = [create_matrix(Ki, [["sqrt(-1)", 0], [0, "-sqrt(-1)"]]), create_rotation(Ki)]
    dihedral = [create_rotation(K5), create_matrix(K5, SWAP)]
    return [
        ([create_rotation(Q)], place_by_label(Q, "2")),
        ([create_rotation(Q)], place_by_label(Q, "3")),
        ([create_matrix(Q, ORDER_THREE)], place_by_label(Q, "2")),
        ([create_matrix(Q, ORDER_THREE)], place_by_label(Q, "3")),
        ([create_matrix(Q, ORDER_SIX)], place_by_label(Q, "3")),
        ([create_rotation(Q), create_matrix(Q, SWAP)], place_by_label(Q, "2")),
        (quaternion, place_by_label(Ki, "2_1")),
        (dihedral, place_by_label(K5, "2_1")),
    ]


class TestTubes:
    """Fixed vertices of diag(1, chi) against the tube around the standard apartment"""

    @pytest.mark.parametrize(
        "d, order, label, width",
        [
            (1, 2, "2", 1),
            (1, 2, "3", 0),
            (-1, 4, "2_1", 1),
            (-1, 2, "2_1", 2),
            (-3, 3, "3_1", 1),
            (-3, 6, "3_1", 0),
        ],
    )
    def test_fixed_vertices_to_depth_four(self, d, order, label, width):
        """Brute force over the ball of radius 4 around v_0"""
        K = QuadraticField(d)
        P = place_by_label(K, label)
        r = Matrix2.diag(K, 1, root_of_unity(K, order))
        candidates = ball(root_vertex(P), 4)
        fixed = {v for v in candidates if order_contains(v, r)}
        axis = (INFINITY, ProjPoint(K.zero()))
        tube = {v for v in candidates if distance_to_geodesic(v, *axis) <= min(width, 4)}
        assert fixed == tube
        report = branch_split(r, P, depth=4)
        assert report.radius == width
        assert set(report.vertices) == fixed


class TestMoebiusAction:
    """Test the incenter action against conjugation of orders"""

    @pytest.mark.parametrize("d, label", PLACES)
    def test_incenter_agrees_with_conjugation(self, d, label):
        """g * v is the only vertex w near g * v with g D_v g^-1 = D_w, on 1000 pairs"""
        K, rng = QuadraticField(d), random.Random(SEED)
        for _ in range(1000):
            g, v = create_random_matrix(K, rng, 6), random_vertex(K, label, rng)
            w = moebius_apply(g, v)
            assert conjugation_matches(g, v, w), (g, v)
            assert not any(conjugation_matches(g, v, u) for u in neighbors(w)), (g, v)

    @pytest.mark.parametrize("d, label", PLACES)
    def test_left_action(self, d, label):
        """(gh) * v = g * (h * v) and distances are invariant"""
        K, rng = QuadraticField(d), random.Random(SEED)
        for _ in range(200):
            g, h = create_random_matrix(K, rng, 6), create_random_matrix(K, rng, 6)
            v, w = random_vertex(K, label, rng), random_vertex(K, label, rng)
            assert moebius_apply(g * h, v) == moebius_apply(g, moebius_apply(h, v))
            assert tree_distance(moebius_apply(g, v), moebius_apply(g, w)) == tree_distance(v, w)

    @pytest.mark.parametrize("d, label, inner, outer", [(1, "2", 2, 3), (-5, "2_1", 2, 3), (-1, "3", 1, 2)])
    def test_neighbors_are_at_distance_one(self, d, label, inner, outer):
        """w is a neighbour of v iff their distance is 1"""
        P = place_by_label(QuadraticField(d), label)
        candidates = ball(root_vertex(P), outer)
        for v in ball(root_vertex(P), inner):
            adjacent = set(neighbors(v))
            assert len(adjacent) == P.residue_size + 1
            for w in candidates:
                assert (w in adjacent) == (tree_distance(v, w) == 1)


class TestBranchProperties:
    """Test branches for maximality, residual lines and equivariance"""

    @pytest.mark.parametrize("case", range(len(finite_branches())))
    def test_breadth_first_branches_are_maximal(self, case):
        """Every vertex contains the generators and no missing neighbour does"""
        gens, place = finite_branches()[case]
        assert check_maximality(branch_bfs(gens, place), gens)

    @pytest.mark.parametrize("rows", [None, ORDER_THREE])
    @pytest.mark.parametrize("label", ["2", "3"])
    def test_closed_form_branches_are_maximal(self, Q, rows, label):
        """The closed forms list a complete branch"""
        r = create_rotation(Q) if rows is None else create_matrix(Q, rows)
        report = local_branch(r, place_by_label(Q, label))
        assert check_maximality(report, [r])
        assert set(report.vertices) == set(branch_bfs([r], report.place).vertices)

    @pytest.mark.parametrize("case", range(len(finite_branches())))
    def test_residual_lines_match_the_order_test(self, case):
        """Residual eigenlines are the neighbours whose orders contain the generators"""
        gens, place = finite_branches()[case]
        for v in ball(root_vertex(place), 2):
            if not all(order_contains(v, g) for g in gens):
                continue
            expected = {w for w in neighbors(v) if all(order_contains(w, g) for g in gens)}
            assert set(residual_invariant_lines(v, gens)) == expected

    @pytest.mark.parametrize("h", [[[1, 1], [0, 1]], [[2, 1], [1, 1]], [[1, 0], [3, 1]], [[2, 0], [0, 1]]])
    @pytest.mark.parametrize("rows", [None, ORDER_THREE])
    def test_branches_are_equivariant(self, Q, q2, h, rows):
        """The branch of h g h^-1 is h times the branch of g"""
        g = create_rotation(Q) if rows is None else create_matrix(Q, rows)
        h = create_matrix(Q, h)
        report = branch_bfs([g], q2)
        moved = {moebius_apply(h, v) for v in report.vertices}
        conjugated = branch_bfs([g.conjugate_by(h.inverse())], q2, seeds=[moebius_apply(h, root_vertex(q2))])
        assert set(conjugated.vertices) == moved
