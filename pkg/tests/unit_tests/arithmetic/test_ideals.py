from fractions import Fraction

import pytest

from bttrep.arithmetic.ideals import (
    FracIdeal,
    crt_approximate,
    factor_rational_prime,
    module_hnf,
    place_by_label,
    reduce_mod_power,
    residue_lifts,
    residues_mod_power,
    valuation_at,
    valuation_by_membership,
)
from bttrep.core.errors import FieldMismatchError, ZeroValuationError
from bttrep.core.models import PlaceType


class TestFracIdeal:
    """Test fractional ideals in Hermite normal form"""

    def test_ramified_prime_over_two(self, K5, P2):
        """(2, 1 + sqrt(-5)) has norm 2 and squares to (2)"""
        assert P2.ideal.norm() == 2
        assert P2.ideal == FracIdeal.from_generators(K5, [K5.element(2), K5.element(1, 1)])
        assert P2.ideal**2 == FracIdeal.principal(K5.element(2))
        assert P2.ideal.smallest_integer() == 2

    def test_membership(self, K5, P2):
        """Elements of P are exactly those of even coordinate sum"""
        assert K5.element(1, 1) in P2.ideal
        assert K5.element(3, -1) in P2.ideal
        assert K5.one() not in P2.ideal
        assert not P2.ideal.contains(K5.element(Fraction(1, 2)))

    def test_membership_of_foreign_element_raises_error(self, P2, Ki):
        """Elements of another field are rejected"""
        with pytest.raises(FieldMismatchError):
            P2.ideal.contains(Ki.one())

    def test_inverse_and_division(self, K5, P2):
        """I * I^-1 is the unit ideal"""
        unit = FracIdeal.unit(K5)
        assert P2.ideal * P2.ideal.inverse() == unit
        assert P2.ideal / P2.ideal == unit
        assert P2.ideal**-1 == P2.ideal.inverse()
        assert P2.ideal.inverse().norm() == Fraction(1, 2)
        assert not P2.ideal.inverse().is_integral

    def test_conjugate_swaps_split_places(self, K5):
        """Conjugation fixes ramified primes and swaps split ones"""
        first, second = factor_rational_prime(3, K5)
        assert first.ideal.conj() == second.ideal
        assert place_by_label(K5, "2_1").ideal.conj() == place_by_label(K5, "2_1").ideal

    def test_zero_ideal_raises_error(self, K5):
        """The zero ideal is not fractional"""
        with pytest.raises(ValueError, match="zero ideal"):
            FracIdeal.from_generators(K5, [K5.zero()])

    def test_rational_ideals(self, Q):
        """Ideals of Q are generated by a rational"""
        I = FracIdeal.from_rational(Q, Fraction(3, 4))
        assert I.norm() == Fraction(3, 4)
        assert I.inverse() == FracIdeal.from_rational(Q, Fraction(4, 3))


class TestPlaces:
    """Test the decomposition of rational primes"""

    @pytest.mark.parametrize(
        "p, kind, labels",
        [
            (2, PlaceType.RAMIFIED, ["2_1"]),
            (3, PlaceType.SPLIT, ["3_1", "3_2"]),
            (5, PlaceType.RAMIFIED, ["5_1"]),
            (7, PlaceType.SPLIT, ["7_1", "7_2"]),
            (11, PlaceType.INERT, ["11"]),
        ],
    )
    def test_decomposition_in_sqrt_minus_5(self, K5, p, kind, labels):
        """Splitting types and labels of small primes"""
        places = factor_rational_prime(p, K5)
        assert [P.kind for P in places] == [kind] * len(labels)
        assert [P.label for P in places] == labels

    def test_ramified_uniformizer(self, K5, P2):
        """The uniformizer over 2 is 1 + sqrt(-5)"""
        assert P2.uniformizer == K5.element(1, 1)
        assert (P2.e, P2.f, P2.residue_size) == (2, 1, 2)

    def test_inert_residue_field(self, K5):
        """The inert place 11 has 121 residues"""
        P = place_by_label(K5, "11")
        assert P.residue_size == 121
        assert len(residue_lifts(P)) == 121

    def test_rational_place(self, q2):
        """Places of Q are labelled by the prime"""
        assert q2.kind is PlaceType.RATIONAL
        assert q2.label == "2"

    def test_non_prime_raises_error(self, K5):
        """Only primes factor into places"""
        with pytest.raises(ValueError, match="not prime"):
            factor_rational_prime(6, K5)

    def test_unknown_label_raises_error(self, K5):
        """Missing labels raise"""
        with pytest.raises(ValueError, match="no place labelled"):
            place_by_label(K5, "2_2")


class TestValuations:
    """Test exact valuations"""

    @pytest.mark.parametrize(
        "coords, expected", [((2, 0), 2), ((1, 1), 1), ((3, 0), 0), ((Fraction(1, 2), 0), -2), ((-4, 2), 2)]
    )
    def test_valuation_at_ramified_place(self, K5, P2, coords, expected):
        """Valuations at the ramified place over 2"""
        x = K5.element(*coords)
        assert valuation_at(x, P2) == expected
        assert valuation_by_membership(x, P2) == expected

    def test_valuation_at_split_places(self, K5):
        """1 + sqrt(-5) lies in exactly one place over 3"""
        first, second = factor_rational_prime(3, K5)
        x = K5.element(1, 1)
        assert valuation_at(x, first) + valuation_at(x, second) == 1
        assert {valuation_by_membership(x, first), valuation_by_membership(x, second)} == {0, 1}

    def test_rational_valuation(self, Q, q2):
        """2-adic valuation of rationals"""
        assert valuation_at(Q.element(Fraction(12, 5)), q2) == 2
        assert valuation_at(Q.element(Fraction(3, 8)), q2) == -3

    def test_zero_raises_error(self, P2, K5):
        """The valuation of zero is infinite"""
        with pytest.raises(ZeroValuationError):
            valuation_at(K5.zero(), P2)


class TestResidues:
    """Test digit expansions and approximation"""

    def test_reduce_mod_power(self, Q, q2):
        """7 is 3 modulo 4"""
        assert reduce_mod_power(Q.element(7), q2, 2) == Q.element(3)
        assert reduce_mod_power(Q.element(8), q2, 3).is_zero

    def test_reduce_mod_power_at_three(self, Q, q3):
        """5 is 5 modulo 9 and 14 is 5 modulo 9"""
        assert reduce_mod_power(Q.element(5), q3, 2) == Q.element(5)
        assert reduce_mod_power(Q.element(14), q3, 2) == Q.element(5)

    def test_stalled_reduction_raises_error(self, Q, q3, mocker):
        """A digit that does not raise the valuation is an error, not a loop"""
        mocker.patch("bttrep.arithmetic.ideals.residue_lift", return_value=Q.zero())
        with pytest.raises(ArithmeticError, match="stalled"):
            reduce_mod_power(Q.element(5), q3, 2)

    def test_residues_mod_power(self, q2):
        """O modulo 2^3 has eight canonical representatives"""
        reps = residues_mod_power(q2, 3)
        assert sorted(int(r.coords[0]) for r in reps) == list(range(8))

    def test_reduction_stays_in_the_class(self, K5, P2):
        """x and its reduction agree modulo P^3"""
        x = K5.element(5, 3)
        r = reduce_mod_power(x, P2, 3)
        assert (x - r).is_zero or valuation_at(x - r, P2) >= 3

    def test_crt_approximate(self, Q, q2, q3):
        """a = 1 mod 8 and a = 2 mod 9"""
        a = crt_approximate([(q2, Q.element(1), 2), (q3, Q.element(2), 1)])
        assert valuation_at(a - 1, q2) >= 3
        assert valuation_at(a - 2, q3) >= 2

    def test_crt_approximate_with_denominators(self, Q, q2, q3):
        """Targets may have denominators at their own place"""
        target = Q.element(Fraction(1, 2))
        a = crt_approximate([(q2, target, 3), (q3, Q.zero(), 0)])
        assert valuation_at(a - target, q2) > 3
        assert valuation_at(a, q3) >= 1

    def test_crt_approximate_at_split_places(self, K5):
        """Both places over 3 can be approximated independently"""
        first, second = factor_rational_prime(3, K5)
        a = crt_approximate([(first, K5.one(), 1), (second, K5.zero(), 1)])
        assert valuation_at(a - 1, first) >= 2
        assert a.is_zero or valuation_at(a, second) >= 2

    def test_duplicate_place_raises_error(self, Q, q2):
        """Each place appears once"""
        with pytest.raises(ValueError, match="appears twice"):
            crt_approximate([(q2, Q.one(), 1), (q2, Q.zero(), 1)])

    def test_module_hnf_is_canonical(self, K5):
        """Different bases of the same module give the same normal form"""
        one, zero, s = K5.one(), K5.zero(), K5.element(0, 1)
        assert module_hnf([(one, zero), (zero, one)]) == module_hnf([(one, s), (zero, one)])
        assert module_hnf([(one, zero), (zero, one)]) != module_hnf([(one, zero), (zero, K5.element(2))])
