from fractions import Fraction

import pytest

from bttrep.arithmetic.cyclotomic import (
    CyclotomicField,
    dihedral_field,
    one_minus_zeta_class,
    prime_power_base,
    rho_pm2_classification,
    unit_congruent_to,
)
from bttrep.arithmetic.numfield import QuadraticField


class TestCyclotomicField:
    """Test arithmetic modulo the cyclotomic polynomial"""

    def test_zeta_has_order_n(self):
        """zeta^n = 1 and zeta^k != 1 below n"""
        F = CyclotomicField(5)
        zeta = F.zeta()
        assert F.degree == 4
        assert zeta**5 == F.one()
        assert all(zeta**k != F.one() for k in range(1, 5))

    def test_norm_of_one_minus_zeta(self):
        """The norm of 1 - zeta_p is p"""
        F = CyclotomicField(7)
        assert abs((F.one() - F.zeta()).norm()) == 7

    def test_inverse(self):
        """x * x^-1 = 1"""
        F = CyclotomicField(8)
        x = F.one() + F.zeta() * 3
        assert x * x.inverse() == F.one()

    def test_conjugate_is_inverse_of_zeta(self):
        """Complex conjugation maps zeta to zeta^-1"""
        F = CyclotomicField(5)
        zeta = F.zeta()
        assert zeta.conj() * zeta == F.one()


class TestOneMinusZeta:
    """Test the classification of 1 - zeta_n"""

    @pytest.mark.parametrize("n, expected", [(2, "Prime(2)"), (4, "Prime(2)"), (9, "Prime(3)"), (6, "Unit")])
    def test_classes(self, n, expected):
        """Prime powers give a prime, other n a unit"""
        assert str(one_minus_zeta_class(n)) == expected

    def test_small_n_raises_error(self):
        """n must be at least 2"""
        with pytest.raises(ValueError, match="at least 2"):
            one_minus_zeta_class(1)

    def test_prime_power_base(self):
        """Prime base of prime powers"""
        assert prime_power_base(8) == 2
        assert prime_power_base(25) == 5
        assert prime_power_base(12) is None

    def test_rho_pm2_for_powers_of_two(self):
        """rho - 2 and rho + 2 are associates exactly for powers of 2"""
        minus, plus, associates = rho_pm2_classification(8)
        assert str(minus) == "Prime(2)" and str(plus) == "Prime(2)"
        assert associates

    def test_rho_pm2_for_odd_prime(self):
        """rho + 2 is a unit for an odd prime"""
        minus, plus, associates = rho_pm2_classification(5)
        assert str(minus) == "Prime(5)"
        assert plus.is_unit
        assert not associates

    def test_unit_congruent_to(self):
        """1 + zeta + zeta^2 is a unit of Z[zeta_5]"""
        u = unit_congruent_to(3, 5)
        F = CyclotomicField(5)
        assert u == F.one() + F.zeta() + F.zeta() ** 2
        assert abs(u.norm()) == 1

    def test_unit_congruent_to_non_coprime_raises_error(self):
        """m must be coprime to n"""
        with pytest.raises(ValueError, match="gcd"):
            unit_congruent_to(2, 4)


class TestDihedralField:
    """Test the field of definition of zeta^k + zeta^-k"""

    @pytest.mark.parametrize("n, rho", [(3, -1), (4, 0), (6, 1)])
    def test_rational_cases(self, n, rho):
        """rho is rational for n = 3, 4, 6"""
        K, value = dihedral_field(n)
        assert K.is_rational
        assert value == K.element(rho)

    def test_pentagon(self):
        """2 cos(2 pi / 5) = (-1 + sqrt(5))/2"""
        K, rho = dihedral_field(5)
        assert K == QuadraticField(5)
        assert rho == K.element(Fraction(-1, 2), Fraction(1, 2))

    def test_second_character_takes_the_other_root(self):
        """k = 2 gives 2 cos(4 pi / 5)"""
        K, rho = dihedral_field(5, 2)
        assert rho == K.element(Fraction(-1, 2), Fraction(-1, 2))

    @pytest.mark.parametrize("n, d", [(8, 2), (12, 3)])
    def test_quadratic_cases(self, n, d):
        """2 cos(2 pi / n) = sqrt(d)"""
        K, rho = dihedral_field(n)
        assert K == QuadraticField(d)
        assert rho == K.element(0, 1)
        assert rho * rho == K.element(d)

    def test_cubic_field_raises_error(self):
        """n = 7 needs a cubic field"""
        with pytest.raises(ValueError, match="degree 3"):
            dihedral_field(7)

    def test_non_coprime_character_raises_error(self):
        """k must be coprime to n"""
        with pytest.raises(ValueError, match="not coprime"):
            dihedral_field(8, 2)
