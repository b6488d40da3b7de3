import math
from fractions import Fraction

import pytest

from lphard import fixtures as fx
from lphard.basis import RationalBasis
from lphard.errors import DimensionMismatch, DomainError
from lphard.lattice import (NEITHER, NO, YES, AGBddInstance, AGGapCvpInstance, BddInstance,
                            CvpPrimeInstance, SvpInstance, classify_agbdd, classify_agcvp, classify_bdd,
                            classify_cvp_prime, classify_svp)
from lphard.rng import RandomStream


def test_cvp_prime_cases():
    assert classify_cvp_prime(CvpPrimeInstance(RationalBasis.identity(2), (0, 0), 2), 2) == YES
    # closest points of 4Z^2 to (2, 2) lie at distance sqrt(8) > 1.5
    assert classify_cvp_prime(CvpPrimeInstance(RationalBasis.identity(2, 4), (2, 2), 1.5), 2) == NO
    mid = CvpPrimeInstance(RationalBasis.identity(2, 4), (Fraction(3, 2), 0), 2)
    assert classify_cvp_prime(mid, 2) == NEITHER


def test_cvp_prime_needs_binary_witness():
    # (3, 0) is a lattice point but needs coefficient 3, so the instance is not YES
    inst = CvpPrimeInstance(RationalBasis.identity(2), (3, 0), 3)
    assert classify_cvp_prime(inst, 2) == NEITHER


def test_instance_validation():
    with pytest.raises(DimensionMismatch):
        CvpPrimeInstance(RationalBasis.identity(2), (0, 0, 0), 2)
    with pytest.raises(DomainError):
        CvpPrimeInstance(RationalBasis.identity(2), (0, 0), Fraction(1, 2))
    with pytest.raises(DomainError):
        AGBddInstance(RationalBasis.identity(2), (0, 0), 1, 1, 3, 3)


def test_bdd():
    st = classify_bdd(BddInstance(RationalBasis.identity(2), (Fraction(1, 10), 0), Fraction(1, 2)), 2)
    assert st.valid and st.witness == (0, 0)
    assert st.dist == pytest.approx(0.1) and st.lambda1 == 1
    bad = classify_bdd(BddInstance(RationalBasis.identity(2), (Fraction(1, 2), Fraction(1, 2)), Fraction(1, 2)), 2)
    assert not bad.valid


def test_agbdd_as_decision_bdd():
    basis = RationalBasis.identity(2)
    yes = classify_agbdd(AGBddInstance(basis, (Fraction(1, 10), 0), Fraction(1, 4), Fraction(1, 2), 0, 1), 2)
    no = classify_agbdd(AGBddInstance(basis, (Fraction(1, 2), Fraction(1, 2)), Fraction(1, 4), Fraction(1, 2), 0, 1), 2)
    assert yes.case == YES and yes.close_count == 1 and yes.short_count == 0
    assert no.case == NO and no.close_count == 0


def test_agcvp_cases():
    basis = RationalBasis.identity(2, 4)
    yes = AGGapCvpInstance(basis, (0, 1), 1, 1, 1, 0, 1)
    assert classify_agcvp(yes, 2).case == YES
    no = AGGapCvpInstance(basis, (2, -2), 1, 1, 1, 0, 1)
    st = classify_agcvp(no, 2)
    assert st.case == NO and st.annoying == 0
    assert not no.regime_ok or no.G >= 1000 * no.A


@pytest.mark.parametrize("p", [1, 2, 3])
def test_svp_diag(p):
    b = RationalBasis([[2, 0], [0, 3]])
    assert classify_svp(SvpInstance(b, 2 ** p, 1), p).case == YES
    st = classify_svp(SvpInstance(b, 1, Fraction(3, 2)), p)
    assert st.case == NO
    assert classify_svp(SvpInstance(b, 1, 3), p).case == NEITHER


def test_planted_fixtures():
    rnd = RandomStream(8)
    for p in (1, 2, 3):
        assert classify_cvp_prime(fx.planted_yes_cvp(rnd, 3, p, 2), p) == YES
        assert classify_cvp_prime(fx.planted_no_cvp(rnd, 3, p, 2), p) == NO


def test_bundled_samples():
    assert classify_cvp_prime(fx.sample_yes_cvp(), 2) == YES
    assert classify_cvp_prime(fx.sample_no_cvp(), 2) == NO


def test_e8_is_even_unimodular():
    b = fx.e8()
    assert b.gram_det() == 1
    assert all(sum(x * x for x in c) % 2 == 0 for c in b.columns())
    assert math.isclose(float(b.gram_det()), 1.0)
