from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lphard import fixtures as fx
from lphard.basis import RationalBasis, as_fraction, coefficients_of, direct_sum, solve_in_span
from lphard.counting import count_lattice
from lphard.enumeration import EnumerationBudget, Enumerator
from lphard.errors import DimensionMismatch, DomainError, NotInLattice, RankTooLarge
from lphard.rng import RandomStream

from oracle import box_count


def test_as_fraction():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(0.25) == Fraction(1, 4)
    with pytest.raises(DomainError):
        as_fraction("x/2")
    with pytest.raises(DomainError):
        as_fraction(float("nan"))


def test_basis_validation():
    with pytest.raises(DimensionMismatch):
        RationalBasis([[1, 2], [3]])
    with pytest.raises(DomainError):
        RationalBasis([[1, 2], [2, 4]])
    with pytest.raises(DomainError):
        RationalBasis([[1]], weights=[0])
    with pytest.raises(DimensionMismatch):
        RationalBasis([[1]], weights=[1, 1])


def test_coefficients_of():
    b = fx.d4()
    assert coefficients_of(b, (0, 0, 0, 0)) == (0, 0, 0, 0)
    for j in range(4):
        e = tuple(int(i == j) for i in range(4))
        assert coefficients_of(b, b.column(j)) == e
    with pytest.raises(NotInLattice):
        coefficients_of(b, (1, 0, 0, 0))
    with pytest.raises(NotInLattice):
        coefficients_of(RationalBasis([[1], [0]]), (0, 1))


@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_coefficients_roundtrip(x):
    b = fx.random_basis(RandomStream(2), 4)
    assert coefficients_of(b, b.apply(x)) == tuple(x)


def test_solve_in_span():
    b = RationalBasis.identity(2, 2)
    assert solve_in_span(b, (1, 3)) == (Fraction(1, 2), Fraction(3, 2))


def test_direct_sum():
    s = direct_sum(RationalBasis.identity(1), RationalBasis.identity(1))
    assert s.rows == RationalBasis.identity(2).rows
    big = direct_sum(RationalBasis.identity(2), fx.d4())
    assert (big.d, big.n) == (6, 6)


def test_weighted_costs():
    b = RationalBasis([[1, 0], [0, 1]], weights=[4, 1])
    assert b.cost(2, (1, 1)) == 5
    assert b.cost(1.5, (1, 1)) == pytest.approx(5)
    assert count_lattice(b, 2, 4).count == box_count(b.columns(), 2, 4, weights=[4, 1], box=3)


def test_index_in():
    b = RationalBasis.identity(3)
    sub = RationalBasis([[2, 0, 0], [0, 1, 0], [0, 0, 3]])
    assert sub.index_in(b) == 6


def test_rank_cap():
    with pytest.raises(RankTooLarge):
        Enumerator(RationalBasis.identity(13), 2)


def test_budget_validation():
    with pytest.raises(ValueError):
        EnumerationBudget(0)


@pytest.mark.parametrize("p", [1, 1.5, 2, 3])
def test_lll_is_only_an_optimisation(p):
    rnd = RandomStream(31)
    b = fx.random_basis(rnd, 3, entries=4)
    t = fx.random_target(rnd, 3)
    en_red = Enumerator(b, p, t, reduce=True)
    en_raw = Enumerator(b, p, t, reduce=False)
    assert count_lattice(b, p, 20, t, enumerator=en_red).count == \
        count_lattice(b, p, 20, t, enumerator=en_raw).count


def test_visit_maps_back_to_original_basis():
    b = fx.random_basis(RandomStream(4), 3, entries=3)
    en = Enumerator(b, 2)
    seen = []

    def visit(y, res, cost):
        x = en.original_coeffs(y)
        assert b.apply(x) == en.vector(y)
        assert b.cost(2, b.apply(x)) == cost
        seen.append(x)

    en.run(10, visit)
    assert len(seen) == len(set(seen)) > 1
