import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lphard import fixtures as fx
from lphard import reductions as rd
from lphard import verify as vf
from lphard.basis import RationalBasis, coefficients_of
from lphard.constants import GadgetProfile
from lphard.counting import a_pu_terms, count_lattice, dist_to_lattice, min_distance
from lphard.errors import DimensionMismatch, DomainError, InfeasibleError, StageError
from lphard.rng import RandomStream

HALF = Fraction(1, 2)


def test_primes():
    assert rd.primes_in(10, 30) == [11, 13, 17, 19, 23, 29]
    assert rd.is_prime(101) and not rd.is_prime(91)
    q = rd.sample_prime(100, 200, RandomStream(1))
    assert 100 <= q <= 200 and rd.is_prime(q)
    with pytest.raises(InfeasibleError):
        rd.sample_prime(24, 28, RandomStream(1))


def test_spec_validation():
    with pytest.raises(DomainError):
        rd.SparsifySpec(12, (1,), (0,))
    with pytest.raises(DomainError):
        rd.SparsifySpec(11, (11,), (0,))
    with pytest.raises(DimensionMismatch):
        rd.SparsifySpec(11, (1, 2), (0,))


def test_zero_x_keeps_lattice():
    b = fx.d4()
    sub = rd.sublattice_basis_mod_q(b, 7, (0, 0, 0, 0))
    assert sub.index_in(b) == 1


@given(st.sampled_from([3, 5, 7, 11, 13]), st.lists(st.integers(0, 12), min_size=3, max_size=3))
def test_sublattice_index_is_q(q, x):
    x = [v % q for v in x]
    b = fx.random_basis(RandomStream(3), 3)
    sub = rd.sublattice_basis_mod_q(b, q, x)
    assert sub.index_in(b) == (q if any(x) else 1)


def test_membership_predicate():
    sub = rd.sublattice_basis_mod_q(RationalBasis.identity(3), 3, (1, 1, 2))
    for c in sub.columns():
        assert sum(int(a) * b for a, b in zip(c, (1, 1, 2))) % 3 == 0


def test_sparsify_shift_and_sublattice():
    b = fx.random_basis(RandomStream(6), 3)
    t = (1, 2, 3)
    spec0 = rd.SparsifySpec(5, (1, 2, 3), (0, 0, 0))
    sub, t2 = rd.sparsify(b, t, spec0)
    assert t2 == tuple(Fraction(v) for v in t)
    assert min_distance(sub, 2).value_pow >= min_distance(b, 2).value_pow
    for c in sub.columns():
        coefficients_of(b, c)
    spec = rd.SparsifySpec(5, (1, 2, 3), (1, 0, 4))
    _, t3 = rd.sparsify(b, t, spec)
    shift = b.apply((1, 0, 4))
    assert t3 == tuple(a - s for a, s in zip(t2, shift))


def test_sparsified_counts_match_coefficient_test():
    b = RationalBasis.identity(3)
    t = (HALF, 0, 0)
    spec = rd.SparsifySpec(5, (1, 2, 3), (1, 1, 0))
    short, close, too = rd.sparsified_counts(b, t, spec, 2, 3, Fraction(9, 4), Fraction(1, 4))
    coeffs = rd.collect_coefficients(b, 2, Fraction(9, 4), t)
    survive = sum(1 for a in coeffs if sum((int(ai) - zi) * xi for ai, zi, xi in zip(a, spec.z, spec.x)) % 5 == 0)
    assert close == survive


def test_sparsify_stats_item1_z4():
    b = RationalBasis.identity(4)
    stats = rd.sparsify_stats(b, (HALF, 0, 0, 0), 11, Fraction(2), Fraction(1, 4), Fraction(1, 4), 2000, 7)
    short = stats.events[0]
    assert short.population == 8 and short.bound == pytest.approx(8 / 11)
    assert short.passes and stats.passes


def test_sparsify_stats_item3_large_q():
    b = RationalBasis.identity(3)
    stats = rd.sparsify_stats(b, (0, 0, 0), 101, 1, 1, 2, 2000, 3)
    too = stats.events[2]
    assert too.population == 7
    assert abs(too.observed - 7 / 101) <= 3 * too.sigma + 0.01


def test_sparsify_stats_zero_radius():
    stats = rd.sparsify_stats(RationalBasis.identity(2), (HALF, HALF), 7, 0, 0, 0, 100, 1)
    assert all(e.observed == 0 and e.bound == 0 for e in stats.events)


def test_sparsify_stats_reproducible():
    b = fx.d4()
    args = (b, (HALF, HALF, 0, 0), 31, 2, 1, Fraction(1, 2), 500, 9)
    assert rd.sparsify_stats(*args) == rd.sparsify_stats(*args)


def test_linear_equation_lemmas():
    vecs = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1), (1, 2, 0)]
    le = rd.linear_equation_stats(vecs, 5, 0.5, 2000, 4)
    assert le.passes
    ub = rd.union_bound_stats(vecs, 5, 2000, 4, fixed_y=1)
    assert ub.passes and ub.bound == pytest.approx(8 / 5)
    with pytest.raises(DomainError):
        rd.linear_equation_stats([(1, 0), (6, 0)], 5, 0.5, 10, 1)


def test_gadget_transform_shapes():
    cvp = fx.sample_yes_cvp()
    gb, gt = RationalBasis.identity(3), (HALF,) * 3
    B, t = rd.gadget_transform(cvp.basis, cvp.target, 2, gb, gt)
    assert (B.d, B.n) == (cvp.basis.d + 2 + 3, 2 + 3)
    assert len(t) == B.d
    with pytest.raises(Exception):
        rd.gadget_transform(cvp.basis, cvp.target, 2, RationalBasis([[1], [0]]), (0, 1))


def test_gadget_item2_on_planted_yes():
    rnd = RandomStream(12)
    inst = fx.planted_yes_cvp(rnd, 2, 2, 2)
    gb, gt = RationalBasis.identity(3), (HALF,) * 3
    s_pow, r_pow = Fraction(1, 2), Fraction(3, 4)
    B, t = rd.gadget_transform(inst.basis, inst.target, s_pow, gb, gt)
    n1 = inst.basis.n
    lhs = count_lattice(B, 2, s_pow + Fraction(n1, 4) + r_pow, t).count
    assert lhs >= count_lattice(gb, 2, r_pow, gt).count


def test_gadget_inequalities_suite():
    checks = vf.suite_gadget(instances=6, seed=5)
    assert checks and all(c.passed for c in checks)


def test_kannan_embed():
    b = RationalBasis.identity(2, 3)
    t = (1, Fraction(1, 2))
    emb = rd.kannan_embed(b, t, Fraction(1, 4))
    assert (emb.d, emb.n) == (3, 3)
    v = emb.apply((1, 0, 2))
    assert emb.cost(2, v) == b.cost(2, [3 + 2, 0 + 1]) + 4 * Fraction(1, 4)
    d = dist_to_lattice(b, 2, t).value_pow
    assert min_distance(emb, 2).value_pow <= d + Fraction(1, 4)


def test_search_embed():
    b = RationalBasis.identity(2, 2)
    t = (Fraction(1, 2), 0)
    basis, t2 = rd.search_embed(b, t, Fraction(1, 4), Fraction(1), 2)
    assert basis.n == 3
    assert min_distance(basis, 2).value_pow == min(min_distance(b, 2).value_pow, Fraction(1, 4))
    assert dist_to_lattice(basis, 2, t2).value_pow == dist_to_lattice(b, 2, t).value_pow


def test_decision_bdd_reduce():
    b = RationalBasis.identity(3)
    inst = rd.AGBddInstance(b, (HALF, HALF, HALF), Fraction(3, 4), 1, 1, 8)
    out = rd.decision_bdd_reduce(inst, 2, 3)
    assert 20 <= out.q <= 40 and out.basis.index_in(b) == out.q
    assert not out.regime_ok
    with pytest.raises(DomainError):
        rd.decision_bdd_reduce(rd.AGBddInstance(b, (0, 0, 0), 1, 1, 0, 1), 2, 1)


def test_epsilon_u_arithmetic():
    params = rd.AgcvpParams(Fraction(1, 10), Fraction(6, 5), 1, 1, 1, p=3)
    assert params.epsilon_u == Fraction(1728, 10000) / 26


def test_agcvp_params_validation():
    with pytest.raises(DomainError):
        rd.AgcvpParams(Fraction(1, 10), Fraction(6, 5), 2, 1, 1, p=2)
    with pytest.raises(DomainError):
        rd.AgcvpParams(Fraction(1, 10), Fraction(6, 5), 1, 3, 2)


def test_agcvp_yes_count():
    rnd = RandomStream(14)
    inst = fx.planted_yes_cvp(rnd, 3, 2, Fraction(6, 5))
    params = rd.AgcvpParams(Fraction(1, 10), Fraction(6, 5), 1, 3, 6, p=2)
    out = rd.cvp_to_agcvp(inst, 2, params)
    assert out.G == 8
    assert count_lattice(out.basis, 2, out.r_pow, out.target).count >= 8


def test_agcvp_no_odd_terms_vanish():
    rnd = RandomStream(15)
    for p in (1, 2, 3):
        inst = fx.planted_no_cvp(rnd, 2, p, Fraction(6, 5))
        params = rd.AgcvpParams(Fraction(1, 10), Fraction(6, 5), 1, 2, 5, p=p)
        out = rd.cvp_to_agcvp(inst, p, params)
        far = Fraction(out.gamma_prime) ** p * (out.r_pow + out.u_pow)
        terms = a_pu_terms(out.basis, p, out.u_pow, far, out.target)
        assert all(c == 0 for z, c in terms if z % 2)


def test_agcvp_to_svp_bookkeeping():
    params = rd.AgcvpParams(Fraction(1, 10), Fraction(6, 5), Fraction(51, 50), 2, 6, p=5)
    ag = rd.cvp_to_agcvp(fx.sample_yes_cvp(Fraction(6, 5)), 5, params)
    red = rd.agcvp_to_svp(ag, 5, 3)
    assert red.instance.basis.n == ag.basis.n + 1
    assert 100 * ag.A <= red.q <= 200 * ag.A
    assert red.instance.r_pow == ag.r_pow + ag.u_pow


def test_end_to_end_bdd_bookkeeping():
    g, gb, gt = vf.bdd_setup()
    res = rd.end_to_end_bdd(fx.sample_yes_cvp(), 2, g, gb, gt, vf.BDD_ALPHA, vf.BDD_C, 1)
    assert res.instance.basis.n == 2 + gb.n + 1
    assert res.G > res.A >= 1


def test_end_to_end_stage_labels():
    g, gb, gt = vf.bdd_setup()
    with pytest.raises(StageError) as exc:
        rd.end_to_end_bdd(fx.sample_yes_cvp(), 2, g, gb, gt, 0.5, vf.BDD_C, 1)
    assert exc.value.stage == "geometry"
    bad = GadgetProfile(g.alpha_G, g.alpha_A, 50.0, math.inf)
    with pytest.raises(StageError) as exc:
        rd.end_to_end_bdd(fx.sample_yes_cvp(), 2, bad, gb, gt, vf.BDD_ALPHA, vf.BDD_C, 1)
    assert exc.value.stage == "gadget-check"


def test_end_to_end_small_rates():
    rates = vf.end_to_end_rates(seeds=30, seed=2)
    assert all(v > 0.5 for v in rates.values())


def test_random_target_shift():
    b = RationalBasis.identity(4)
    stats = rd.random_target_shift(b, (Fraction(1, 4), 0, 0, 0), 0.3, 0.2, 200, 5)
    assert stats.passes


def test_shift_angle():
    assert rd.shift_angle(0.5, 0.5) == 0
    assert 0 <= rd.shift_angle(0.3, 0.3) <= math.pi


def test_bdd_yes_output_satisfies_promise():
    g, gb, gt = vf.bdd_setup()
    ok = sum(rd.bdd_promise_holds(rd.end_to_end_bdd(fx.sample_yes_cvp(), 2, g, gb, gt, vf.BDD_ALPHA,
                                                    vf.BDD_C, s), 2) for s in range(20))
    assert ok > 10
