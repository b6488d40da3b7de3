"""The sixteen acceptance criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are also echoed in
the terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from lphard import constants as hc
from lphard import theta as th
from lphard import verify as vf
from lphard.counting import count_zn

RESULTS = {}


def _suite(checks):
    failed = [c for c in checks if not c.passed]
    return not failed, f"{len(checks) - len(failed)}/{len(checks)} checks" + (
        f"; first failure: {failed[0].line()}" if failed else "")


def c1_p0():
    hc.p0.cache_clear()
    v = hc.p0()
    return abs(v - 2.1397) <= 5e-4, f"p0 = {v:.6f}", 1


def c2_alpha_star():
    v = hc.alpha_star(1.5)
    return abs(v - 1.3554) <= 1e-3, f"alpha_star(1.5) = {v:.6f}", 1


def c3_alpha_dagger():
    v = hc.alpha_dagger(1.5, 200, hc.KissingConstant(0.02194))
    return abs(v - 1.0247) <= 1e-3, f"alpha_dagger(1.5, 200) = {v:.6f}", 1


def c4_alpha_kn():
    v = hc.alpha_kn(hc.KissingConstant(0.02194))
    return 0.9848 <= v < 0.98491, f"2^-0.02194 = {v:.7f}", 1


ALPHA_DDAGGER_PS = (1, 1.5, 2, 2.5, 3, 5, 8, 32)


def c5_alpha_ddagger():
    vals, worst = {}, 0.0
    for p in ALPHA_DDAGGER_PS:
        start = time.perf_counter()
        vals[p] = hc.alpha_ddagger(p)[0]
        worst = max(worst, time.perf_counter() - start)
    ok = all(abs(vals[p] - 1) <= 1e-3 for p in (1, 1.5, 2))
    ok = ok and vals[3] < 0.999
    ok = ok and all(0.5 <= v <= 1 + 1e-6 for v in vals.values())
    ok = ok and worst < 60
    detail = ", ".join(f"{p}:{v:.5f}" for p, v in vals.items())
    return ok, f"{detail}; slowest p {worst:.1f}s", 60 * len(ALPHA_DDAGGER_PS)


def c6_exact_counts():
    bad = []
    for p in (1, 1.5, 2, 3):
        for n in range(1, 17):
            R = Fraction(n, 2 ** p) if isinstance(p, int) else n * 0.5 ** p
            t = Fraction(1, 2) if isinstance(p, int) else 0.5
            closed = count_zn(p, n, t, R).count
            strict = count_zn(p, n, t, R, strict=True).count
            if closed != 2 ** n or strict != 0:
                bad.append((p, n, closed, strict))
    return not bad, f"64 (p, n) cells, mismatches: {bad[:3]}", 60


def c7_sandwich():
    ok, detail = _suite(vf.suite_sandwich(min_fraction=0.9))
    return ok, detail, 300


def c8_limits():
    ok, detail = _suite(vf.suite_limits(rel=0.01))
    return ok, detail, 10


def c9_counting():
    ok, detail = _suite(vf.suite_counting(cases=100, seed=17))
    return ok, detail, 300


def c10_sparsify():
    ok, detail = _suite(vf.suite_sparsify(trials=2000, seed=7))
    return ok, detail, 300


def c11_gadget():
    ok, detail = _suite(vf.suite_gadget(instances=50, seed=11))
    return ok, detail, 600


def c12_agcvp_no():
    ok, detail = _suite(vf.suite_agcvp_no(instances=20, seed=13))
    return ok, detail, 600


def c13_cp_bound():
    pairs = {p: (hc.C_p(p), hc.C_p_bound(p)) for p in (2.5, 3, 4, 8)}
    c50 = hc.C_p(50)
    ok = all(c <= b for c, b in pairs.values()) and c50 <= 1.05
    detail = ", ".join(f"{p}: {c:.4f}<={b:.4f}" for p, (c, b) in pairs.items())
    return ok, f"{detail}; C_p(50) = {c50:.5f}", 10


def c14_beta0_ub():
    grid = [(p, a) for p in (1, 1.5, 2, 3, 6) for a in np.geomspace(0.05, 5, 10)]
    bad = [(p, a) for p, a in grid if th.beta(p, 0, a).value > hc.beta0_upper_bound(p, a) * (1 + 1e-12)]
    return not bad, f"{len(grid)} grid points, violations: {len(bad)}", 10


def c15_kissing():
    ok, detail = _suite(vf.suite_kissing())
    return ok, detail, 120


def c16_end_to_end():
    rates = vf.end_to_end_rates(seeds=500, seed=0)
    ok = all(v > 0.5 for v in rates.values())
    return ok, ", ".join(f"{k} {v:.3f}" for k, v in rates.items()) + " over 500 seeds", 1800


CRITERIA = [
    (1, "p0 root of beta_0(1/2) = 2", c1_p0),
    (2, "alpha_star at p = 1.5", c2_alpha_star),
    (3, "alpha_dagger at p = 1.5, C = 200", c3_alpha_dagger),
    (4, "alpha_kn = 2^-c_kn", c4_alpha_kn),
    (5, "alpha_ddagger regimes", c5_alpha_ddagger),
    (6, "exact Z^n deep-hole counts", c6_exact_counts),
    (7, "theta sandwich grid", c7_sandwich),
    (8, "beta limits", c8_limits),
    (9, "counting claims on random lattices", c9_counting),
    (10, "sparsification bad-event frequencies", c10_sparsify),
    (11, "gadget lemma inequalities", c11_gadget),
    (12, "odd-z annoying terms vanish on NO instances", c12_agcvp_no),
    (13, "C_p below its closed-form bound", c13_cp_bound),
    (14, "beta_0 upper bound grid", c14_beta0_ub),
    (15, "kissing numbers of Z4, D4, E8", c15_kissing),
    (16, "end-to-end reductions", c16_end_to_end),
]


def evaluate(number, label, fn):
    start = time.perf_counter()
    ok, detail, limit = fn()
    elapsed = time.perf_counter() - start
    in_time = elapsed < limit
    passed = bool(ok and in_time)
    timing = f"{elapsed:.2f}s (limit {limit}s)" + ("" if in_time else " TOO SLOW")
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {label}: {detail}; {timing}"
    RESULTS[number] = line
    return passed, line


@pytest.mark.parametrize("number,label,fn", CRITERIA, ids=[f"criterion-{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, label, fn):
    passed, line = evaluate(number, label, fn)
    print(line)
    assert passed, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
