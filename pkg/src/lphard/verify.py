"""Verification suites: each returns a list of :class:`Check` records."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.special import gamma as gamma_fn

from . import fixtures as fx
from . import theta as th
from .basis import RationalBasis, direct_sum
from .counting import count_lattice, dist_to_lattice, kissing_count, min_distance, theta_sandwich
from .constants import GadgetProfile
from .counting import a_pu_terms
from .lattice import NO, YES, classify_svp
from .reductions import (AgcvpParams, agcvp_to_svp, cvp_to_agcvp, decide_bdd_output, end_to_end_bdd,
                         gadget_transform, sparsify_stats)
from .rng import RandomStream

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Check:
    name: str
    observed: object
    bound: object
    passed: bool

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name}: observed={_fmt(self.observed)} bound={_fmt(self.bound)}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# ------------------------------------------------------------------ limits

LIMIT_PS = (1, 1.5, 2, 3, 5)
LIMIT_TS = (0.0, 0.25, 0.5)
LIMIT_TAU = 1e-4
LIMIT_A = 100.0


def suite_limits(rel=0.01):
    """Small-tau limits of theta and mu and the large-a slope of beta."""
    checks = []
    for p in LIMIT_PS:
        g = 2 * float(gamma_fn(1 + 1 / p))
        slope = g * (math.e * p) ** (1 / p)
        seen = {"theta": [], "mu": [], "beta": []}
        for t in LIMIT_TS:
            v = th.theta(p, LIMIT_TAU, t) * LIMIT_TAU ** (1 / p)
            checks.append(Check(f"theta*tau^(1/p) p={p} t={t}", v, g, abs(v - g) <= rel * g))
            m = th.mu(p, LIMIT_TAU, t) * LIMIT_TAU
            checks.append(Check(f"mu*tau p={p} t={t}", m, 1 / p, abs(m - 1 / p) <= rel / p))
            b = th.beta(p, t, LIMIT_A).value / LIMIT_A
            checks.append(Check(f"beta/a p={p} t={t} a={LIMIT_A:g}", b, slope, abs(b - slope) <= rel * slope))
            seen["theta"].append(v)
            seen["mu"].append(m)
            seen["beta"].append(b)
        for name, vals in seen.items():
            spread = (max(vals) - min(vals)) / min(vals)
            checks.append(Check(f"{name} t-independence p={p}", spread, rel, spread <= rel))
    return checks


# ---------------------------------------------------------------- sandwich

SANDWICH_PS = (1, 2, 3)
SANDWICH_TS = (Fraction(0), Fraction(1, 4), HALF)
SANDWICH_NS = (4, 8, 12)
SANDWICH_STEPS = (Fraction(1, 4), HALF, Fraction(3, 4), Fraction(1))


def sandwich_grid():
    """Records keyed by ``(p, t, a)`` with one entry per n."""
    table = {}
    for p in SANDWICH_PS:
        for t in SANDWICH_TS:
            for step in SANDWICH_STEPS:
                a = t + step
                table[(p, t, a)] = [theta_sandwich(p, n, t, a) for n in SANDWICH_NS]
    return table


def suite_sandwich(min_fraction=0.9):
    table = sandwich_grid()
    checks = []
    decreasing = monotone = 0
    for (p, t, a), recs in table.items():
        for rec in recs:
            checks.append(Check(f"N <= beta^n p={p} t={t} a={a} n={rec.n} deficit={rec.deficit:.3g}",
                                rec.count, f"{rec.beta:.6g}^{rec.n}", rec.passes_upper))
        mags = [abs(r.ratio_log) for r in recs]
        decreasing += mags[-1] < mags[0]
        monotone += all(x > y for x, y in zip(mags, mags[1:]))
    frac = decreasing / len(table)
    checks.append(Check(f"cells with |ratio_log| smaller at n={SANDWICH_NS[-1]} than at n={SANDWICH_NS[0]} "
                        f"(strictly monotone in {monotone}/{len(table)})", frac, min_fraction,
                        frac >= min_fraction))
    return checks


# ------------------------------------------------------------ sparsification

def sparsify_fixtures():
    """``(label, basis, target, q, r_short^p, r_close^p, r_tooclose^p, p)``."""
    z4, d4 = fx.zn(4), fx.d4()
    return [
        ("Z4 q=11", z4, (HALF, Fraction(1, 4), 0, 0), 11, Fraction(2), Fraction(9), HALF, 2),
        ("Z4 q=101", z4, (HALF,) * 4, 101, Fraction(2), Fraction(9), Fraction(3, 2), 2),
        ("D4 q=31", d4, (HALF, HALF, 0, 0), 31, Fraction(3), Fraction(8), Fraction(2), 2),
        ("Z3 p=3 q=13", fx.zn(3), (HALF, 0, 0), 13, Fraction(2), Fraction(30), Fraction(3, 2), 3),
    ]


def suite_sparsify(trials=2000, seed=7):
    checks = []
    for label, B, t, q, rs, rc, rt, p in sparsify_fixtures():
        st = sparsify_stats(B, t, q, rs, rc, rt, trials, seed, p=p)
        for ev in st.events:
            checks.append(Check(f"{label} {ev.name} (population {ev.population})", ev.observed,
                                f"{ev.bound:.6g}+3*{ev.sigma:.3g}", ev.passes and ev.precondition))
    return checks


# ---------------------------------------------------------- gadget counts

def _gadget_case(stream, p):
    n1 = stream.integers(1, 4)
    k = stream.integers(1, 5)
    gamma = Fraction(stream.integers(5, 13), 4)
    if stream.integers(0, 2):
        inst = fx.planted_yes_cvp(stream, n1, p, gamma)
    else:
        inst = fx.planted_no_cvp(stream, n1, p, gamma)
    gb = fx.random_basis(stream, k, entries=2)
    coeff = [Fraction(stream.integers(-4, 5), 4) for _ in range(k)]
    gt = gb.apply(coeff)
    s_pow = Fraction(stream.integers(1, 9), 4)
    r_pow = Fraction(stream.integers(2, 25), 4)
    return inst, gb, gt, s_pow, r_pow


def gadget_inequalities(inst, p, gb, gt, s_pow, r_pow):
    """Evaluate the three count inequalities; returns ``[(name, lhs, rhs, holds)]``."""
    from .lattice import classify_cvp_prime
    B, t = gadget_transform(inst.basis, inst.target, s_pow, gb, gt)
    n1 = inst.basis.n
    tail = direct_sum(RationalBasis.identity(n1), gb)
    tail_t = (HALF,) * n1 + tuple(gt)
    out = []
    # item 1 with t2 = (1/2, t_gadget)
    lhs = count_lattice(B, p, r_pow, t, strict=True).count
    rhs = count_lattice(tail, p, r_pow, tail_t, strict=True).count
    out.append(("short", lhs, rhs, lhs <= rhs))
    case = classify_cvp_prime(inst, p)
    if case == YES:
        lhs = count_lattice(B, p, s_pow + Fraction(n1, 2 ** p) + r_pow, t).count
        rhs = count_lattice(gb, p, r_pow, gt).count
        out.append(("close", lhs, rhs, lhs >= rhs))
    if case == NO:
        lhs = count_lattice(B, p, inst.gamma ** p * s_pow + r_pow, t).count
        rhs = count_lattice(tail, p, r_pow, tail_t, strict=True).count
        out.append(("too-close", lhs, rhs, lhs <= rhs))
    return case, out


def suite_gadget(instances=50, seed=11):
    checks = []
    root = RandomStream(seed)
    for i in range(instances):
        s = root.child(i)
        p = (1, 2, 3)[s.integers(0, 3)]
        inst, gb, gt, s_pow, r_pow = _gadget_case(s, p)
        case, rows = gadget_inequalities(inst, p, gb, gt, s_pow, r_pow)
        for name, lhs, rhs, ok in rows:
            rel = "<=" if name != "close" else ">="
            checks.append(Check(f"instance {i} ({case}, p={p}, n'={inst.basis.n}, k={gb.n}) {name}",
                                lhs, f"{rel} {rhs}", ok))
    return checks


# ------------------------------------------------------------ NO structure

def suite_agcvp_no(instances=20, seed=13):
    """Odd-z terms of the annoying-vector sum vanish on planted NO inputs."""
    checks = []
    root = RandomStream(seed)
    for i in range(instances):
        s = root.child(i)
        p = (1, 2, 3)[s.integers(0, 3)]
        n1 = s.integers(1, 4)
        n = s.integers(n1, 7)
        gamma = Fraction(stream_choice(s, (5, 6, 8)), 4)
        inst = fx.planted_no_cvp(s, n1, p, gamma)
        probe = AgcvpParams(Fraction(1, 10), gamma, 1, n1, n, p=p)
        # largest admissible gap on a 1/1000 grid
        gp = Fraction(math.ceil(probe.gamma_prime_limit * 1000) - 1, 1000)
        params = AgcvpParams(Fraction(1, 10), gamma, gp, n1, n, p=p)
        ag = cvp_to_agcvp(inst, p, params)
        far = ag.gamma_prime ** p * (ag.r_pow + ag.u_pow)
        terms = a_pu_terms(ag.basis, p, ag.u_pow, far, ag.target)
        odd = [(z, c) for z, c in terms if z % 2]
        total = sum(c for _, c in odd)
        # measured A_{p,u} relative to the c = 1 allowance, for calibrating c
        ratio = float((sum(c for _, c in terms) - 1) / ag.A)
        checks.append(Check(f"instance {i} p={p} n'={n1} n={n} odd-z terms {odd} A_pu/A={ratio:.3g}",
                            total, 0, total == 0))
    return checks


def stream_choice(stream, items):
    return items[stream.integers(0, len(items))]


# --------------------------------------------------------------- counting

def suite_counting(cases=100, seed=17):
    """Short-count lower bound, triangle bound and direct-sum bound on random lattices."""
    checks = []
    root = RandomStream(seed)
    bad = {"short": 0, "triangle": 0, "direct-sum": 0}
    for i in range(cases):
        s = root.child(i)
        p = (1, 2, 3)[s.integers(0, 3)]
        n = s.integers(1, 4)
        B = fx.random_basis(s, n, entries=2)
        lam = min_distance(B, p).value_pow
        r_pow = Fraction(s.integers(0, 17), 4) * lam
        N = count_lattice(B, p, r_pow, None, strict=True).count
        # N + 1 >= 2 r / lambda  <=>  (N + 1)^p >= 2^p r^p / lambda^p
        if (N + 1) ** p < 2 ** p * r_pow / lam:
            bad["short"] += 1
        t = B.apply([Fraction(s.integers(-8, 9), 4) for _ in range(n)])
        rc = Fraction(s.integers(1, 17), 4)
        if count_lattice(B, p, rc, t).count > count_lattice(B, p, 2 ** p * rc, None).count:
            bad["triangle"] += 1
        B2 = fx.random_basis(s, s.integers(1, 3), entries=2)
        t2 = B2.apply([Fraction(s.integers(-4, 5), 4) for _ in range(B2.n)])
        d1 = dist_to_lattice(B, p, t).value_pow
        d2 = dist_to_lattice(B2, p, t2).value_pow
        R = max(d1, d2) + Fraction(s.integers(0, 9), 4)
        S = direct_sum(B, B2)
        for strict in (False, True):
            lhs = count_lattice(S, p, R, tuple(t) + tuple(t2), strict=strict).count
            rhs = count_lattice(B, p, R - d2, t, strict=strict).count * \
                count_lattice(B2, p, R - d1, t2, strict=strict).count
            if lhs > rhs:
                bad["direct-sum"] += 1
    for name, v in bad.items():
        checks.append(Check(f"{name} violations over {cases} cases", v, 0, v == 0))
    return checks


# ---------------------------------------------------------------- kissing

def suite_kissing():
    expected = {"Z4": (fx.zn(4), 8), "D4": (fx.d4(), 24), "E8": (fx.e8(), 240)}
    return [Check(f"kissing number {name}", kissing_count(B), want, kissing_count(B) == want)
            for name, (B, want) in expected.items()]


# ------------------------------------------------------------- end to end

BDD_P = 2
BDD_GADGET_RANK = 6
BDD_ALPHA = 1.6
BDD_C = 4
SVP_P = 5
SVP_RANK = 10


def bdd_setup():
    k = BDD_GADGET_RANK
    g = GadgetProfile(math.sqrt(k) / 2, math.sqrt(k) / 2, 1.3, math.inf)
    return g, fx.zn(k), (HALF,) * k


def svp_params(n1=2):
    return AgcvpParams(Fraction(1, 10), Fraction(6, 5), 1.02, n1, SVP_RANK, p=SVP_P)


def end_to_end_rates(seeds=500, seed=0):
    """Fractions of seeds whose outputs classify as intended, per pipeline and case."""
    g, gb, gt = bdd_setup()
    rates = {}
    for label, inst, want in (("bdd YES", fx.sample_yes_cvp(), YES), ("bdd NO", fx.sample_no_cvp(), NO)):
        ok = 0
        for i in range(seeds):
            res = end_to_end_bdd(inst, BDD_P, g, gb, gt, BDD_ALPHA, BDD_C, i + seed * seeds)
            ok += decide_bdd_output(res, BDD_P) == want
        rates[label] = ok / seeds
    params = svp_params()
    gam = params.gamma
    for label, inst, want in (("svp YES", fx.sample_yes_cvp(gam), YES), ("svp NO", fx.sample_no_cvp(gam), NO)):
        ag = cvp_to_agcvp(inst, SVP_P, params)
        ok = 0
        for i in range(seeds):
            red = agcvp_to_svp(ag, SVP_P, i + seed * seeds)
            ok += classify_svp(red.instance, SVP_P).case == want
        rates[label] = ok / seeds
    return rates


def suite_end_to_end(seeds=500, seed=0, threshold=0.5):
    rates = end_to_end_rates(seeds, seed)
    return [Check(f"{label} success over {seeds} seeds", v, f"> {threshold}", v > threshold)
            for label, v in rates.items()]


SUITES = {
    "limits": suite_limits,
    "sandwich": suite_sandwich,
    "sparsify": suite_sparsify,
    "sparsify-stats": suite_sparsify,
    "gadget-counts": suite_gadget,
    "agcvp-no": suite_agcvp_no,
    "counting": suite_counting,
    "kissing": suite_kissing,
    "end-to-end": suite_end_to_end,
}
