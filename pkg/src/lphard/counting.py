"""Exact lattice point counts in l_p balls.

Radii are always passed as p-th powers (``radius_pow = r^p``).  Counts are
exact whenever costs are rational: integer ``p`` with rational centers and
weights.  Otherwise costs are binary64 and a point whose cost is within a
relative ``1e-9`` of the radius is treated as lying on the sphere: it is
counted by the closed ball, excluded from the open ball, and reported in
``boundary_points``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath
import numpy as np
from scipy.special import betainc, gammaln

from . import theta as th
from .basis import RationalBasis, as_fraction, as_vector, is_integer_p
from .enumeration import DEFAULT_BUDGET, EnumerationBudget, Enumerator
from .errors import BudgetExceeded, DomainError

BOUNDARY_REL_TOL = 1e-9
ZN_MAX_N_FLOAT = 20
ZN_MAX_N_EXACT = 64


@dataclass(frozen=True)
class CountResult:
    count: int
    boundary_points: int
    exact: bool


def _boundary_tol(radius_pow):
    return BOUNDARY_REL_TOL * max(float(radius_pow), 1e-300)


# -------------------------------------------------------------------- Z^n

def _zn_exact_setup(p, t, radius_pow):
    """Scaled integer costs ``(den |z - t|)^p`` and the scaled radius bounds."""
    t = as_fraction(t)
    ip = int(p)
    den = t.denominator
    scale = den ** ip
    R = as_fraction(radius_pow) * scale
    closed = math.floor(R)
    strict = math.ceil(R) - 1
    reach = int(math.isqrt(max(closed, 0)) if ip == 2 else round(max(closed, 0) ** (1.0 / ip))) + 2
    num = t.numerator
    costs = {}
    for z in range(-reach - 1, reach + 2):
        c = abs(z * den - num) ** ip
        if c <= closed:
            costs[c] = costs.get(c, 0) + 1
    return sorted(costs.items()), closed, strict


def _zn_count_recursive(classes, n, bound, budget):
    """Points of Z^n with total scaled cost <= bound, one coordinate at a time."""
    nodes = [0]

    @lru_cache(maxsize=None)
    def f(k, rem):
        nodes[0] += 1
        if nodes[0] > budget.max_nodes:
            raise BudgetExceeded("Z^n recursion exceeded its node cap", nodes=nodes[0])
        if k == 0:
            return 1
        total = 0
        for c, m in classes:
            if c > rem:
                break
            total += m * f(k - 1, rem - c)
        return total

    if bound < 0:
        return 0
    return f(n, bound)


def zn_count_convolution(p, n, t, radius_pow, strict=False):
    """Same count as :func:`count_zn` via the n-fold cost convolution.

    Exact path only; serves as an independent internal check.
    """
    if not is_integer_p(p):
        raise DomainError("convolution path needs integer p")
    if n > ZN_MAX_N_EXACT:
        raise DomainError(f"convolution path is capped at n={ZN_MAX_N_EXACT}")
    classes, closed, strict_bound = _zn_exact_setup(p, t, radius_pow)
    bound = strict_bound if strict else closed
    if bound < 0:
        return 0
    poly = [0] * (bound + 1)
    for c, m in classes:
        if c <= bound:
            poly[c] += m
    result = [1] + [0] * bound
    base = poly
    e = n
    while e:
        if e & 1:
            result = _truncated_product(result, base, bound)
        e >>= 1
        if e:
            base = _truncated_product(base, base, bound)
    return sum(result)


def _truncated_product(a, b, bound):
    out = [0] * (bound + 1)
    nz = [(j, v) for j, v in enumerate(b) if v]
    for i, u in enumerate(a):
        if not u:
            continue
        for j, v in nz:
            if i + j > bound:
                break
            out[i + j] += u * v
    return out


def _zn_count_float(p, n, t, radius_pow, budget):
    """Tolerance path: per-class recursion with multinomial weights.

    Coordinates are grouped by their 1-D cost class and classes are visited in
    a fixed order, so equal partial sums are bitwise identical and memoise.
    Returns ``(inside, boundary)``.
    """
    pf = float(p)
    tf = float(t)
    R = float(radius_pow)
    tol = _boundary_tol(R)
    reach = int((R + tol) ** (1.0 / pf)) + 2
    costs = {}
    for z in range(-reach - 1, reach + 2):
        c = abs(z - tf) ** pf
        if c <= R + tol:
            key = round(c, 15)
            costs[key] = costs.get(key, 0) + 1
    classes = sorted(costs.items())
    nodes = [0]

    @lru_cache(maxsize=None)
    def g(j, k, rem):
        nodes[0] += 1
        if nodes[0] > budget.max_nodes:
            raise BudgetExceeded("Z^n recursion exceeded its node cap", nodes=nodes[0])
        if k == 0:
            if rem > tol:
                return (1, 0)
            if rem >= -tol:
                return (0, 1)
            return (0, 0)
        if j == len(classes):
            return (0, 0)
        c, mult = classes[j]
        inside = boundary = 0
        for m in range(k + 1):
            left = rem - m * c
            if left < -tol:
                break
            a, b = g(j + 1, k - m, left)
            w = math.comb(k, m) * mult ** m
            inside += w * a
            boundary += w * b
        return (inside, boundary)

    if R < -tol:
        return 0, 0
    return g(0, n, R)


def count_zn(p, n, t, radius_pow, strict=False, budget: EnumerationBudget = DEFAULT_BUDGET) -> CountResult:
    """``N_p(Z^n, r, t 1)`` (or the open-ball count when ``strict``)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (0 <= t <= Fraction(1, 2)):
        raise DomainError("t must lie in [0, 1/2]")
    exact = is_integer_p(p) and isinstance(t, (Rational, str)) and isinstance(radius_pow, (Rational, str))
    if isinstance(t, float) and is_integer_p(p) and isinstance(radius_pow, Rational):
        # float offsets with a small exact denominator (0, 0.25, 0.5) stay exact
        exact = Fraction(t).denominator <= 64
    if exact:
        if n > ZN_MAX_N_EXACT:
            raise DomainError(f"exact Z^n counting is capped at n={ZN_MAX_N_EXACT}")
        classes, closed, strict_bound = _zn_exact_setup(p, as_fraction(t), as_fraction(radius_pow))
        c_closed = _zn_count_recursive(tuple(classes), n, closed, budget)
        c_strict = _zn_count_recursive(tuple(classes), n, strict_bound, budget)
        return CountResult(c_strict if strict else c_closed, c_closed - c_strict, True)
    if n > ZN_MAX_N_FLOAT:
        raise DomainError(f"tolerance-path Z^n counting is capped at n={ZN_MAX_N_FLOAT}")
    inside, boundary = _zn_count_float(p, n, t, radius_pow, budget)
    return CountResult(inside if strict else inside + boundary, boundary, False)


# ---------------------------------------------------------- generic lattices

def count_lattice(basis: RationalBasis, p, radius_pow, target=None, strict=False,
                  budget: EnumerationBudget = DEFAULT_BUDGET, exclude_zero=False,
                  enumerator: Enumerator | None = None) -> CountResult:
    """``N_p(L, r, t)`` by enumeration; ``exclude_zero`` drops the origin."""
    if float(radius_pow) < 0:
        return CountResult(0, 0, True)
    en = enumerator or Enumerator(basis, p, target, budget)
    exact = en.exact and isinstance(radius_pow, Rational)
    R = as_fraction(radius_pow) if exact else float(radius_pow)
    tol = 0 if exact else _boundary_tol(R)
    tally = [0, 0]

    def visit(y, res, cost):
        if exact:
            if cost < R:
                tally[0] += 1
            elif cost == R:
                tally[1] += 1
        else:
            c = float(cost)
            if c < R - tol:
                tally[0] += 1
            elif c <= R + tol:
                tally[1] += 1
        return None

    try:
        en.run(R if exact else R + tol, visit, exclude_zero=exclude_zero)
    except BudgetExceeded as exc:
        exc.partial = CountResult(tally[0] + (0 if strict else tally[1]), tally[1], exact)
        raise
    inside, boundary = tally
    return CountResult(inside if strict else inside + boundary, boundary, exact)


@dataclass(frozen=True)
class NearestPoint:
    """Result of a shortest/closest vector search.

    ``value_pow`` is the exact p-th power when available.
    """

    value: float
    value_pow: object
    vector: tuple
    coeffs: tuple


def _root(value_pow, p):
    return float(value_pow) ** (1.0 / float(p)) if float(value_pow) > 0 else 0.0


def min_distance(basis: RationalBasis, p, budget: EnumerationBudget = DEFAULT_BUDGET) -> NearestPoint:
    """Shortest nonzero vector; the radius shrinks as better points appear."""
    en = Enumerator(basis, p, None, budget)
    best = None
    for j in range(basis.n):
        c = basis.cost(p, basis.column(j))
        if best is None or c < best[0]:
            y = [0] * basis.n
            y[j] = 1
            best = (c, None, tuple(y))
    state = {"cost": best[0], "y": None}

    def visit(y, res, cost):
        if cost < state["cost"] or state["y"] is None and cost <= state["cost"]:
            state["cost"], state["y"] = cost, y
            return cost
        return None

    en.run(best[0], visit, exclude_zero=True)
    y = state["y"]
    if y is None:  # float slack can hide the seeding column; fall back to it
        coeffs = best[2]
        vec = basis.apply(coeffs)
        return NearestPoint(_root(best[0], p), best[0], vec, coeffs)
    return NearestPoint(_root(state["cost"], p), state["cost"], en.vector(y), en.original_coeffs(y))


def dist_to_lattice(basis: RationalBasis, p, target, budget: EnumerationBudget = DEFAULT_BUDGET) -> NearestPoint:
    """Closest lattice vector to ``target``, seeded by rounding its coefficients."""
    target = as_vector(target)
    en = Enumerator(basis, p, target, budget)
    M = en.red.real_matrix(p)
    coef = np.linalg.lstsq(M, basis.real_vector(target, p), rcond=None)[0]
    y0 = tuple(int(round(v)) for v in coef)
    res0 = [sum(en.cols[j][i] * y0[j] for j in range(basis.n)) - en.t_int[i] for i in range(basis.d)]
    state = {"cost": en.cost_of_residual(res0), "y": y0}

    def visit(y, res, cost):
        if cost < state["cost"]:
            state["cost"], state["y"] = cost, y
            return cost
        return None

    en.run(state["cost"], visit)
    y = state["y"]
    return NearestPoint(_root(state["cost"], p), state["cost"], en.vector(y), en.original_coeffs(y))


def kissing_count(basis: RationalBasis, budget: EnumerationBudget = DEFAULT_BUDGET) -> int:
    """Number of nonzero vectors of minimal Euclidean length (exact)."""
    if basis.n > 10:
        raise DomainError("kissing_count is capped at rank 10")
    if not basis.exact_weights:
        raise DomainError("kissing_count needs rational weights")
    lam = min_distance(basis, 2, budget).value_pow
    res = count_lattice(basis, 2, lam, None, strict=False, budget=budget, exclude_zero=True)
    return res.boundary_points


def a_pu_terms(basis: RationalBasis, p, u_pow, r_pow, target, budget: EnumerationBudget = DEFAULT_BUDGET):
    """Terms ``(z, N_p(L, (r'^p - z^p u^p)^{1/p}, z t))`` for z = 0 .. floor(r'/u)."""
    target = as_vector(target)
    exact = is_integer_p(p) and isinstance(u_pow, Rational) and isinstance(r_pow, Rational)
    terms = []
    z = 0
    while True:
        if exact:
            rad = as_fraction(r_pow) - Fraction(z) ** int(p) * as_fraction(u_pow)
        else:
            rad = float(r_pow) - float(z) ** float(p) * float(u_pow)
        if rad < 0:
            break
        center = tuple(z * v for v in target)
        terms.append((z, count_lattice(basis, p, rad, center, budget=budget).count))
        z += 1
    return terms


def a_pu(basis: RationalBasis, p, u_pow, r_pow, target, budget: EnumerationBudget = DEFAULT_BUDGET) -> int:
    """Annoying-vector functional: sum of the terms above minus one."""
    if float(u_pow) <= 0:
        raise DomainError("u must be positive")
    return sum(c for _, c in a_pu_terms(basis, p, u_pow, r_pow, target, budget)) - 1


# -------------------------------------------------------- continuous helpers

def lp_ball_volume(p, n, r) -> float:
    """Volume of the l_p ball of radius r in R^n, evaluated in log space."""
    if p < 1 or n < 1 or r < 0:
        raise DomainError("need p >= 1, n >= 1, r >= 0")
    if r == 0:
        return 0.0
    pf = float(p)
    logv = n * (math.log(2) + gammaln(1 + 1 / pf)) + n * math.log(r) - gammaln(1 + n / pf)
    return math.exp(logv)


def cap_ratio(n, angle) -> float:
    """Fraction of the sphere S^{n-1} within ``angle`` of a fixed pole.

    Uses ``(1/2) I_{sin^2 angle}((n-1)/2, 1/2)`` for angles up to pi/2 and
    symmetry beyond.
    """
    if n < 2:
        raise DomainError("cap_ratio needs n >= 2")
    if not (0 <= angle <= math.pi):
        raise DomainError("angle must lie in [0, pi]")
    if angle == 0:
        return 0.0
    if angle > math.pi / 2:
        return 1.0 - cap_ratio(n, math.pi - angle)
    return 0.5 * float(betainc((n - 1) / 2, 0.5, math.sin(angle) ** 2))


@dataclass(frozen=True)
class SandwichRecord:
    p: float
    n: int
    t: object
    a: object
    count: int
    beta: float
    ratio_log: float
    passes_upper: bool

    @property
    def deficit(self):
        """Empirical ``C*`` lower estimate: ``-ratio_log * n / sqrt(n)``."""
        return -self.ratio_log * math.sqrt(self.n)


def theta_sandwich(p, n, t, a, budget: EnumerationBudget = DEFAULT_BUDGET) -> SandwichRecord:
    """Compare the exact count at radius ``a n^{1/p}`` with ``beta_t(a)^n``."""
    if is_integer_p(p) and isinstance(a, Rational):
        radius_pow = as_fraction(a) ** int(p) * n
    else:
        radius_pow = float(a) ** float(p) * n
    N = count_zn(p, n, t, radius_pow, budget=budget).count
    b = th.beta(p, t, a, precision="extended").value
    with mpmath.workdps(th.EXTENDED_DPS):
        bn = mpmath.mpf(b) ** n
        passes = mpmath.mpf(N) <= bn * (1 + mpmath.mpf(10) ** -25)
        ratio = (mpmath.log(N) / n - mpmath.log(b)) if N > 0 else -mpmath.inf
    return SandwichRecord(float(p), n, t, a, N, float(b), float(ratio), bool(passes))


def theta_sandwich_check(p, n, t, a, budget: EnumerationBudget = DEFAULT_BUDGET):
    """``(ratio_log, passes_upper)`` for the point-count sandwich."""
    rec = theta_sandwich(p, n, t, a, budget)
    return rec.ratio_log, rec.passes_upper
