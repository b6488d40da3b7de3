"""Explicit hardness constants and the generic BDD constraint system.

Every quantity here is a closed-form expression in the inverse profile
``beta_inv`` plus, for the ETH constant, a two-dimensional minimisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from . import theta as th
from .errors import DomainError, InfeasibleError

DEFAULT_C_KN = 0.02194


@dataclass(frozen=True)
class KissingConstant:
    c_kn: float = DEFAULT_C_KN

    def __post_init__(self):
        if not (0 < self.c_kn <= 1):
            raise DomainError(f"c_kn must lie in (0, 1], got {self.c_kn}")


@dataclass(frozen=True)
class GadgetProfile:
    """Distances and count gaps of a locally dense gadget (short distance 1).

    ``nu1`` may be ``math.inf`` for gadgets with no too-close vectors.
    """

    alpha_G: float
    alpha_A: float
    nu0: float
    nu1: float

    def __post_init__(self):
        if not (self.alpha_G > 0 and self.alpha_A > 0):
            raise DomainError("gadget distances must be positive")
        if self.alpha_A > self.alpha_G:
            raise DomainError("alpha_A must not exceed alpha_G")
        if not (self.nu0 > 1 and self.nu1 > 1):
            raise DomainError("gap factors nu0, nu1 must exceed 1")


def alpha_kn(k: KissingConstant = KissingConstant()) -> float:
    return 2.0 ** (-k.c_kn)


def alpha_star(p, precision="double") -> float:
    """``1 / (2 beta_0^{-1}(2))``."""
    if p < 1:
        raise DomainError("p must be >= 1")
    return float(1 / (2 * th.beta_inv(p, 0, 2, precision=precision)))


def alpha_dagger(p, C, k: KissingConstant = KissingConstant(), precision="double") -> float:
    """SETH-type constant obtained from kissing-number gadgets of rank (C-1)n'."""
    if not (C > 1):
        raise DomainError(f"C must exceed 1, got {C}")
    log_nu = k.c_kn * (C - 1) * math.log(2)
    if precision == "extended":
        d0 = float(th.beta_inv(p, 0, mpmath.exp(log_nu), precision=precision))
    else:
        d0 = th.beta_inv_log(p, 0, log_nu)
    return (1 + (1 / (2 * d0)) ** p) ** (1 / p)


@lru_cache(maxsize=None)
def p0(precision="double") -> float:
    """Root of ``beta_0(1/2) = 2`` in p, by bisection on [2, 3]."""
    def f(p):
        return float(th.beta(p, 0, 0.5, precision=precision).value) - 2.0

    lo, hi = 2.0, 3.0
    if not (f(lo) > 0 > f(hi)):
        raise DomainError("beta_0(1/2) - 2 does not change sign on [2, 3]")
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def C_p(p, precision="double") -> float:
    """Rank-increase factor ``1 / (1 - log2 beta_0(1/2))`` for p above p0."""
    b = float(th.beta(p, 0, 0.5, precision=precision).value)
    denom = 1 - math.log2(b)
    if denom <= 0:
        raise DomainError(f"C_p undefined for p={p} (p <= p0)")
    return 1 / denom


def C_p_bound(p) -> float:
    """Closed-form upper bound on ``C_p`` from the arcsinh estimate of beta_0."""
    ln2 = math.log(2)
    x = 2.0 ** p
    denom = ln2 - math.asinh(1 / x) - math.asinh(x) / x
    if denom <= 0:
        raise DomainError(f"closed-form C_p bound undefined at p={p}")
    return ln2 / denom


def beta0_upper_bound(p, a) -> float:
    """``exp(arcsinh(a^p) + arcsinh(a^-p) a^p)``, an upper bound on beta_0(a)."""
    ap = a ** p
    return math.exp(math.asinh(ap) + math.asinh(1 / ap) * ap)


# ------------------------------------------------------------ generic theorem

def _log_d0_d1(p, g: GadgetProfile, C):
    ld0 = th.beta_inv_log(p, 0, (C - 1) * math.log(g.nu0), log_result=True)
    if math.isinf(g.nu1):
        ld1 = math.inf
    else:
        ld1 = th.beta_inv_log(p, 0.5, max((C - 1) * math.log(g.nu1), math.log(2.0)), log_result=True)
    return ld0, ld1


def _exp(x):
    return math.exp(x) if x < 709 else math.inf


def _pow_or_inf(x, p):
    try:
        return x ** p
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class SethBound:
    value: float
    d0: float
    d1: float
    branch: str  # "alpha_A" or "d1" depending on which side of the min is smaller


def generic_alpha_seth_detail(p, g: GadgetProfile, gamma, C) -> SethBound:
    if not (gamma > 1 and C > 1):
        raise DomainError("need gamma > 1 and C > 1")
    ld0, ld1 = _log_d0_d1(p, g, C)
    # 1/(2 d0)^p and ((2 d1)^p - 1)/(2 d0)^p in log form, since d0, d1 may overflow
    shift = _exp(-p * (math.log(2) + ld0))
    left = g.alpha_A ** p
    right = math.inf if math.isinf(ld1) else _exp(p * (ld1 - ld0)) - shift
    m, branch = (left, "alpha_A") if left <= right else (right, "d1")
    inner = g.alpha_G ** p + (g.alpha_G ** p - m) / (gamma ** p - 1) + shift
    return SethBound(inner ** (1 / p), _exp(ld0), _exp(ld1), branch)


def generic_alpha_seth(p, g: GadgetProfile, gamma, C) -> float:
    return generic_alpha_seth_detail(p, g, gamma, C).value


def generic_alpha_eth(p, g: GadgetProfile, gamma) -> float:
    if not gamma > 1:
        raise DomainError("need gamma > 1")
    m = min(g.alpha_A ** p, 1.0)
    return (g.alpha_G ** p + (g.alpha_G ** p - m) / (gamma ** p - 1)) ** (1 / p)


@dataclass(frozen=True)
class ReductionGeometry:
    """Normalised radii of the generic reduction.

    With input rank n', the reduction uses ``r = a n'^{1/p}``,
    ``s = b n'^{1/p}`` and gadget scale ``ell = d0 n'^{1/p}``.
    """

    p: float
    alpha: float
    gamma: float
    C: float
    a: float
    b: float
    d0: float
    d1: float
    profile: GadgetProfile

    def inequalities(self):
        """The four constraints, in p-th power form, as a list of booleans."""
        p, a, b, gam = self.p, self.a, self.b, self.gamma
        g, d0, d1 = self.profile, self.d0, self.d1
        ap, bp, half = a ** p, b ** p, 0.5 ** p
        return [
            a / self.alpha < d0,
            ap - gam ** p * bp - half < (g.alpha_A * d0) ** p,
            ap - bp - half > (g.alpha_G * d0) ** p,
            ap - gam ** p * bp < _pow_or_inf(d1, p),
        ]

    def valid(self):
        return all(self.inequalities())

    def scaled_powers(self, n_prime):
        """Return ``(r^p, s^p, ell^p)`` for an input of rank n'."""
        p = self.p
        return (self.a ** p * n_prime, self.b ** p * n_prime, self.d0 ** p * n_prime)


def choose_reduction_geometry(p, g: GadgetProfile, gamma, C, alpha) -> ReductionGeometry:
    """Deterministic interior point of the constraint system (midpoint rule)."""
    bound = generic_alpha_seth_detail(p, g, gamma, C)
    d0, d1 = bound.d0, bound.d1
    if not alpha > bound.value:
        raise InfeasibleError(f"alpha={alpha} is not above the bound {bound.value}")
    half = 0.5 ** p
    gd = (g.alpha_G * d0) ** p
    ad = (g.alpha_A * d0) ** p
    d1p = _pow_or_inf(d1, p)
    lower = gd + (gd - min(ad, d1p - half)) / (gamma ** p - 1) + half
    upper = (alpha * d0) ** p
    if upper - lower <= 1e-9 * upper:
        raise InfeasibleError("interval for a^p is empty or degenerate")
    ap = 0.5 * (lower + upper)
    b_lo = (ap - min(half + ad, d1p)) / gamma ** p
    b_hi = ap - half - gd
    b_lo = max(b_lo, 0.0)
    if b_hi - b_lo <= 1e-12 * max(1.0, b_hi):
        raise InfeasibleError("interval for b^p is empty or degenerate")
    bp = 0.5 * (b_lo + b_hi)
    geo = ReductionGeometry(p, alpha, gamma, C, ap ** (1 / p), bp ** (1 / p), d0, d1, g)
    if not geo.valid():
        raise InfeasibleError(f"midpoint geometry violates constraints: {geo.inequalities()}")
    return geo


# --------------------------------------------------------------- ETH constant

T_GRID = np.arange(33) / 64.0
A_POINTS = 200
A_MAX = 20.0
KEEP = 5
REFINE_TOL = 1e-6


def _objective_grid(p, t):
    """``a / beta_0^{-1}(beta_t(a))`` on the log grid of a over (t, 20]."""
    a = t + (A_MAX - t) * np.geomspace(1e-4, 1.0, A_POINTS)
    nu, _ = th.beta_values(p, t, a)
    out = np.full(a.shape, np.inf)
    ok = nu > 1.0 + 1e-12
    if ok.any():
        out[ok] = a[ok] / th.beta_inv_values(p, 0, nu[ok])
    return a, out


def _objective(p, t, a):
    if a <= t:
        if t == 0.5 and a == 0.5:
            return 0.5 / th.beta_inv(p, 0, 2.0)
        return math.inf
    nu = th.beta(p, t, a).value
    if nu <= 1.0 + 1e-12:
        return math.inf
    return a / th.beta_inv(p, 0, nu)


def _refine(p, t, a, f, dt, da):
    """Coordinate descent with step halving until both steps drop below 1e-6."""
    while dt > REFINE_TOL or da > REFINE_TOL:
        moved = False
        for nt, na in ((t + dt, a), (t - dt, a), (t, a * (1 + da)), (t, a * (1 - da))):
            nt = min(max(nt, 0.0), 0.5)
            if na <= nt:
                continue
            v = _objective(p, nt, na)
            if v < f:
                t, a, f, moved = nt, na, v, True
                break
        if not moved:
            dt *= 0.5
            da *= 0.5
    return t, a, f


def alpha_ddagger(p):
    """Minimise ``a / beta_0^{-1}(beta_t(a))`` over t in [0, 1/2], a >= t.

    Returns ``(alpha, t_star, a_star)``.  The corner ``a = t = 1/2``, where the
    objective equals ``alpha_star``, is included as a candidate.
    """
    if p < 1:
        raise DomainError("p must be >= 1")
    cells = []
    for t in T_GRID:
        a, vals = _objective_grid(p, float(t))
        order = np.argsort(vals)[:KEEP]
        cells.extend((float(vals[i]), float(t), float(a[i])) for i in order)
    cells.append((_objective(p, 0.5, 0.5), 0.5, 0.5))
    cells.sort()
    best = cells[0]
    da = (A_MAX / 1e-4) ** (1.0 / (A_POINTS - 1)) - 1
    for f, t, a in cells[:KEEP]:
        if a == t:
            continue
        rt, ra, rf = _refine(p, t, a, f, 1 / 64, da)
        if rf < best[0]:
            best = (rf, rt, ra)
    alpha = min(max(best[0], 0.5), 1.0)
    return alpha, best[1], best[2]


# ------------------------------------------------------------------ reporting

@dataclass
class ConstantsRow:
    p: float
    alpha_star: float | None = None
    alpha_ddagger: float | None = None
    t_star: float | None = None
    a_star: float | None = None
    alpha_dagger: dict = field(default_factory=dict)
    alpha_kn: float | None = None
    above_p0: bool | None = None
    Cp: float | None = None
    Cp_bound: float | None = None
    seth_branch: dict = field(default_factory=dict)
    error: str = ""


def constants_row(p, C_list=(200,), k: KissingConstant = KissingConstant(),
                  precision="double") -> ConstantsRow:
    """Evaluate every constant at one p; failures land in ``error``."""
    row = ConstantsRow(p=p)
    errors = []

    def attempt(name, fn):
        try:
            return fn()
        except Exception as exc:  # recorded, never raised, so sweeps continue
            errors.append(f"{name}: {exc}")
            return None

    row.alpha_star = attempt("alpha_star", lambda: alpha_star(p, precision))
    res = attempt("alpha_ddagger", lambda: alpha_ddagger(p))
    if res is not None:
        row.alpha_ddagger, row.t_star, row.a_star = res
    plug = GadgetProfile(1.0, 1.0, 2.0 ** k.c_kn, math.inf)
    for C in C_list:
        row.alpha_dagger[C] = attempt(f"alpha_dagger@{C}",
                                      lambda: alpha_dagger(p, C, k, precision))
        det = attempt(f"seth@{C}", lambda: generic_alpha_seth_detail(p, plug, 2.0, C))
        row.seth_branch[C] = det.branch if det else None
    row.alpha_kn = alpha_kn(k)
    p_root = p0()
    row.above_p0 = p > p_root
    if row.above_p0:
        row.Cp = attempt("Cp", lambda: C_p(p, precision))
    try:
        row.Cp_bound = C_p_bound(p)
    except DomainError:
        row.Cp_bound = None
    row.error = "; ".join(errors)
    return row
