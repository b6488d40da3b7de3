"""One-dimensional l_p theta series and the point-count profile beta.

For ``p >= 1``, ``tau > 0`` and an offset ``t`` in ``[0, 1/2]``::

    theta(p, tau, t) = sum_z exp(-tau |z - t|^p)
    mu(p, tau, t)    = sum_z |z - t|^p exp(-tau |z - t|^p) / theta

``mu`` decreases strictly in ``tau`` from infinity down to ``t^p``, so every
``a > t`` has a unique ``tau*`` with ``mu(tau*) = a^p``.  The profile

    beta(p, t, a) = exp(tau* a^p) theta(p, tau*, t)

is the per-coordinate growth rate of integer points in the l_p ball of
radius ``a n^{1/p}`` around ``t * 1``.

All series are evaluated with terms normalised by the leading term
``exp(-tau t^p)`` so that large ``tau`` never underflows.  The core routines
are vectorised over ``tau`` so grid searches (see ``constants``) can solve
hundreds of root problems in lockstep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError

MAX_BRACKET_STEPS = 200
MAX_BISECT_STEPS = 400
EXTENDED_DPS = 40
EQUALITY_TOL = 1e-12
LARGE_A = 1e3


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs for series truncation and bisection.

    ``root_abs`` is the relative bracket width in ``tau`` at which bisection
    gives up refining; ``root_rel`` is the target relative residual.
    """

    series_rel_tail: float = 1e-17
    root_abs: float = 1e-15
    root_rel: float = 1e-12

    def __post_init__(self):
        for name in ("series_rel_tail", "root_abs", "root_rel"):
            v = getattr(self, name)
            if not (0 < v <= 1e-6):
                raise DomainError(f"{name} must lie in (0, 1e-6], got {v}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class BetaPoint:
    t: float
    a: float
    value: float
    tau_star: float | None = None


def _check(p, t, tau=None):
    if not (p >= 1) or not math.isfinite(float(p)):
        raise DomainError(f"p must be a finite real >= 1, got {p}")
    if not (0 <= t <= Fraction(1, 2)):
        raise DomainError(f"t must lie in [0, 1/2], got {t}")
    if tau is not None:
        arr = np.asarray(tau, dtype=float)
        if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
            raise DomainError(f"tau must be a finite positive real, got {tau}")


def _z_offsets(p, tau_min, t, rel_tail):
    """Offsets |z - t| of every integer whose normalised term can matter.

    Beyond ``|z - t|^p > t^p + ln(1/rel_tail)/tau`` a term is below
    ``rel_tail`` times the leading term, hence below ``rel_tail`` times any
    partial sum that already contains it.
    """
    reach = (t ** p + math.log(1.0 / rel_tail) / tau_min) ** (1.0 / p)
    lo = math.floor(t - reach) - 1
    hi = math.ceil(t + reach) + 1
    z = np.arange(lo, hi + 1, dtype=float)
    x = np.abs(z - t)
    # ordered outward so that the summation adds small terms last
    return x[np.argsort(x, kind="stable")]


def _series(p, taus, t, rel_tail):
    """Return (S, M) with theta = exp(-tau t^p) S and mu = M / S."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    p = float(p)
    t = float(t)
    xp = _z_offsets(p, float(taus.min()), t, rel_tail) ** p
    shifted = xp - t ** p
    S = np.empty_like(taus)
    M = np.empty_like(taus)
    # chunk the tau axis to bound memory when the z range is long
    step = max(1, int(4_000_000 // max(1, xp.size)))
    for i in range(0, taus.size, step):
        tt = taus[i:i + step, None]
        w = np.exp(-tt * shifted[None, :])
        S[i:i + step] = w.sum(axis=1)
        M[i:i + step] = (w * xp[None, :]).sum(axis=1)
    return S, M


def _mpf(x):
    """mpf from floats, ints and exact rationals."""
    if isinstance(x, Rational) and not isinstance(x, int):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _series_mp(p, tau, t, rel_tail):
    p = _mpf(p)
    t = _mpf(t)
    tau = _mpf(tau)
    tp = t ** p
    S = mpmath.mpf(0)
    M = mpmath.mpf(0)
    for sign in (1, -1):
        z = 0 if sign == 1 else -1
        while True:
            xp = abs(z - t) ** p
            w = mpmath.exp(-tau * (xp - tp))
            S += w
            M += xp * w
            if w < rel_tail * S:
                break
            z += sign
    return S, M


def _ext_tail(tol):
    return min(tol.series_rel_tail, mpmath.mpf(10) ** (-EXTENDED_DPS + 5))


def theta(p, tau, t=0.0, tol=DEFAULT_TOL, precision="double"):
    """Theta series ``sum_z exp(-tau |z - t|^p)``."""
    _check(p, t, tau)
    if precision == "extended":
        with mpmath.workdps(EXTENDED_DPS):
            S, _ = _series_mp(p, tau, t, _ext_tail(tol))
            return mpmath.exp(-_mpf(tau) * _mpf(t) ** p) * S
    S, _ = _series(p, tau, t, tol.series_rel_tail)
    out = np.exp(-np.asarray(tau, float) * float(t) ** float(p)) * S
    return float(out[0]) if np.ndim(tau) == 0 else out


def log_theta(p, tau, t=0.0, tol=DEFAULT_TOL):
    """``ln theta``, safe for very large ``tau``."""
    _check(p, t, tau)
    S, _ = _series(p, tau, t, tol.series_rel_tail)
    out = -np.asarray(tau, float) * float(t) ** float(p) + np.log(S)
    return float(out[0]) if np.ndim(tau) == 0 else out


def mu(p, tau, t=0.0, tol=DEFAULT_TOL, precision="double"):
    """Moment ``E|X|^p`` of the discrete l_p Gaussian on ``Z - t``."""
    _check(p, t, tau)
    if precision == "extended":
        with mpmath.workdps(EXTENDED_DPS):
            S, M = _series_mp(p, tau, t, _ext_tail(tol))
            return M / S
    S, M = _series(p, tau, t, tol.series_rel_tail)
    out = M / S
    return float(out[0]) if np.ndim(tau) == 0 else out


# ---------------------------------------------------------------- root finding

def _decreasing_root(evaluate, targets, tau0, atol, width):
    """Vectorised bracket-then-bisect for ``evaluate(tau) = targets``.

    ``evaluate`` must be strictly decreasing in tau.  Bracketing doubles or
    halves each tau independently; bisection is geometric because the roots
    span many orders of magnitude.
    """
    targets = np.asarray(targets, dtype=float)
    tau = np.array(tau0, dtype=float)
    lo = np.zeros_like(tau)
    hi = np.full_like(tau, np.inf)
    for _ in range(MAX_BRACKET_STEPS):
        val = evaluate(tau)
        above = val > targets
        lo = np.where(above, tau, lo)
        hi = np.where(above, hi, tau)
        ok = (lo > 0) & np.isfinite(hi)
        if ok.all():
            break
        tau = np.where(ok, tau, np.where(above, tau * 2.0, tau * 0.5))
    else:
        raise ConvergenceError("no bracket for tau within 200 doublings")

    result = np.sqrt(lo * hi)
    done = np.zeros(tau.shape, dtype=bool)
    for _ in range(MAX_BISECT_STEPS):
        mid = np.sqrt(lo * hi)
        val = evaluate(mid)
        hit = np.abs(val - targets) <= atol
        narrow = (hi / lo - 1.0) <= width
        newly = ~done & (hit | narrow)
        result = np.where(newly, mid, result)
        done |= newly
        if done.all():
            return result
        above = val > targets
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    raise ConvergenceError("bisection for tau did not converge")


def _tau_guess(p, gap):
    # mu * tau -> 1/p for small tau; for tiny gaps mu - t^p decays like exp(-tau)
    gap = np.maximum(gap, 1e-300)
    return np.minimum(1.0 / (p * gap), 1.0 + np.log1p(1.0 / gap))


def _solve_tau_vec(p, a_pows, t, tol):
    p = float(p)
    t = float(t)
    a_pows = np.asarray(a_pows, dtype=float)
    gap = a_pows - t ** p

    def evaluate(tau):
        S, M = _series(p, tau, t, tol.series_rel_tail)
        return M / S

    atol = tol.root_rel * a_pows
    return _decreasing_root(evaluate, a_pows, _tau_guess(p, gap), atol, tol.root_abs)


def _log_beta_at_tau(p, tau, t, tol):
    """Return (log beta, a^p) along the curve a(tau) = mu(tau)^{1/p}."""
    S, M = _series(p, tau, t, tol.series_rel_tail)
    ap = M / S
    return tau * (ap - float(t) ** p) + np.log(S), ap


def _solve_tau_mp(p, a, t, tol):
    with mpmath.workdps(EXTENDED_DPS):
        p = _mpf(p)
        t = _mpf(t)
        ap = _mpf(a) ** p
        tail = _ext_tail(tol)

        def f(tau):
            S, M = _series_mp(p, tau, t, tail)
            return M / S

        tau = 1 / (p * (ap - t ** p))
        lo, hi = None, None
        for _ in range(MAX_BRACKET_STEPS):
            if f(tau) > ap:
                lo = tau
                if hi is not None:
                    break
                tau *= 2
            else:
                hi = tau
                if lo is not None:
                    break
                tau /= 2
        else:
            raise ConvergenceError("no bracket for tau within 200 doublings")
        eps = mpmath.mpf(10) ** (-EXTENDED_DPS + 8)
        for _ in range(MAX_BISECT_STEPS):
            mid = mpmath.sqrt(lo * hi)
            v = f(mid)
            if abs(v - ap) <= eps * ap or hi / lo - 1 <= eps:
                return mid
            if v > ap:
                lo = mid
            else:
                hi = mid
        raise ConvergenceError("bisection for tau did not converge")


def solve_tau(p, a, t=0.0, tol=DEFAULT_TOL, precision="double"):
    """Unique ``tau > 0`` with ``mu(p, tau, t) = a^p``; requires ``a > t``."""
    _check(p, t)
    if not (a > t):
        raise DomainError(f"solve_tau needs a > t, got a={a}, t={t}")
    if precision == "extended":
        return _solve_tau_mp(p, a, t, tol)
    return float(_solve_tau_vec(p, [float(a) ** float(p)], t, tol)[0])


def _equal(a, t):
    if isinstance(a, Rational) and isinstance(t, Rational):
        return a == t
    return abs(float(a) - float(t)) <= EQUALITY_TOL


def beta_base(t):
    """Value of beta at ``a = t``: 2 for the half-integer offset, 1 otherwise."""
    return 2.0 if _equal(t, Fraction(1, 2)) else 1.0


def beta(p, t, a, tol=DEFAULT_TOL, precision="double"):
    """Point-count profile ``beta_t(a)`` as a :class:`BetaPoint`."""
    _check(p, t)
    if a < 0:
        raise DomainError(f"a must be nonnegative, got {a}")
    if _equal(a, t):
        return BetaPoint(float(t), float(a), beta_base(t), None)
    if a < t:
        return BetaPoint(float(t), float(a), 0.0, None)
    if precision == "extended":
        with mpmath.workdps(EXTENDED_DPS):
            tau = _solve_tau_mp(p, a, t, tol)
            S, _ = _series_mp(p, tau, t, _ext_tail(tol))
            pm = _mpf(p)
            val = mpmath.exp(tau * (_mpf(a) ** pm - _mpf(t) ** pm)) * S
            return BetaPoint(float(t), float(a), val, tau)
    tau = solve_tau(p, a, t, tol)
    S, _ = _series(p, tau, t, tol.series_rel_tail)
    pf = float(p)
    val = math.exp(tau * (float(a) ** pf - float(t) ** pf)) * float(S[0])
    return BetaPoint(float(t), float(a), val, tau)


def beta_values(p, t, a_values, tol=DEFAULT_TOL):
    """Vectorised ``beta_t(a)`` for an array of ``a > t``; returns (values, taus)."""
    _check(p, t)
    a_values = np.asarray(a_values, dtype=float)
    if np.any(a_values <= float(t)):
        raise DomainError("beta_values needs every a > t")
    pf = float(p)
    taus = _solve_tau_vec(pf, a_values ** pf, t, tol)
    S, _ = _series(pf, taus, t, tol.series_rel_tail)
    return np.exp(taus * (a_values ** pf - float(t) ** pf)) * S, taus


def beta_min_form(p, t, a, tol=DEFAULT_TOL, points=512):
    """``min_tau exp(tau a^p) theta(p, tau, t)`` over a log grid around tau*.

    A second route to ``beta`` used only as a cross-check.
    """
    _check(p, t)
    if not (a > t):
        raise DomainError("beta_min_form needs a > t")
    tau_star = solve_tau(p, a, t, tol)
    grid = np.geomspace(tau_star / 32, tau_star * 32, points)
    grid = np.sort(np.append(grid, tau_star))
    pf = float(p)
    S, _ = _series(pf, grid, t, tol.series_rel_tail)
    vals = np.exp(grid * (float(a) ** pf - float(t) ** pf)) * S
    return float(vals.min())


def _beta_inv_vec(p, t, log_nus, tol):
    pf = float(p)
    targets = np.asarray(log_nus, dtype=float)
    base = math.log(beta_base(t))
    gap = np.maximum(targets - base, 1e-300)

    def evaluate(tau):
        return _log_beta_at_tau(pf, tau, t, tol)[0]

    # log beta grows roughly like (1/p) log(1/tau) for small tau
    tau0 = np.minimum(1.0, np.exp(-pf * gap))
    taus = _decreasing_root(evaluate, targets, tau0, tol.root_rel, tol.root_abs)
    _, ap = _log_beta_at_tau(pf, taus, t, tol)
    return ap ** (1.0 / pf), taus


def beta_inv_values(p, t, nus, tol=DEFAULT_TOL):
    """Vectorised inverse profile; every ``nu`` must exceed ``beta_t(t)``."""
    _check(p, t)
    nus = np.asarray(nus, dtype=float)
    if np.any(nus <= beta_base(t)):
        raise DomainError("beta_inv_values needs nu > beta_t(t)")
    return _beta_inv_vec(p, t, np.log(nus), tol)[0]


def _beta_inv_mp(p, t, nu, tol):
    with mpmath.workdps(EXTENDED_DPS):
        pm = _mpf(p)
        tm = _mpf(t)
        target = mpmath.log(_mpf(nu))
        tail = _ext_tail(tol)

        def f(tau):
            S, M = _series_mp(pm, tau, tm, tail)
            return tau * (M / S - tm ** pm) + mpmath.log(S), M / S

        tau = mpmath.mpf(1)
        lo, hi = None, None
        for _ in range(MAX_BRACKET_STEPS):
            if f(tau)[0] > target:
                lo = tau
                if hi is not None:
                    break
                tau *= 2
            else:
                hi = tau
                if lo is not None:
                    break
                tau /= 2
        else:
            raise ConvergenceError("no bracket for tau within 200 doublings")
        eps = mpmath.mpf(10) ** (-EXTENDED_DPS + 8)
        for _ in range(MAX_BISECT_STEPS):
            mid = mpmath.sqrt(lo * hi)
            v, ap = f(mid)
            if abs(v - target) <= eps or hi / lo - 1 <= eps:
                return ap ** (1 / pm)
            if v > target:
                lo = mid
            else:
                hi = mid
        raise ConvergenceError("bisection for beta inverse did not converge")


def beta_inv(p, t, nu, tol=DEFAULT_TOL, precision="double"):
    """Inverse profile: the ``a >= t`` with ``beta_t(a) = nu``.

    The root is located along the curve ``tau -> (mu(tau)^{1/p}, beta)``,
    which is monotone, so one bisection in ``tau`` replaces a nested
    solve over ``a``.
    """
    _check(p, t)
    base = beta_base(t)
    if nu < base:
        raise DomainError(f"beta inverse needs nu >= {base}, got {nu}")
    if nu == base:
        return float(t)
    if precision == "extended":
        return _beta_inv_mp(p, t, nu, tol)
    return beta_inv_log(p, t, math.log(float(nu)), tol)


def _log_large_a_slope(p):
    """``ln(2 Gamma(1 + 1/p) (e p)^{1/p})``, the limit of ``ln(beta(a) / a)``."""
    pf = float(p)
    return math.log(2) + math.lgamma(1 + 1 / pf) + (1 + math.log(pf)) / pf


def beta_inv_log(p, t, log_nu, tol=DEFAULT_TOL, log_result=False):
    """``beta_inv`` addressed by ``ln nu``, for count gaps beyond binary64 range.

    Once the root exceeds ``LARGE_A`` the series would need ``~a`` terms, so
    the large-radius limit ``beta(a) ~ 2 Gamma(1 + 1/p) (e p)^{1/p} a`` is
    inverted instead; its relative error there is below 1e-6.  With
    ``log_result`` the return value is ``ln a``, which never overflows.
    """
    _check(p, t)
    base = math.log(beta_base(t))
    if log_nu < base:
        raise DomainError(f"beta inverse needs ln nu >= {base}, got {log_nu}")
    if log_nu == base:
        a = float(t)
        return (math.log(a) if a > 0 else -math.inf) if log_result else a
    log_a = float(log_nu) - _log_large_a_slope(p)
    if log_a > math.log(LARGE_A):
        if log_result:
            return log_a
        return math.exp(log_a) if log_a < 709 else math.inf
    a = float(_beta_inv_vec(p, t, [float(log_nu)], tol)[0][0])
    return math.log(a) if log_result else a
