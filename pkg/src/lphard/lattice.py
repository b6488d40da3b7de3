"""Problem instances and brute-force classifiers for their promises.

Radii that may be irrational are stored as p-th powers (``r_pow``).  The
classifiers evaluate every promise quantity by exact enumeration and report
which case holds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .basis import RationalBasis, as_fraction, as_vector, is_integer_p
from .counting import count_lattice, dist_to_lattice, min_distance, a_pu
from .enumeration import DEFAULT_BUDGET, Enumerator
from .errors import DimensionMismatch, DomainError

YES, NO, NEITHER = "YES", "NO", "NEITHER"


def _check_target(basis, target):
    target = as_vector(target)
    if len(target) != basis.d:
        raise DimensionMismatch(f"target has dimension {len(target)}, basis has {basis.d}")
    return target


def _num(x):
    """Keep rationals exact and everything else float."""
    return as_fraction(x) if isinstance(x, (Rational, str)) else float(x)


def pow_of(x, p):
    """``x^p``, exact for rational x and integer p."""
    if isinstance(x, Rational) and is_integer_p(p):
        return as_fraction(x) ** int(p)
    return float(x) ** float(p)


def root_of(x_pow, p):
    return float(x_pow) ** (1.0 / float(p))


@dataclass(frozen=True)
class CvpPrimeInstance:
    basis: RationalBasis
    target: tuple
    gamma: object

    def __post_init__(self):
        object.__setattr__(self, "target", _check_target(self.basis, self.target))
        object.__setattr__(self, "gamma", _num(self.gamma))
        if self.gamma < 1:
            raise DomainError("gamma must be >= 1")


@dataclass(frozen=True)
class BddInstance:
    basis: RationalBasis
    target: tuple
    alpha: object

    def __post_init__(self):
        object.__setattr__(self, "target", _check_target(self.basis, self.target))
        object.__setattr__(self, "alpha", _num(self.alpha))
        if self.alpha <= 0:
            raise DomainError("alpha must be positive")


@dataclass(frozen=True)
class AGBddInstance:
    basis: RationalBasis
    target: tuple
    r_pow: object
    alpha: object
    A: int
    G: int

    def __post_init__(self):
        object.__setattr__(self, "target", _check_target(self.basis, self.target))
        object.__setattr__(self, "r_pow", _num(self.r_pow))
        object.__setattr__(self, "alpha", _num(self.alpha))
        if not (self.G > self.A >= 0):
            raise DomainError("need G > A >= 0")
        if self.r_pow <= 0 or self.alpha <= 0:
            raise DomainError("r and alpha must be positive")


@dataclass(frozen=True)
class AGGapCvpInstance:
    basis: RationalBasis
    target: tuple
    r_pow: object
    u_pow: object
    gamma_prime: object
    A: object
    G: int

    def __post_init__(self):
        object.__setattr__(self, "target", _check_target(self.basis, self.target))
        for name in ("r_pow", "u_pow", "gamma_prime", "A"):
            object.__setattr__(self, name, _num(getattr(self, name)))
        if self.r_pow <= 0 or self.u_pow <= 0:
            raise DomainError("r and u must be positive")
        if self.gamma_prime < 1:
            raise DomainError("gamma_prime must be >= 1")

    @property
    def regime_ok(self):
        """Whether the count gap ``G >= 1000 A`` required downstream holds."""
        return self.G >= 1000 * self.A


@dataclass(frozen=True)
class SvpInstance:
    basis: RationalBasis
    r_pow: object
    gamma: object

    def __post_init__(self):
        object.__setattr__(self, "r_pow", _num(self.r_pow))
        object.__setattr__(self, "gamma", _num(self.gamma))
        if self.r_pow <= 0:
            raise DomainError("r must be positive")
        if self.gamma < 1:
            raise DomainError("gamma must be >= 1")


# ------------------------------------------------------------- classifiers

def _gamma_pow(gamma, p):
    return pow_of(gamma, p)


def classify_cvp_prime(inst: CvpPrimeInstance, p, budget=DEFAULT_BUDGET):
    """YES if a 0/1 combination lies within distance 1, NO if dist > gamma."""
    B, t = inst.basis, inst.target
    one = Fraction(1)
    for bits in itertools.product((0, 1), repeat=B.n):
        if B.residual_cost(p, bits, t) <= one:
            return YES
    closest = dist_to_lattice(B, p, t, budget)
    if closest.value_pow > _gamma_pow(inst.gamma, p):
        return NO
    return NEITHER


@dataclass(frozen=True)
class BddStatus:
    lambda1: float
    lambda1_pow: object
    dist: float
    dist_pow: object
    witness: tuple
    valid: bool


def classify_bdd(inst: BddInstance, p, budget=DEFAULT_BUDGET) -> BddStatus:
    """Evaluate ``dist(t, L) <= alpha * lambda_1(L)`` and return the witness."""
    lam = min_distance(inst.basis, p, budget)
    close = dist_to_lattice(inst.basis, p, inst.target, budget)
    valid = close.value_pow <= _gamma_pow(inst.alpha, p) * lam.value_pow
    return BddStatus(lam.value, lam.value_pow, close.value, close.value_pow, close.vector, bool(valid))


@dataclass(frozen=True)
class AGBddStatus:
    short_count: int
    close_count: int
    case: str


def classify_agbdd(inst: AGBddInstance, p, budget=DEFAULT_BUDGET) -> AGBddStatus:
    """YES: few short vectors and at least G close ones; NO: at most A close ones."""
    B = inst.basis
    short_pow = inst.r_pow / _gamma_pow(inst.alpha, p)
    short = count_lattice(B, p, short_pow, None, strict=True, budget=budget, exclude_zero=True).count
    close = count_lattice(B, p, inst.r_pow, inst.target, budget=budget).count
    if short <= inst.A and close >= inst.G:
        case = YES
    elif close <= inst.A:
        case = NO
    else:
        case = NEITHER
    return AGBddStatus(short, close, case)


@dataclass(frozen=True)
class AGCvpStatus:
    close_count: int
    annoying: int
    case: str


def classify_agcvp(inst: AGGapCvpInstance, p, budget=DEFAULT_BUDGET) -> AGCvpStatus:
    B = inst.basis
    close = count_lattice(B, p, inst.r_pow, inst.target, budget=budget).count
    far_pow = _gamma_pow(inst.gamma_prime, p) * (inst.r_pow + inst.u_pow)
    annoying = a_pu(B, p, inst.u_pow, far_pow, inst.target, budget)
    if close >= inst.G:
        case = YES
    elif annoying <= inst.A:
        case = NO
    else:
        case = NEITHER
    return AGCvpStatus(close, annoying, case)


@dataclass(frozen=True)
class SvpStatus:
    lambda1: float
    lambda1_pow: object
    case: str


def classify_svp(inst: SvpInstance, p, budget=DEFAULT_BUDGET) -> SvpStatus:
    """YES if ``lambda_1 <= r``, NO if ``lambda_1 > gamma r``.

    Enumerates only up to ``gamma r``; when nothing is found there the
    reported ``lambda1`` is that bound (a lower bound on the true value).
    """
    B = inst.basis
    far_pow = _gamma_pow(inst.gamma, p) * inst.r_pow
    best = [None]

    def visit_min(y, res, cost):
        if best[0] is None or cost < best[0]:
            best[0] = cost
            return cost
        return None

    exact = B.exact_costs(p) and isinstance(far_pow, Rational)
    en = Enumerator(B, p, None, budget)
    en.run(far_pow if exact else float(far_pow) * (1 + 1e-9), visit_min, exclude_zero=True)
    if best[0] is None:
        return SvpStatus(root_of(far_pow, p), far_pow, NO)
    lam = best[0]
    if lam <= inst.r_pow:
        case = YES
    elif lam > far_pow:
        case = NO
    else:
        case = NEITHER
    return SvpStatus(root_of(lam, p), lam, case)
