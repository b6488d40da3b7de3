"""Randomized reduction pipeline over rational bases.

Sparsification passes to the index-q sublattice
``{v in L : <B^+ v, x> = 0 mod q}`` and shifts the target by ``B z``.  The
gadget transform, decision/search BDD reductions, the CVP' to (A, G)-GapCVP
transform and Kannan's embedding are exact block constructions; irrational
scales enter through row weights (their p-th powers).

Monte-Carlo helpers run one :class:`RandomStream` per trial, indexed by the
trial number, so every statistic is reproducible from its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .basis import (RationalBasis, as_fraction, as_vector, as_weight,
                    direct_sum, is_integer_p, solve_in_span)
from .constants import GadgetProfile, ReductionGeometry, choose_reduction_geometry
from .counting import (cap_ratio, count_lattice, count_zn, dist_to_lattice)
from .enumeration import DEFAULT_BUDGET, Enumerator
from .errors import (DimensionMismatch, DomainError, InfeasibleError, LphardError, StageError)
from .lattice import (NO, YES, AGBddInstance, AGGapCvpInstance, BddInstance, CvpPrimeInstance,
                      SvpInstance, classify_bdd, pow_of)
from .rng import RandomStream

ROUND_BITS = 32  # denominators of rationalised random targets


# ------------------------------------------------------------------ primes

def primes_in(lo, hi):
    """All primes in ``[lo, hi]`` by a sieve of Eratosthenes."""
    lo, hi = max(2, int(lo)), int(hi)
    if hi < lo:
        return []
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(hi) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return [int(v) for v in np.nonzero(sieve[lo:])[0] + lo]


def is_prime(q) -> bool:
    q = int(q)
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def sample_prime(lo, hi, stream: RandomStream):
    """Uniform prime from the integer interval ``[ceil(lo), floor(hi)]``."""
    primes = primes_in(math.ceil(lo), math.floor(hi))
    if not primes:
        raise InfeasibleError(f"no prime in [{lo}, {hi}]")
    return stream.choice(primes)


# ---------------------------------------------------------- sparsification

@dataclass(frozen=True)
class SparsifySpec:
    q: int
    x: tuple
    z: tuple
    seed: int | None = None

    def __post_init__(self):
        if not is_prime(self.q):
            raise DomainError(f"q = {self.q} is not prime")
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))
        object.__setattr__(self, "z", tuple(int(v) for v in self.z))
        if len(self.x) != len(self.z):
            raise DimensionMismatch("x and z must have the same length")
        if any(not 0 <= v < self.q for v in self.x + self.z):
            raise DomainError("x and z entries must lie in [0, q)")

    @classmethod
    def sample(cls, n, q, stream: RandomStream, homogeneous=False):
        x = stream.integers(0, q, n)
        z = [0] * n if homogeneous else stream.integers(0, q, n)
        return cls(q, x, z, stream.seed)


def kernel_generators(n, q, x):
    """Columns (as lists) of an integer matrix whose lattice is ``{a : <a, x> = 0 mod q}``."""
    x = [v % q for v in x]
    if len(x) != n:
        raise DimensionMismatch("x must have one entry per basis vector")
    if not any(x):
        return [[int(i == j) for i in range(n)] for j in range(n)]
    j = next(i for i, v in enumerate(x) if v)
    inv = pow(x[j], -1, q)
    cols = []
    for i in range(n):
        col = [0] * n
        if i == j:
            col[j] = q
        else:
            col[i] = 1
            col[j] = -(x[i] * inv % q)
        cols.append(col)
    return cols


def sublattice_basis_mod_q(basis: RationalBasis, q, x) -> RationalBasis:
    """Basis of ``{v in L : <B^+ v, x> = 0 mod q}`` by the pivot construction."""
    if not is_prime(q):
        raise DomainError(f"q = {q} is not prime")
    cols = kernel_generators(basis.n, q, x)
    U = [[cols[j][i] for j in range(basis.n)] for i in range(basis.n)]
    sub = basis.transform(U)
    expected = 1 if not any(v % q for v in x) else q
    if sub.index_in(basis) != expected:
        raise LphardError("sublattice index check failed")
    return sub


def sparsify(basis: RationalBasis, target, spec: SparsifySpec):
    """``(basis of L', t - B z)``; deterministic given ``spec``.

    The target may lie outside the span (gadget targets generally do).
    """
    target = as_vector(target)
    if len(spec.x) != basis.n:
        raise DimensionMismatch("spec length differs from the basis rank")
    if len(target) != basis.d:
        raise DimensionMismatch("target dimension differs from basis")
    sub = sublattice_basis_mod_q(basis, spec.q, spec.x)
    shift = basis.apply(spec.z)
    return sub, tuple(a - b for a, b in zip(target, shift))


def collect_coefficients(basis: RationalBasis, p, radius_pow, target=None, strict=False,
                         exclude_zero=False, budget=DEFAULT_BUDGET):
    """Coefficient vectors (in ``basis``) of all lattice points in the ball."""
    if float(radius_pow) < 0:
        return np.zeros((0, basis.n), dtype=np.int64)
    en = Enumerator(basis, p, target, budget)
    exact = en.exact and isinstance(radius_pow, Rational)
    R = as_fraction(radius_pow) if exact else float(radius_pow)
    tol = 0 if exact else 1e-9 * max(float(R), 1e-300)
    out = []

    def visit(y, res, cost):
        inside = (cost < R if strict else cost <= R) if exact else \
            (cost < R - tol if strict else cost <= R + tol)
        if inside:
            out.append(en.original_coeffs(y))
        return None

    en.run(R if exact else R + tol, visit, exclude_zero=exclude_zero)
    return np.array(out, dtype=np.int64).reshape(len(out), basis.n)


@dataclass(frozen=True)
class EventStat:
    name: str
    observed: float
    bound: float
    sigma: float
    population: int
    precondition: bool

    @property
    def passes(self) -> bool:
        return self.observed <= self.bound + 3 * self.sigma


@dataclass(frozen=True)
class SparsifyStats:
    q: int
    trials: int
    seed: int
    delta: float
    events: tuple

    @property
    def passes(self) -> bool:
        return all(e.passes for e in self.events)


def _binomial_sigma(prob, trials):
    b = min(max(prob, 0.0), 1.0)
    return math.sqrt(b * (1 - b) / trials)


def _trial_draws(seed, trials, n, q, homogeneous=False):
    X = np.empty((trials, n), dtype=np.int64)
    Z = np.zeros((trials, n), dtype=np.int64)
    base = RandomStream(seed)
    for i in range(trials):
        s = base.child(i)
        X[i] = s.integers(0, q, n)
        if not homogeneous:
            Z[i] = s.integers(0, q, n)
    return X, Z


def sparsify_stats(basis: RationalBasis, target, q, r_short_pow, r_close_pow, r_tooclose_pow,
                   trials, seed, *, p=2, delta=0.5, budget=DEFAULT_BUDGET) -> SparsifyStats:
    """Frequencies of the three bad events of sparsification against their bounds.

    1. a nonzero vector shorter than ``r_short`` survives; bound ``N°(L \\ 0)/q``
    2. at most ``(1 - delta) N / q`` close vectors survive; bound ``q / (delta^2 N)``
    3. a vector closer than ``r_tooclose`` survives; bound ``N°(L, r, t)/q``

    Survival is decided in coefficient space: ``a`` survives iff
    ``<a - z, x> = 0 mod q``.  The ``1/q^n`` statistical term is left out of
    the bounds.
    """
    if not is_prime(q):
        raise DomainError(f"q = {q} is not prime")
    if trials < 1:
        raise DomainError("trials must be >= 1")
    target = as_vector(target)
    n = basis.n
    short = collect_coefficients(basis, p, r_short_pow, None, strict=True, exclude_zero=True, budget=budget)
    close = collect_coefficients(basis, p, r_close_pow, target, budget=budget)
    tooclose = collect_coefficients(basis, p, r_tooclose_pow, target, strict=True, budget=budget)
    lam = None
    if float(r_short_pow) > 0 or float(r_close_pow) > 0:
        from .counting import min_distance
        lam = min_distance(basis, p, budget).value_pow
    X, Z = _trial_draws(seed, trials, n, q)
    zx = np.einsum("ij,ij->i", Z, X)

    def hits(A, shifted):
        if len(A) == 0:
            return np.zeros((0, trials), dtype=bool)
        dots = A @ X.T
        if shifted:
            dots = dots - zx[None, :]
        return dots % q == 0

    qf = float(q)
    qp = float(q) ** float(p)
    n_short, n_close, n_too = len(short), len(close), len(tooclose)
    ev1 = hits(short, False).any(axis=0).mean() if n_short else 0.0
    b1 = n_short / qf
    pre1 = lam is None or float(r_short_pow) <= qp * float(lam)

    if n_close:
        surv = hits(close, True).sum(axis=0)
        ev2 = float((surv <= (1 - delta) * n_close / qf).mean())
        b2 = qf / (delta ** 2 * n_close)
    else:
        ev2, b2 = 0.0, 0.0
    pre2 = lam is None or float(r_close_pow) * 2 ** float(p) < qp * float(lam)

    ev3 = hits(tooclose, True).any(axis=0).mean() if n_too else 0.0
    b3 = n_too / qf
    events = (
        EventStat("short", float(ev1), b1, _binomial_sigma(b1, trials), n_short, bool(pre1)),
        EventStat("close", float(ev2), b2, _binomial_sigma(b2, trials), n_close, bool(pre2)),
        EventStat("too-close", float(ev3), b3, _binomial_sigma(b3, trials), n_too, True),
    )
    return SparsifyStats(int(q), int(trials), int(seed), float(delta), events)


def sparsified_counts(basis, target, spec: SparsifySpec, p, r_short_pow, r_close_pow, r_tooclose_pow,
                      budget=DEFAULT_BUDGET):
    """``(short, close, too-close)`` counts on the actual sublattice (slow path)."""
    sub, t2 = sparsify(basis, target, spec)
    short = count_lattice(sub, p, r_short_pow, None, strict=True, exclude_zero=True, budget=budget).count
    close = count_lattice(sub, p, r_close_pow, t2, budget=budget).count
    too = count_lattice(sub, p, r_tooclose_pow, t2, strict=True, budget=budget).count
    return short, close, too


@dataclass(frozen=True)
class LinearEquationStats:
    m: int
    q: int
    trials: int
    observed: float
    bound: float
    sigma: float

    @property
    def passes(self):
        return self.observed <= self.bound + 3 * self.sigma


def linear_equation_stats(vectors, q, delta, trials, seed) -> LinearEquationStats:
    """Frequency of ``|{i : <a_i, x> = y}| <= (1 - delta) m / q`` over uniform ``(x, y)``.

    The vectors must be pairwise distinct mod q; the bound is ``q / (delta^2 m)``.
    """
    A = np.array(vectors, dtype=np.int64) % q
    m, n = A.shape
    if len({tuple(r) for r in A}) != m:
        raise DomainError("vectors must be pairwise distinct mod q")
    X, Y = _trial_draws(seed, trials, n + 1, q, homogeneous=True)
    y = X[:, -1]
    dots = (A @ X[:, :n].T - y[None, :]) % q == 0
    obs = float((dots.sum(axis=0) <= (1 - delta) * m / q).mean())
    bound = q / (delta ** 2 * m)
    return LinearEquationStats(m, q, trials, obs, bound, _binomial_sigma(bound, trials))


def union_bound_stats(vectors, q, trials, seed, fixed_y=None) -> LinearEquationStats:
    """Frequency of any ``<a_i, x> = y`` against ``m/q`` (random or fixed ``y``)."""
    A = np.array(vectors, dtype=np.int64) % q
    m, n = A.shape
    if fixed_y is not None and not A.any(axis=1).all():
        raise DomainError("fixed-y form needs nonzero vectors")
    X, _ = _trial_draws(seed, trials, n + 1, q, homogeneous=True)
    y = X[:, -1] if fixed_y is None else np.full(trials, fixed_y % q)
    hit = ((A @ X[:, :n].T - y[None, :]) % q == 0).any(axis=0)
    bound = m / q
    return LinearEquationStats(m, q, trials, float(hit.mean()), bound, _binomial_sigma(bound, trials))


# ------------------------------------------------------- block transforms

def _zeros(k):
    return [Fraction(0)] * k


def gadget_transform(cvp_basis: RationalBasis, cvp_target, s_pow, gadget_basis: RationalBasis | None,
                     gadget_target):
    """Block basis ``[[s B', 0], [I, 0], [0, B_g]]`` with target ``(s t', 1/2, t_g)``.

    The scale ``s`` is carried as the weight factor ``s^p`` on the first block
    of rows, so rational ``s^p`` keeps every cost rational.  A ``None`` gadget
    gives the construction without a gadget block.
    """
    t1 = as_vector(cvp_target)
    if len(t1) != cvp_basis.d:
        raise DimensionMismatch("CVP target dimension differs from its basis")
    n1 = cvp_basis.n
    sp = as_weight(s_pow)
    top = cvp_basis.scale_weights(sp)
    ident = RationalBasis.identity(n1)
    rows = [list(r) for r in top.rows] + [list(r) for r in ident.rows]
    weights = list(top.weights) + list(ident.weights)
    target = list(t1) + [Fraction(1, 2)] * n1
    if gadget_basis is not None:
        tg = as_vector(gadget_target)
        if len(tg) != gadget_basis.d:
            raise DimensionMismatch("gadget target dimension differs from its basis")
        solve_in_span(gadget_basis, tg)
        ng = gadget_basis.n
        rows = [r + _zeros(ng) for r in rows] + [_zeros(n1) + list(r) for r in gadget_basis.rows]
        weights += list(gadget_basis.weights)
        target += list(tg)
    return RationalBasis(rows, weights, check=False), tuple(target)


def _append_unit_row(basis: RationalBasis, extra_col, weight):
    """Add a column ``(extra_col, 1)`` and a new last row with the given weight."""
    rows = [list(r) + [c] for r, c in zip(basis.rows, extra_col)]
    rows.append(_zeros(basis.n) + [Fraction(1)])
    return RationalBasis(rows, list(basis.weights) + [weight], check=False)


def search_embed(basis: RationalBasis, target, r_pow, alpha, p):
    """Append the block ``r/alpha`` as a new column; target gets a trailing 0.

    The block is stored as the entry 1 under the weight ``(r/alpha)^p``.
    """
    if float(r_pow) <= 0 or float(alpha) <= 0:
        raise DomainError("r and alpha must be positive")
    target = as_vector(target)
    w = _ratio_pow(r_pow, alpha, p)
    return _append_unit_row(basis, _zeros(basis.d), w), target + (Fraction(0),)


def _ratio_pow(r_pow, alpha, p):
    if isinstance(r_pow, Rational) and isinstance(alpha, Rational) and is_integer_p(p):
        return as_fraction(r_pow) / as_fraction(alpha) ** int(p)
    return float(r_pow) / float(alpha) ** float(p)


def kannan_embed(basis: RationalBasis, target, u_pow) -> RationalBasis:
    """``[[B, t], [0, u]]`` with ``u`` carried as the last-row weight ``u^p``."""
    if float(u_pow) <= 0:
        raise DomainError("u must be positive")
    target = as_vector(target)
    if len(target) != basis.d:
        raise DimensionMismatch("target dimension differs from basis")
    return _append_unit_row(basis, target, as_weight(u_pow))


# ------------------------------------------------------------ BDD pipeline

@dataclass(frozen=True)
class DecisionBddOutput:
    basis: RationalBasis
    target: tuple
    r_pow: object
    q: int
    spec: SparsifySpec
    regime_ok: bool


def decision_bdd_reduce(inst: AGBddInstance, p, seed) -> DecisionBddOutput:
    """(A, G)-BDD to (0, 1)-BDD: sparsify with a prime ``q`` in ``[20 alpha A, 40 alpha A]``.

    ``regime_ok`` records whether ``G >= 400 alpha A``; the reduction still
    runs when it does not.
    """
    alpha, A = float(inst.alpha), inst.A
    if A < 1:
        raise DomainError("need A >= 1")
    if alpha < 0.5:
        raise DomainError("need alpha >= 1/2")
    stream = RandomStream(seed)
    q = sample_prime(20 * alpha * A, 40 * alpha * A, stream)
    spec = SparsifySpec.sample(inst.basis.n, q, stream)
    sub, t2 = sparsify(inst.basis, inst.target, spec)
    return DecisionBddOutput(sub, t2, inst.r_pow, q, spec, inst.G >= 400 * alpha * A)


@dataclass(frozen=True)
class GadgetCheck:
    close: int
    short: int
    too_close: int
    rank: int
    passes: bool


def verify_gadget_profile(gadget_basis: RationalBasis, gadget_target, p, g: GadgetProfile,
                          budget=DEFAULT_BUDGET) -> GadgetCheck:
    """Check ``N(a_G) >= max(nu0^k N°(1, 0), nu1^k N°(a_A))`` by enumeration (k = rank)."""
    k = gadget_basis.n
    pf = float(p)
    close = count_lattice(gadget_basis, p, g.alpha_G ** pf, gadget_target, budget=budget).count
    short = count_lattice(gadget_basis, p, 1.0, None, strict=True, budget=budget).count
    too = count_lattice(gadget_basis, p, g.alpha_A ** pf, gadget_target, strict=True, budget=budget).count
    ok = close >= g.nu0 ** k * short
    ok = ok and (too == 0 if math.isinf(g.nu1) else close >= g.nu1 ** k * too)
    return GadgetCheck(close, short, too, k, bool(ok))


@dataclass(frozen=True)
class EndToEndBdd:
    instance: BddInstance
    r_pow: float
    A: int
    G: int
    q: int
    regime_ok: bool
    geometry: ReductionGeometry


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except LphardError as exc:
        raise StageError(name, exc) from exc


def _agbdd_from_cvp(inst: CvpPrimeInstance, p, g, gadget_basis, gadget_target, alpha, C, budget):
    geo = _stage("geometry", choose_reduction_geometry, p, g, float(inst.gamma), C, alpha)
    check = _stage("gadget-check", verify_gadget_profile, gadget_basis, gadget_target, p, g, budget)
    if not check.passes:
        raise StageError("gadget-check", InfeasibleError(f"gadget counts do not match the profile: {check}"))
    n1 = inst.basis.n
    r_pow, s_pow, l_pow = geo.scaled_powers(n1)
    scaled = gadget_basis.scale_weights(float(l_pow))
    basis, target = _stage("gadget", gadget_transform, inst.basis, inst.target, float(s_pow),
                           scaled, gadget_target)

    def counts():
        pf = float(p)
        tail = direct_sum(RationalBasis.identity(n1), scaled)
        tail_t = (Fraction(1, 2),) * n1 + as_vector(gadget_target)
        short = count_lattice(tail, p, r_pow / alpha ** pf, None, strict=True, exclude_zero=True,
                              budget=budget).count
        gam_pow = float(inst.gamma) ** pf
        too = count_lattice(tail, p, r_pow - gam_pow * s_pow, tail_t, strict=True, budget=budget).count
        G = count_lattice(scaled, p, r_pow - s_pow - n1 / 2 ** pf, gadget_target, budget=budget).count
        A = max(short, too, 1)
        if G <= A:
            raise InfeasibleError(f"gadget count G={G} does not exceed A={A}")
        return A, G

    A, G = _stage("counts", counts)
    return geo, AGBddInstance(basis, target, r_pow, alpha, A, G)


def end_to_end_bdd(inst: CvpPrimeInstance, p, g: GadgetProfile, gadget_basis: RationalBasis,
                   gadget_target, alpha, C, seed, budget=DEFAULT_BUDGET) -> EndToEndBdd:
    """CVP' to BDD: geometry, gadget, sparsification and search embedding."""
    geo, ag = _agbdd_from_cvp(inst, p, g, gadget_basis, gadget_target, alpha, C, budget)
    dec = _stage("sparsify", decision_bdd_reduce, ag, p, seed)
    basis, target = _stage("embed", search_embed, dec.basis, dec.target, ag.r_pow, alpha, p)
    out = BddInstance(basis, target, alpha)
    return EndToEndBdd(out, ag.r_pow, ag.A, ag.G, dec.q, dec.regime_ok, geo)


def decide_bdd_output(result: EndToEndBdd, p, budget=DEFAULT_BUDGET) -> str:
    """Answer of the search-to-decision wrapper with an exact closest-vector oracle."""
    close = dist_to_lattice(result.instance.basis, p, result.instance.target, budget)
    return YES if float(close.value_pow) <= float(result.r_pow) * (1 + 1e-9) else NO


def bdd_promise_holds(result: EndToEndBdd, p, budget=DEFAULT_BUDGET) -> bool:
    return classify_bdd(result.instance, p, budget).valid


# ------------------------------------------------------- CVP' to GapCVP/SVP

@dataclass(frozen=True)
class AgcvpParams:
    """Parameters of the CVP' to (A, G)-GapCVP transform.

    ``c`` scales the annoying-vector allowance ``A``; ``epsilon_u`` is derived.
    """

    epsilon: object
    gamma: object
    gamma_prime: object
    n_prime: int
    n: int
    p: object = 2
    c: float = 1.0
    epsilon_u: object = field(init=False)

    def __post_init__(self):
        p = self.p
        exact = is_integer_p(p) and all(isinstance(v, (Rational, str)) for v in (self.epsilon, self.gamma))
        conv = as_fraction if exact else float
        eps, gam = conv(self.epsilon), conv(self.gamma)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "gamma", gam)
        if not eps > 0:
            raise DomainError("epsilon must be positive")
        if not gam > 1:
            raise DomainError("gamma must exceed 1")
        if self.n < self.n_prime or self.n_prime < 1:
            raise DomainError("need n >= n_prime >= 1")
        gp = pow_of(gam, p)
        three = pow_of(Fraction(3) if exact else 3.0, p)
        object.__setattr__(self, "epsilon_u", gp * eps / (three - 1))
        gpr = float(self.gamma_prime)
        if not (1 <= gpr < self.gamma_prime_limit):
            raise DomainError(f"gamma_prime must lie in [1, {self.gamma_prime_limit})")

    @property
    def gamma_prime_limit(self) -> float:
        p, eu = float(self.p), float(self.epsilon_u)
        gp = float(self.gamma) ** p
        return ((1 + eu + gp * float(self.epsilon)) / (1 + eu + float(self.epsilon))) ** (1 / p)


def cvp_to_agcvp(inst: CvpPrimeInstance, p, params: AgcvpParams, budget=DEFAULT_BUDGET) -> AGGapCvpInstance:
    """Gadget transform with the ``Z^{n - n'}``, ``1/2`` gadget and the lemma's radii."""
    if float(params.p) != float(p):
        raise DomainError("params were built for a different p")
    if inst.basis.n != params.n_prime:
        raise DimensionMismatch("instance rank differs from n_prime")
    n, k = params.n, params.n - params.n_prime
    eps, eu, gam = params.epsilon, params.epsilon_u, params.gamma
    exact = isinstance(eps, Fraction) and is_integer_p(p)
    half_pow = Fraction(1, 2 ** int(p)) if exact else 0.5 ** float(p)
    s_pow = eps * n * half_pow
    r_pow = (1 + eps) * n * half_pow
    u_pow = eu * n * half_pow
    if k:
        gadget = RationalBasis.identity(k)
        gt = (Fraction(1, 2),) * k
    else:
        gadget, gt = None, ()
    basis, target = gadget_transform(inst.basis, inst.target, s_pow, gadget, gt)
    radius = (1 + eu + pow_of(gam, p) * eps) * n * half_pow
    base = count_zn(p, n, 0, radius, strict=True, budget=budget).count
    A = params.c * base
    if float(A).is_integer():
        A = int(A)
    return AGGapCvpInstance(basis, target, r_pow, u_pow, params.gamma_prime, A, 2 ** k)


@dataclass(frozen=True)
class SvpReduction:
    instance: SvpInstance
    q: int
    spec: SparsifySpec
    regime_ok: bool


def agcvp_to_svp(inst: AGGapCvpInstance, p, seed, q_range=(100, 200)) -> SvpReduction:
    """Kannan embedding followed by homogeneous sparsification (``z = 0``).

    ``q`` is a uniform prime in ``[100 A, 200 A]``; the output radius is
    ``(r^p + u^p)^{1/p}`` and the gap is ``gamma'``.
    """
    A = float(inst.A)
    if A <= 0:
        raise DomainError("need A > 0")
    stream = RandomStream(seed)
    q = sample_prime(q_range[0] * A, q_range[1] * A, stream)
    emb = kannan_embed(inst.basis, inst.target, inst.u_pow)
    spec = SparsifySpec.sample(emb.n, q, stream, homogeneous=True)
    sub, _ = sparsify(emb, (Fraction(0),) * emb.d, spec)
    out = SvpInstance(sub, inst.r_pow + inst.u_pow, inst.gamma_prime)
    return SvpReduction(out, q, spec, inst.regime_ok)


# ------------------------------------------------------ random target shift

@dataclass(frozen=True)
class ShiftStats:
    n: int
    trials: int
    theta: float
    base_count: int
    mean_ratio: float
    sigma: float
    floor: float

    @property
    def passes(self) -> bool:
        return self.mean_ratio >= self.floor - 3 * self.sigma


def shift_angle(delta, epsilon) -> float:
    """``arccos((delta^2 + 2 eps - eps^2) / (2 delta))``."""
    delta, epsilon = float(delta), float(epsilon)
    if delta <= 0:
        raise DomainError("delta must be positive")
    arg = (delta ** 2 + 2 * epsilon - epsilon ** 2) / (2 * delta)
    if not -1 - 1e-12 <= arg <= 1 + 1e-12:
        raise DomainError(f"arccos argument {arg} lies outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, arg)))


def random_target_shift(basis: RationalBasis, target, delta, epsilon, trials, seed,
                        budget=DEFAULT_BUDGET) -> ShiftStats:
    """Mean of ``N_2(L, 1 - eps, t')/N_2(L, 1, t)`` over ``t'`` uniform on ``delta S + t``.

    Shifted targets are rounded to multiples of ``2^-32`` so counting stays exact.
    """
    eps, dl = float(epsilon), float(delta)
    if not 0 < eps <= 0.5:
        raise DomainError("epsilon must lie in (0, 1/2]")
    if not eps - 1e-12 <= dl <= 1 - eps + 1e-12:
        raise DomainError("delta must lie in [epsilon, 1 - epsilon]")
    theta = shift_angle(delta, epsilon)
    target = as_vector(target)
    n = basis.n
    base = count_lattice(basis, 2, Fraction(1), target, budget=budget).count
    if base == 0:
        raise DomainError("no lattice point within distance 1 of the target")
    Q, _ = np.linalg.qr(basis.real_matrix(2))
    scale = np.array([math.sqrt(float(w)) for w in basis.weights])
    rad = (1 - as_fraction(epsilon)) ** 2 if isinstance(epsilon, (Rational, str)) else (1 - eps) ** 2
    den = 2 ** ROUND_BITS
    root = RandomStream(seed)
    ratios = []
    for i in range(trials):
        g = root.child(i).normal(n)
        u = Q @ (g / np.linalg.norm(g))
        shift = dl * u / scale
        t2 = tuple(v + Fraction(int(round(float(s) * den)), den) for v, s in zip(target, shift))
        ratios.append(count_lattice(basis, 2, rad, t2, budget=budget).count / base)
    ratios = np.array(ratios, dtype=float)
    sigma = float(ratios.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    floor = cap_ratio(n, theta) if n >= 2 else float(theta > 0)
    return ShiftStats(n, trials, theta, base, float(ratios.mean()), sigma, floor)
