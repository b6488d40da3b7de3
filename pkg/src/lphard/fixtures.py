"""Named lattices, random desk-scale bases and planted CVP' instances."""

from __future__ import annotations

from fractions import Fraction

from .basis import RationalBasis
from .lattice import NO, YES, CvpPrimeInstance, classify_cvp_prime
from .rng import RandomStream

HALF = Fraction(1, 2)


def zn(n) -> RationalBasis:
    return RationalBasis.identity(n)


def d4() -> RationalBasis:
    cols = [(1, -1, 0, 0), (0, 1, -1, 0), (0, 0, 1, -1), (0, 0, 1, 1)]
    return RationalBasis.from_columns(cols)


def e8() -> RationalBasis:
    cols = [[2, 0, 0, 0, 0, 0, 0, 0]]
    for i in range(6):
        v = [0] * 8
        v[i], v[i + 1] = -1, 1
        cols.append(v)
    cols.append([HALF] * 8)
    return RationalBasis.from_columns(cols)


def random_basis(stream: RandomStream, n, d=None, entries=3, max_tries=100) -> RationalBasis:
    """Full-rank integer basis with entries in ``[-entries, entries]``."""
    d = d or n
    for _ in range(max_tries):
        vals = stream.integers(-entries, entries + 1, d * n)
        rows = [vals[i * n:(i + 1) * n] for i in range(d)]
        b = RationalBasis(rows, check=False)
        if b.gram_rank() == n:
            return b
    raise RuntimeError("could not draw a full-rank basis")


def random_unimodular(stream: RandomStream, n, steps=None):
    """Product of random elementary column operations (list of rows)."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps or 2 * n):
        i, j = stream.integers(0, n), stream.integers(0, n)
        if i == j:
            continue
        c = stream.integers(-1, 2)
        for row in U:
            row[j] += c * row[i]
    return U


def random_target(stream: RandomStream, d, den=4, spread=3):
    return tuple(Fraction(v, den) for v in stream.integers(-spread * den, spread * den + 1, d))


def planted_yes_cvp(stream: RandomStream, n, p, gamma, entries=3, max_tries=50) -> CvpPrimeInstance:
    """CVP' YES instance: ``t = B x + e`` with ``x`` binary and a small error ``e``."""
    for _ in range(max_tries):
        B = random_basis(stream, n, entries=entries)
        x = stream.integers(0, 2, n)
        Bx = B.apply(x)
        # |e_i| <= 1/(2 n) keeps ||e||_p <= 1 for every p >= 1
        e = [Fraction(stream.integers(-4, 5), 8 * n) for _ in range(n)]
        inst = CvpPrimeInstance(B, tuple(a + b for a, b in zip(Bx, e)), gamma)
        if classify_cvp_prime(inst, p) == YES:
            return inst
    raise RuntimeError("could not plant a YES instance")


def planted_no_cvp(stream: RandomStream, n, p, gamma, max_tries=50) -> CvpPrimeInstance:
    """CVP' NO instance: a deep hole of a scaled, re-based ``Z^n``.

    The target sits at ``m (1/2 + w)`` for the lattice ``m Z^n`` so its
    distance is ``m n^{1/p} / 2 > gamma``; a random unimodular change of
    basis hides the structure.
    """
    m = int(2 * float(gamma)) + 2
    for _ in range(max_tries):
        U = random_unimodular(stream, n)
        B = RationalBasis.identity(n, m).transform(U)
        w = stream.integers(-1, 2, n)
        t = tuple(m * (HALF + v) for v in w)
        inst = CvpPrimeInstance(B, t, gamma)
        if classify_cvp_prime(inst, p) == NO:
            return inst
    raise RuntimeError("could not plant a NO instance")


# bundled sample instances used by the CLI pipelines and the end-to-end tests
def sample_yes_cvp(gamma=2) -> CvpPrimeInstance:
    return CvpPrimeInstance(RationalBasis.identity(2, 3), (3, Fraction(1, 5)), gamma)


def sample_no_cvp(gamma=2) -> CvpPrimeInstance:
    return CvpPrimeInstance(RationalBasis.identity(2, 4), (2, -2), gamma)
