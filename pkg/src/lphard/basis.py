"""Exact rational lattice bases with optional per-row l_p weights.

A basis stores a d x n matrix of ``Fraction`` entries whose columns are the
basis vectors.  Each row i may carry a positive weight ``w_i``: the real
lattice is ``diag(w^{1/p}) B``, so that

    ||v||_p^p = sum_i w_i |(Bx)_i|^p.

Weights let irrational scalings such as ``s = (eps n)^{1/p} / 2`` enter
through their exact p-th power.  A weight may be a float when no rational
p-th power is available; costs then fall back to floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
import math

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import DimensionMismatch, DomainError, NotInLattice


def as_fraction(x) -> Fraction:
    """Exact conversion of ints, Fractions, floats and rational strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational literal: {x!r}") from exc
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x}")
        return Fraction(float(x))
    raise DomainError(f"cannot convert {type(x).__name__} to a rational")


def as_weight(x):
    """Weights stay exact when given as rationals and float otherwise."""
    if isinstance(x, (float, np.floating)):
        if not (x > 0 and math.isfinite(x)):
            raise DomainError(f"weights must be positive and finite, got {x}")
        return float(x)
    w = as_fraction(x)
    if w <= 0:
        raise DomainError(f"weights must be positive, got {w}")
    return w


def as_vector(v):
    return tuple(as_fraction(x) for x in v)


def is_integer_p(p) -> bool:
    return float(p).is_integer() and p >= 1


def _to_dm(rows):
    return DomainMatrix([[QQ(x.numerator, x.denominator) for x in r] for r in rows],
                        (len(rows), len(rows[0]) if rows else 0), QQ)


def _from_q(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class RationalBasis:
    rows: tuple
    weights: tuple

    def __init__(self, rows, weights=None, check=True):
        rows = tuple(as_vector(r) for r in rows)
        if not rows or not rows[0]:
            raise DimensionMismatch("a basis needs at least one row and one column")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("ragged basis rows")
        if weights is None:
            weights = (Fraction(1),) * len(rows)
        weights = tuple(as_weight(w) for w in weights)
        if len(weights) != len(rows):
            raise DimensionMismatch("one weight per row is required")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "weights", weights)
        if check and self.gram_rank() != n:
            raise DomainError("basis columns are linearly dependent")

    @classmethod
    def from_columns(cls, cols, weights=None, check=True):
        cols = [as_vector(c) for c in cols]
        d = len(cols[0])
        return cls([[c[i] for c in cols] for i in range(d)], weights, check)

    @classmethod
    def identity(cls, n, scale=1):
        s = as_fraction(scale)
        return cls([[s if i == j else Fraction(0) for j in range(n)] for i in range(n)], check=False)

    @property
    def d(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    @property
    def exact_weights(self) -> bool:
        return all(isinstance(w, Fraction) for w in self.weights)

    @property
    def unweighted(self) -> bool:
        return all(w == 1 for w in self.weights)

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    def columns(self):
        return [self.column(j) for j in range(self.n)]

    def gram_rank(self) -> int:
        return _to_dm(self.rows).rank()

    def apply(self, x):
        """``B x`` for an integer (or rational) coefficient vector."""
        if len(x) != self.n:
            raise DimensionMismatch("coefficient length differs from rank")
        return tuple(sum((r[j] * x[j] for j in range(self.n) if x[j]), Fraction(0)) for r in self.rows)

    def transform(self, U):
        """Basis ``B U`` for an integer n x m matrix U (list of rows)."""
        m = len(U[0])
        rows = [[sum((r[k] * U[k][j] for k in range(self.n) if U[k][j]), Fraction(0))
                 for j in range(m)] for r in self.rows]
        return RationalBasis(rows, self.weights, check=False)

    def with_weights(self, weights):
        return RationalBasis(self.rows, weights, check=False)

    def scale_weights(self, factor, rows=None):
        """Multiply the weights of ``rows`` (default all) by ``factor``."""
        idx = range(self.d) if rows is None else rows
        f = as_weight(factor)
        w = list(self.weights)
        for i in idx:
            w[i] = as_weight(w[i] * f) if isinstance(w[i], Fraction) and isinstance(f, Fraction) \
                else float(w[i]) * float(f)
        return RationalBasis(self.rows, w, check=False)

    def real_matrix(self, p):
        """Float matrix ``diag(w^{1/p}) B``."""
        E = np.array([[float(x) for x in r] for r in self.rows], dtype=float)
        s = np.array([float(w) ** (1.0 / float(p)) for w in self.weights])
        return E * s[:, None]

    def real_vector(self, v, p):
        s = np.array([float(w) ** (1.0 / float(p)) for w in self.weights])
        return np.array([float(x) for x in v]) * s

    def exact_costs(self, p) -> bool:
        return is_integer_p(p) and self.exact_weights

    def cost(self, p, v):
        """``||v||_p^p`` of an ambient vector under the row weights.

        Exact ``Fraction`` when p is a positive integer and weights are
        rational, float otherwise.
        """
        if len(v) != self.d:
            raise DimensionMismatch("vector dimension differs from basis")
        if self.exact_costs(p):
            ip = int(p)
            return sum((w * abs(x) ** ip for w, x in zip(self.weights, v)), Fraction(0))
        pf = float(p)
        return math.fsum(float(w) * abs(float(x)) ** pf for w, x in zip(self.weights, v))

    def residual_cost(self, p, x, target):
        bx = self.apply(x)
        return self.cost(p, [a - b for a, b in zip(bx, target)])

    def index_in(self, other: "RationalBasis") -> Fraction:
        """``[other : self]`` from the Gram determinant ratio.

        For a sublattice the ratio ``det G(self) / det G(other)`` is the square
        of the index; row weights cancel in the ratio.
        """
        ratio = self.gram_det() / other.gram_det()
        num, den = math.isqrt(ratio.numerator), math.isqrt(ratio.denominator)
        if num * num != ratio.numerator or den * den != ratio.denominator:
            raise DomainError("Gram determinant ratio is not a perfect square")
        return Fraction(num, den)

    def gram_det(self) -> Fraction:
        dm = _to_dm(self.rows)
        return _from_q((dm.transpose() * dm).det())


def coefficients_of(basis: RationalBasis, v):
    """Integer vector ``a`` with ``B a = v``; raises if ``v`` is not in the lattice."""
    v = as_vector(v)
    if len(v) != basis.d:
        raise DimensionMismatch("vector dimension differs from basis")
    B = _to_dm(basis.rows)
    Bt = B.transpose()
    rhs = _to_dm([[x] for x in v])
    sol = (Bt * B).lu_solve(Bt * rhs)
    a = [_from_q(sol[i, 0].element) for i in range(basis.n)]
    if basis.apply(a) != v:
        raise NotInLattice("vector is not in the span of the basis")
    if any(x.denominator != 1 for x in a):
        raise NotInLattice("vector has non-integer coefficients")
    return tuple(int(x) for x in a)


def solve_in_span(basis: RationalBasis, v):
    """Rational coefficients of ``v`` in the basis, or raise if outside the span."""
    v = as_vector(v)
    B = _to_dm(basis.rows)
    Bt = B.transpose()
    sol = (Bt * B).lu_solve(Bt * _to_dm([[x] for x in v]))
    a = tuple(_from_q(sol[i, 0].element) for i in range(basis.n))
    if basis.apply(a) != v:
        raise NotInLattice("vector is outside the span of the basis")
    return a


def direct_sum(b1: RationalBasis, b2: RationalBasis) -> RationalBasis:
    """Block-diagonal basis of ``L1 (+) L2``."""
    z1 = [Fraction(0)] * b2.n
    z2 = [Fraction(0)] * b1.n
    rows = [list(r) + z1 for r in b1.rows] + [z2 + list(r) for r in b2.rows]
    return RationalBasis(rows, b1.weights + b2.weights, check=False)


def stack_blocks(blocks):
    """Block-diagonal stacking of several bases (used by the gadget layout)."""
    out = blocks[0]
    for b in blocks[1:]:
        out = direct_sum(out, b)
    return out
