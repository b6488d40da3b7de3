"""Depth-first lattice enumeration in l_p norms.

Pruning happens in l_2 on a Gram-Schmidt factorisation of the real basis,
using ``||v||_2 <= d^{max(0, 1/2 - 1/p)} ||v||_p`` plus a small relative
safety margin, so no point of the l_p ball is ever cut.  Each surviving leaf
is then classified with exact integer or rational arithmetic whenever the
costs are rational (integer p, rational weights); otherwise in binary64.

Before enumeration the basis is LLL-reduced (an integer-exact unimodular
change of basis computed from a scaled integer approximation of the real
matrix) and its columns are ordered so that the levels visited first have
the largest orthogonalised lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from .basis import RationalBasis, as_vector
from .errors import BudgetExceeded, DimensionMismatch, RankTooLarge

MAX_RANK = 12
PRUNE_SLACK = 1e-7


@dataclass(frozen=True)
class EnumerationBudget:
    """Node cap for one enumeration; ``coeff_box`` optionally bounds |coefficients|.

    Hitting the box is reported as a budget failure, never as a silent cut.
    """

    max_nodes: int = 50_000_000
    coeff_box: int | None = None

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")


DEFAULT_BUDGET = EnumerationBudget()


def _lll_transform(M):
    """Unimodular integer U (n x n, list of rows) with ``M U`` LLL-reduced."""
    n = M.shape[1]
    scale = 2.0 ** 40 / max(1e-300, float(np.abs(M).max()))
    rows = np.rint(M.T * scale)
    dm = DomainMatrix([[ZZ(int(v)) for v in r] for r in rows], (n, M.shape[0]), ZZ)
    try:
        _, T = dm.lll_transform()
    except Exception:  # rounding made the rows dependent; skip the reduction
        return [[int(i == j) for j in range(n)] for i in range(n)]
    T = T.to_Matrix()
    # rows of T*rows are the new basis vectors, so U = T^t
    return [[int(T[j, i]) for j in range(n)] for i in range(n)]


def _processing_order(M):
    """Column order whose trailing Gram-Schmidt lengths are greedily largest."""
    remaining = list(range(M.shape[1]))
    tail = []
    while remaining:
        sub = M[:, remaining]
        pinv = np.linalg.pinv(sub)
        dist = 1.0 / np.maximum(np.linalg.norm(pinv, axis=1), 1e-300)
        pick = remaining[int(np.argmax(dist))]
        tail.append(pick)
        remaining.remove(pick)
    return tail[::-1]


class Enumerator:
    """Enumerates lattice points within a shrinkable l_p radius of a target.

    ``run(radius_pow, visit)`` calls ``visit(y, residual_int, cost)`` for every
    point whose cost does not exceed the current radius (up to the float
    classification tolerance on the inexact path).  ``visit`` may return a new,
    smaller radius power.  ``y`` is the coefficient vector in the internal
    reduced basis; use :meth:`original_coeffs` and :meth:`vector` to map back.
    """

    def __init__(self, basis: RationalBasis, p, target=None, budget=DEFAULT_BUDGET,
                 max_rank=MAX_RANK, reduce=True):
        if basis.n > max_rank:
            raise RankTooLarge(f"rank {basis.n} exceeds the cap {max_rank}")
        self.basis = basis
        self.p = p
        self.pf = float(p)
        self.budget = budget
        self.target = as_vector(target) if target is not None else (Fraction(0),) * basis.d
        if len(self.target) != basis.d:
            raise DimensionMismatch("target dimension differs from basis")
        n = basis.n
        U = _lll_transform(basis.real_matrix(p)) if reduce and n > 1 else \
            [[int(i == j) for j in range(n)] for i in range(n)]
        red = basis.transform(U)
        order = _processing_order(red.real_matrix(p))
        self.U = [[U[i][j] for j in order] for i in range(n)]
        self.red = basis.transform(self.U)

        M = self.red.real_matrix(p)
        tr = basis.real_vector(self.target, p)
        Q, R = np.linalg.qr(M)
        self.R = R
        self.diag = np.abs(np.diag(R))
        self.yt = Q.T @ tr
        self.perp2 = max(0.0, float(tr @ tr - self.yt @ self.yt))
        self.factor = basis.d ** max(0.0, 0.5 - 1.0 / self.pf)

        den = 1
        for r in self.red.rows:
            for v in r:
                den = math.lcm(den, v.denominator)
        for v in self.target:
            den = math.lcm(den, v.denominator)
        self.den = den
        self.cols = [[int(v * den) for v in self.red.column(j)] for j in range(n)]
        self.t_int = [int(v * den) for v in self.target]
        self.exact = basis.exact_costs(p)
        if self.exact:
            self.ip = int(p)
            self.den_pow = den ** self.ip
            groups = {}
            for i, w in enumerate(basis.weights):
                groups.setdefault(w, []).append(i)
            self.groups = list(groups.items())
        else:
            self.wf = np.array([float(w) for w in basis.weights])
        self.nodes = 0

    # ------------------------------------------------------------ utilities
    def original_coeffs(self, y):
        n = len(y)
        return tuple(sum(self.U[i][j] * y[j] for j in range(n)) for i in range(n))

    def vector(self, y):
        return self.red.apply(y)

    def cost_of_residual(self, res):
        if self.exact:
            ip = self.ip
            if len(self.groups) == 1:
                w, _ = self.groups[0]
                s = sum(abs(r) ** ip for r in res)
                return w * Fraction(s, self.den_pow)
            tot = Fraction(0)
            for w, idx in self.groups:
                tot += w * sum(abs(res[i]) ** ip for i in idx)
            return tot / self.den_pow
        r = np.abs(np.array(res, dtype=float)) / self.den
        return float(np.dot(self.wf, r ** self.pf))

    def _set_bound(self, radius_pow):
        rp = float(radius_pow)
        if rp < 0:
            self.bound2 = -1.0
            return
        r2 = (rp ** (1.0 / self.pf) * self.factor) ** 2
        self.bound2 = r2 * (1 + PRUNE_SLACK) + 1e-12 - self.perp2

    # -------------------------------------------------------------- search
    def run(self, radius_pow, visit, exclude_zero=False):
        self.nodes = 0
        self._set_bound(radius_pow)
        if self.bound2 < 0:
            return
        n = self.basis.n
        self._x = [0] * n
        self._visit = visit
        self._exclude_zero = exclude_zero
        res = [-v for v in self.t_int]
        self._dfs(n - 1, 0.0, res)

    def _dfs(self, k, partial, res):
        R = self.R
        x = self._x
        s = 0.0
        for j in range(k + 1, len(x)):
            if x[j]:
                s += R[k, j] * x[j]
        c = (self.yt[k] - s) / R[k, k]
        rkk = self.diag[k]
        rem = self.bound2 - partial
        if rem < 0:
            return
        w = math.sqrt(rem) / rkk
        lo = math.ceil(c - w - 1e-9 * (1 + abs(c)))
        hi = math.floor(c + w + 1e-9 * (1 + abs(c)))
        box = self.budget.coeff_box
        if box is not None and (lo < -box or hi > box):
            raise BudgetExceeded(f"coefficient range [{lo}, {hi}] leaves the box +-{box}",
                                 nodes=self.nodes)
        center = int(round(c))
        col = self.cols[k]
        # zig-zag outward from the rounded center, each side stops once too far
        for side in (0, 1):
            xi = center if side == 0 else center - 1
            step = 1 if side == 0 else -1
            while lo <= xi <= hi:
                dd = (rkk * (xi - c)) ** 2
                if partial + dd > self.bound2:
                    break
                self.nodes += 1
                if self.nodes > self.budget.max_nodes:
                    raise BudgetExceeded(f"enumeration exceeded {self.budget.max_nodes} nodes",
                                         nodes=self.nodes)
                x[k] = xi
                nres = [r + xi * cj for r, cj in zip(res, col)] if xi else res
                if k == 0:
                    self._leaf(nres)
                else:
                    self._dfs(k - 1, partial + dd, nres)
                xi += step
        x[k] = 0

    def _leaf(self, res):
        x = self._x
        if self._exclude_zero and not any(x):
            return
        cost = self.cost_of_residual(res)
        new = self._visit(tuple(x), res, cost)
        if new is not None:
            self._set_bound(new)


def is_exact_radius(radius_pow) -> bool:
    return isinstance(radius_pow, Rational)
