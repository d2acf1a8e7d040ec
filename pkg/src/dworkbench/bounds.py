"""Lower bounds on coefficient valuations from the support of f.

For y^p - y = f(x) with Supp(f) the set of exponents with nonzero
coefficient, the n-th series coefficient G_n is a sum over compositions
n = sum l*m_l (l in the support, m_l >= 0), each term of valuation at
least (sum m_l)/(p-1).  ``min_weight`` computes the minimal sum m_l by
exact dynamic programming (unbounded coin change minimizing coin count);
everything downstream -- the g-bounds, the linear floor, and the two
closed forms used as verification targets -- derives from it.

All arithmetic is exact (integers and Fractions); the certificates built
on top of these bounds are rigorous only because of that.
"""

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .rationals import INF


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class _WeightTable:
    """Memoized coin-change table, grown on demand under a lock."""

    def __init__(self, support):
        self.support = tuple(sorted(support))
        self._table = [0]  # weight[0] = 0 (empty composition)
        self._lock = threading.Lock()

    def ensure(self, n):
        if n < len(self._table):
            return
        with self._lock:
            if n < len(self._table):
                return
            table = self._table
            for m in range(len(table), n + 1):
                best = INF
                for step in self.support:
                    if step <= m:
                        prev = table[m - step]
                        if prev is not INF and prev + 1 < best:
                            best = prev + 1
                table.append(best)

    def weight(self, n):
        self.ensure(n)
        return self._table[n]


@dataclass(frozen=True)
class SupportPattern:
    """Prime p, degree d, and the exponent support of f.

    Only membership in the support matters here; actual coefficient
    values live with the oracle and the p-adic engine.
    """

    p: int
    d: int
    support: frozenset

    def __post_init__(self):
        if not _is_prime(self.p) or self.p < 3:
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.d < 2 or gcd(self.d, self.p) != 1:
            raise ValueError(f"degree must be >= 2 and coprime to p, got {self.d}")
        supp = frozenset(int(x) for x in self.support)
        if not supp or self.d not in supp:
            raise ValueError("support must contain the degree d")
        if any(x < 1 or x > self.d for x in supp):
            raise ValueError("support members must lie in [1, d]")
        object.__setattr__(self, "support", supp)
        object.__setattr__(self, "_weights", _WeightTable(supp))

    def __repr__(self):
        return f"SupportPattern(p={self.p}, d={self.d}, support={sorted(self.support)})"


def min_weight(n, pattern):
    """Minimal number of support steps summing to n, or INF.

    min sum(m_l) over m_l >= 0 with sum(l*m_l) = n; INF when n < 0 or n
    is not in the numerical semigroup generated by the support.
    min_weight(0) = 0 (the empty composition).
    """
    if n < 0:
        return INF
    return pattern._weights.weight(n)


def g_bound(i, j, pattern):
    """Lower bound for ord_p of the (i, j) matrix coefficient G_{p*i-j}.

    Equals min_weight(p*i - j)/(p - 1); valid for every choice of
    coefficient values on the support.  INF when p*i < j.
    """
    if i < 1 or j < 1:
        raise ValueError("indices are 1-based and must be >= 1")
    w = min_weight(pattern.p * i - j, pattern)
    if w is INF:
        return INF
    return Fraction(w, pattern.p - 1)


def linear_floor(pattern):
    """Coefficient c with g_bound(i, j) >= c*(p*i - j) whenever p*i >= j.

    Each support step adds at most d to n and exactly 1 to the weight,
    so min_weight(n) >= n/d and the bound follows with c = 1/(d(p-1)).
    """
    return Fraction(1, pattern.d * (pattern.p - 1))


def closed_form_x1(n):
    """Piecewise closed-form lower bound for min_weight(n, {2,5})/6.

    A lower bound only: e.g. at n = 3 it returns 1/2 while the exact
    weight is INF (3 is not representable by 2 and 5).
    """
    if n < 0:
        return INF
    if n % 5 in (1, 3):
        return Fraction(n, 12) - Fraction(n // 5 - 1, 4)
    return Fraction(n, 12) - Fraction(n // 5, 4)


def closed_form_x2(n):
    """Exact value of min_weight(n, {1,7})/4: (floor(n/7) + (n mod 7))/4."""
    if n < 0:
        return INF
    return Fraction(n // 7 + n % 7, 4)
