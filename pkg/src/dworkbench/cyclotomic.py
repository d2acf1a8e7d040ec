"""Exact arithmetic in Z[zeta_p] for an odd prime p.

Elements are stored canonically on the basis 1, zeta, ..., zeta^(p-2)
using 1 + zeta + ... + zeta^(p-1) = 0.  Coefficients are arbitrary
precision integers: exponential sums have components growing like
q^(k/2) and norms raise them to the (p-1)-th power.

The q-normalized valuation is computed two independent ways (norm via
conjugate product, and repeated exact division by 1 - zeta) and the two
readings are compared on every call.
"""

from fractions import Fraction

from .rationals import INF


class CyclotomicInteger:
    """Element of Z[zeta_p], canonical on the power basis of length p-1."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) == p:
            # reduce the zeta^(p-1) slot: zeta^(p-1) = -(1 + ... + zeta^(p-2))
            top = coeffs.pop()
            coeffs = [c - top for c in coeffs]
        if len(coeffs) != p - 1:
            raise ValueError(f"need {p - 1} (or {p}) coefficients, got {len(coeffs)}")
        self.p = p
        self.coeffs = tuple(int(c) for c in coeffs)

    @classmethod
    def zero(cls, p):
        return cls(p, [0] * (p - 1))

    @classmethod
    def one(cls, p):
        return cls(p, [1] + [0] * (p - 2))

    @classmethod
    def from_int(cls, p, n):
        return cls(p, [n] + [0] * (p - 2))

    @classmethod
    def zeta_power(cls, p, e):
        """zeta^e as a canonical element."""
        coeffs = [0] * p
        coeffs[e % p] = 1
        return cls(p, coeffs)

    @classmethod
    def from_exponent_counts(cls, p, counts):
        """sum over residues r of counts[r] * zeta^r (counts length p)."""
        if len(counts) != p:
            raise ValueError("need one count per residue class mod p")
        return cls(p, list(counts))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, CyclotomicInteger)
            and self.p == other.p
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"CyclotomicInteger(p={self.p}, {list(self.coeffs)})"

    def _check(self, other):
        if not isinstance(other, CyclotomicInteger) or other.p != self.p:
            raise TypeError("mixed cyclotomic rings")

    def __add__(self, other):
        self._check(other)
        return CyclotomicInteger(self.p, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return CyclotomicInteger(self.p, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return CyclotomicInteger(self.p, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicInteger(self.p, [a * other for a in self.coeffs])
        self._check(other)
        p = self.p
        folded = [0] * p  # exponents mod p (zeta^p = 1)
        a, b = self.coeffs, other.coeffs
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        folded[(i + j) % p] += ai * bj
        return CyclotomicInteger(p, folded)

    __rmul__ = __mul__

    def conjugate(self, j):
        """Galois map zeta -> zeta^j for j in 1..p-1."""
        p = self.p
        if j % p == 0:
            raise ValueError("j must be prime to p")
        out = [0] * p
        for i, c in enumerate(self.coeffs):
            out[(i * j) % p] += c
        return CyclotomicInteger(p, out)

    def norm(self):
        """Norm to Z: product of all p-1 conjugates (a rational integer)."""
        if self.is_zero():
            return 0
        prod = CyclotomicInteger.one(self.p)
        for j in range(1, self.p):
            prod = prod * self.conjugate(j)
        if any(c != 0 for c in prod.coeffs[1:]):
            raise ArithmeticError("conjugate product is not rational")
        return prod.coeffs[0]

    def divide_exact(self, n):
        """Coordinatewise exact division by a rational integer."""
        if any(c % n for c in self.coeffs):
            raise ArithmeticError(f"coefficients not divisible by {n}")
        return CyclotomicInteger(self.p, [c // n for c in self.coeffs])

    def pi_valuation(self):
        """Number of exact divisions by (1 - zeta) before failure; INF at 0.

        Uses (1 - zeta) * u = p with u the product of the other
        uniformizer cofactors: x/(1-zeta) = x*u/p, and integrality of
        the quotient is exactly coordinatewise divisibility by p.
        """
        if self.is_zero():
            return INF
        p = self.p
        # p = (1-zeta)^(p-1) * prod_{j=2}^{p-1} (1 + zeta + ... + zeta^(j-1)),
        # so x/(1-zeta) = x * (1-zeta)^(p-2) * prod(...) / p.
        cofactor = CyclotomicInteger.one(p)
        for j in range(2, p):
            cofactor = cofactor * CyclotomicInteger(p, [1] * j + [0] * (p - j))
        one_minus_zeta = CyclotomicInteger(p, [1, -1] + [0] * (p - 3))
        for _ in range(p - 2):
            cofactor = cofactor * one_minus_zeta
        x = self
        v = 0
        while True:
            y = x * cofactor
            if any(c % p for c in y.coeffs):
                return v
            x = y.divide_exact(p)
            v += 1


def _int_val(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def ord_q(x, p, a):
    """p-adic valuation normalized so that ord_q(p^a) = 1.

    Primary reading: ord_p(Norm(x)) / ((p-1) * a) -- the prime above p
    is unique and totally ramified so all conjugates share one
    valuation.  A second reading by repeated exact division by
    (1 - zeta) must agree exactly.
    """
    if x.is_zero():
        return INF
    nrm = x.norm()
    v_norm = Fraction(_int_val(abs(nrm), p), (p - 1) * a)
    v_pi = Fraction(x.pi_valuation(), (p - 1) * a)
    if v_norm != v_pi:
        raise ArithmeticError(
            f"valuation cross-check failed: norm route {v_norm} != pi route {v_pi}"
        )
    return v_norm
