"""Truncated p-adic rings for the trace-formula engine.

Two scalar rings, both with all coefficients reduced mod p^N:

- ``CyclotomicRing``: Z[zeta_p]/(p^N) on the basis 1..zeta^(p-2);
- ``MixedRing``: Z[zeta_p, t]/(p^N, Phi_p, h) where h is a monic
  degree-a lift of an irreducible polynomial over F_p chosen so that t
  is a Teichmuller point (t^q = t mod p^N).  That choice makes the
  inverse Frobenius twist the substitution t -> t^(p^(a-1)), a small
  integer matrix on the t-coordinates.

Valuations are read exactly: rewriting zeta = 1 - pi on the power basis
is a unimodular change of coordinates, and the pi-adic valuations
(p-1)*v_p(b) + k of the summands are pairwise distinct mod p-1, so the
minimum over coordinates is the exact valuation.  Readings at or above
N(p-1) pi-units are reported as "at precision limit", never as numbers.

Ring products used in bulk (matrix algebra) run through Kronecker
packing: an element becomes one big integer with guard bits sized for a
whole row-by-column accumulation, so a dot product is plain integer
multiply-adds followed by a single unpack-and-reduce.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb

from .fields import finite_field


class PrecisionExhausted(ArithmeticError):
    """A computation needed digits beyond the working precision."""


class NonConvergence(ArithmeticError):
    """An iteration failed to stabilize; working precision is misconfigured."""


# ---------------------------------------------------------------------------


class PadicCyclotomic:
    """Element of Z[zeta_p]/(p^N), coefficients canonical in [0, p^N)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(c % ring.pN for c in coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, PadicCyclotomic)
            and self.ring is other.ring
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.ring), self.coeffs))

    def __repr__(self):
        return f"PadicCyclotomic(p={self.ring.p}, N={self.ring.N}, {list(self.coeffs)})"

    def __add__(self, other):
        return PadicCyclotomic(
            self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __sub__(self, other):
        return PadicCyclotomic(
            self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __neg__(self):
        return PadicCyclotomic(self.ring, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return PadicCyclotomic(self.ring, [a * other for a in self.coeffs])
        return self.ring.mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)


class CyclotomicRing:
    """Z[zeta_p]/(p^N); use ``cyclotomic_ring(p, N)`` for the cached
    instance."""

    def __init__(self, p, N):
        self.p = p
        self.N = N
        self.pN = p**N
        self.dim = p - 1
        self.zero = PadicCyclotomic(self, [0] * self.dim)
        self.one = PadicCyclotomic(self, [1] + [0] * (self.dim - 1))
        self.zeta = PadicCyclotomic(self, [0, 1] + [0] * (self.dim - 2))
        # binomial transform rows: zeta^i = sum_k binom(i,k)(-1)^k pi^k
        self._pi_rows = tuple(
            tuple((-1) ** k * comb(i, k) for i in range(self.dim))
            for k in range(self.dim)
        )

    def __repr__(self):
        return f"CyclotomicRing(p={self.p}, N={self.N})"

    def from_int(self, n):
        return PadicCyclotomic(self, [n] + [0] * (self.dim - 1))

    def from_coeffs(self, coeffs):
        return PadicCyclotomic(self, coeffs)

    def element_to(self, other_ring, x):
        """Reduce (or view) an element into another precision level."""
        if other_ring.pN > self.pN:
            raise PrecisionExhausted("cannot lift to higher precision")
        return PadicCyclotomic(other_ring, x.coeffs)

    def mul(self, x, y):
        p = self.p
        folded = [0] * p  # exponents mod p
        for i, a in enumerate(x.coeffs):
            if a:
                for j, b in enumerate(y.coeffs):
                    if b:
                        k = i + j
                        folded[k if k < p else k - p] += a * b
        top = folded.pop()
        return PadicCyclotomic(self, [c - top for c in folded])

    def inverse_unit(self, u):
        """Inverse of a unit (nonzero residue mod the maximal ideal)."""
        resid = sum(u.coeffs) % self.p  # image of u under zeta -> 1, mod p
        if resid == 0:
            raise ZeroDivisionError("not a unit in the local ring")
        x = self.from_int(pow(resid, -1, self.p))
        steps = max(1, (self.N * (self.p - 1)).bit_length() + 1)
        two = self.from_int(2)
        for _ in range(steps):
            x = x * (two - u * x)
        return x

    def exact_div_p(self, x, j):
        """Exact division by p^j; raises when not divisible."""
        pj = self.p**j
        if any(c % pj for c in x.coeffs):
            raise PrecisionExhausted(f"element not divisible by p^{j}")
        return PadicCyclotomic(self, [c // pj for c in x.coeffs])

    def pi_coordinates(self, x):
        """Integer coordinates b_k with x = sum b_k pi^k, pi = 1 - zeta."""
        return tuple(
            sum(r * c for r, c in zip(row, x.coeffs)) % self.pN
            for row in self._pi_rows
        )

    def pi_valuation(self, x):
        """(value, exact): pi-adic valuation, or (N(p-1), False) at limit."""
        limit = self.N * (self.p - 1)
        best = None
        for k, b in enumerate(self.pi_coordinates(x)):
            if b:
                v = 0
                while b % self.p == 0:
                    b //= self.p
                    v += 1
                cand = (self.p - 1) * v + k
                if best is None or cand < best:
                    best = cand
        if best is None or best >= limit:
            return limit, False
        return best, True

    def ord_p(self, x):
        """Exact ord_p as a Fraction, or None at the precision limit."""
        v, exact = self.pi_valuation(x)
        return Fraction(v, self.p - 1) if exact else None

    # ---- packing ---------------------------------------------------------

    def packer(self, max_terms):
        return _Packer(self, 2 * self.p - 3, 1, max_terms)

    def _coeff_grid(self, x):
        return [[c] for c in x.coeffs]

    def _from_grid(self, grid):
        """Reduce an unpacked (2p-3) x 1 grid back to canonical form."""
        p = self.p
        folded = [0] * p
        for e, row in enumerate(grid):
            folded[e if e < p else e - p] += row[0]
        top = folded.pop()
        return PadicCyclotomic(self, [c - top for c in folded])

    def twist(self, x, k):
        return x  # Frobenius fixes the cyclotomic field

    @property
    def twist_trivial(self):
        return True


@lru_cache(maxsize=None)
def cyclotomic_ring(p, N):
    return CyclotomicRing(p, N)


# ---------------------------------------------------------------------------


class MixedRingElement:
    """Element of Z[zeta_p, t]/(p^N, Phi_p, h): grid coeffs[i][j] on
    zeta^i t^j."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(
            tuple(c % ring.pN for c in row) for row in coeffs
        )

    def __eq__(self, other):
        return (
            isinstance(other, MixedRingElement)
            and self.ring is other.ring
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.ring), self.coeffs))

    def __repr__(self):
        return f"MixedRingElement(p={self.ring.p}, a={self.ring.a}, {self.coeffs})"

    def __add__(self, other):
        return MixedRingElement(
            self.ring,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.coeffs, other.coeffs)
            ],
        )

    def __sub__(self, other):
        return MixedRingElement(
            self.ring,
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.coeffs, other.coeffs)
            ],
        )

    def __neg__(self):
        return MixedRingElement(self.ring, [[-a for a in row] for row in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return MixedRingElement(
                self.ring, [[a * other for a in row] for row in self.coeffs]
            )
        return self.ring.mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self):
        return all(c == 0 for row in self.coeffs for c in row)

    def t_degree(self):
        deg = -1
        for row in self.coeffs:
            for j, c in enumerate(row):
                if c and j > deg:
                    deg = j
        return deg


class MixedRing:
    """Z[zeta_p, t]/(p^N, Phi_p, h) with t a Teichmuller point."""

    def __init__(self, p, N, a, sub_modulus=None):
        self.p = p
        self.N = N
        self.a = a
        self.pN = p**N
        self.dim = (p - 1, a)
        if sub_modulus is None:
            sub_modulus = finite_field(p, a).modulus
        self._h0 = tuple(int(c) % p for c in sub_modulus)
        self.h = self._teichmuller_modulus()
        self.zero = MixedRingElement(self, [[0] * a for _ in range(p - 1)])
        one = [[0] * a for _ in range(p - 1)]
        one[0][0] = 1
        self.one = MixedRingElement(self, one)
        self._pi_rows = tuple(
            tuple((-1) ** k * comb(i, k) for i in range(p - 1))
            for k in range(p - 1)
        )
        self._twist_mats = self._build_twists()
        self._mul_packer = _Packer(self, 2 * p - 3, 2 * a - 1, 1)

    def __repr__(self):
        return f"MixedRing(p={self.p}, N={self.N}, a={self.a})"

    # ---- unramified-subring polynomial helpers (int vectors mod (h, p^N))

    def _ureduce(self, vec, h):
        """Reduce an int vector (t-power coefficients) mod (h, p^N)."""
        vec = list(vec)
        a = self.a
        while len(vec) > a:
            top = vec.pop()
            if top:
                shift = len(vec) - a
                for i, hc in enumerate(h):
                    vec[shift + i] = (vec[shift + i] - top * hc) % self.pN
        return [c % self.pN for c in vec] + [0] * (a - len(vec))

    def _umul(self, u, v, h):
        conv = [0] * (2 * self.a - 1)
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    if y:
                        conv[i + j] += x * y
        return self._ureduce(conv, h)

    def _upow(self, u, e, h):
        result = [1] + [0] * (self.a - 1)
        base = list(u)
        while e:
            if e & 1:
                result = self._umul(result, base, h)
            base = self._umul(base, base, h)
            e >>= 1
        return result

    def _teichmuller_vec(self, vec, h):
        """Iterate v -> v^q mod (h, p^N) to its Teichmuller fixed point."""
        q = self.p**self.a
        cur = [c % self.pN for c in vec]
        for _ in range(self.N + 2):
            nxt = self._upow(cur, q, h)
            if nxt == cur:
                return cur
            cur = nxt
        raise NonConvergence("Teichmuller iteration did not stabilize")

    def _teichmuller_modulus(self):
        """Monic degree-a divisor h of t^q - t mod p^N lifting the
        subfield modulus: the minimal polynomial of the Teichmuller lift
        of the residue generator."""
        a, p, pN = self.a, self.p, self.pN
        h0 = list(self._h0)
        t_vec = [0, 1] + [0] * (a - 2) if a > 1 else [self._h0[0]]
        if a == 1:
            # h = t - teich(c) where c is the residue root of h0
            c = (-self._h0[0]) % p
            cur = c
            for _ in range(self.N + 2):
                nxt = pow(cur, p, pN)
                if nxt == cur:
                    break
                cur = nxt
            return ((-cur) % pN,)
        theta = self._teichmuller_vec(t_vec, h0)
        # expand prod_i (X - theta^(p^i)); coefficients must be rational
        conjugates = [self._upow(theta, p**i, h0) for i in range(a)]
        poly = [[1] + [0] * (a - 1)]  # coefficients (as subring vectors), deg 0
        for conj in conjugates:
            neg = [(-c) % pN for c in conj]
            new = [[0] * a for _ in range(len(poly) + 1)]
            for i, coef in enumerate(poly):
                new[i + 1] = [(x + y) % pN for x, y in zip(new[i + 1], coef)]
                prod = self._umul(coef, neg, h0)
                new[i] = [(x + y) % pN for x, y in zip(new[i], prod)]
            poly = new
        h = []
        for coef in poly[:-1]:
            if any(c % pN for c in coef[1:]):
                raise NonConvergence("symmetric functions not rational")
            h.append(coef[0] % pN)
        # sanity: monic, reduces to h0 mod p, and t^q = t in the new ring
        assert poly[-1][0] % pN == 1
        assert [c % p for c in h] == h0
        tq = self._upow([0, 1] + [0] * (a - 2), p**a, h)
        if tq != [0, 1] + [0] * (a - 2):
            raise NonConvergence("t is not a Teichmuller point mod h")
        return tuple(h)

    def _build_twists(self):
        """Matrices of tau^(-k) on the t-coordinates, k = 0..a-1."""
        a, pN = self.a, self.pN
        if a == 1:
            return [((1,),)] * 1
        u = self._upow([0, 1] + [0] * (a - 2), self.p ** (a - 1), self.h)
        rows = []
        cur = [1] + [0] * (a - 1)
        for _ in range(a):
            rows.append(tuple(cur))
            cur = self._umul(cur, u, self.h)
        t1 = tuple(rows)
        mats = [tuple(tuple(1 if i == j else 0 for j in range(a)) for i in range(a))]
        cur_mat = mats[0]
        for _ in range(1, a):
            cur_mat = tuple(
                tuple(
                    sum(cur_mat[i][k] * t1[k][j] for k in range(a)) % pN
                    for j in range(a)
                )
                for i in range(a)
            )
            mats.append(cur_mat)
        # tau^(-a) must be the identity on the Teichmuller coordinates
        final = tuple(
            tuple(
                sum(mats[a - 1][i][k] * t1[k][j] for k in range(a)) % pN
                for j in range(a)
            )
            for i in range(a)
        )
        if final != mats[0]:
            raise NonConvergence("tau^a is not the identity")
        return mats

    # ---- element constructors -------------------------------------------

    def from_int(self, n):
        grid = [[0] * self.a for _ in range(self.p - 1)]
        grid[0][0] = n
        return MixedRingElement(self, grid)

    def from_cyclotomic(self, x):
        grid = [[c] + [0] * (self.a - 1) for c in x.coeffs]
        return MixedRingElement(self, grid)

    def from_unramified(self, vec):
        grid = [[0] * self.a for _ in range(self.p - 1)]
        grid[0] = [c % self.pN for c in vec]
        return MixedRingElement(self, grid)

    def teichmuller(self, coords):
        """Teichmuller lift of a subfield element given by F_p coords."""
        vec = self._teichmuller_vec([int(c) % self.p for c in coords], list(self.h))
        return self.from_unramified(vec)

    # ---- arithmetic -------------------------------------------------------

    def mul(self, x, y):
        pk = self._mul_packer
        return pk.unpack(pk.pack(x) * pk.pack(y))

    def inverse_unit(self, u):
        # residue of u mod the maximal ideal: zeta -> 1, t -> residue field;
        # invert there and run Newton.  Only needed for units with rational
        # residue (all engine uses); check and invert via the subfield.
        resid_vec = [sum(row[j] for row in u.coeffs) % self.p for j in range(self.a)]
        fq = finite_field(self.p, self.a)
        r = fq.element(resid_vec)
        if r.is_zero():
            raise ZeroDivisionError("not a unit in the local ring")
        inv0 = r.inverse()
        x = self.teichmuller(inv0.coords)  # any lift works as a seed
        steps = max(1, (self.N * (self.p - 1)).bit_length() + 1)
        two = self.from_int(2)
        for _ in range(steps):
            x = x * (two - u * x)
        return x

    def twist(self, x, k):
        """tau^(-k): fix zeta, map t-coordinates through the twist matrix."""
        k %= self.a
        if k == 0:
            return x
        mat = self._twist_mats[k]
        a = self.a
        rows = []
        for row in x.coeffs:
            rows.append(
                [
                    sum(row[i] * mat[i][j] for i in range(a)) % self.pN
                    for j in range(a)
                ]
            )
        return MixedRingElement(self, rows)

    @property
    def twist_trivial(self):
        return False

    def packer(self, max_terms):
        return _Packer(self, 2 * self.p - 3, 2 * self.a - 1, max_terms)

    def _coeff_grid(self, x):
        return [list(row) for row in x.coeffs]

    def _from_grid(self, grid):
        """Reduce a (2p-3) x (2a-1) product grid to canonical form."""
        p, a, pN = self.p, self.a, self.pN
        h = self.h
        # reduce t-degree: columns a..2a-2
        width = len(grid[0])
        for f in range(width - 1, a - 1, -1):
            for row in grid:
                c = row[f]
                if c:
                    row[f] = 0
                    shift = f - a
                    for i, hc in enumerate(h):
                        row[shift + i] -= c * hc
        # fold zeta exponents mod p, then eliminate zeta^(p-1)
        folded = [[0] * a for _ in range(p)]
        for e, row in enumerate(grid):
            tgt = folded[e if e < p else e - p]
            for j in range(a):
                tgt[j] += row[j]
        top = folded.pop()
        return MixedRingElement(
            self,
            [[c - t for c, t in zip(row, top)] for row in folded],
        )

    def pi_coordinates(self, x):
        """Grid b[k][j] with x = sum_{k,j} b[k][j] pi^k t^j."""
        cols = list(zip(*x.coeffs))  # per t-degree: zeta-coefficient vectors
        out_cols = []
        for col in cols:
            out_cols.append(
                [
                    sum(r * c for r, c in zip(row, col)) % self.pN
                    for row in self._pi_rows
                ]
            )
        return [list(b) for b in zip(*out_cols)]

    def pi_valuation(self, x):
        limit = self.N * (self.p - 1)
        best = None
        for k, row in enumerate(self.pi_coordinates(x)):
            for b in row:
                if b:
                    v = 0
                    while b % self.p == 0:
                        b //= self.p
                        v += 1
                    cand = (self.p - 1) * v + k
                    if best is None or cand < best:
                        best = cand
        if best is None or best >= limit:
            return limit, False
        return best, True

    def ord_p(self, x):
        v, exact = self.pi_valuation(x)
        return Fraction(v, self.p - 1) if exact else None


@lru_cache(maxsize=None)
def mixed_ring(p, N, a):
    return MixedRing(p, N, a)


# ---------------------------------------------------------------------------


class _Packer:
    """Kronecker packing of ring elements into single integers.

    Slot width is sized so that a dot product of up to ``max_terms``
    packed products never overflows a slot; a whole row-by-column
    accumulation then needs only one unpack-and-reduce.
    """

    def __init__(self, ring, zslots, tslots, max_terms):
        self.ring = ring
        self.zslots = zslots
        self.tslots = tslots
        pairs = (ring.p - 1) * getattr(ring, "a", 1)
        slot_bits = 2 * (ring.pN - 1).bit_length() + (pairs * max_terms).bit_length() + 2
        self.slot_bytes = (slot_bits + 7) // 8
        self.val_bytes = (ring.pN - 1).bit_length() // 8 + 1
        self.total_bytes = self.slot_bytes * zslots * tslots

    def pack(self, x):
        buf = bytearray(self.total_bytes)
        sb = self.slot_bytes
        vb = self.val_bytes
        zs = self.zslots
        for i, row in enumerate(self.ring._coeff_grid(x)):
            for j, c in enumerate(row):
                if c:
                    pos = (j * zs + i) * sb
                    buf[pos : pos + vb] = int(c).to_bytes(vb, "little")
        return int.from_bytes(buf, "little")

    def unpack(self, n):
        sb = self.slot_bytes
        data = n.to_bytes(self.total_bytes + sb, "little")
        zs, ts = self.zslots, self.tslots
        grid = []
        for i in range(zs):
            row = []
            for j in range(ts):
                pos = (j * zs + i) * sb
                row.append(int.from_bytes(data[pos : pos + sb], "little"))
            grid.append(row)
        return self.ring._from_grid(grid)
