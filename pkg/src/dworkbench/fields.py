"""Finite fields F_{p^m} with exact scalar arithmetic and a vectorized
enumeration kit for exponential-sum profiles.

Moduli are chosen deterministically: the monic irreducible of the
required degree whose lower-coefficient vector (c_0, ..., c_{m-1}) has
the least value sum(c_i * p^i).  Subfield embeddings are computed by
deterministic root finding, so repeated builds give identical data.

The profile machinery enumerates a field once per (field, exponent set)
and buckets elements by the relative traces of their monomial powers;
every coefficient choice for those monomials then reads its sums from
the same bucket table.  Counts are exact int64 (fields are capped well
below 2^63).
"""

import os
import threading
from functools import lru_cache

import numpy as np


class FieldTooLarge(Exception):
    """Requested enumeration exceeds the configured element cap."""


#: Default enumeration cap (number of field elements per sum).
ENUMERATION_CAP = 10**8

_CHUNK = 1 << 18


def _threads():
    try:
        n = int(os.environ.get("DWORKBENCH_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# dense polynomials over F_p (lists, lowest degree first)


def _ptrim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _ptrim(out)


def _pmod(f, g, p):
    f = list(f)
    dg = len(g) - 1
    if dg == 0:
        return []
    inv_lead = pow(g[-1], -1, p)
    while len(f) - 1 >= dg:
        if f[-1] == 0:
            f.pop()
            continue
        coef = (f[-1] * inv_lead) % p
        shift = len(f) - 1 - dg
        for i, b in enumerate(g):
            f[shift + i] = (f[shift + i] - coef * b) % p
        f.pop()
    return _ptrim(f)


def _pgcd(f, g, p):
    f, g = list(f), list(g)
    while g:
        f, g = g, _pmod(f, g, p)
    if f:
        inv = pow(f[-1], -1, p)
        f = [(c * inv) % p for c in f]
    return f


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _pmod(base, mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        e >>= 1
    return result


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_irreducible(lower, p):
    """Monic x^m + sum(lower[i] x^i) irreducible over F_p."""
    m = len(lower)
    f = list(lower) + [1]
    x = [0, 1]
    xq = _ppowmod(x, p**m, f, p)
    if _ptrim([(a - b) % p for a, b in zip(xq + [0] * 2, x + [0] * len(xq))]):
        return False
    for r in _prime_factors(m):
        xqr = _ppowmod(x, p ** (m // r), f, p)
        diff = [(a - b) % p for a, b in zip(xqr + [0] * 2, x + [0] * len(xqr))]
        if len(_pgcd(diff, f, p)) != 1:
            return False
    return True


def least_irreducible(p, m):
    """Lower coefficients of the least monic irreducible of degree m."""
    if m == 1:
        return (0,)  # f = x
    for code in range(p**m):
        lower = tuple((code // p**i) % p for i in range(m))
        if _is_irreducible(lower, p):
            return lower
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------


class FieldElement:
    """Element of a FiniteField, stored as a coordinate tuple."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(int(c) % field.p for c in coords)

    def __repr__(self):
        return f"FieldElement({self.field.p}^{self.field.m}, {list(self.coords)})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldElement)
            and self.field is other.field
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def __add__(self, other):
        return FieldElement(
            self.field, [a + b for a, b in zip(self.coords, other.coords)]
        )

    def __sub__(self, other):
        return FieldElement(
            self.field, [a - b for a, b in zip(self.coords, other.coords)]
        )

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coords])

    def __mul__(self, other):
        if isinstance(other, int):
            return FieldElement(self.field, [a * other for a in self.coords])
        return FieldElement(
            self.field, self.field._mul_coords(self.coords, other.coords)
        )

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverting zero field element")
        return self ** (self.field.order - 2)

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def encode(self):
        """Integer encoding sum(c_i * p^i); the enumeration order."""
        return sum(c * self.field.p**i for i, c in enumerate(self.coords))

    def trace(self):
        """Absolute trace to F_p, as an integer in [0, p)."""
        return (
            sum(t * c for t, c in zip(self.field._trace_vector, self.coords))
            % self.field.p
        )


class FiniteField:
    """F_{p^m} = F_p[t]/(modulus); use ``finite_field(p, m)`` for the
    cached default-modulus instance."""

    def __init__(self, p, m, modulus=None):
        self.p = p
        self.m = m
        self.order = p**m
        if modulus is None:
            modulus = least_irreducible(p, m)
        self.modulus = tuple(int(c) % p for c in modulus)
        if len(self.modulus) != m:
            raise ValueError("modulus must list the m lower coefficients")
        if m > 1 and not _is_irreducible(list(self.modulus), p):
            raise ValueError("modulus is not irreducible")
        # x^(m+t) mod f for t = 0..m-2, as rows
        rows = []
        cur = [(-c) % p for c in self.modulus]  # x^m
        rows.append(list(cur))
        for _ in range(m - 2):
            cur = [0] + cur
            top = cur.pop()
            cur = [(c - top * fc) % p for c, fc in zip(cur, self.modulus)]
            rows.append(list(cur))
        self._red_rows = tuple(tuple(r) for r in rows)
        self._red_np = np.array(rows, dtype=np.int64) if rows else np.zeros((0, m), np.int64)
        self.zero = FieldElement(self, [0] * m)
        self.one = FieldElement(self, [1] + [0] * (m - 1))
        self.gen = FieldElement(self, [0, 1] + [0] * (m - 2)) if m > 1 else self.one
        self._trace_vector = self._compute_trace_vector()

    def __repr__(self):
        return f"FiniteField(p={self.p}, m={self.m})"

    def element(self, coords):
        if isinstance(coords, int):
            coords = [coords] + [0] * (self.m - 1)
        coords = list(coords)
        if len(coords) != self.m:
            raise ValueError(f"need {self.m} coordinates")
        return FieldElement(self, coords)

    def decode(self, code):
        return FieldElement(self, [(code // self.p**i) % self.p for i in range(self.m)])

    def elements(self):
        for code in range(self.order):
            yield self.decode(code)

    def _mul_coords(self, a, b):
        p, m = self.p, self.m
        conv = [0] * (2 * m - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    conv[i + j] += ai * bj
        low = [c % p for c in conv[:m]]
        for t, c in enumerate(conv[m:]):
            if c:
                row = self._red_rows[t]
                low = [(lo + c * r) % p for lo, r in zip(low, row)]
        return low

    def _compute_trace_vector(self):
        # Tr(t^j) = sum of Frobenius iterates, each computed exactly
        vec = []
        for j in range(self.m):
            x = self.element([0] * j + [1] + [0] * (self.m - 1 - j)) if j else self.one
            acc = self.zero
            y = x
            for _ in range(self.m):
                acc = acc + y
                y = y**self.p
            if any(acc.coords[1:]):
                raise AssertionError("trace landed outside the prime field")
            vec.append(acc.coords[0])
        return tuple(vec)

    def frobenius_matrix(self):
        """Rows F[j] = coords of (t^j)^p; x -> x @ F is the p-power map."""
        rows = []
        for j in range(self.m):
            e = self.element([0] * j + [1] + [0] * (self.m - 1 - j)) if j else self.one
            rows.append((e**self.p).coords)
        return np.array(rows, dtype=np.int64)

    # ---- vectorized kit ------------------------------------------------

    def decode_batch(self, start, stop):
        codes = np.arange(start, stop, dtype=np.int64)
        pows = self.p ** np.arange(self.m, dtype=np.int64)
        return (codes[:, None] // pows) % self.p

    def reduce_batch(self, conv):
        m = self.m
        low = conv[:, :m].copy()
        if conv.shape[1] > m:
            low += conv[:, m:] @ self._red_np
        return low % self.p

    def mul_batch(self, a, b):
        n, m = a.shape
        conv = np.zeros((n, 2 * m - 1), dtype=np.int64)
        for i in range(m):
            conv[:, i : i + m] += a[:, i : i + 1] * b
        return self.reduce_batch(conv)

    def pow_batch(self, a, e, memo=None):
        if memo is None:
            memo = {}
        if e in memo:
            return memo[e]
        if e == 1:
            out = a
        elif e % 2 == 0:
            h = self.pow_batch(a, e // 2, memo)
            out = self.mul_batch(h, h)
        else:
            out = self.mul_batch(self.pow_batch(a, e - 1, memo), a)
        memo[e] = out
        return out


@lru_cache(maxsize=None)
def finite_field(p, m):
    return FiniteField(p, m)


# ---------------------------------------------------------------------------
# polynomials with FieldElement coefficients (for deterministic root finding)


def _ftrim(f):
    while f and f[-1].is_zero():
        f.pop()
    return f


def _fmul(f, g, field):
    if not f or not g:
        return []
    out = [field.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if not a.is_zero():
            for j, b in enumerate(g):
                out[i + j] = out[i + j] + a * b
    return _ftrim(out)


def _fmod(f, g, field):
    f = list(f)
    dg = len(g) - 1
    if dg == 0:
        return []
    inv = g[-1].inverse()
    while len(f) - 1 >= dg:
        if f[-1].is_zero():
            f.pop()
            continue
        coef = f[-1] * inv
        shift = len(f) - 1 - dg
        for i, b in enumerate(g):
            f[shift + i] = f[shift + i] - coef * b
        f.pop()
    return _ftrim(f)


def _fgcd(f, g, field):
    f, g = list(f), list(g)
    while g:
        f, g = g, _fmod(f, g, field)
    if f:
        inv = f[-1].inverse()
        f = [c * inv for c in f]
    return f


def _fpowmod(base, e, mod, field):
    result = [field.one]
    base = _fmod(list(base), mod, field)
    while e:
        if e & 1:
            result = _fmod(_fmul(result, base, field), mod, field)
        base = _fmod(_fmul(base, base, field), mod, field)
        e >>= 1
    return result


def roots_in_field(poly_fp, field):
    """All roots in ``field`` of a squarefree monic polynomial with F_p
    coefficients, found by deterministic equal-degree splitting."""
    g = _ftrim([field.element(c) for c in poly_fp])
    if len(g) - 1 < 1:
        return []
    inv = g[-1].inverse()
    g = [c * inv for c in g]
    # keep only the part splitting in this field
    x = [field.zero, field.one]
    xq = _fpowmod(x, field.order, g, field)
    diff = _ftrim(
        [
            (xq[i] if i < len(xq) else field.zero)
            - (x[i] if i < len(x) else field.zero)
            for i in range(max(len(xq), len(x)))
        ]
    )
    g = _fgcd(g, diff, field) if diff else g

    roots = []

    def split(h):
        if len(h) - 1 == 0:
            return
        if len(h) - 1 == 1:
            roots.append(-h[0] * h[1].inverse())
            return
        if h[0].is_zero():
            roots.append(field.zero)
            split(_ftrim([c for c in h[1:]]))
            return
        half = (field.order - 1) // 2
        code = 0
        while True:
            c = field.decode(code)
            u = _fpowmod([c, field.one], half, h, field)
            u = _ftrim(
                [
                    (u[i] if i < len(u) else field.zero)
                    - (field.one if i == 0 else field.zero)
                    for i in range(max(len(u), 1))
                ]
            )
            factor = _fgcd(h, u, field) if u else []
            if factor and 0 < len(factor) - 1 < len(h) - 1:
                split(factor)
                split(_fmod_div(h, factor, field))
                return
            code += 1

    split(g)
    roots.sort(key=lambda r: r.encode())
    return roots


def _fmod_div(f, g, field):
    """Exact quotient f // g for monic g dividing f."""
    f = list(f)
    out = [field.zero] * (len(f) - len(g) + 1)
    while len(f) >= len(g) and _ftrim(f):
        shift = len(f) - len(g)
        coef = f[-1]
        out[shift] = coef
        for i, b in enumerate(g):
            f[shift + i] = f[shift + i] - coef * b
        f.pop()
    return _ftrim(out)


# ---------------------------------------------------------------------------
# subfield embeddings and relative-trace coordinates


class SubfieldEmbedding:
    """Embedding of F_{p^a} (with its default modulus) into F_{p^m}.

    theta is the deterministically chosen root of the subfield modulus;
    ``rel_matrix`` maps big-field coordinates to the theta-coordinates
    of the relative trace down to the subfield.
    """

    def __init__(self, field, a):
        if field.m % a:
            raise ValueError("subfield degree must divide the field degree")
        self.field = field
        self.sub = finite_field(field.p, a)
        self.a = a
        p, m = field.p, field.m
        if a == m:
            self.theta = field.gen if m > 1 else field.one
            # identity embedding (same modulus by construction)
            theta = self.theta
        else:
            poly = list(self.sub.modulus) + [1]
            roots = roots_in_field(poly, field)
            if not roots:
                raise AssertionError("subfield modulus has no root; bad degrees")
            theta = roots[0]
            self.theta = theta
        # basis matrix: rows = coords of theta^i
        rows = []
        cur = field.one
        for _ in range(a):
            rows.append(cur.coords)
            cur = cur * theta
        basis = np.array(rows, dtype=np.int64) % p
        self._basis = basis
        # Gauss-Jordan over F_p on the a x m matrix to find pivot columns
        pivots = []
        mat = [list(map(int, r)) for r in basis]
        r = 0
        for col in range(m):
            piv = None
            for rr in range(r, a):
                if mat[rr][col] % p:
                    piv = rr
                    break
            if piv is None:
                continue
            mat[r], mat[piv] = mat[piv], mat[r]
            inv_ = pow(mat[r][col], -1, p)
            mat[r] = [(v * inv_) % p for v in mat[r]]
            for rr in range(a):
                if rr != r and mat[rr][col] % p:
                    f = mat[rr][col]
                    mat[rr] = [(v - f * w) % p for v, w in zip(mat[rr], mat[r])]
            pivots.append(col)
            r += 1
            if r == a:
                break
        if r < a:
            raise AssertionError("theta powers are not independent")
        sub_basis = basis[:, pivots]  # a x a, invertible mod p
        inv_sub = _matinv_mod(sub_basis, p)
        # u = y[pivots] @ inv_sub  recovers theta-coordinates of y
        pick = np.zeros((m, a), dtype=np.int64)
        for idx, col in enumerate(pivots):
            pick[col, idx] = 1
        self._coord_map = (pick @ inv_sub) % p  # m x a
        # relative trace matrix: sum of Phi^(a*i)
        phi = field.frobenius_matrix()
        phi_a = np.eye(m, dtype=np.int64)
        for _ in range(a):
            phi_a = (phi_a @ phi) % p
        t_rel = np.zeros((m, m), dtype=np.int64)
        term = np.eye(m, dtype=np.int64)
        for _ in range(m // a):
            t_rel = (t_rel + term) % p
            term = (term @ phi_a) % p
        self.rel_matrix = (t_rel @ self._coord_map) % p  # m x a

    def embed(self, sub_elt):
        """Map an element of F_{p^a} into the big field."""
        acc = self.field.zero
        cur = self.field.one
        for c in sub_elt.coords:
            acc = acc + cur * int(c)
            cur = cur * self.theta
        return acc

    def from_sub_coords(self, coords):
        return self.sub.element(list(coords))

    def rel_coords_batch(self, arr):
        """theta-coordinates of Tr_{E/F_q}(x) for a batch of coords."""
        return (arr @ self.rel_matrix) % self.field.p


def _matinv_mod(mat, p):
    n = mat.shape[0]
    aug = [[int(mat[i, j]) % p for j in range(n)] + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] % p)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [(v * inv) % p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(v - f * w) % p for v, w in zip(aug[r], aug[col])]
    return np.array([row[n:] for row in aug], dtype=np.int64)


# ---------------------------------------------------------------------------
# enumeration profiles


_PROFILES = {}
_PROFILE_LOCK = threading.Lock()


class Profile:
    """Bucket counts for one (field, subfield, exponent set).

    counts[idx] = number of x in the field whose relative-trace
    coordinate vectors (u_e)_e encode to idx; exact integers.
    """

    def __init__(self, p, m, a, exponents):
        self.p, self.m, self.a = p, m, a
        self.exponents = tuple(sorted(set(int(e) for e in exponents)))
        field = finite_field(p, m)
        emb = SubfieldEmbedding(field, a)
        self.field = field
        self.embedding = emb
        qa = p**a
        nbuckets = qa ** len(self.exponents)
        order = field.order

        def chunk_counts(bounds):
            start, stop = bounds
            arr = field.decode_batch(start, stop)
            memo = {}
            idx = np.zeros(stop - start, dtype=np.int64)
            weight = 1
            penc = p ** np.arange(a, dtype=np.int64)
            for e in self.exponents:
                pw = field.pow_batch(arr, e, memo)
                u = emb.rel_coords_batch(pw)
                idx += (u @ penc) * weight
                weight *= qa
            return np.bincount(idx, minlength=nbuckets)

        bounds = [
            (s, min(s + _CHUNK, order)) for s in range(0, order, _CHUNK)
        ]
        total = np.zeros(nbuckets, dtype=np.int64)
        workers = min(_threads(), len(bounds))
        if workers > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=workers) as ex:
                for c in ex.map(chunk_counts, bounds):
                    total += c
        else:
            for b in bounds:
                total += chunk_counts(b)
        self.counts = total

    def decode_bucket(self, idx):
        """Subfield elements (u_e)_e for a bucket index."""
        qa = self.p**self.a
        out = []
        for _ in self.exponents:
            code = idx % qa
            out.append(self.embedding.sub.decode(code))
            idx //= qa
        return out


def get_profile(p, m, a, exponents):
    key = (p, m, a, tuple(sorted(set(int(e) for e in exponents))))
    with _PROFILE_LOCK:
        prof = _PROFILES.get(key)
    if prof is not None:
        return prof
    prof = Profile(p, m, a, exponents)
    with _PROFILE_LOCK:
        _PROFILES.setdefault(key, prof)
    return prof
