"""Zoned truncated min-plus matrix certificates.

Given matrices M_1..M_a over a p-adic ring whose entries obey the
support bounds ord_p(M_t)_{ij} >= g(i, j), the product entries obey
ord_p(M_1...M_a)_{ij} > sigma*a + (i-j)/s whenever the shifted matrix
D_{ij} = g(i, j) - sigma - (i-j)/s stays positive (entrywise and in the
two tail zones) after log2(k) min-plus squarings.  A matrix is tracked
as an exact ell x ell block plus two zone floors:

  mixed_floor: lower bound whenever exactly one index exceeds ell,
  outer_floor: lower bound whenever both indices exceed ell.

Floors are ">=" bounds (the zone minimum may be attained); the final
lemma-style conclusions are strict because they add a positive block
entry or floor on top of the telescoping sigma/drift terms.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .bounds import g_bound, linear_floor
from .rationals import INF, qmin


class SignConditionFailed(ValueError):
    """The linear tail bound is not monotone; increase s or change strategy."""


class CertificateFailed(Exception):
    """Final block entries or zone floors failed positivity."""

    def __init__(self, message, nonpositive):
        super().__init__(message)
        self.nonpositive = nonpositive


class ParamsNotFound(Exception):
    """Parameter search exhausted its caps without a certificate."""


@dataclass(frozen=True)
class CertificateParams:
    """sigma: per-factor slope gain; s: drift denominator; ell: block
    size; k: factor-count granularity (power of two)."""

    sigma: Fraction
    s: int
    ell: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "sigma", Fraction(self.sigma))
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if self.k not in (2, 4, 8, 16, 32):
            raise ValueError("k must be a power of two in {2,...,32}")

    def to_json_dict(self):
        return {"sigma": str(self.sigma), "s": self.s, "ell": self.ell, "k": self.k}


@dataclass(frozen=True)
class ZoneSummary:
    step: int
    block_min: Fraction
    mixed_floor: Fraction
    outer_floor: Fraction

    def to_json_dict(self):
        return {
            "step": self.step,
            "block_min": str(self.block_min),
            "mixed_floor": str(self.mixed_floor),
            "outer_floor": str(self.outer_floor),
        }


@dataclass(frozen=True)
class ZonedBoundMatrix:
    """Exact ell x ell block plus mixed/outer tail floors.

    Block entries and floors are Fractions or INF (e.g. the min-plus
    identity has +inf off-diagonal entries and +inf floors).
    """

    ell: int
    block: tuple
    mixed_floor: Fraction
    outer_floor: Fraction

    def block_min(self):
        return qmin(v for row in self.block for v in row)

    def summary(self, step):
        return ZoneSummary(step, self.block_min(), self.mixed_floor, self.outer_floor)

    def entry(self, i, j):
        """Zone value at 1-based (i, j): exact block entry or floor."""
        if i <= self.ell and j <= self.ell:
            return self.block[i - 1][j - 1]
        if i > self.ell and j > self.ell:
            return self.outer_floor
        return self.mixed_floor


def _shifted_entry(pattern, params, i, j):
    g = g_bound(i, j, pattern)
    if g is INF:
        return INF
    return g - params.sigma - Fraction(i - j, params.s)


def tail_floor(pattern, params, ell=None, band=None):
    """Zone floors for the shifted matrix D outside the ell-block.

    On p*i >= j (elsewhere D is +inf) the linear bound
    LB(i, j) = c*(p*i - j) - sigma - (i-j)/s satisfies D >= LB.  The
    monotonicity conditions d(LB)/di = p*c - 1/s >= 0 and
    d(LB)/dj = 1/s - c >= 0 push each zone's minimum to its lower-left
    boundary, so finitely many evaluations suffice.  Cells within a band
    of width ``band`` past the block are evaluated with the exact D
    (sharper than LB); beyond the band the LB line values cover the rest
    by monotonicity.
    """
    if ell is None:
        ell = params.ell
    if band is None:
        band = 2 * ell
    p = pattern.p
    c = linear_floor(pattern)
    s = params.s
    if p * c - Fraction(1, s) < 0 or Fraction(1, s) - c < 0:
        raise SignConditionFailed(
            f"monotonicity failed for p={p}, c={c}, s={s}: "
            f"need p*c >= 1/s and 1/s >= c"
        )

    def lb(i, j):
        return c * (p * i - j) - params.sigma - Fraction(i - j, s)

    edge = ell + band  # last exactly-checked index

    # mixed zone, component A: i > ell, j <= ell
    cand = [lb(edge + 1, j) for j in range(1, ell + 1)]
    for i in range(ell + 1, edge + 1):
        for j in range(1, ell + 1):
            v = _shifted_entry(pattern, params, i, j)
            if v is not INF:
                cand.append(v)
    mixed_a = qmin(cand)

    # mixed zone, component B: j > ell, i <= ell
    cand = [lb(i, edge + 1) for i in range(1, ell + 1)]
    for i in range(1, ell + 1):
        for j in range(ell + 1, edge + 1):
            v = _shifted_entry(pattern, params, i, j)
            if v is not INF:
                cand.append(v)
    mixed_b = qmin(cand)

    # outer zone: i, j > ell
    cand = [lb(edge + 1, edge + 1)]
    cand.extend(lb(edge + 1, j) for j in range(ell + 1, edge + 1))
    cand.extend(lb(i, edge + 1) for i in range(ell + 1, edge + 1))
    for i in range(ell + 1, edge + 1):
        for j in range(ell + 1, edge + 1):
            v = _shifted_entry(pattern, params, i, j)
            if v is not INF:
                cand.append(v)
    outer = qmin(cand)

    return min(mixed_a, mixed_b), outer


def build_shifted_matrix(pattern, params, ell=None, band=None):
    """D_{ij} = g(i,j) - sigma - (i-j)/s on the block, floors via tail_floor."""
    if ell is None:
        ell = params.ell
    mixed, outer = tail_floor(pattern, params, ell=ell, band=band)
    block = tuple(
        tuple(_shifted_entry(pattern, params, i, j) for j in range(1, ell + 1))
        for i in range(1, ell + 1)
    )
    return ZonedBoundMatrix(ell=ell, block=block, mixed_floor=mixed, outer_floor=outer)


_BIG = 1 << 62  # +inf sentinel for the integer min-plus kernel


def star_product(a, b):
    """Zoned min-plus product.

    Block entry (i,j) = min over k <= ell of a_{ik}+b_{kj}, capped with
    a.mixed+b.mixed which covers every path through k > ell (both hops
    are then mixed-zone).  Floors combine by the corresponding zone
    case analysis; +inf absorbs.
    """
    if a.ell != b.ell:
        raise ValueError("block sizes differ")
    ell = a.ell
    dens = [
        v.denominator
        for mat in (a, b)
        for row in mat.block
        for v in row
        if v is not INF
    ]
    dens += [
        f.denominator
        for f in (a.mixed_floor, b.mixed_floor, a.outer_floor, b.outer_floor)
        if f is not INF
    ]
    denom = lcm(*dens) if dens else 1

    def enc(v):
        return _BIG if v is INF else int(v * denom)

    def dec(n):
        return INF if n >= _BIG // 2 else Fraction(n, denom)

    ia = [[enc(v) for v in row] for row in a.block]
    ib = [[enc(v) for v in row] for row in b.block]
    cap = enc(a.mixed_floor) + enc(b.mixed_floor)
    ibt = list(map(list, zip(*ib)))  # transpose for row access
    out = []
    for i in range(ell):
        ra = ia[i]
        row = []
        for j in range(ell):
            rb = ibt[j]
            best = cap
            for k in range(ell):
                v = ra[k] + rb[k]
                if v < best:
                    best = v
            row.append(dec(best))
        out.append(tuple(row))

    min_a = a.block_min()
    min_b = b.block_min()
    mixed = qmin(
        (
            min_a + b.mixed_floor,
            a.mixed_floor + min_b,
            a.mixed_floor + b.outer_floor,
            a.outer_floor + b.mixed_floor,
        )
    )
    outer = qmin(
        (
            a.mixed_floor + b.mixed_floor,
            a.outer_floor + b.outer_floor,
            a.outer_floor + b.mixed_floor,
            a.mixed_floor + b.outer_floor,
        )
    )
    return ZonedBoundMatrix(ell=ell, block=tuple(out), mixed_floor=mixed, outer_floor=outer)


@dataclass(frozen=True)
class Certificate:
    """Successful positivity check after log2(k) star-squarings.

    Guarantee: for every a divisible by k and matrices M_1..M_a with
    ord_p(M_t)_{ij} >= g(i, j), every product entry satisfies
    ord_p(M_1...M_a)_{ij} > sigma*a + (i-j)/s.  (Groups of k factors
    carry a positive excess >= delta; excesses add and drifts telescope
    across groups.)
    """

    pattern: object
    params: CertificateParams
    final_matrix: ZonedBoundMatrix
    delta: Fraction
    transcript: tuple

    def to_json_dict(self):
        return {
            "pattern": {
                "p": self.pattern.p,
                "d": self.pattern.d,
                "support": sorted(self.pattern.support),
            },
            "params": self.params.to_json_dict(),
            "zones": [z.to_json_dict() for z in self.transcript],
            "delta": str(self.delta),
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def certify(pattern, params, band=None):
    """Build D, star-square log2(k) times, and check positivity.

    Returns a Certificate; raises CertificateFailed listing every
    nonpositive final entry or floor.
    """
    mat = build_shifted_matrix(pattern, params, band=band)
    transcript = [mat.summary(0)]
    squarings = params.k.bit_length() - 1
    for step in range(1, squarings + 1):
        mat = star_product(mat, mat)
        transcript.append(mat.summary(step))
    bad = []
    for i, row in enumerate(mat.block, start=1):
        for j, v in enumerate(row, start=1):
            if v is not INF and v <= 0:
                bad.append((i, j, v))
    if mat.mixed_floor <= 0:
        bad.append(("mixed_floor", mat.mixed_floor))
    if mat.outer_floor <= 0:
        bad.append(("outer_floor", mat.outer_floor))
    if bad:
        raise CertificateFailed(
            f"certificate failed for {pattern} with {params}: "
            f"{len(bad)} nonpositive entries",
            nonpositive=bad,
        )
    delta = qmin((mat.block_min(), mat.mixed_floor, mat.outer_floor))
    return Certificate(
        pattern=pattern,
        params=params,
        final_matrix=mat,
        delta=delta,
        transcript=tuple(transcript),
    )


def star_power(mat, e):
    """Sound zoned bound for the e-fold product, by binary powering.

    Any bracketing of star products soundly bounds the product of what
    the operands bound, so the binary decomposition is valid for every
    e >= 1 (not only powers of two).
    """
    if e < 1:
        raise ValueError("need at least one factor")
    result = None
    base = mat
    while True:
        if e & 1:
            result = base if result is None else star_product(result, base)
        e >>= 1
        if not e:
            return result
        base = star_product(base, base)


def zone_matrix(cert, trunc, factors=None):
    """Zoned bound matrix for a ``factors``-fold product at truncation
    ``trunc`` (defaults to the certificate's k)."""
    if trunc < cert.params.ell:
        raise ValueError("truncation must be at least the certified block size")
    if factors is None:
        factors = cert.params.k
    mat = build_shifted_matrix(cert.pattern, cert.params, ell=trunc)
    return star_power(mat, factors)


def tail_excess(cert, trunc, factors=None):
    """Excess eps > 0 past the lemma bound outside an L-truncation.

    Re-runs the zone analysis with block size ``trunc`` and reads the
    final mixed/outer floors: for every a divisible by k (or for
    a = ``factors`` exactly, when given),
    ord_p(M_1...M_a)_{ij} >= sigma*a + (i-j)/s + eps whenever
    max(i, j) > trunc.  Raises if the floors at this truncation are not
    positive (caller should increase trunc).
    """
    mat = zone_matrix(cert, trunc, factors)
    eps = min(mat.mixed_floor, mat.outer_floor)
    if eps <= 0:
        raise CertificateFailed(
            f"tail floors not positive at truncation {trunc}",
            nonpositive=[("mixed_floor", mat.mixed_floor), ("outer_floor", mat.outer_floor)],
        )
    return eps


def search_parameters(pattern, sigma_target, s_max=16, ell_max=64, k_max=16):
    """First certified params at sigma_target, in increasing cost order.

    Iterates s in 1..s_max, ell over a doubling schedule up to ell_max
    and k over powers of two up to k_max, ordered by work k*ell^3.
    Raises ParamsNotFound when the caps are exhausted (not a
    refutation: other drift factors may need a larger k).
    """
    sigma_target = Fraction(sigma_target)
    ells = []
    e = 4
    while e < ell_max:
        ells.append(e)
        e *= 2
    ells.append(ell_max)
    ks = [k for k in (2, 4, 8, 16, 32) if k <= k_max]
    candidates = [
        (k * ell**3, s, ell, k)
        for ell in ells
        for k in ks
        for s in range(1, s_max + 1)
    ]
    candidates.sort()
    for _, s, ell, k in candidates:
        try:
            params = CertificateParams(sigma=sigma_target, s=s, ell=ell, k=k)
            return certify(pattern, params).params
        except (SignConditionFailed, CertificateFailed):
            continue
    raise ParamsNotFound(
        f"no certificate for {pattern} at sigma={sigma_target} "
        f"within caps s<={s_max}, ell<={ell_max}, k<={k_max}"
    )
