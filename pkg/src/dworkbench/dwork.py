"""Truncated p-adic trace-formula engine.

Builds the splitting-function coefficients lambda_m = E-coefficient
times gamma^m, the series G(X) = prod over the support of
sum_m lambda_m a_l^m X^(l m), the Frobenius matrix
F = {tau^(-1) G_{p i - j}} truncated to L x L, the twisted product
F_a = F F^(tau^-1) ... F^(tau^-(a-1)), and the first d minor sums C_n
of det(I - F_a T) by a division-free truncated characteristic
polynomial recursion.  The q-adic valuations of the C_n, with tail
bounds supplied by a min-plus certificate, recover the Newton polygon.

Everything is deterministic: identical policies give bit-identical
ring representatives.
"""

from dataclasses import dataclass
from fractions import Fraction

from .bounds import SupportPattern
from .padic import (
    NonConvergence,
    PrecisionExhausted,
    cyclotomic_ring,
    mixed_ring,
)
from .polygon import lower_hull
from .rationals import INF
from .tropical import CertificateFailed, tail_excess


class TailBoundUnavailable(Exception):
    """No certificate to bound the truncation tail of the minor sums."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """N: arithmetic mod p^N; L: matrix truncation; M: series degree;
    J: Artin-Hasse truncation level (terms x^(p^j)/p^j, j <= J)."""

    N: int
    L: int
    M: int
    J: int

    def __post_init__(self):
        if min(self.N, self.L, self.M, self.J) < 1:
            raise ValueError("policy levels must be positive")
        if self.M < self.L:
            raise ValueError("series degree must cover the matrix range")


def minimal_j(p, N):
    """Least J with p^J/(p-1) - J > N (gamma's defining-series tail is
    below working precision for ord x = 1/(p-1))."""
    j = 1
    while Fraction(p**j, p - 1) - j <= N:
        j += 1
    return j


def default_policy(pattern, certificate, a, tail_target=None, max_mult=10):
    """Default policy for a curve of degree d over F_{p^a}.

    N = a(d-1) + 4 guard digits (valuations read are at most a(d-1)/2
    in p-units); L is the smallest multiple of the certified block size
    whose tail excess resolves every minor valuation up to the endpoint
    (d-1)/2, i.e. tail_excess > a(d-1)(1/2 - sigma); M = pL; J minimal
    for the gamma iteration.
    """
    p, d = pattern.p, pattern.d
    n_prec = a * (d - 1) + 4
    sigma = certificate.params.sigma
    if tail_target is None:
        tail_target = a * (d - 1) * (Fraction(1, 2) - sigma)
    ell = certificate.params.ell
    trunc = None
    for mult in range(2, max_mult + 1):
        try:
            eps = tail_excess(certificate, mult * ell, factors=a)
        except CertificateFailed:
            continue
        if eps > tail_target:
            trunc = mult * ell
            break
    if trunc is None:
        raise TailBoundUnavailable(
            f"no truncation up to {max_mult}x block size reaches tail target {tail_target}"
        )
    return PrecisionPolicy(N=n_prec, L=trunc, M=p * trunc, J=minimal_j(p, n_prec))


# ---------------------------------------------------------------------------
# gamma and the splitting-function coefficients


def compute_gamma(p, policy):
    """Newton iteration for the root of sum_{j<=J} x^(p^j)/p^j near
    zeta_p - 1, with ord_p = 1/(p-1).

    Runs at elevated precision N + J + 4 (each exact division by p^j
    costs j digits), stops on stabilization mod p^(N+2), and verifies
    the valuation before reducing to the policy precision.
    """
    n_work = policy.N + policy.J + 4
    rw = cyclotomic_ring(p, n_work)

    def g_val(x):
        acc = x
        for j in range(1, policy.J + 1):
            acc = acc + rw.exact_div_p(x ** (p**j), j)
        return acc

    def g_deriv(x):
        acc = rw.one
        for j in range(1, policy.J + 1):
            acc = acc + x ** (p**j - 1)
        return acc

    x = rw.zeta - rw.one
    stop_mod = p ** (policy.N + 2)
    for _ in range(200):
        delta = rw.mul(g_val(x), rw.inverse_unit(g_deriv(x)))
        x_new = x - delta
        if all((c1 - c2) % stop_mod == 0 for c1, c2 in zip(x.coeffs, x_new.coeffs)):
            x = x_new
            break
        x = x_new
    else:
        raise NonConvergence("gamma iteration did not stabilize")
    ring = cyclotomic_ring(p, policy.N)
    gamma = ring.from_coeffs(x.coeffs)
    val, exact = ring.pi_valuation(gamma)
    if not exact or val != 1:
        raise NonConvergence(f"gamma has pi-valuation {val}, expected exactly 1")
    return gamma


def artin_hasse_rationals(p, m_max):
    """Exact coefficients e_m of E(x) = exp(sum_j x^(p^j)/p^j).

    From E'(x) = E(x) * sum_j x^(p^j - 1):
    (m+1) e_{m+1} = sum over p^j <= m+1 of e_{m+1-p^j}.
    Every e_m is p-integral.
    """
    es = [Fraction(1)]
    for m in range(m_max):
        acc = Fraction(0)
        pj = 1
        while pj <= m + 1:
            acc += es[m + 1 - pj]
            pj *= p
        es.append(acc / (m + 1))
    for e in es:
        if e.denominator % p == 0:
            raise PrecisionExhausted("Artin-Hasse coefficient not p-integral")
    return es


def artin_hasse_coeffs(gamma, policy):
    """lambda_0..lambda_M with E(gamma x) = sum lambda_m x^m.

    lambda_m = e_m * gamma^m where e_m are the exact rational
    coefficients of the Artin-Hasse series; for m <= p-1 this is
    gamma^m / m! with ord_p exactly m/(p-1).
    """
    ring = gamma.ring
    p, pN = ring.p, ring.pN
    es = artin_hasse_rationals(p, policy.M)
    out = []
    power = ring.one
    for m in range(policy.M + 1):
        e = es[m]
        scalar = e.numerator * pow(e.denominator, -1, pN) % pN
        out.append(power * scalar)
        if m < policy.M:
            power = power * gamma
    return out


# ---------------------------------------------------------------------------
# lifted coefficients, G, F


def teichmuller_lift(c, policy):
    """Teichmuller lift of a finite-field element into the mixed ring.

    Satisfies lift^q = lift mod p^N and reduces to c mod p.
    """
    field = c.field
    ring = mixed_ring(field.p, policy.N, field.m)
    return ring.teichmuller(c.coords)


def _lift_coefficients(field, coeffs, policy):
    """Teichmuller lifts of all coefficients; uses the plain cyclotomic
    ring when every coefficient is a prime-field scalar (then all
    Frobenius twists act trivially and no unramified variable is
    needed)."""
    prime_scalars = all(
        not any(c.coords[1:]) if field.m > 1 else True for c in coeffs.values()
    )
    if prime_scalars:
        ring = cyclotomic_ring(field.p, policy.N)
        lifts = {}
        for e, c in coeffs.items():
            r = int(c.coords[0])
            cur = r % ring.pN
            for _ in range(policy.N + 2):
                nxt = pow(cur, field.p, ring.pN)
                if nxt == cur:
                    break
                cur = nxt
            lifts[e] = ring.from_int(cur)
        return ring, lifts, True
    ring = mixed_ring(field.p, policy.N, field.m)
    lifts = {e: ring.teichmuller(c.coords) for e, c in coeffs.items()}
    return ring, lifts, False


def g_coefficients(lifts, pattern, policy, ring, lambdas):
    """G_0..G_M of G(X) = prod_{l in support} sum_m lambda_m a_l^m X^(l m).

    G_n = 0 for n < 0 is implicit; a single-term support {d} gives
    G_n = lambda_{n/d} a_d^{n/d} when d | n, else 0.
    """
    if policy.M < pattern.p * policy.L:
        raise PrecisionExhausted("series degree below p*L; raise M")
    lam = lambdas
    if not isinstance(next(iter(lifts.values())), type(ring.zero)):
        raise TypeError("lifts not in the working ring")
    series = [ring.one] + [ring.zero] * policy.M
    for exp in sorted(pattern.support):
        a_l = lifts[exp]
        # factor terms at degrees exp*m: lambda_m * a_l^m
        factor = []
        power = ring.one
        m = 0
        while exp * m <= policy.M:
            lam_m = lam[m]
            if not isinstance(lam_m, type(ring.zero)):
                lam_m = ring.from_cyclotomic(lam_m)
            factor.append(lam_m * power)
            power = power * a_l
            m += 1
        new = [ring.zero] * (policy.M + 1)
        for m, f in enumerate(factor):
            base = exp * m
            if f.is_zero():
                continue
            for n in range(base, policy.M + 1):
                s = series[n - base]
                if not s.is_zero():
                    new[n] = new[n] + s * f
        series = new
    return series


def build_F(g_series, policy, ring):
    """F[i][j] = tau^(-1)(G_{p i - j}) for 1 <= i, j <= L."""
    p = ring.p
    mat = []
    for i in range(1, policy.L + 1):
        row = []
        for j in range(1, policy.L + 1):
            n = p * i - j
            row.append(ring.twist(g_series[n], 1) if n >= 0 else ring.zero)
        mat.append(row)
    return mat


def _matmul(ring, A, B):
    n = len(A)
    pk = ring.packer(n)
    pa = [[pk.pack(x) for x in row] for row in A]
    pbt = [[pk.pack(B[k][j]) for k in range(n)] for j in range(len(B[0]))]
    out = []
    for i in range(n):
        rowa = pa[i]
        row = []
        for j in range(len(pbt)):
            colb = pbt[j]
            acc = 0
            for k in range(n):
                acc += rowa[k] * colb[k]
            row.append(pk.unpack(acc))
        out.append(row)
    return out


def product_Fa(F, a, ring):
    """F_a = F * F^(tau^-1) * ... * F^(tau^-(a-1)).

    With trivial twists (prime-field coefficients) this is F^a, computed
    by repeated squaring when a is a power of two.
    """
    if a == 1:
        return F
    if ring.twist_trivial and a & (a - 1) == 0:
        total = F
        e = a
        while e > 1:
            total = _matmul(ring, total, total)
            e //= 2
        return total
    total = F
    for k in range(1, a):
        twisted = [[ring.twist(x, k) for x in row] for row in F]
        total = _matmul(ring, total, twisted)
    return total


# ---------------------------------------------------------------------------
# minor sums via a truncated division-free characteristic polynomial


def _berkowitz_top(ring, A, dmax):
    """First dmax+1 characteristic coefficients of the L x L matrix A.

    Returns [c_0..c_dmax] with det(lambda I - A) = sum_t c_t lambda^(n-t);
    division-free (Berkowitz-style Toeplitz recursion) so no p-adic
    precision is lost; only the top dmax+1 coefficients are carried,
    where the Krylov depth needed is dmax-2.
    """
    n = len(A)
    pk = ring.packer(max(n, 1))
    pa = [[pk.pack(x) for x in row] for row in A]
    q_prev = [ring.one]
    for r in range(1, n + 1):
        keep = min(r, dmax)
        col = [ring.one, -A[r - 1][r - 1]]
        if r >= 2 and keep >= 2:
            w = [pa[i][r - 1] for i in range(r - 1)]  # packed column S
            row_r = pa[r - 1][: r - 1]
            for _ in range(2, keep + 1):
                acc = 0
                for x, y in zip(row_r, w):
                    acc += x * y
                col.append(-pk.unpack(acc))
                # advance Krylov vector: w = A_{r-1} @ w
                w_new = []
                for i in range(r - 1):
                    acc = 0
                    rowa = pa[i]
                    for k in range(r - 1):
                        acc += rowa[k] * w[k]
                    w_new.append(pk.pack(pk.unpack(acc)))
                w = w_new
        q_new = []
        for t in range(keep + 1):
            acc = ring.zero
            for u in range(t + 1):
                if u < len(q_prev) and t - u < len(col):
                    acc = acc + ring.mul(col[t - u], q_prev[u])
            q_new.append(acc)
        q_prev = q_new
    return q_prev


@dataclass(frozen=True)
class MinorReading:
    """One minor sum: computed truncated value, its ord_q reading, the
    tail bound, and the resolution verdict."""

    n: int
    ord_q: object  # Fraction, INF-like lower bound, or None
    lower_bound: Fraction
    resolved: bool

    def to_json_dict(self):
        return {
            "n": self.n,
            "ord_q": None if self.ord_q is None else str(self.ord_q),
            "lower_bound": str(self.lower_bound),
            "resolved": self.resolved,
        }


def minor_sums(f_a, d, policy, ring, a, certificate=None):
    """C_0..C_{d-1} of det(I - F_a T) with tail-resolution data.

    Every term omitted by the L-truncation involves an index beyond L,
    so its ord_q is at least tau_n = n*sigma + eps/a with eps the
    certificate's tail excess at L; a computed valuation strictly below
    min(tau_n, precision limit) is the exact valuation of the infinite
    minor sum.
    """
    if certificate is None:
        raise TailBoundUnavailable(
            "a min-plus certificate is required to bound the truncation tail"
        )
    try:
        eps = tail_excess(certificate, policy.L, factors=a)
    except CertificateFailed as exc:
        raise TailBoundUnavailable(
            f"tail floors not positive at L={policy.L} for a={a}; raise L"
        ) from exc
    sigma = certificate.params.sigma
    limit_q = Fraction(policy.N, a)
    chars = _berkowitz_top(ring, f_a, d - 1)
    readings = [MinorReading(0, Fraction(0), Fraction(0), True)]
    for n in range(1, d):
        c_n = chars[n] if n % 2 == 0 else -chars[n]
        ordp = ring.ord_p(c_n)
        tau = n * sigma + eps / a
        if ordp is None:
            readings.append(
                MinorReading(n, None, min(limit_q, tau), False)
            )
            continue
        val = ordp / a
        if val < tau and val < limit_q:
            readings.append(MinorReading(n, val, val, True))
        else:
            readings.append(MinorReading(n, None, min(tau, limit_q), False))
    return readings


def np_from_minors(readings, p, a, d):
    """Hull over resolved valuations, with per-point flags.

    Returns (polygon, determined, flags): ``determined`` is True when
    every unresolved point's lower bound sits on or above the hull of
    the resolved points (then the hull is the true polygon); points
    failing that are flagged ambiguous.
    """
    pts = [(r.n, r.ord_q) for r in readings if r.resolved]
    if not any(r.n == d - 1 and r.resolved for r in readings):
        return None, False, {r.n: "endpoint-unresolved" for r in readings}
    poly = lower_hull(pts)
    determined = True
    flags = {}
    for r in readings:
        if r.resolved:
            flags[r.n] = "exact"
        elif r.lower_bound >= poly.y_at(r.n):
            flags[r.n] = "above-hull"
        else:
            flags[r.n] = "ambiguous"
            determined = False
    return poly, determined, flags


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EngineReport:
    p: int
    a: int
    d: int
    policy: PrecisionPolicy
    lambda_valuations: tuple
    fa_bound_ok: bool
    fa_min_margin: Fraction
    readings: tuple
    polygon: object
    determined: bool
    flags: dict

    def to_json_dict(self):
        return {
            "p": self.p,
            "a": self.a,
            "d": self.d,
            "policy": {
                "N": self.policy.N,
                "L": self.policy.L,
                "M": self.policy.M,
                "J": self.policy.J,
            },
            "lambda_valuations": [
                None if v is None else str(v) for v in self.lambda_valuations
            ],
            "fa_entry_bound_ok": self.fa_bound_ok,
            "fa_min_margin": str(self.fa_min_margin),
            "minors": [r.to_json_dict() for r in self.readings],
            "polygon": None if self.polygon is None else self.polygon.to_json_dict(),
            "determined": self.determined,
            "flags": {str(k): v for k, v in self.flags.items()},
        }


def run_engine(field, coeffs, certificate, policy=None, a=None):
    """Full pipeline: gamma, lambdas, G, F, F_a, minor sums, polygon.

    ``field`` is F_q = F_{p^a} carrying the curve coefficients; the
    certificate supplies the tail bounds (its pattern must match the
    support of f).
    """
    from .oracle import normalize_poly  # shared input validation

    coeffs, d = normalize_poly(field, coeffs)
    p = field.p
    if a is None:
        a = field.m
    pattern = certificate.pattern
    if pattern.p != p or pattern.d != d or pattern.support != frozenset(coeffs):
        raise ValueError("certificate pattern does not match the curve support")
    if policy is None:
        policy = default_policy(pattern, certificate, a)
    gamma = compute_gamma(p, policy)
    lambdas = artin_hasse_coeffs(gamma, policy)
    ring, lifts, cyclotomic_only = _lift_coefficients(field, coeffs, policy)
    lam_vals = tuple(gamma.ring.ord_p(lam) for lam in lambdas[: policy.M + 1])
    g_series = g_coefficients(lifts, pattern, policy, ring, lambdas)
    f_mat = build_F(g_series, policy, ring)
    f_a = product_Fa(f_mat, a, ring)
    sigma, s = certificate.params.sigma, certificate.params.s
    margin = None
    ok = True
    if a % certificate.params.k == 0:
        # the lemma-style strict bound is certified only when a is a
        # multiple of the certificate's factor granularity
        for i in range(1, policy.L + 1):
            for j in range(1, policy.L + 1):
                v = ring.ord_p(f_a[i - 1][j - 1])
                bound = sigma * a + Fraction(i - j, s)
                if v is None:
                    # at precision limit: N certainly exceeds every bound here
                    continue
                m = v - bound
                if m <= 0:
                    ok = False
                if margin is None or m < margin:
                    margin = m
    else:
        ok = None
    if margin is None:
        margin = INF
    readings = minor_sums(f_a, d, policy, ring, a, certificate=certificate)
    poly, determined, flags = np_from_minors(readings, p, a, d)
    return EngineReport(
        p=p,
        a=a,
        d=d,
        policy=policy,
        lambda_valuations=lam_vals,
        fa_bound_ok=ok,
        fa_min_margin=margin,
        readings=tuple(readings),
        polygon=poly,
        determined=determined,
        flags=flags,
    )
