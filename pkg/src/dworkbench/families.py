"""Bundled curve families with known supersingularity certificates.

Each entry records the family shape y^p - y = f(x), the support
pattern, the certificate parameters that are known to work, and the
coefficient sweeps the exact oracle can check exhaustively.
"""

from dataclasses import dataclass
from fractions import Fraction

from .bounds import SupportPattern
from .tropical import CertificateParams


@dataclass(frozen=True)
class Family:
    name: str
    p: int
    d: int
    support: tuple
    fixed: dict  # exponent -> prime-field coefficient value (the monic term)
    swept: tuple  # exponents whose coefficients sweep the base field
    params: CertificateParams
    sweep_degrees: tuple  # base-field degrees for oracle sweeps
    dwork_a: int  # extension degree for the trace-formula spot check

    def pattern(self):
        return SupportPattern(self.p, self.d, frozenset(self.support))

    def describe(self):
        terms = [f"x^{self.d}"]
        for e in self.swept:
            terms.append(f"c*x^{e}" if e != 1 else "c*x")
        return f"y^{self.p} - y = " + " + ".join(terms)


#: y^7 - y = x^5 + c x^2 over char 7.
FAMILY_P7_X5_X2 = Family(
    name="p7_x5_x2",
    p=7,
    d=5,
    support=(2, 5),
    fixed={5: 1},
    swept=(2,),
    params=CertificateParams(sigma=Fraction(5, 12), s=12, ell=12, k=4),
    sweep_degrees=(1, 2),
    dwork_a=4,
)

#: y^5 - y = x^7 + c x over char 5.
FAMILY_P5_X7_X = Family(
    name="p5_x7_x",
    p=5,
    d=7,
    support=(1, 7),
    fixed={7: 1},
    swept=(1,),
    params=CertificateParams(sigma=Fraction(5, 12), s=8, ell=27, k=8),
    sweep_degrees=(1, 2),
    dwork_a=8,
)

#: y^3 - y = x^7 + a x^2 + b x over char 3; the sweeps check both
#: coefficients, and the parameters below certify the whole family.
FAMILY_P3_X7_X2_X = Family(
    name="p3_x7_x2_x",
    p=3,
    d=7,
    support=(1, 2, 7),
    fixed={7: 1},
    swept=(2, 1),
    params=CertificateParams(sigma=Fraction(5, 12), s=7, ell=8, k=8),
    sweep_degrees=(1, 2),
    dwork_a=8,
)

FAMILIES = {
    f.name: f for f in (FAMILY_P7_X5_X2, FAMILY_P5_X7_X, FAMILY_P3_X7_X2_X)
}

#: Families run through the certificate + decision route by default.
CERTIFIED_FAMILIES = (FAMILY_P7_X5_X2, FAMILY_P5_X7_X)
