"""Supersingularity certificates for Artin-Schreier curves y^p - y = f(x).

Three independent routes to the Newton polygon of the associated
L-function, cross-validating each other:

- ``bounds`` + ``tropical`` + ``polygon``: exact valuation lower bounds
  from the support of f, zoned min-plus matrix certificates, and an
  exhaustive polygon enumeration turning the bounds into a
  supersingularity decision;
- ``oracle``: exact exponential sums over small finite fields, the
  L-polynomial in Z[zeta_p], and its q-adic polygon;
- ``dwork``: a truncated p-adic trace-formula engine recovering the
  polygon from minor valuations of a Frobenius matrix product.
"""

from .bounds import (
    SupportPattern,
    closed_form_x1,
    closed_form_x2,
    g_bound,
    linear_floor,
    min_weight,
)
from .polygon import (
    Decision,
    MinorBounds,
    MissingOrigin,
    NewtonPolygon,
    decide_supersingular,
    enumerate_admissible,
    half_line,
    lower_hull,
    minor_bounds_from_certificate,
    scale_to_curve,
    slopes,
)
from .rationals import INF
from .tropical import (
    Certificate,
    CertificateFailed,
    CertificateParams,
    ParamsNotFound,
    SignConditionFailed,
    ZonedBoundMatrix,
    build_shifted_matrix,
    certify,
    search_parameters,
    star_product,
    tail_excess,
    tail_floor,
)

__version__ = "0.1.0"
