"""Newton polygons and the supersingularity decision.

A Newton polygon here is the lower convex hull of (n, valuation) points
with integer abscissas and exact rational ordinates.  The decision
routine enumerates every polygon a Jacobian could have given strict
lower bounds on minor valuations, symmetry of the slope multiset and
1/(p-1)-integrality of vertices; the curve is certified supersingular
exactly when the slope-1/2 straight line is the only survivor.
"""

from dataclasses import dataclass
from fractions import Fraction

from .rationals import INF


class MissingOrigin(ValueError):
    """The point set for a hull must contain (0, 0)."""


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower-convex vertex chain starting at (0, 0).

    vertices: tuple of (x, y) with strictly increasing integer x,
    strictly increasing slopes between consecutive vertices, y >= 0.
    """

    vertices: tuple

    def __post_init__(self):
        v = tuple((int(x), Fraction(y)) for x, y in self.vertices)
        if not v or v[0] != (0, Fraction(0)):
            raise MissingOrigin("polygon must start at (0, 0)")
        for (x0, y0), (x1, y1) in zip(v, v[1:]):
            if x1 <= x0:
                raise ValueError("vertex abscissas must strictly increase")
        slopes = [Fraction(y1 - y0, x1 - x0) for (x0, y0), (x1, y1) in zip(v, v[1:])]
        if any(s1 <= s0 for s0, s1 in zip(slopes, slopes[1:])):
            raise ValueError("slopes must strictly increase between vertices")
        if any(y < 0 for _, y in v):
            raise ValueError("ordinates must be nonnegative")
        object.__setattr__(self, "vertices", v)

    @property
    def width(self):
        return self.vertices[-1][0]

    @property
    def height(self):
        return self.vertices[-1][1]

    def y_at(self, x):
        """Ordinate of the polygon at integer abscissa x (on the hull)."""
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                return y0 + Fraction(y1 - y0, x1 - x0) * (x - x0)
        if x == 0 and self.width == 0:
            return Fraction(0)
        raise ValueError(f"abscissa {x} outside polygon range")

    def to_json_dict(self):
        return {"vertices": [[x, str(y)] for x, y in self.vertices]}


def half_line(width):
    """The all-slopes-1/2 polygon of given width (the supersingular shape)."""
    return NewtonPolygon(((0, Fraction(0)), (width, Fraction(width, 2))))


def lower_hull(points):
    """Lower convex hull of (int, ExtRat) points as a NewtonPolygon.

    Ordinates equal to INF are skipped (they impose no constraint).
    The point (0, 0) must be present; abscissas must be distinct.
    """
    finite = [(int(x), Fraction(y)) for x, y in points if y is not INF]
    finite.sort()
    for (x0, _), (x1, _) in zip(finite, finite[1:]):
        if x0 == x1:
            raise ValueError("duplicate abscissa in hull input")
    if not finite or finite[0] != (0, Fraction(0)):
        raise MissingOrigin("hull input must contain the point (0, 0)")
    hull = []
    for pt in finite:
        while len(hull) >= 2:
            (ax, ay), (bx, by) = hull[-2], hull[-1]
            # keep strictly convex: drop b when it is on or above segment a-pt
            if (by - ay) * (pt[0] - ax) >= (pt[1] - ay) * (bx - ax):
                hull.pop()
            else:
                break
        hull.append(pt)
    return NewtonPolygon(tuple(hull))


def slopes(np_):
    """Slope sequence with multiplicity = horizontal segment length."""
    out = []
    for (x0, y0), (x1, y1) in zip(np_.vertices, np_.vertices[1:]):
        out.extend([Fraction(y1 - y0, x1 - x0)] * (x1 - x0))
    return tuple(out)


def scale_to_curve(np_, p):
    """Rescale coordinates by (p-1): the curve zeta polygon shape.

    Inverse of shrinking the curve polygon by 1/(p-1); vertex
    coordinates of the result must be integers for a legitimate curve,
    which callers check.
    """
    return NewtonPolygon(tuple((x * (p - 1), y * (p - 1)) for x, y in np_.vertices))


@dataclass(frozen=True)
class MinorBounds:
    """Strict lower bounds beta_n for ord_q C_n, n = 1..d-1."""

    d: int
    beta: tuple
    exact_end: Fraction | None = None

    def __post_init__(self):
        beta = tuple(Fraction(b) for b in self.beta)
        if len(beta) != self.d - 1:
            raise ValueError("need exactly d-1 bounds")
        if any(b < 0 for b in beta):
            raise ValueError("bounds must be nonnegative")
        object.__setattr__(self, "beta", beta)


def minor_bounds_from_certificate(cert, d):
    """beta_n = n*sigma from a min-plus certificate.

    Each term of the n x n minor expansion is a product of n matrix
    entries whose index drifts telescope to zero over permutation
    cycles, so its ord_q exceeds n*sigma.  The endpoint ord_q C_{d-1}
    equals (d-1)/2 for a curve L-function.
    """
    sigma = cert.params.sigma
    return MinorBounds(
        d=d,
        beta=tuple(n * sigma for n in range(1, d)),
        exact_end=Fraction(d - 1, 2),
    )


def enumerate_admissible(p, d, bounds):
    """All Newton polygons compatible with abelian-variety constraints.

    Polygons on [0, d-1] with: vertices at integer x and y a multiple of
    1/(p-1); endpoints (0,0) and (d-1, (d-1)/2); slopes in [0,1]
    strictly increasing between vertices; slope multiset symmetric under
    s -> 1-s; and every interior vertex (n, y) satisfying y > beta_n.
    The bound applies at vertices only: the hull of the (n, ord_q C_n)
    points can lie strictly below a non-vertex point, so constraining
    vertices is the weakest sound filter.
    """
    if d < 2:
        raise ValueError("need degree >= 2")
    step = Fraction(1, p - 1)
    end_x = d - 1
    end_y = Fraction(d - 1, 2)
    if (end_y / step).denominator != 1:
        raise ValueError("endpoint not on the 1/(p-1) grid")
    max_t = int(end_y / step)
    results = []

    def extend(chain, prev_slope):
        x0, y0 = chain[-1]
        if (x0, y0) == (end_x, end_y):
            poly = NewtonPolygon(tuple(chain))
            sl = slopes(poly)
            if sorted(sl) == sorted(1 - s for s in sl):
                results.append(poly)
            return
        for x1 in range(x0 + 1, end_x + 1):
            for t in range(0, max_t + 1):
                y1 = t * step
                lam = Fraction(y1 - y0, x1 - x0)
                if lam < 0 or lam > 1:
                    continue
                if prev_slope is not None and lam <= prev_slope:
                    continue
                if x1 == end_x:
                    if y1 != end_y:
                        continue
                elif y1 <= bounds.beta[x1 - 1]:
                    continue
                # remaining ascent must stay feasible with slopes <= 1
                if x1 < end_x and end_y - y1 > (end_x - x1):
                    continue
                chain.append((x1, y1))
                extend(chain, lam)
                chain.pop()

    extend([(0, Fraction(0))], None)
    results.sort(key=lambda poly: poly.vertices)
    return results


@dataclass(frozen=True)
class Decision:
    certified: bool
    witnesses: tuple

    def to_json_dict(self):
        return {
            "certified": self.certified,
            "witnesses": [w.to_json_dict() for w in self.witnesses],
        }


def decide_supersingular(p, d, bounds):
    """Certified iff the slope-1/2 line is the only admissible polygon."""
    admissible = enumerate_admissible(p, d, bounds)
    line = half_line(d - 1)
    if admissible == [line]:
        return Decision(certified=True, witnesses=())
    witnesses = tuple(poly for poly in admissible if poly != line)
    return Decision(certified=False, witnesses=witnesses)
