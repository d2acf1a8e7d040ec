"""Exact rational values extended with a +infinity element.

Valuations of zero (and of coefficients indexed outside a numerical
semigroup) are +infinity.  ``INF`` is a singleton that compares above
every finite value and absorbs addition, so ``min`` and ``+`` can be
used directly on mixed ``Fraction``/``INF`` data.  No floats anywhere.
"""

from fractions import Fraction


class _PlusInfinity:
    __slots__ = ()

    def __repr__(self):
        return "+inf"

    # total order: INF is the unique maximum
    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is INF

    def __gt__(self, other):
        return other is not INF

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is INF

    def __hash__(self):
        return hash("dworkbench-plus-infinity")

    # absorbing arithmetic
    def __add__(self, other):
        return INF

    __radd__ = __add__

    def __sub__(self, other):
        if other is INF:
            raise ArithmeticError("inf - inf is undefined")
        return INF

    def __mul__(self, other):
        if other == 0:
            raise ArithmeticError("inf * 0 is undefined")
        if other < 0:
            raise ArithmeticError("inf * negative is undefined")
        return INF

    __rmul__ = __mul__

    def __truediv__(self, other):
        if other is INF:
            raise ArithmeticError("inf / inf is undefined")
        if other <= 0:
            raise ArithmeticError("inf divided by a nonpositive value")
        return INF


INF = _PlusInfinity()

#: Exact extended-rational: a Fraction (or int) or +infinity.
ExtRat = Fraction | int | _PlusInfinity


def is_finite(x):
    return x is not INF


def qmin(values):
    """Minimum of an iterable of extended rationals (INF if empty)."""
    best = INF
    for v in values:
        if v < best:
            best = v
    return best
