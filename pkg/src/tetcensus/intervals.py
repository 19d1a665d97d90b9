"""Directed-rounding interval arithmetic on dyadic endpoints.

Endpoints are arbitrary-precision binary floats represented as integer
pairs (m, e) with value m * 2**e.  Every operation rounds outward, so an
Interval produced from exact data is guaranteed to contain the true
value of the computed quantity.  An inequality involving an interval is
certified only if it holds for every value in the interval.

The transcendental layer (sqrt, atan, pi) is small: sqrt comes from
math.isqrt with floor/ceil control, atan from halving reductions plus an
alternating series with an explicit tail bound, and pi from a Machin
formula.  That is all the certification pipeline needs.
"""

from fractions import Fraction
from math import isqrt

from .errors import IndeterminateDivision, OriginInRectangle

DEFAULT_PREC = 64


# -- dyadic scalar helpers ---------------------------------------------------

def _round_down(m, e, prec):
    """Largest dyadic with <= prec mantissa bits that is <= m*2**e."""
    b = m.bit_length()
    if b <= prec:
        return m, e
    s = b - prec
    return m >> s, e + s  # arithmetic shift floors, also for negative m


def _round_up(m, e, prec):
    b = m.bit_length()
    if b <= prec:
        return m, e
    s = b - prec
    q = m >> s
    if m & ((1 << s) - 1):
        q += 1
    return q, e + s


def _add(m1, e1, m2, e2):
    if e1 == e2:
        return m1 + m2, e1
    if e1 < e2:
        return m1 + (m2 << (e2 - e1)), e1
    return (m1 << (e1 - e2)) + m2, e2


def _cmp(m1, e1, m2, e2):
    m, _e = _add(m1, e1, -m2, e2)
    return (m > 0) - (m < 0)


def _div(m1, e1, m2, e2, prec, down):
    """Directed quotient (m1*2**e1) / (m2*2**e2) with prec result bits."""
    if m2 == 0:
        raise ZeroDivisionError("dyadic division by zero")
    shift = prec + 2 + max(0, m2.bit_length() - m1.bit_length())
    num = m1 << shift
    if down:
        q = num // m2  # floor division: rounds toward -inf
    else:
        q = -((-num) // m2)  # ceiling
    return q, e1 - e2 - shift


def _sqrt_down(m, e, prec):
    """Largest dyadic d with d*d <= m*2**e (m >= 0), to about prec bits."""
    if m == 0:
        return 0, 0
    extra_bits = 2 * (prec + 8)
    if (e - extra_bits) & 1:
        extra_bits += 1
    mm = m << extra_bits
    ee = e - extra_bits
    return isqrt(mm), ee // 2


def _sqrt_up(m, e, prec):
    lm, le = _sqrt_down(m, e, prec)
    # exactness test: (lm * 2**le)**2 == m * 2**e
    if _cmp(lm * lm, 2 * le, m, e) == 0:
        return lm, le
    return lm + 1, le


def _from_fraction(x, prec):
    """Outward dyadic enclosure (lo, hi) of a Fraction or int."""
    if isinstance(x, int):
        return (x, 0), (x, 0)
    n, d = x.numerator, x.denominator
    if d == 1:
        return (n, 0), (n, 0)
    return _div(n, 0, d, 0, prec, True), _div(n, 0, d, 0, prec, False)


# -- intervals ---------------------------------------------------------------

class Interval:
    """Closed real interval [lo, hi] with dyadic endpoints."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec=DEFAULT_PREC):
        self.lo = lo
        self.hi = hi
        self.prec = prec
        if _cmp(lo[0], lo[1], hi[0], hi[1]) > 0:
            raise ValueError("empty interval")

    @classmethod
    def from_rational(cls, x, prec=DEFAULT_PREC):
        lo, hi = _from_fraction(x, prec)
        return cls(lo, hi, prec)

    @classmethod
    def exact(cls, m, e=0, prec=DEFAULT_PREC):
        return cls((m, e), (m, e), prec)

    def __add__(self, other):
        p = min(self.prec, other.prec)
        lo = _round_down(*_add(*self.lo, *other.lo), p)
        hi = _round_up(*_add(*self.hi, *other.hi), p)
        return Interval(lo, hi, p)

    def __neg__(self):
        return Interval((-self.hi[0], self.hi[1]), (-self.lo[0], self.lo[1]), self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        p = min(self.prec, other.prec)
        cands = [
            (a[0] * b[0], a[1] + b[1])
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        lo = cands[0]
        hi = cands[0]
        for c in cands[1:]:
            if _cmp(*c, *lo) < 0:
                lo = c
            if _cmp(*c, *hi) > 0:
                hi = c
        return Interval(_round_down(*lo, p), _round_up(*hi, p), p)

    def __truediv__(self, other):
        if other.contains_zero():
            raise IndeterminateDivision("denominator interval contains 0")
        p = min(self.prec, other.prec)
        cands_down = [
            _div(*a, *b, p, True)
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        cands_up = [
            _div(*a, *b, p, False)
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        lo = cands_down[0]
        for c in cands_down[1:]:
            if _cmp(*c, *lo) < 0:
                lo = c
        hi = cands_up[0]
        for c in cands_up[1:]:
            if _cmp(*c, *hi) > 0:
                hi = c
        return Interval(lo, hi, p)

    def sqrt(self):
        if self.lo[0] < 0:
            raise ValueError("sqrt of an interval reaching below 0")
        return Interval(
            _sqrt_down(*self.lo, self.prec), _sqrt_up(*self.hi, self.prec), self.prec
        )

    def scale(self, k):
        """Multiply by an exact integer."""
        if k >= 0:
            return Interval(
                (self.lo[0] * k, self.lo[1]), (self.hi[0] * k, self.hi[1]), self.prec
            )
        return Interval(
            (self.hi[0] * k, self.hi[1]), (self.lo[0] * k, self.lo[1]), self.prec
        )

    # -- certified queries

    def contains_zero(self):
        return self.lo[0] <= 0 <= self.hi[0]

    def sign(self):
        """+1/-1 when certified nonzero, 0 when exact zero, None if undecided."""
        if self.lo[0] > 0:
            return 1
        if self.hi[0] < 0:
            return -1
        if self.lo[0] == 0 and self.hi[0] == 0:
            return 0
        return None

    def is_inside(self, low, high):
        """Certified low < x < high for every x in the interval (rationals)."""
        return (
            _cmp(*self.lo, *_from_fraction(low, self.prec)[1]) > 0
            and _cmp(*self.hi, *_from_fraction(high, self.prec)[0]) < 0
        )

    def width(self):
        m, e = _add(*self.hi, -self.lo[0], self.lo[1])
        return Fraction(m) * Fraction(2) ** e

    def midpoint(self):
        m, e = _add(*self.lo, *self.hi)
        return Fraction(m) * Fraction(2) ** (e - 1)

    def to_fractions(self):
        return (
            Fraction(self.lo[0]) * Fraction(2) ** self.lo[1],
            Fraction(self.hi[0]) * Fraction(2) ** self.hi[1],
        )

    def __repr__(self):
        lo, hi = self.to_fractions()
        return f"Interval[{float(lo)!r}, {float(hi)!r}]"


class ComplexInterval:
    """Axis-aligned rectangle re + im*i of two real Intervals."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    def __add__(self, other):
        return ComplexInterval(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return ComplexInterval(-self.re, -self.im)

    def __mul__(self, other):
        return ComplexInterval(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other):
        den = other.re * other.re + other.im * other.im
        return ComplexInterval(
            (self.re * other.re + self.im * other.im) / den,
            (self.im * other.re - self.re * other.im) / den,
        )

    def contains_zero(self):
        return self.re.contains_zero() and self.im.contains_zero()

    def arg(self):
        """Enclosure of the argument; the rectangle must exclude 0."""
        return _arg(self)

    def __repr__(self):
        return f"ComplexInterval({self.re!r}, {self.im!r})"


# -- atan / pi ---------------------------------------------------------------

def _atan_small(x):
    """atan on an interval inside [-1/4, 1/4], by alternating series."""
    prec = x.prec
    x2 = x * x
    term = x
    total = x
    k = 1
    # |x| <= 1/4 so terms shrink by at least 16 per step
    while True:
        term = term * x2
        k += 2
        contrib = term / Interval.exact(k, 0, prec)
        if k % 4 == 1:
            total = total + contrib
        else:
            total = total - contrib
        if (
            abs(term.lo[0]).bit_length() + term.lo[1] < -(prec + 4)
            and abs(term.hi[0]).bit_length() + term.hi[1] < -(prec + 4)
        ):
            break
    # alternating tail bounded by the magnitude of the next term
    tail = term * x2
    alo = (abs(tail.lo[0]), tail.lo[1])
    ahi = (abs(tail.hi[0]), tail.hi[1])
    bound = ahi if _cmp(*alo, *ahi) <= 0 else alo
    pad = Interval((-bound[0], bound[1]), bound, prec)
    return total + pad


def atan(x):
    """Enclosure of atan over an arbitrary interval."""
    prec = x.prec
    quarter = Interval.from_rational(Fraction(1, 4), prec)
    if _cmp(*x.lo, *(-quarter.hi[0], quarter.hi[1])) >= 0 and _cmp(
        *x.hi, *quarter.hi
    ) <= 0:
        return _atan_small(x)
    # atan(x) = 2*atan(x / (1 + sqrt(1 + x^2)))  halves the argument
    one = Interval.exact(1, 0, prec)
    reduced = x / (one + (one + x * x).sqrt())
    return atan(reduced).scale(2)


_PI_CACHE = {}


def pi_interval(prec=DEFAULT_PREC):
    """Machin's formula: pi = 16*atan(1/5) - 4*atan(1/239)."""
    if prec not in _PI_CACHE:
        a = _atan_small(Interval.from_rational(Fraction(1, 5), prec + 16))
        b = _atan_small(Interval.from_rational(Fraction(1, 239), prec + 16))
        _PI_CACHE[prec] = a.scale(16) - b.scale(4)
    return _PI_CACHE[prec]


def _arg(z):
    """Argument enclosure for a rectangle that certifiedly avoids 0."""
    re, im = z.re, z.im
    prec = min(re.prec, im.prec)
    pi = pi_interval(prec)
    half_pi = Interval((pi.lo[0], pi.lo[1] - 1), (pi.hi[0], pi.hi[1] - 1), prec)
    if im.sign() == 1:  # upper half plane: arg in (0, pi)
        if re.sign() == 1:
            return atan(im / re)
        if re.sign() == -1:
            return pi - atan(im / (-re))
        return half_pi + atan((-re) / im)
    if im.sign() == -1:
        flipped = _arg(ComplexInterval(re, -im))
        return -flipped
    if re.sign() == 1:  # im straddles 0 but re > 0
        return atan(im / re)
    raise OriginInRectangle("rectangle contains 0 or the negative real axis")
