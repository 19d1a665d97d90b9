"""Exact arithmetic for the two number fields the pipeline lives in.

ShapeNum is an element a + b*sqrt(-3) with rational a, b; tetrahedron
shapes and all their cross-ratios stay in this field.  SqrtSum is a
canonical sum r1*sqrt(n1) + ... + rk*sqrt(nk) with nonzero rational
coefficients and strictly increasing squarefree radicands; lengths,
areas, circumradii and tilts stay in this field.  Canonical form makes
equality a syntactic check and makes zero the empty sum, so the sign of
a nonzero value can always be decided by refining an interval enclosure.
"""

from fractions import Fraction
from math import gcd, isqrt

from .errors import Indeterminate
from .intervals import DEFAULT_PREC, ComplexInterval, Interval

_ZERO = Fraction(0)
_ONE = Fraction(1)


# -- squarefree factorization -------------------------------------------------

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def _is_probable_prime(n):
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n):
    if n % 2 == 0:
        return 2
    for c in range(1, 20):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"failed to factor {n}")


def _factor(n, out):
    """Accumulate the prime factorization of n into dict out."""
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return
    # tilts only ever produce tiny radicands; this path is for robustness
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))


def squarefree_decompose(n):
    """Write positive n as s*s*m with m squarefree; return (s, m)."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    fac = {}
    _factor(n, fac)
    s = 1
    m = 1
    for p, k in fac.items():
        s *= p ** (k // 2)
        if k & 1:
            m *= p
    return s, m


def smallest_prime_factor(n):
    fac = {}
    _factor(n, fac)
    return min(fac)


# -- SqrtSum -------------------------------------------------------------------

class SqrtSum:
    """Element of the field generated by square roots of positive rationals.

    Stored as a tuple of (radicand, coefficient) pairs with squarefree
    radicands in strictly increasing order and nonzero Fraction
    coefficients; the rational part uses radicand 1.  The representation
    is unique, so __eq__ and is_zero are syntactic.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        self.terms = tuple(terms)

    @classmethod
    def from_rational(cls, r):
        r = Fraction(r)
        return cls(((1, r),) if r else ())

    @classmethod
    def sqrt_rational(cls, r):
        """sqrt(r) for a nonnegative rational r, in canonical form."""
        r = Fraction(r)
        if r < 0:
            raise ValueError("sqrt of a negative rational")
        if r == 0:
            return cls()
        # sqrt(p/q) = sqrt(p*q)/q
        s, m = squarefree_decompose(r.numerator * r.denominator)
        return cls(((m, Fraction(s, r.denominator)),))

    @classmethod
    def term(cls, coeff, radicand):
        """coeff * sqrt(radicand) with radicand a positive integer."""
        coeff = Fraction(coeff)
        if coeff == 0:
            return cls()
        s, m = squarefree_decompose(radicand)
        return cls(((m, coeff * s),))

    # -- ring operations

    def __add__(self, other):
        if not isinstance(other, SqrtSum):
            other = SqrtSum.from_rational(other)
        merged = dict(self.terms)
        for n, r in other.terms:
            c = merged.get(n, _ZERO) + r
            if c:
                merged[n] = c
            else:
                merged.pop(n, None)
        return SqrtSum(sorted(merged.items()))

    __radd__ = __add__

    def __neg__(self):
        return SqrtSum(tuple((n, -r) for n, r in self.terms))

    def __sub__(self, other):
        if not isinstance(other, SqrtSum):
            other = SqrtSum.from_rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return SqrtSum.from_rational(other) - self

    def __mul__(self, other):
        if not isinstance(other, SqrtSum):
            other = SqrtSum.from_rational(other)
        acc = {}
        for n1, r1 in self.terms:
            for n2, r2 in other.terms:
                # sqrt(n1)*sqrt(n2) = g*sqrt(n1*n2/g^2), g = gcd: both squarefree
                g = gcd(n1, n2)
                n = (n1 // g) * (n2 // g)
                c = acc.get(n, _ZERO) + r1 * r2 * g
                if c:
                    acc[n] = c
                else:
                    acc.pop(n, None)
        return SqrtSum(sorted(acc.items()))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, SqrtSum):
            other = SqrtSum.from_rational(other)
        return _sqrtsum_div(self, other)

    def __rtruediv__(self, other):
        return _sqrtsum_div(SqrtSum.from_rational(other), self)

    # -- structure

    def is_zero(self):
        return not self.terms

    def is_rational(self):
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 1)

    def rational_value(self):
        if not self.terms:
            return _ZERO
        if len(self.terms) == 1 and self.terms[0][0] == 1:
            return self.terms[0][1]
        raise ValueError(f"not rational: {self}")

    def single_sqrt3_coeff(self):
        """Return q when the value is exactly q*sqrt(3), else None."""
        if len(self.terms) == 1 and self.terms[0][0] == 3:
            return self.terms[0][1]
        return None

    def __eq__(self, other):
        if isinstance(other, SqrtSum):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == SqrtSum.from_rational(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.terms)

    # -- numerics

    def interval(self, prec=DEFAULT_PREC):
        """Outward enclosure of the real value."""
        total = Interval.exact(0, 0, prec)
        for n, r in self.terms:
            t = Interval.from_rational(r, prec)
            if n != 1:
                t = t * Interval.from_rational(Fraction(n), prec).sqrt()
            total = total + t
        return total

    def sign(self):
        """-1, 0 or +1; exact via canonical form plus interval refinement."""
        if not self.terms:
            return 0
        if all(r > 0 for _, r in self.terms):
            return 1
        if all(r < 0 for _, r in self.terms):
            return -1
        prec = DEFAULT_PREC
        while prec <= 1 << 16:
            s = self.interval(prec).sign()
            if s is not None:
                return s
            prec *= 2
        # unreachable for canonical nonzero input; kept as a hard stop
        raise Indeterminate(f"sign undecided at maximum precision: {self}")

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        lo, hi = self.interval(64).to_fractions()
        return float((lo + hi) / 2)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for n, r in self.terms:
            if n == 1:
                parts.append(str(r))
            elif r == 1:
                parts.append(f"sqrt({n})")
            else:
                parts.append(f"{r}*sqrt({n})")
        return "+".join(parts).replace("+-", "-")


def _split_by_prime(x, p):
    """Write x = d0 + sqrt(p)*d1 with p dividing no radicand of d0 or d1."""
    d0 = []
    d1 = []
    for n, r in x.terms:
        if n % p == 0:
            d1.append((n // p, r))
        else:
            d0.append((n, r))
    return SqrtSum(sorted(d0)), SqrtSum(sorted(d1))


def _sqrtsum_div(num, den):
    """Quotient via repeated prime-conjugate rationalization.

    Multiplying by (d0 - sqrt(p)*d1) removes the prime p from every
    radicand of the denominator; iterating over the primes appearing in
    the denominator leaves a plain rational to divide by.
    """
    if den.is_zero():
        raise ZeroDivisionError("SqrtSum division by zero")
    while not den.is_rational():
        # radicands are sorted, so the last term carries the largest one
        p = smallest_prime_factor(den.terms[-1][0])
        d0, d1 = _split_by_prime(den, p)
        conj = d0 - SqrtSum.term(1, p) * d1
        num = num * conj
        den = d0 * d0 - SqrtSum.from_rational(p) * (d1 * d1)
    q = den.rational_value()
    return SqrtSum(tuple((n, r / q) for n, r in num.terms))


# -- ShapeNum ------------------------------------------------------------------

class ShapeNum:
    """Element a + b*sqrt(-3) of the imaginary quadratic shape field."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __add__(self, other):
        if not isinstance(other, ShapeNum):
            other = ShapeNum(other)
        return ShapeNum(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return ShapeNum(-self.a, -self.b)

    def __sub__(self, other):
        if not isinstance(other, ShapeNum):
            other = ShapeNum(other)
        return ShapeNum(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return ShapeNum(other) - self

    def __mul__(self, other):
        if not isinstance(other, ShapeNum):
            other = ShapeNum(other)
        # (a + b w)(c + d w) with w^2 = -3
        return ShapeNum(
            self.a * other.a - 3 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return ShapeNum(self.a, -self.b)

    def norm(self):
        """a^2 + 3 b^2, the square of the absolute value (a Fraction)."""
        return self.a * self.a + 3 * self.b * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in the shape field")
        return ShapeNum(self.a / n, -self.b / n)

    def __truediv__(self, other):
        if not isinstance(other, ShapeNum):
            other = ShapeNum(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return ShapeNum(other) / self

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def is_real(self):
        return self.b == 0

    def im_sign(self):
        """Sign of the imaginary part b*sqrt(3), i.e. the sign of b."""
        return (self.b > 0) - (self.b < 0)

    def abs_sqrtsum(self):
        """|a + b*sqrt(-3)| = sqrt(a^2 + 3 b^2) as a one-term SqrtSum."""
        return SqrtSum.sqrt_rational(self.norm())

    def im_sqrtsum(self):
        """Imaginary part b*sqrt(3) as a SqrtSum."""
        return SqrtSum(((3, self.b),)) if self.b else SqrtSum()

    def re_fraction(self):
        return self.a

    def interval(self, prec=DEFAULT_PREC):
        re = Interval.from_rational(self.a, prec)
        im = Interval.from_rational(self.b, prec) * Interval.from_rational(
            Fraction(3), prec
        ).sqrt()
        return ComplexInterval(re, im)

    def __eq__(self, other):
        if isinstance(other, ShapeNum):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __complex__(self):
        return complex(float(self.a), float(self.b) * 3 ** 0.5)

    def __repr__(self):
        sign = "+" if self.b >= 0 else "-"
        return f"({self.a}{sign}{abs(self.b)}w)"


ZETA = ShapeNum(Fraction(1, 2), Fraction(1, 2))  # the regular shape


def to_interval(x, precision=DEFAULT_PREC):
    """Enclosure of a SqrtSum (Interval) or ShapeNum (ComplexInterval)."""
    if precision < 8:
        raise ValueError("precision must be at least 8 bits")
    return x.interval(precision)


def rational_reconstruct(x, max_den=10000):
    """Best continued-fraction convergent of x with denominator <= max_den."""
    if max_den < 1:
        raise ValueError("max_den must be at least 1")
    f = Fraction(x).limit_denominator(max_den)
    return f
