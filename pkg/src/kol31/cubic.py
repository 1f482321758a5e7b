"""Exact arithmetic in the cubic field Q(t) with t**3 = 2*t**2 + 1.

The real root t of x**3 - 2*x**2 - 1 is the inflation factor of the
block-coded Kolakoski-(3,1) substitution; its complex conjugate root is the
contraction of the internal (window) plane.  Every constant of the
construction (tile lengths, letter frequencies, deformation parameters up to
one imaginary unit) lives in this field, so all structural identities can be
checked with exact rational arithmetic.

Elements are stored as coefficient triples over the power basis {1, t, t**2}
with ``fractions.Fraction`` entries.  The complex embedding t -> b is handled
by :class:`InternalPoint`, which keeps the factor Im(b) symbolic: a point is
re + i*Im(b)*im_s with re, im_s in Q(t).  Since Im(b)**2 is itself in Q(t),
internal points are closed under multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RatLike = Union[int, Fraction]


def _frac(x: RatLike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class CubicNumber:
    """c0 + c1*t + c2*t**2 with rational coefficients, t**3 = 2*t**2 + 1."""

    c0: Fraction
    c1: Fraction
    c2: Fraction

    @staticmethod
    def of(c0: RatLike = 0, c1: RatLike = 0, c2: RatLike = 0) -> "CubicNumber":
        return CubicNumber(_frac(c0), _frac(c1), _frac(c2))

    def __add__(self, other: "CubicNumber | RatLike") -> "CubicNumber":
        other = _coerce(other)
        return CubicNumber(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2)

    __radd__ = __add__

    def __neg__(self) -> "CubicNumber":
        return CubicNumber(-self.c0, -self.c1, -self.c2)

    def __sub__(self, other: "CubicNumber | RatLike") -> "CubicNumber":
        return self + (-_coerce(other))

    def __rsub__(self, other: "CubicNumber | RatLike") -> "CubicNumber":
        return _coerce(other) + (-self)

    def __mul__(self, other: "CubicNumber | RatLike") -> "CubicNumber":
        o = _coerce(other)
        a0, a1, a2 = self.c0, self.c1, self.c2
        b0, b1, b2 = o.c0, o.c1, o.c2
        # reduce with t^3 = 2 t^2 + 1 and t^4 = 4 t^2 + t + 2
        x12 = a1 * b2 + a2 * b1
        x22 = a2 * b2
        return CubicNumber(
            a0 * b0 + x12 + 2 * x22,
            a0 * b1 + a1 * b0 + x22,
            a0 * b2 + a1 * b1 + a2 * b0 + 2 * x12 + 4 * x22,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: "CubicNumber | RatLike") -> "CubicNumber":
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other: "CubicNumber | RatLike") -> "CubicNumber":
        return _coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "CubicNumber":
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return not (self.c0 or self.c1 or self.c2)

    def is_rational(self) -> bool:
        return not (self.c1 or self.c2)

    def is_integer(self) -> bool:
        return (
            self.is_rational()
            and self.c0.denominator == 1
        )

    def inverse(self) -> "CubicNumber":
        """Multiplicative inverse via the extended Euclidean algorithm on
        polynomials modulo x**3 - 2*x**2 - 1."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in the cubic field")
        # polynomials as coefficient lists, lowest degree first
        modulus = [Fraction(-1), Fraction(0), Fraction(-2), Fraction(1)]
        r0, r1 = modulus, [self.c0, self.c1, self.c2]
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while any(r1):
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        # r0 is a nonzero constant gcd (the modulus is irreducible)
        g = r0[0]
        inv = [c / g for c in s0]
        inv += [Fraction(0)] * (3 - len(inv))
        return CubicNumber(inv[0], inv[1], inv[2])

    def __str__(self) -> str:
        return f"({self.c0}, {self.c1}, {self.c2})"


def _coerce(x: "CubicNumber | RatLike") -> CubicNumber:
    if isinstance(x, CubicNumber):
        return x
    return CubicNumber(_frac(x), Fraction(0), Fraction(0))


def _poly_trim(p):
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(a, b):
    a = list(a)
    b = _poly_trim(list(b))
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        a = _poly_trim(a)
        if len(a) < len(b):
            break
        coeff = a[-1] / b[-1]
        deg = len(a) - len(b)
        q[deg] = coeff
        for i, y in enumerate(b):
            a[deg + i] -= coeff * y
        a = _poly_trim(a)
    return _poly_trim(q), _poly_trim(a)


ZERO = CubicNumber.of(0)
ONE = CubicNumber.of(1)

#: generator t of the field: the inflation factor (real root, about 2.2056)
T = CubicNumber.of(0, 1)
T2 = CubicNumber.of(0, 0, 1)

#: tile lengths of the geometric realization: A -> t^2 - t, B -> t, C -> 1
TILE_LEN = {"A": T2 - T, "B": T, "C": ONE}

#: tile frequencies (left Perron eigenvector, normalized to sum 1)
TILE_FREQ = {
    "A": CubicNumber.of(Fraction(-1, 2), Fraction(3, 2), Fraction(-1, 2)),
    "B": CubicNumber.of(0, -2, 1),
    "C": CubicNumber.of(Fraction(3, 2), Fraction(1, 2), Fraction(-1, 2)),
}

#: mean tile length (7 - t^2 + t)/2, about 2.1705
MEAN_TILE_LEN = CubicNumber.of(Fraction(7, 2), Fraction(1, 2), Fraction(-1, 2))

#: frequencies of the symbols 3 and 1 in the bit sequence
BIT_FREQ = {
    3: CubicNumber.of(Fraction(-1, 2), Fraction(1, 2)),
    1: CubicNumber.of(Fraction(3, 2), Fraction(-1, 2)),
}

#: Im(b)**2 = 1/t - (1 - t/2)**2 = (3/4) t**2 - t - 1, a positive field element
IM_CONJ_SQ = CubicNumber.of(-1, -1, Fraction(3, 4))


@dataclass(frozen=True)
class InternalPoint:
    """Point re + i*Im(b)*im_s of the internal plane, re and im_s in Q(t)."""

    re: CubicNumber
    im_s: CubicNumber

    @staticmethod
    def of(re: "CubicNumber | RatLike" = 0, im_s: "CubicNumber | RatLike" = 0) -> "InternalPoint":
        return InternalPoint(_coerce(re), _coerce(im_s))

    def __add__(self, other: "InternalPoint") -> "InternalPoint":
        return InternalPoint(self.re + other.re, self.im_s + other.im_s)

    def __sub__(self, other: "InternalPoint") -> "InternalPoint":
        return InternalPoint(self.re - other.re, self.im_s - other.im_s)

    def __neg__(self) -> "InternalPoint":
        return InternalPoint(-self.re, -self.im_s)

    def __mul__(self, other: "InternalPoint | CubicNumber | RatLike") -> "InternalPoint":
        if not isinstance(other, InternalPoint):
            c = _coerce(other)
            return InternalPoint(self.re * c, self.im_s * c)
        # (r1 + i I s1)(r2 + i I s2) with I^2 = IM_CONJ_SQ in Q(t)
        return InternalPoint(
            self.re * other.re + IM_CONJ_SQ * self.im_s * other.im_s * (-1),
            self.re * other.im_s + self.im_s * other.re,
        )

    __rmul__ = __mul__

    def scale(self, q: RatLike) -> "InternalPoint":
        return InternalPoint(self.re * _frac(q), self.im_s * _frac(q))

    def norm_sq(self) -> CubicNumber:
        """|z|**2 as a field element."""
        return self.re * self.re + IM_CONJ_SQ * self.im_s * self.im_s

    def inverse(self) -> "InternalPoint":
        n = self.norm_sq().inverse()
        return InternalPoint(self.re * n, -self.im_s * n)

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im_s.is_zero()


def cubic_mul(a: CubicNumber, b: CubicNumber) -> CubicNumber:
    """Product in Q(t), reduced with t**3 = 2*t**2 + 1."""
    return a * b


def cubic_inv(a: CubicNumber) -> CubicNumber:
    """Inverse in Q(t); raises ZeroDivisionError on zero."""
    return a.inverse()


def internal_decompose(a: CubicNumber) -> InternalPoint:
    """Split the conjugate embedding of ``a`` into re + i*Im(b)*im_s.

    Uses Re(b) = 1 - t/2 and Re(b**2) = 2 - t**2/2, so for
    a = c0 + c1 t + c2 t**2 the parts are
    re = c0 + c1 (1 - t/2) + c2 (2 - t**2/2)  and  im_s = c1 + c2 (2 - t).
    """
    c0, c1, c2 = a.c0, a.c1, a.c2
    re = CubicNumber(c0 + c1 + 2 * c2, -c1 / 2, -c2 / 2)
    im_s = CubicNumber(c1 + 2 * c2, -c2, Fraction(0))
    return InternalPoint(re, im_s)


def _find_root(digits: int) -> Fraction:
    """Isolate the real root in [2.205, 2.206] by bisection to ``digits``
    decimal digits, with exact rational interval endpoints."""

    def f(x: Fraction) -> Fraction:
        return x * x * x - 2 * x * x - 1

    lo, hi = Fraction(2205, 1000), Fraction(2206, 1000)
    assert f(lo) < 0 < f(hi)
    # each bisection gains one bit; stop below 10**-digits
    target = Fraction(1, 10**digits)
    while hi - lo > target:
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _frac_sqrt(x: Fraction, digits: int) -> Fraction:
    """sqrt of a nonnegative rational to ``digits`` decimal digits."""
    scale = 10**digits
    return Fraction(math.isqrt((x.numerator * scale * scale) // x.denominator), scale)


@dataclass(frozen=True)
class EmbeddingConstants:
    """Numeric values of the two embeddings, with guaranteed precision."""

    root: float          # real root t, in [2.205, 2.206]
    conj_re: float       # Re(b) = 1 - t/2
    conj_im: float       # Im(b) > 0
    precision: int       # decimal digits of the underlying rational root
    root_exact: Fraction
    conj_im_exact: Fraction


def embedding_constants(precision: int = 40) -> EmbeddingConstants:
    root = _find_root(precision)
    im_sq = (
        Fraction(3, 4) * root * root - root - 1
    )  # value of IM_CONJ_SQ at the root
    im = _frac_sqrt(im_sq, precision)
    return EmbeddingConstants(
        root=float(root),
        conj_re=float(1 - root / 2),
        conj_im=float(im),
        precision=precision,
        root_exact=root,
        conj_im_exact=im,
    )


#: module-level default constants; all numerics in the package hang off these
CONSTANTS = embedding_constants()


def embed_real(a: CubicNumber, consts: EmbeddingConstants = CONSTANTS) -> float:
    """Numeric value of ``a`` under the real embedding t -> root."""
    r = consts.root
    return float(a.c0) + r * (float(a.c1) + r * float(a.c2))


def embed_internal(
    a: "CubicNumber | InternalPoint", consts: EmbeddingConstants = CONSTANTS
) -> complex:
    """Numeric complex value under the conjugate embedding t -> b."""
    if isinstance(a, CubicNumber):
        a = internal_decompose(a)
    return complex(embed_real(a.re, consts), consts.conj_im * embed_real(a.im_s, consts))
