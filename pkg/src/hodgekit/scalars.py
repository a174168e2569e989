"""Exact scalar fields used throughout the package.

Rationals are sympy ``QQ`` elements (gmpy2 ``mpq`` when available) and
Gaussian rationals are ``QQ_I`` elements.  :class:`Surd` covers the one
place where a square root of a rational enters: the volume element of a
metric whose Gram determinant is not a rational square.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from sympy.polys.domains import QQ, QQ_I
from sympy import factorint

__all__ = [
    "QQ",
    "QQ_I",
    "Surd",
    "to_rational",
    "to_gauss",
    "conj",
    "re_im",
    "is_real",
    "exact_sqrt",
    "I_UNIT",
    "i_power",
    "rational_to_json",
    "rational_from_json",
    "gauss_to_json",
    "gauss_from_json",
]

_MPQ = type(QQ(1, 2))
_GAUSS = type(QQ_I(0, 1))

I_UNIT = QQ_I(0, 1)


def to_rational(x):
    """Convert an int, Fraction, mpq, decimal string or ``"a/b"`` string to QQ."""
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return QQ(x)
    if isinstance(x, Fraction):
        return QQ(x.numerator, x.denominator)
    if isinstance(x, str):
        f = Fraction(x.strip())
        return QQ(f.numerator, f.denominator)
    if isinstance(x, float):
        f = Fraction(x)
        return QQ(f.numerator, f.denominator)
    if isinstance(x, Rational):
        return QQ(int(x.numerator), int(x.denominator))
    if isinstance(x, _GAUSS):
        if x.y != 0:
            raise ValueError(f"{x} is not real")
        return QQ(x.x)
    raise TypeError(f"cannot convert {x!r} to a rational")


def to_gauss(x):
    """Convert a real scalar, a complex number with rational parts, or a pair, to QQ_I."""
    if isinstance(x, _GAUSS):
        return x
    if isinstance(x, tuple):
        return QQ_I(to_rational(x[0]), to_rational(x[1]))
    if isinstance(x, complex):
        return QQ_I(to_rational(x.real), to_rational(x.imag))
    return QQ_I(to_rational(x), 0)


def re_im(x):
    """Real and imaginary parts as QQ elements."""
    if isinstance(x, _GAUSS):
        return QQ(x.x), QQ(x.y)
    return to_rational(x), QQ(0)


def conj(x):
    """Complex conjugate; identity on real scalars (including :class:`Surd`)."""
    if isinstance(x, _GAUSS):
        return QQ_I(x.x, -x.y)
    return x


def is_real(x) -> bool:
    return not isinstance(x, _GAUSS) or x.y == 0


def i_power(e: int):
    """``i**e`` for any integer ``e`` as an exact Gaussian rational."""
    return (QQ_I(1, 0), QQ_I(0, 1), QQ_I(-1, 0), QQ_I(0, -1))[e % 4]


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write ``n > 0`` as ``s*s*d`` with ``d`` squarefree; return ``(s, d)``."""
    s, d = 1, 1
    for p, e in factorint(n).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, d


class _Foreign(TypeError):
    pass


class Surd:
    """Exact element ``a + b*sqrt(d)`` of a real quadratic field.

    ``d`` is a squarefree integer > 1.  Arithmetic with a plain rational
    promotes it; results whose surd part vanishes collapse back to QQ, so
    equality with rationals behaves as expected.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = to_rational(a)
        self.b = to_rational(b)
        self.d = int(d)

    @staticmethod
    def _make(a, b, d):
        # a, b already QQ elements
        if not b:
            return a
        obj = object.__new__(Surd)
        obj.a, obj.b, obj.d = a, b, d
        return obj

    def _coerce(self, other):
        if not isinstance(other, (Surd, int, _MPQ, Fraction, _GAUSS)):
            raise _Foreign
        if isinstance(other, Surd):
            if other.d != self.d:
                raise ValueError("mixing different quadratic fields")
            return other.a, other.b
        if isinstance(other, _GAUSS):
            raise TypeError("Surd does not mix with Gaussian rationals")
        return to_rational(other), QQ(0)

    def __add__(self, other):
        try:
            a, b = self._coerce(other)
        except _Foreign:
            return NotImplemented
        return Surd._make(self.a + a, self.b + b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        try:
            a, b = self._coerce(other)
        except _Foreign:
            return NotImplemented
        return Surd._make(self.a - a, self.b - b, self.d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if type(other) is Surd and other.d == self.d:
            a, b = other.a, other.b
            return Surd._make(self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d)
        if type(other) is _MPQ:
            return Surd._make(self.a * other, self.b * other, self.d)
        try:
            a, b = self._coerce(other)
        except _Foreign:
            return NotImplemented
        return Surd._make(self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.b * self.b * self.d
        return Surd._make(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return self * other.inverse()
        return self * (QQ(1) / to_rational(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, Surd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        try:
            a, b = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.a == a and self.b == b

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"Surd({self.a}, {self.b}, {self.d})"


def exact_sqrt(q):
    """Square root of a positive rational, as QQ when possible, else :class:`Surd`."""
    q = to_rational(q)
    if q <= 0:
        raise ValueError("square root of a non-positive rational")
    num, den = int(q.numerator), int(q.denominator)
    # sqrt(num/den) = sqrt(num*den)/den
    s, d = _squarefree_split(num * den)
    if d == 1:
        return QQ(s, den)
    return Surd(0, QQ(s, den), d)


def rational_to_json(q) -> dict:
    q = to_rational(q)
    return {"num": int(q.numerator), "den": int(q.denominator)}


def rational_from_json(obj):
    if isinstance(obj, dict):
        return QQ(int(obj["num"]), int(obj.get("den", 1)))
    return to_rational(obj)


def gauss_to_json(z) -> dict:
    re, im = re_im(z)
    return {"re": rational_to_json(re), "im": rational_to_json(im)}


def gauss_from_json(obj):
    return QQ_I(rational_from_json(obj.get("re", 0)), rational_from_json(obj.get("im", 0)))
