"""Exact Gaussian-rational numbers ``a + bi`` with ``a, b`` in Q.

Rationals are ``gmpy2.mpq`` values: always reduced, positive denominator,
hash-compatible with :class:`fractions.Fraction` and :class:`int`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

from gmpy2 import mpq

from .errors import ParseError, ZeroDenominator

Rational = type(mpq(0))

__all__ = ["GaussianRational", "Rational", "gr", "to_rational", "format_rational"]


def to_rational(value) -> Rational:
    """Coerce ints, Fractions, mpq, exact floats and ``"p/q"`` strings."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, (int, Fraction, _RationalABC)):
        return mpq(value)
    if isinstance(value, float):
        return mpq(Fraction(value))
    if isinstance(value, str):
        text = value.strip()
        try:
            return mpq(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(q: Rational) -> str:
    """``"p/q"`` with ``/1`` omitted."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    __slots__ = ("re", "im", "_hash")

    def __init__(self, re=0, im=0):
        self.re = to_rational(re)
        self.im = to_rational(im)
        self._hash = None

    @classmethod
    def _raw(cls, re, im) -> GaussianRational:
        obj = cls.__new__(cls)
        obj.re = re
        obj.im = im
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, tuple) and len(value) == 2:
            return cls(*value)
        return cls(value, 0)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        try:
            return GaussianRational.coerce(other) - self
        except TypeError:
            return NotImplemented

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        c, d = other.re, other.im
        den = c * c + d * d
        if not den:
            raise ZeroDenominator("division by zero")
        a, b = self.re, self.im
        return GaussianRational._raw((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        try:
            return GaussianRational.coerce(other) / self
        except TypeError:
            return NotImplemented

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> Rational:
        """Squared modulus ``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    # -- comparison and hashing ----------------------------------------

    def key(self):
        return (self.re, self.im)

    def __eq__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        h = self._hash
        if h is None:
            # real values hash like the equal int/Fraction
            h = hash(self.re) if not self.im else hash((self.re, self.im))
            self._hash = h
        return h

    def __lt__(self, other):
        return self.key() < GaussianRational.coerce(other).key()

    def __le__(self, other):
        return self.key() <= GaussianRational.coerce(other).key()

    def __gt__(self, other):
        return self.key() > GaussianRational.coerce(other).key()

    def __ge__(self, other):
        return self.key() >= GaussianRational.coerce(other).key()

    # -- text --------------------------------------------------------------

    def to_text(self) -> str:
        """Set-file form ``<re> <im>``."""
        return f"{format_rational(self.re)} {format_rational(self.im)}"

    @classmethod
    def from_text(cls, text: str) -> GaussianRational:
        parts = text.split()
        if len(parts) == 1:
            return cls(to_rational(parts[0]), 0)
        if len(parts) != 2:
            raise ParseError(f"expected '<re> <im>', got {text!r}")
        return cls(to_rational(parts[0]), to_rational(parts[1]))

    def __str__(self):
        re, im = format_rational(self.re), format_rational(self.im)
        if not self.im:
            return re
        if not self.re:
            return f"{im}i"
        sign = "-" if self.im < 0 else "+"
        return f"{re}{sign}{format_rational(abs(self.im))}i"

    def __repr__(self):
        return f"GaussianRational({format_rational(self.re)!r}, {format_rational(self.im)!r})"


def gr(re=0, im=0) -> GaussianRational:
    """Shorthand constructor; ``gr(1+2j)`` and ``gr("1/2", 3)`` both work."""
    if isinstance(re, (complex, GaussianRational)) and im == 0:
        return GaussianRational.coerce(re)
    return GaussianRational(re, im)
