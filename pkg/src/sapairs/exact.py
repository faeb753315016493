"""Exact arithmetic over Q, the real quadratic field Q(sqrt d), and Q_p valuations.

Rationals are plain :class:`fractions.Fraction` objects (always stored reduced).
Elements ``a + b*sqrt(d)`` are :class:`ExtReal` values; they mix freely with
``int`` and ``Fraction`` operands but refuse to combine across different ``d``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

ARCHIMEDEAN = "inf"
INFINITE = math.inf

Rational = Union[int, Fraction]
Scalar = Union[int, Fraction, "ExtReal"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, ExtReal):
        if x.b != 0:
            raise ValueError(f"{x} is not rational")
        return x.a
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


@lru_cache(maxsize=1024)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for q in range(3, math.isqrt(n) + 1, 2):
        if n % q == 0:
            return False
    return True


@lru_cache(maxsize=256)
def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    q = 2
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 1
    return True


def validate_d(d: int) -> int:
    if not isinstance(d, int) or isinstance(d, bool):
        raise ValueError(f"d must be an integer, got {d!r}")
    if d < 2 or not is_squarefree(d):
        raise ValueError(f"d must be a positive squarefree non-square integer, got {d}")
    return d


def _vint(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(t: Rational, p: int):
    """Return v with ``t = p**v * (u/w)``, ``p`` dividing neither ``u`` nor ``w``.

    Zero has valuation :data:`INFINITE`.
    """
    t = as_fraction(t)
    if t == 0:
        return INFINITE
    return _vint(abs(t.numerator), p) - _vint(t.denominator, p)


def padic_abs(t: Rational, p: int) -> Fraction:
    """Normalized p-adic absolute value ``p**(-v)``, so that ``|p|_p = 1/p``."""
    v = padic_valuation(t, p)
    if v == INFINITE:
        return Fraction(0)
    return Fraction(1, p**v) if v >= 0 else Fraction(p ** (-v))


def unit_part(t: Rational, p: int) -> int:
    """Integer in the square class of ``t / p**v``; it is prime to ``p``."""
    t = as_fraction(t)
    v = padic_valuation(t, p)
    u = t / Fraction(p) ** v
    return u.numerator * u.denominator


def residue(t: Rational, modulus: int) -> int:
    """Image of a rational with denominator prime to ``modulus`` in Z/modulus."""
    t = as_fraction(t)
    if modulus == 1:
        return 0
    return t.numerator * pow(t.denominator, -1, modulus) % modulus


def sign(x: Scalar) -> int:
    if isinstance(x, ExtReal):
        return x.sign()
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class ExtReal:
    """The real number ``a + b*sqrt(d)`` with ``sqrt(d) > 0``."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))
        validate_d(self.d)

    @classmethod
    def sqrt(cls, d: int) -> "ExtReal":
        return cls(Fraction(0), Fraction(1), d)

    def _coerce(self, other):
        if isinstance(other, ExtReal):
            if other.d != self.d:
                raise ValueError(f"mixed quadratic fields: sqrt({self.d}) and sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return ExtReal(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExtReal(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return ExtReal(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExtReal(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExtReal(self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "ExtReal":
        return ExtReal(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "ExtReal":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt d)")
        return ExtReal(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = ExtReal(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        lhs, rhs = self.a * self.a, self.b * self.b * self.d
        if lhs > rhs:
            return sa
        if lhs < rhs:
            return sb
        return 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        if isinstance(other, ExtReal):
            return self.a == other.a and self.b == other.b and (self.d == other.d or self.b == 0)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare ExtReal with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(self.approx(80))

    def approx(self, bits: int = 100) -> Fraction:
        """Rational within ``|b| * 2**-bits`` of the value (truncated sqrt)."""
        s = math.isqrt(self.d << (2 * bits))
        return self.a + self.b * Fraction(s, 1 << bits)

    def floor(self) -> int:
        """Exact floor, corrected with exact sign tests."""
        bits = 64 + abs(self.b.numerator).bit_length() + self.b.denominator.bit_length()
        f = math.floor(self.approx(bits))
        while (self - f).sign() < 0:
            f -= 1
        while (self - (f + 1)).sign() >= 0:
            f += 1
        return f

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"ExtReal({format_scalar(self)})"


def ext_sign(x: Scalar) -> int:
    return sign(x)


def ext_abs_lt(x: Scalar, eps: Rational) -> bool:
    """``|x| < eps`` decided exactly as ``-eps < x < eps``."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return sign(x - eps) < 0 and sign(x + eps) > 0


def scalar_floor(x: Scalar) -> int:
    if isinstance(x, ExtReal):
        return x.floor()
    return math.floor(x)


def scalar_float(x: Scalar) -> float:
    return float(x)


def rational_sqrt(t: Rational):
    """Exact square root of a nonnegative rational, or ``None``."""
    t = as_fraction(t)
    if t < 0:
        return None
    rn, rd = math.isqrt(t.numerator), math.isqrt(t.denominator)
    if rn * rn == t.numerator and rd * rd == t.denominator:
        return Fraction(rn, rd)
    return None


def field_sqrt(x: Scalar):
    """A square root of ``x`` inside its own field (Q or Q(sqrt d)), else ``None``.

    The returned root is nonnegative under the real embedding.
    """
    if not isinstance(x, ExtReal):
        return rational_sqrt(x)
    if x.sign() < 0:
        return None
    if x.b == 0:
        r = rational_sqrt(x.a)
        if r is not None:
            return ExtReal(r, 0, x.d)
        r = rational_sqrt(x.a / x.d)
        if r is not None:
            return ExtReal(0, r, x.d)
        return None
    # (u + v sqrt d)^2 = a + b sqrt d  =>  u^2 - d v^2 = +-sqrt(norm)
    n = rational_sqrt(x.norm())
    if n is None:
        return None
    for s in (n, -n):
        u = rational_sqrt((x.a + s) / 2)
        if u is None or u == 0:
            continue
        root = ExtReal(u, x.b / (2 * u), x.d)
        if root * root == x:
            return abs(root)
    return None


# --- textual coefficient format -------------------------------------------

_TERM = re.compile(
    r"""(?P<sign>[+-]?)
        (?:
          (?P<coef>\d+(?:/\d+)?)(?:\*sqrt\((?P<d1>\d+)\))?
        | sqrt\((?P<d2>\d+)\)
        )""",
    re.VERBOSE,
)


class CoefficientError(ValueError):
    """Malformed textual coefficient."""


def parse_rational(text: str) -> Fraction:
    value = parse_scalar(text)
    if isinstance(value, ExtReal):
        if value.b != 0:
            raise CoefficientError(f"expected a rational, got {text!r}")
        return value.a
    return value


def parse_scalar(text, d: int | None = None):
    """Parse ``"a"``, ``"a/b"`` or ``"a/b+c/e*sqrt(d)"`` (signs optional).

    Returns a ``Fraction`` when no sqrt term appears, else an :class:`ExtReal`.
    When ``d`` is given, a sqrt term with a different radicand is rejected.
    """
    if isinstance(text, bool):
        raise CoefficientError(f"invalid coefficient {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise CoefficientError(f"invalid coefficient {text!r}")
    s = "".join(text.split())
    if not s:
        raise CoefficientError("empty coefficient")
    pos = 0
    rat = Fraction(0)
    irr = Fraction(0)
    seen_d = None
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or (not first and not m.group("sign")):
            raise CoefficientError(f"cannot parse coefficient {text!r} at offset {pos}")
        first = False
        sgn = -1 if m.group("sign") == "-" else 1
        coef = m.group("coef")
        if coef is not None:
            num, _, den = coef.partition("/")
            if den and int(den) == 0:
                raise CoefficientError(f"zero denominator in {text!r}")
            c = Fraction(int(num), int(den) if den else 1)
        else:
            c = Fraction(1)
        radicand = m.group("d1") or m.group("d2")
        if radicand is None:
            rat += sgn * c
        else:
            r = int(radicand)
            if seen_d is not None and r != seen_d:
                raise CoefficientError(f"mixed radicands in {text!r}")
            seen_d = r
            irr += sgn * c
        pos = m.end()
    if seen_d is None:
        return rat
    if d is not None and seen_d != d:
        raise CoefficientError(f"sqrt({seen_d}) in {text!r} does not match instance d={d}")
    try:
        return ExtReal(rat, irr, seen_d)
    except ValueError as exc:
        raise CoefficientError(str(exc)) from None


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: Scalar) -> str:
    """Canonical whitespace-free text, inverse of :func:`parse_scalar`."""
    if isinstance(x, ExtReal):
        if x.b == 0:
            return _fmt_rat(x.a)
        mag = abs(x.b)
        irr = f"sqrt({x.d})" if mag == 1 else f"{_fmt_rat(mag)}*sqrt({x.d})"
        if x.a == 0:
            return ("-" if x.b < 0 else "") + irr
        return _fmt_rat(x.a) + ("-" if x.b < 0 else "+") + irr
    return _fmt_rat(as_fraction(x))
