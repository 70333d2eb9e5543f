"""Probability scalars.

A probability is either an exact :class:`fractions.Fraction` or a :class:`Surd`
``a + b*sqrt(c)`` with rational ``a``, ``b`` and a non-square radicand ``c``.
Arithmetic between values that share a radicand stays exact; anything else is
demoted to an outward-rounded binary64 :class:`Interval`.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

DEFAULT_PRECISION_BITS = 128
_working_bits = DEFAULT_PRECISION_BITS

_SMALL_SQUARE_LIMIT = 1000


def working_precision() -> int:
    """Bits used by :func:`eval_interval` when no precision is passed."""
    return _working_bits


def set_working_precision(bits: int) -> None:
    global _working_bits
    if not isinstance(bits, int) or bits < 53:
        raise ValueError(f"precision must be an integer >= 53, got {bits!r}")
    _working_bits = bits


def rat(num: int, den: int = 1) -> Fraction:
    """Canonical rational ``num/den``; the sign is carried by the numerator."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    return Fraction(num, den)


def _exact_isqrt(m: int) -> int | None:
    if m < 0:
        return None
    r = math.isqrt(m)
    return r if r * r == m else None


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Return sqrt(x) if it is rational, else None."""
    x = Fraction(x)
    rn = _exact_isqrt(x.numerator)
    rd = _exact_isqrt(x.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _strip_square_factors(m: int) -> tuple[int, int]:
    # m = k*k*rest with small square factors pulled out; not a full factorisation
    k = 1
    d = 2
    while d <= _SMALL_SQUARE_LIMIT and d * d <= m:
        while m % (d * d) == 0:
            m //= d * d
            k *= d
        d += 1
    r = _exact_isqrt(m)
    if r is not None:
        k *= r
        m = 1
    return k, m


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def surd(a, b, c) -> "ProbScalar":
    """Build ``a + b*sqrt(c)``, collapsing to a Fraction when it is rational.

    The radicand is rewritten as an integer with small square factors moved
    into ``b``, so ``surd(0, 1, Fraction(1, 3))`` is stored as ``(1/3)*sqrt(3)``.
    """
    a, b, c = _to_fraction(a), _to_fraction(b), _to_fraction(c)
    if c < 0:
        raise ValueError("negative radicand")
    if b == 0 or c == 0:
        return a
    root = rational_sqrt(c)
    if root is not None:
        return a + b * root
    # sqrt(p/q) = sqrt(p*q)/q
    m = c.numerator * c.denominator
    k, m = _strip_square_factors(m)
    b = b * k / c.denominator
    if m == 1:
        return a + b
    return Surd(a, b, Fraction(m))


@dataclass(frozen=True, eq=False)
class Surd:
    """The real number ``a + b*sqrt(c)``; build through :func:`surd`."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _to_fraction(getattr(self, name)))
        if self.b == 0:
            raise ValueError("b must be nonzero; use a Fraction instead")
        if self.c <= 0 or rational_sqrt(self.c) is not None:
            raise ValueError(f"radicand {self.c} must be a positive non-square")

    # -- exact structure ---------------------------------------------------

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == 0 or sa == sb:
            return sb if sa == 0 else sa
        # opposite signs: compare a^2 with b^2 c (never equal, c is not a square)
        return sa if self.a * self.a > self.b * self.b * self.c else sb

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b, self.c)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.c

    def _rescale(self, other: "Surd") -> Fraction | None:
        """k with b_other*sqrt(c_other) == k*sqrt(c_self), or None."""
        if other.c == self.c:
            return other.b
        s = rational_sqrt(self.c * other.c)
        if s is None:
            return None
        return other.b * s / self.c

    def _coerce(self, other):
        """Return (a, b) of ``other`` over this radicand, or None if impossible."""
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        if isinstance(other, Surd):
            k = self._rescale(other)
            if k is None:
                return None
            return other.a, k
        raise TypeError

    # -- arithmetic ----------------------------------------------------------

    def _binop(self, other, op, reflected=False):
        if isinstance(other, Interval):
            x = self.to_interval()
            return op(other, x) if reflected else op(x, other)
        try:
            coerced = self._coerce(other)
        except TypeError:
            return NotImplemented
        if coerced is None:
            x, y = self.to_interval(), eval_interval(other)
            return op(y, x) if reflected else op(x, y)
        oa, ob = coerced
        if reflected:
            (a1, b1), (a2, b2) = (oa, ob), (self.a, self.b)
        else:
            (a1, b1), (a2, b2) = (self.a, self.b), (oa, ob)
        c = self.c
        if op is operator.add:
            return surd(a1 + a2, b1 + b2, c)
        if op is operator.sub:
            return surd(a1 - a2, b1 - b2, c)
        if op is operator.mul:
            return surd(a1 * a2 + b1 * b2 * c, a1 * b2 + a2 * b1, c)
        if op is operator.truediv:
            den = a2 * a2 - b2 * b2 * c
            if den == 0:
                raise ZeroDivisionError("division by zero surd")
            return surd((a1 * a2 - b1 * b2 * c) / den, (b1 * a2 - a1 * b2) / den, c)
        raise AssertionError(op)

    def __add__(self, other):
        return self._binop(other, operator.add)

    def __radd__(self, other):
        return self._binop(other, operator.add, reflected=True)

    def __sub__(self, other):
        return self._binop(other, operator.sub)

    def __rsub__(self, other):
        return self._binop(other, operator.sub, reflected=True)

    def __mul__(self, other):
        return self._binop(other, operator.mul)

    def __rmul__(self, other):
        return self._binop(other, operator.mul, reflected=True)

    def __truediv__(self, other):
        return self._binop(other, operator.truediv)

    def __rtruediv__(self, other):
        return self._binop(other, operator.truediv, reflected=True)

    def __neg__(self):
        return Surd(-self.a, -self.b, self.c)

    def __pos__(self):
        return self

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return False  # an irrational never equals a rational
        if not isinstance(other, Surd):
            return NotImplemented
        return (
            self.a == other.a
            and (self.b > 0) == (other.b > 0)
            and self.b * self.b * self.c == other.b * other.b * other.c
        )

    def __hash__(self):
        return hash((self.a, self.b * self.b * self.c, self.b > 0))

    def _cmp(self, other) -> int:
        if not isinstance(other, (int, Fraction, Surd)):
            raise TypeError
        diff = self - other
        if not isinstance(diff, Interval):
            return scalar_sign(diff)
        # 1, sqrt(c1), sqrt(c2) are independent over Q, so the difference is
        # nonzero and enough precision separates it from zero
        bits = DEFAULT_PRECISION_BITS
        while True:
            x, y = eval_interval(self, bits), eval_interval(other, bits)
            if x.hi < y.lo:
                return -1
            if x.lo > y.hi:
                return 1
            if bits > 1 << 16:
                raise ArithmeticError("could not separate surds")
            bits *= 2

    def __lt__(self, other):
        try:
            return self._cmp(other) < 0
        except TypeError:
            return NotImplemented

    def __le__(self, other):
        try:
            return self._cmp(other) <= 0
        except TypeError:
            return NotImplemented

    def __gt__(self, other):
        try:
            return self._cmp(other) > 0
        except TypeError:
            return NotImplemented

    def __ge__(self, other):
        try:
            return self._cmp(other) >= 0
        except TypeError:
            return NotImplemented

    # -- evaluation ----------------------------------------------------------

    def to_interval(self, precision_bits: int | None = None) -> "Interval":
        return eval_interval(self, precision_bits)

    def __float__(self):
        return eval_interval(self, 64).mid

    def __repr__(self):
        return f"Surd({self.a}, {self.b}, {self.c})"

    def __str__(self):
        sign = "+" if self.b > 0 else "-"
        return f"{self.a} {sign} {abs(self.b)}*sqrt({self.c})"


ProbScalar = Union[Fraction, Surd]


# -- intervals ----------------------------------------------------------------


def round_down(x: Fraction) -> float:
    f = float(x)  # correctly rounded
    if Fraction(f) > x:
        f = math.nextafter(f, -math.inf)
    return f


def round_up(x: Fraction) -> float:
    f = float(x)
    if Fraction(f) < x:
        f = math.nextafter(f, math.inf)
    return f


@dataclass(frozen=True)
class Interval:
    """Closed interval with binary64 endpoints, ``lo <= value <= hi``."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise ValueError(f"bad interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def enclosing(cls, lo: Fraction, hi: Fraction) -> "Interval":
        return cls(round_down(lo), round_up(hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return self.lo + (self.hi - self.lo) / 2

    def contains(self, x) -> bool:
        """Exact membership test for rationals, surds, floats and intervals."""
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            return self.lo <= x <= self.hi
        return scalar_sign(x - Fraction(self.lo)) >= 0 and scalar_sign(Fraction(self.hi) - x) >= 0

    def _binop(self, other, op, reflected=False):
        if isinstance(other, (int, Fraction, Surd)):
            other = eval_interval(other)
        elif not isinstance(other, Interval):
            return NotImplemented
        x, y = (other, self) if reflected else (self, other)
        xl, xh, yl, yh = (Fraction(v) for v in (x.lo, x.hi, y.lo, y.hi))
        if op is operator.add:
            return Interval.enclosing(xl + yl, xh + yh)
        if op is operator.sub:
            return Interval.enclosing(xl - yh, xh - yl)
        if op is operator.mul:
            products = (xl * yl, xl * yh, xh * yl, xh * yh)
            return Interval.enclosing(min(products), max(products))
        if op is operator.truediv:
            if yl <= 0 <= yh:
                raise ZeroDivisionError("interval divisor contains zero")
            quotients = (xl / yl, xl / yh, xh / yl, xh / yh)
            return Interval.enclosing(min(quotients), max(quotients))
        raise AssertionError(op)

    def __add__(self, other):
        return self._binop(other, operator.add)

    def __radd__(self, other):
        return self._binop(other, operator.add, reflected=True)

    def __sub__(self, other):
        return self._binop(other, operator.sub)

    def __rsub__(self, other):
        return self._binop(other, operator.sub, reflected=True)

    def __mul__(self, other):
        return self._binop(other, operator.mul)

    def __rmul__(self, other):
        return self._binop(other, operator.mul, reflected=True)

    def __truediv__(self, other):
        return self._binop(other, operator.truediv)

    def __rtruediv__(self, other):
        return self._binop(other, operator.truediv, reflected=True)

    def __neg__(self):
        return Interval(-self.hi, -self.lo)


def _sqrt_enclosure(c: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    # sqrt(p/q) = sqrt(p*q)/q, bracketed between consecutive multiples of 2^-bits/q
    m = c.numerator * c.denominator
    r = math.isqrt(m << (2 * bits))
    scale = c.denominator << bits
    return Fraction(r, scale), Fraction(r + 1, scale)


def eval_interval(x, precision_bits: int | None = None) -> Interval:
    """Outward-rounded binary64 enclosure of ``x``.

    The enclosure is computed exactly to ``precision_bits`` fractional bits
    before the final rounding, so its width is at most
    ``|b| * 2**-precision_bits`` plus one ulp on each side.
    """
    if precision_bits is None:
        precision_bits = _working_bits
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return Interval(round_down(x), round_up(x))
    if isinstance(x, Surd):
        # extra bits absorb the magnitude of b
        extra = max(0, abs(x.b).numerator.bit_length() - abs(x.b).denominator.bit_length() + 1)
        lo, hi = _sqrt_enclosure(x.c, precision_bits + extra)
        if x.b > 0:
            return Interval.enclosing(x.a + x.b * lo, x.a + x.b * hi)
        return Interval.enclosing(x.a + x.b * hi, x.a + x.b * lo)
    raise TypeError(f"cannot evaluate {type(x).__name__}")


def scalar_sign(x) -> int:
    """Exact sign of a rational or surd; intervals must exclude zero or be [0,0]."""
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if isinstance(x, Surd):
        return x.sign()
    if isinstance(x, Interval):
        if x.lo > 0:
            return 1
        if x.hi < 0:
            return -1
        if x.lo == x.hi == 0:
            return 0
        raise ValueError(f"sign undecided for {x}")
    raise TypeError(type(x).__name__)


_OPS = {"+": operator.add, "-": operator.sub, "−": operator.sub, "*": operator.mul, "×": operator.mul}


def arith(x, y, op: str):
    """Apply ``+``, ``-`` or ``*``; exact where the operands share a field."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unsupported operator {op!r}") from None
    return fn(x, y)


def solve_division_q(n: int) -> ProbScalar:
    """Root in (0, 1/2) of ``q(1-q) = n/(4(2n-1))``.

    Closed form: ``q = 1/2 - 1/2*sqrt((n-1)/(2n-1))``.
    """
    if n < 2 or n % 2:
        raise ValueError(f"n must be an even integer >= 2, got {n}")
    half = Fraction(1, 2)
    return surd(half, -half, Fraction(n - 1, 2 * n - 1))


def is_probability(x) -> bool:
    return scalar_sign(x) >= 0 and scalar_sign(1 - x) >= 0


def radicand(x) -> Fraction | None:
    return x.c if isinstance(x, Surd) else None


# -- JSON ---------------------------------------------------------------------


def _frac_pair(x: Fraction) -> list[str]:
    return [str(x.numerator), str(x.denominator)]


def _parse_int(s) -> int:
    if not isinstance(s, str):
        raise ValueError(f"integers are encoded as decimal strings, got {s!r}")
    return int(s)


def scalar_to_json(x) -> dict:
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return {"rat": {"num": str(x.numerator), "den": str(x.denominator)}}
    if isinstance(x, Surd):
        return {"surd": {"a": _frac_pair(x.a), "b": _frac_pair(x.b), "c": _frac_pair(x.c)}}
    raise TypeError(f"cannot encode {type(x).__name__}")


def scalar_from_json(obj) -> ProbScalar:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError(f"malformed scalar {obj!r}")
    if "rat" in obj:
        r = obj["rat"]
        return rat(_parse_int(r["num"]), _parse_int(r["den"]))
    if "surd" in obj:
        s = obj["surd"]
        parts = []
        for key in ("a", "b", "c"):
            num, den = s[key]
            parts.append(rat(_parse_int(num), _parse_int(den)))
        return surd(*parts)
    raise ValueError(f"unknown scalar kind {next(iter(obj))!r}")
