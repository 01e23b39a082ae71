"""Rigorous interval arithmetic with outward rounding.

Directed rounding is emulated without touching the hardware rounding mode.
Each native operation is paired with an error-free transform (TwoSum, Dekker
TwoProduct, or a residual check for division and square root). The endpoint
is moved by one ulp only when the native result was inexact in the wrong
direction. Exact operations therefore stay exact, which keeps degenerate
intervals degenerate through integer and dyadic arithmetic.

Two containers are provided: :class:`Interval` for scalars (pure Python,
fast for small work) and :class:`IArray` for numpy arrays of intervals.
:class:`CIArray` stores rectangular complex intervals as a pair of
:class:`IArray` (real and imaginary parts).
"""

from __future__ import annotations

import math
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np
from scipy import signal

from .errors import DomainError, IntervalOverflowError

__all__ = [
    "Interval",
    "IArray",
    "CIArray",
    "LN2",
    "enclose",
    "hull",
    "iv_arith",
    "iv_elementary",
    "iv_mag",
    "iv_hull",
]

_INF = math.inf
_U = 2.0**-53
_SPLITTER = 134217729.0
_BIG = 2.0**995
_TINY = 2.0**-960
_ETA = 2.0**-1074

# Cody-Waite split of ln 2: LN2_HI has 32 trailing zero bits so that k*LN2_HI
# is exact for |k| < 2**20; LN2_LO_* enclose ln 2 - LN2_HI.
_LN2_HI = float.fromhex("0x1.62e42fee00000p-1")
_LN2_LO_LO = float.fromhex("0x1.a39ef35793c76p-33")
_LN2_LO_HI = float.fromhex("0x1.a39ef35793c77p-33")


def _up(x):
    return math.nextafter(x, _INF)


def _down(x):
    return math.nextafter(x, -_INF)


def _finite(x):
    if not math.isfinite(x):
        raise IntervalOverflowError(f"endpoint overflow: {x!r}")
    return x


# ---------------------------------------------------------------------------
# scalar directed rounding
# ---------------------------------------------------------------------------


def _two_sum_err(a, s, b):
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _add_lo(a, b):
    s = _finite(a + b)
    e = _two_sum_err(a, s, b)
    return s if e >= 0.0 else _down(s)


def _add_hi(a, b):
    s = _finite(a + b)
    e = _two_sum_err(a, s, b)
    return s if e <= 0.0 else _up(s)


def _split(a):
    c = _SPLITTER * a
    h = c - (c - a)
    return h, a - h


def _prod_err(a, b, p):
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _mul_lo(a, b):
    if a == 0.0 or b == 0.0:
        return 0.0
    p = _finite(a * b)
    if abs(a) > _BIG or abs(b) > _BIG or abs(p) < _TINY:
        return _down(p)
    return p if _prod_err(a, b, p) >= 0.0 else _down(p)


def _mul_hi(a, b):
    if a == 0.0 or b == 0.0:
        return 0.0
    p = _finite(a * b)
    if abs(a) > _BIG or abs(b) > _BIG or abs(p) < _TINY:
        return _up(p)
    return p if _prod_err(a, b, p) <= 0.0 else _up(p)


def _div_sign(a, b, q):
    """Sign of the exact a/b - q, or None when the residual is unreliable."""
    if abs(q) > _BIG or abs(b) > _BIG or abs(q) < _TINY or abs(a) < _TINY * 4:
        return None
    p = q * b
    r = (a - p) - _prod_err(q, b, p)
    if r == 0.0:
        return 0
    return 1 if (r > 0.0) == (b > 0.0) else -1


def _div_lo(a, b):
    if a == 0.0:
        return 0.0
    q = _finite(a / b)
    s = _div_sign(a, b, q)
    if s is None:
        return _down(q)
    return q if s >= 0 else _down(q)


def _div_hi(a, b):
    if a == 0.0:
        return 0.0
    q = _finite(a / b)
    s = _div_sign(a, b, q)
    if s is None:
        return _up(q)
    return q if s <= 0 else _up(q)


def _sqrt_sign(x, s):
    if x > _BIG or x < _TINY * 4:
        return None
    p = s * s
    r = (x - p) - _prod_err(s, s, p)
    return 0 if r == 0.0 else (1 if r > 0.0 else -1)


def _sqrt_lo(x):
    if x == 0.0:
        return 0.0
    s = math.sqrt(x)
    g = _sqrt_sign(x, s)
    if g is None or g < 0:
        return max(0.0, _down(s))
    return s


def _sqrt_hi(x):
    if x == 0.0:
        return 0.0
    s = math.sqrt(x)
    g = _sqrt_sign(x, s)
    if g is None or g > 0:
        return _up(s)
    return s


def _pow_hi(x, n):
    """Upper bound of x**n for x >= 0 and integer n >= 0."""
    r, b = 1.0, x
    while n:
        if n & 1:
            r = _mul_hi(r, b)
        n >>= 1
        if n:
            b = _mul_hi(b, b)
    return r


def _pow_lo(x, n):
    r, b = 1.0, x
    while n:
        if n & 1:
            r = _mul_lo(r, b)
        n >>= 1
        if n:
            b = _mul_lo(b, b)
    return max(r, 0.0)


# ---------------------------------------------------------------------------
# exact-number conversion
# ---------------------------------------------------------------------------


def _float_bounds(x):
    """Tightest float interval around an exact number (int, Fraction, Decimal, str)."""
    if isinstance(x, float):
        _finite(x)
        return x, x
    if isinstance(x, str):
        x = Decimal(x.strip())
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise DomainError(f"non-finite decimal {x}")
        f = float(x)
        _finite(f)
        d = Decimal(f)
        if d == x:
            return f, f
        return (f, _up(f)) if d < x else (_down(f), f)
    if isinstance(x, (Integral, Rational)):
        q = Fraction(x)
        f = float(q)
        _finite(f)
        fq = Fraction(f)
        if fq == q:
            return f, f
        return (f, _up(f)) if fq < q else (_down(f), f)
    if isinstance(x, (np.floating, np.integer)):
        return _float_bounds(x.item())
    raise TypeError(f"cannot enclose {type(x).__name__}")


def _as_interval(x):
    if isinstance(x, Interval):
        return x
    lo, hi = _float_bounds(x)
    return Interval._make(lo, hi)


# ---------------------------------------------------------------------------
# scalar interval
# ---------------------------------------------------------------------------


class Interval:
    """Closed real interval ``[lo, hi]`` with finite float endpoints.

    Instances are immutable. Arithmetic with ``int``, ``float``,
    ``Fraction`` and ``Decimal`` operands promotes them to their tightest
    enclosure first, so ``Interval(1) / 3`` encloses one third.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if isinstance(lo, Interval) or isinstance(hi, Interval):
            raise TypeError("use hull() to combine intervals")
        lo_lo, _ = _float_bounds(lo)
        _, hi_hi = _float_bounds(hi)
        if math.isnan(lo_lo) or math.isnan(hi_hi):
            raise DomainError("NaN endpoint")
        if lo_lo > hi_hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo_lo)
        object.__setattr__(self, "hi", hi_hi)

    @classmethod
    def _make(cls, lo, hi):
        obj = object.__new__(cls)
        object.__setattr__(obj, "lo", lo)
        object.__setattr__(obj, "hi", hi)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    def __reduce__(self):
        return (Interval._make, (self.lo, self.hi))

    # -- constructors -----------------------------------------------------
    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def enclose(cls, x) -> "Interval":
        """Tightest enclosure of an exact number or decimal string."""
        return _as_interval(x)

    @classmethod
    def from_midrad(cls, mid: float, rad: float) -> "Interval":
        if rad < 0:
            raise DomainError("negative radius")
        return cls._make(_add_lo(mid, -rad), _add_hi(mid, rad))

    # -- basic queries ----------------------------------------------------
    @property
    def mid(self) -> float:
        m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    @property
    def rad(self) -> float:
        m = self.mid
        return max(_add_hi(self.hi, -m), _add_hi(m, -self.lo))

    @property
    def width(self) -> float:
        return _add_hi(self.hi, -self.lo)

    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Decimal):
            return Decimal(self.lo) <= x <= Decimal(self.hi)
        return self.lo <= x <= self.hi

    def subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def interior(self, other: "Interval") -> bool:
        """True when self lies in the open interior of other."""
        return other.lo < self.lo and self.hi < other.hi

    def hull(self, other) -> "Interval":
        other = _as_interval(other)
        return Interval._make(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other) -> "Interval":
        other = _as_interval(other)
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise DomainError("disjoint intervals")
        return Interval._make(lo, hi)

    def certainly_lt(self, other) -> bool:
        return self.hi < _as_interval(other).lo

    def certainly_le(self, other) -> bool:
        return self.hi <= _as_interval(other).lo

    def certainly_gt(self, other) -> bool:
        return self.lo > _as_interval(other).hi

    def certainly_ge(self, other) -> bool:
        return self.lo >= _as_interval(other).hi

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (IArray, CIArray)):
            return NotImplemented
        o = _as_interval(other)
        return Interval._make(_add_lo(self.lo, o.lo), _add_hi(self.hi, o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval._make(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (IArray, CIArray)):
            return NotImplemented
        o = _as_interval(other)
        return Interval._make(_add_lo(self.lo, -o.hi), _add_hi(self.hi, -o.lo))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        if isinstance(other, (IArray, CIArray)):
            return NotImplemented
        o = _as_interval(other)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        if a >= 0.0 and c >= 0.0:
            return Interval._make(_mul_lo(a, c), _mul_hi(b, d))
        lo = min(_mul_lo(a, c), _mul_lo(a, d), _mul_lo(b, c), _mul_lo(b, d))
        hi = max(_mul_hi(a, c), _mul_hi(a, d), _mul_hi(b, c), _mul_hi(b, d))
        return Interval._make(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (IArray, CIArray)):
            return NotImplemented
        o = _as_interval(other)
        if o.lo <= 0.0 <= o.hi:
            raise DomainError("division by an interval containing 0")
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        lo = min(_div_lo(a, c), _div_lo(a, d), _div_lo(b, c), _div_lo(b, d))
        hi = max(_div_hi(a, c), _div_hi(a, d), _div_hi(b, c), _div_hi(b, d))
        return Interval._make(lo, hi)

    def __rtruediv__(self, other):
        return _as_interval(other) / self

    def __pow__(self, n):
        if not isinstance(n, Integral):
            raise TypeError("use pow_real for non-integer exponents")
        return self.pow_int(int(n))

    def __abs__(self):
        return Interval._make(self.mig(), self.mag())

    def __eq__(self, other):
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        return self.to_decimal()

    # -- elementary functions ----------------------------------------------
    def sqr(self) -> "Interval":
        return self.pow_int(2)

    def pow_int(self, n: int) -> "Interval":
        if n == 0:
            return Interval._make(1.0, 1.0)
        if n < 0:
            return Interval._make(1.0, 1.0) / self.pow_int(-n)
        if n % 2 == 0:
            return Interval._make(_pow_lo(self.mig(), n), _finite(_pow_hi(self.mag(), n)))
        lo = _pow_lo(self.lo, n) if self.lo >= 0 else -_pow_hi(-self.lo, n)
        hi = _pow_hi(self.hi, n) if self.hi >= 0 else -_pow_lo(-self.hi, n)
        return Interval._make(_finite(lo), _finite(hi))

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise DomainError("sqrt of an interval with negative part")
        return Interval._make(_sqrt_lo(self.lo), _sqrt_hi(self.hi))

    def exp(self) -> "Interval":
        return Interval._make(_exp_point(self.lo)[0], _exp_point(self.hi)[1])

    def log(self) -> "Interval":
        if self.lo <= 0.0:
            raise DomainError("log of an interval with nonpositive part")
        return Interval._make(_log_point(self.lo)[0], _log_point(self.hi)[1])

    def pow_real(self, y) -> "Interval":
        """``self ** y`` for a positive base and real (interval) exponent."""
        y = _as_interval(y)
        if y.is_point() and float(y.lo).is_integer() and abs(y.lo) < 2**31:
            return self.pow_int(int(y.lo))
        return (y * self.log()).exp()

    # -- serialization ------------------------------------------------------
    def to_hex(self) -> str:
        return f"[{self.lo.hex()},{self.hi.hex()}]"

    @classmethod
    def from_hex(cls, text: str) -> "Interval":
        lo, hi = _split_pair(text)
        return cls(float.fromhex(lo), float.fromhex(hi))

    def to_decimal(self, digits: int = 17) -> str:
        """Outward-rounded decimal form ``[lo,hi]``."""
        return f"[{_dec_str(self.lo, digits, ROUND_FLOOR)},{_dec_str(self.hi, digits, ROUND_CEILING)}]"

    @classmethod
    def from_decimal(cls, text: str) -> "Interval":
        """Parse ``[lo,hi]`` or a single decimal, rounding outward."""
        text = text.strip()
        if text.startswith("["):
            lo, hi = _split_pair(text)
        else:
            lo = hi = text
        lo_f = _float_bounds(Decimal(lo))[0]
        hi_f = _float_bounds(Decimal(hi))[1]
        if lo_f > hi_f:
            raise DomainError(f"empty interval {text}")
        return cls._make(lo_f, hi_f)


def _split_pair(text):
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise ValueError(f"malformed interval {text!r}")
    parts = t[1:-1].split(",")
    if len(parts) != 2:
        raise ValueError(f"malformed interval {text!r}")
    return parts[0].strip(), parts[1].strip()


def _dec_str(x: float, digits: int, rounding) -> str:
    if x == 0.0:
        return "0"
    d = Context(prec=digits, rounding=rounding).plus(Decimal(x))
    return format(d, "e") if (d.adjusted() > 15 or d.adjusted() < -5) else format(d, "f")



_EXP_TERMS = 17
_LOG_TERMS = 13
_INV_FACT_BOUND = 1.0 / math.factorial(_EXP_TERMS + 1) * (1 + 1e-12)


def _exp_pos(r: float, upward: bool) -> float:
    """Directed bound of exp(r) for 0 <= r <= 0.35."""
    if r == 0.0:
        return 1.0
    mul, div, add = (_mul_hi, _div_hi, _add_hi) if upward else (_mul_lo, _div_lo, _add_lo)
    p = 1.0
    for j in range(_EXP_TERMS, 0, -1):
        p = add(1.0, div(mul(r, p), float(j)))
    if upward:
        rem = _mul_hi(_mul_hi(_pow_hi(r, _EXP_TERMS + 1), _INV_FACT_BOUND), 1.5)
        p = _add_hi(p, rem)
    return p


def _exp_small(r: float, upward: bool) -> float:
    if r >= 0.0:
        return _exp_pos(r, upward)
    # exp(r) = 1 / exp(-r), rounding the quotient in the requested direction
    d = _exp_pos(-r, not upward)
    return _div_hi(1.0, d) if upward else _div_lo(1.0, d)


def _exp_point(x: float):
    """Lower and upper bounds of exp(x) for a float x."""
    if x == 0.0:
        return 1.0, 1.0
    if x > 709.78:
        raise IntervalOverflowError("exp overflow")
    if x < -745.2:
        return 0.0, _ETA
    k = int(round(x / 0.6931471805599453))
    if k:
        # x - k*LN2_HI is exact (Sterbenz); the low part carries the error.
        t = x - k * _LN2_HI
        c = _LN2_LO * k
        rl, rh = _add_lo(t, -c.hi), _add_hi(t, -c.lo)
    else:
        rl = rh = x
    lo, hi = math.ldexp(_exp_small(rl, False), k), math.ldexp(_exp_small(rh, True), k)
    if not math.isfinite(hi):
        raise IntervalOverflowError("exp overflow")
    if lo < 2.0**-1020:
        lo = max(0.0, _down(lo))
        hi = _up(hi)
    return lo, hi


def _atanh_pos(t: float, upward: bool) -> float:
    """Directed bound of atanh(t) for 0 <= t <= 0.18."""
    if t == 0.0:
        return 0.0
    mul, div, add = (_mul_hi, _div_hi, _add_hi) if upward else (_mul_lo, _div_lo, _add_lo)
    t2 = mul(t, t)
    s = 0.0
    for j in range(_LOG_TERMS - 1, -1, -1):
        s = add(div(1.0, 2.0 * j + 1.0), mul(t2, s))
    s = mul(t, s)
    if upward:
        rem = _div_hi(_pow_hi(t, 2 * _LOG_TERMS + 1), _mul_lo(2.0 * _LOG_TERMS + 1.0, 0.97))
        s = _add_hi(s, rem)
    return s


def _atanh_small(t: float, upward: bool) -> float:
    if t >= 0.0:
        return _atanh_pos(t, upward)
    return -_atanh_pos(-t, not upward)


def _log_point(x: float):
    if x == 1.0:
        return 0.0, 0.0
    m, e = math.frexp(x)
    if m < 0.7071067811865476:
        m *= 2.0
        e -= 1
    # m - 1 is exact; m + 1 may round, so enclose the quotient
    a = m - 1.0
    d_lo, d_hi = _add_lo(m, 1.0), _add_hi(m, 1.0)
    if a >= 0.0:
        tl, th = _div_lo(a, d_hi), _div_hi(a, d_lo)
    else:
        tl, th = _div_lo(a, d_lo), _div_hi(a, d_hi)
    lo = 2.0 * _atanh_small(tl, False)
    hi = 2.0 * _atanh_small(th, True)
    if e:
        c = _LN2_LO * e
        base = e * _LN2_HI
        lo = _add_lo(_add_lo(lo, base), c.lo)
        hi = _add_hi(_add_hi(hi, base), c.hi)
    return lo, hi


def enclose(x) -> Interval:
    """Tightest interval around an exact number or decimal string."""
    return _as_interval(x)


def hull(*items) -> Interval:
    items = [_as_interval(i) for i in items]
    return Interval._make(min(i.lo for i in items), max(i.hi for i in items))


def iv_arith(a: Interval, b: Interval, op: str) -> Interval:
    """Apply ``op`` in {add, sub, mul, div} with outward rounding."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def iv_elementary(a: Interval, f: str, n: int | None = None) -> Interval:
    """Apply exp, log, sqrt, abs or pow_int (with exponent ``n``)."""
    if f == "exp":
        return a.exp()
    if f == "log":
        return a.log()
    if f == "sqrt":
        return a.sqrt()
    if f == "abs":
        return abs(a)
    if f == "pow_int":
        if n is None:
            raise ValueError("pow_int needs an exponent")
        return a.pow_int(n)
    raise ValueError(f"unknown function {f!r}")


def iv_mag(a: Interval) -> float:
    return a.mag()


def iv_hull(a: Interval, b: Interval) -> Interval:
    return a.hull(b)


# ---------------------------------------------------------------------------
# vectorized directed rounding
# ---------------------------------------------------------------------------


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise IntervalOverflowError("endpoint overflow in array operation")


def _vadd(a, b, upward):
    with np.errstate(all="ignore"):
        s = a + b
        _check_finite(s)
        bb = s - a
        e = (a - (s - bb)) + (b - bb)
    if upward:
        return np.where(e > 0.0, np.nextafter(s, _INF), s)
    return np.where(e < 0.0, np.nextafter(s, -_INF), s)


def _vprod_err(a, b, p):
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _vmul(a, b, upward):
    with np.errstate(all="ignore"):
        p = a * b
        _check_finite(p)
        e = _vprod_err(a, b, p)
        guard = (np.abs(a) > _BIG) | (np.abs(b) > _BIG) | (np.abs(p) < _TINY)
        zero = (a == 0.0) | (b == 0.0)
    if upward:
        out = np.where(guard | (e > 0.0), np.nextafter(p, _INF), p)
    else:
        out = np.where(guard | (e < 0.0), np.nextafter(p, -_INF), p)
    return np.where(zero, 0.0, out)


def _vdiv(a, b, upward):
    with np.errstate(all="ignore"):
        q = a / b
        _check_finite(q)
        p = q * b
        r = (a - p) - _vprod_err(q, b, p)
        guard = (
            (np.abs(q) > _BIG) | (np.abs(b) > _BIG) | (np.abs(q) < _TINY) | (np.abs(a) < 4 * _TINY)
        )
        sign = np.sign(r) * np.sign(b)
    if upward:
        out = np.where(guard | (sign > 0), np.nextafter(q, _INF), q)
    else:
        out = np.where(guard | (sign < 0), np.nextafter(q, -_INF), q)
    return np.where(a == 0.0, 0.0, out)


def _vsqrt(x, upward):
    with np.errstate(all="ignore"):
        s = np.sqrt(x)
        p = s * s
        r = (x - p) - _vprod_err(s, s, p)
        guard = (x > _BIG) | (x < 4 * _TINY)
    if upward:
        out = np.where(guard | (r > 0.0), np.nextafter(s, _INF), s)
    else:
        out = np.where(guard | (r < 0.0), np.maximum(np.nextafter(s, -_INF), 0.0), s)
    return np.where(x == 0.0, 0.0, out)


def _vexp_pos(r, upward):
    """Directed bound of exp(r) for arrays with 0 <= r <= 0.35."""
    one = np.ones_like(r)
    p = one
    for j in range(_EXP_TERMS, 0, -1):
        p = _vadd(one, _vdiv(_vmul(r, p, upward), np.full_like(r, float(j)), upward), upward)
    if upward:
        rp = one
        for _ in range(_EXP_TERMS + 1):
            rp = _vmul(rp, r, True)
        rem = _vmul(_vmul(rp, np.full_like(r, _INV_FACT_BOUND), True), np.full_like(r, 1.5), True)
        p = _vadd(p, rem, True)
    return p


def _vexp(x, upward):
    x = np.asarray(x, dtype=float)
    if np.any(x > 709.78):
        raise IntervalOverflowError("exp overflow")
    xs = np.maximum(x, -745.0)
    k = np.rint(xs / 0.6931471805599453)
    t = xs - k * _LN2_HI
    if upward:
        c = np.where(k >= 0, _vmul(k, np.full_like(k, _LN2_LO_LO), False), _vmul(k, np.full_like(k, _LN2_LO_HI), False))
    else:
        c = np.where(k >= 0, _vmul(k, np.full_like(k, _LN2_LO_HI), True), _vmul(k, np.full_like(k, _LN2_LO_LO), True))
    r = _vadd(t, -c, upward)
    neg = r < 0
    ar = np.abs(r)
    pos_val = _vexp_pos(ar, upward)
    inv_src = _vexp_pos(ar, not upward)
    inv = _vdiv(np.ones_like(ar), inv_src, upward)
    p = np.where(neg, inv, pos_val)
    out = np.ldexp(p, k.astype(np.int64))
    _check_finite(out)
    small = out < 2.0**-1020
    if upward:
        out = np.where(small, np.nextafter(out, _INF), out)
        out = np.where(x < -745.0, _ETA, out)
    else:
        out = np.where(small, np.maximum(np.nextafter(out, -_INF), 0.0), out)
        out = np.where(x < -745.0, 0.0, out)
    return np.where(x == 0.0, 1.0, out)


def _vatanh_pos(t, upward):
    one = np.ones_like(t)
    t2 = _vmul(t, t, upward)
    s = np.zeros_like(t)
    for j in range(_LOG_TERMS - 1, -1, -1):
        s = _vadd(_vdiv(one, np.full_like(t, 2.0 * j + 1.0), upward), _vmul(t2, s, upward), upward)
    s = _vmul(t, s, upward)
    if upward:
        tp = one
        for _ in range(2 * _LOG_TERMS + 1):
            tp = _vmul(tp, t, True)
        den = np.full_like(t, _mul_lo(2.0 * _LOG_TERMS + 1.0, 0.97))
        s = _vadd(s, _vdiv(tp, den, True), True)
    return s


def _vlog(x, upward):
    x = np.asarray(x, dtype=float)
    m, e = np.frexp(x)
    low = m < 0.7071067811865476
    m = np.where(low, 2.0 * m, m)
    e = np.where(low, e - 1, e).astype(float)
    a = m - 1.0
    one = np.ones_like(m)
    d_lo, d_hi = _vadd(m, one, False), _vadd(m, one, True)
    # t rounded in the requested direction; the denominator choice depends on sign(a)
    if upward:
        t = np.where(a >= 0, _vdiv(a, d_lo, True), _vdiv(a, d_hi, True))
    else:
        t = np.where(a >= 0, _vdiv(a, d_hi, False), _vdiv(a, d_lo, False))
    neg = t < 0
    at = np.abs(t)
    val = np.where(neg, -_vatanh_pos(at, not upward), _vatanh_pos(at, upward))
    val = 2.0 * val
    base = e * _LN2_HI
    if upward:
        c = np.where(e >= 0, _vmul(e, np.full_like(e, _LN2_LO_HI), True), _vmul(e, np.full_like(e, _LN2_LO_LO), True))
    else:
        c = np.where(e >= 0, _vmul(e, np.full_like(e, _LN2_LO_LO), False), _vmul(e, np.full_like(e, _LN2_LO_HI), False))
    out = _vadd(_vadd(val, base, upward), c, upward)
    return np.where(x == 1.0, 0.0, out)


def _vup(x):
    return np.nextafter(x, _INF)


def _vdown(x):
    return np.nextafter(x, -_INF)


def _gamma(n):
    """Upper bound for gamma_n = n u / (1 - n u), valid while n u < 0.01."""
    if n * _U >= 0.01:
        raise DomainError("sum too long for the rounding-error bound")
    return 1.01 * n * _U


def _sum_up_nonneg(x, axis=None):
    """Upper bound of the exact sum of a nonnegative float array."""
    x = np.asarray(x, dtype=float)
    n = x.size if axis is None else x.shape[axis]
    s = np.sum(x, axis=axis)
    _check_finite(s)
    return np.where(s == 0.0, 0.0, _vup(s * (1.0 + 2.0 * _gamma(max(n, 1)))))


def _sum_bounds(lo, hi, axis=None):
    n = lo.size if axis is None else lo.shape[axis]
    g = _gamma(max(n, 1))
    sl = np.sum(lo, axis=axis)
    sh = np.sum(hi, axis=axis)
    al = _sum_up_nonneg(np.abs(lo), axis)
    ah = _sum_up_nonneg(np.abs(hi), axis)
    el = _vup(al * g)
    eh = _vup(ah * g)
    _check_finite(sl, sh, el, eh)
    # an all-zero operand sums exactly
    return (np.where(al == 0.0, 0.0, _vdown(_vadd(sl, -el, False))),
            np.where(ah == 0.0, 0.0, _vup(_vadd(sh, eh, True))))


# ---------------------------------------------------------------------------
# interval arrays
# ---------------------------------------------------------------------------


def _lohi(x):
    """Return (lo, hi) float arrays (or scalars) for any interval-like operand."""
    if isinstance(x, IArray):
        return x.lo, x.hi
    if isinstance(x, Interval):
        return np.float64(x.lo), np.float64(x.hi)
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            raise TypeError("complex data needs CIArray")
        a = x.astype(float)
        if a.dtype != x.dtype and not np.array_equal(a, x):
            raise TypeError("array is not exactly representable")
        return a, a
    i = _as_interval(x)
    return np.float64(i.lo), np.float64(i.hi)


class IArray:
    """Numpy array of real intervals stored as lower and upper endpoint arrays.

    The arrays are marked read-only. Indexing returns an :class:`IArray`
    (or an :class:`Interval` for a single element).
    """

    __slots__ = ("lo", "hi")
    __array_priority__ = 1000

    def __init__(self, lo, hi=None, *, check: bool = True):
        lo = np.array(lo, dtype=np.float64)
        hi = lo.copy() if hi is None else np.array(hi, dtype=np.float64)
        if lo.shape != hi.shape:
            lo, hi = np.broadcast_arrays(lo, hi)
            lo, hi = lo.copy(), hi.copy()
        if check:
            _check_finite(lo, hi)
            if np.any(lo > hi):
                raise DomainError("lower endpoint exceeds upper endpoint")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("IArray is immutable")

    @classmethod
    def _raw(cls, lo, hi):
        return cls(lo, hi, check=False)

    # -- constructors --------------------------------------------------------
    @classmethod
    def zeros(cls, shape):
        z = np.zeros(shape)
        return cls._raw(z, z)

    @classmethod
    def point(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x, x)

    @classmethod
    def from_midrad(cls, mid, rad):
        mid = np.asarray(mid, dtype=float)
        rad = np.asarray(rad, dtype=float)
        if np.any(rad < 0):
            raise DomainError("negative radius")
        return cls(_vadd(mid, -rad, False), _vadd(mid, rad, True))

    @classmethod
    def from_intervals(cls, items, shape=None):
        items = list(items)
        lo = np.array([i.lo for i in items], dtype=float)
        hi = np.array([i.hi for i in items], dtype=float)
        if shape is not None:
            lo, hi = lo.reshape(shape), hi.reshape(shape)
        return cls(lo, hi)

    @classmethod
    def full(cls, shape, value):
        v = _as_interval(value)
        return cls._raw(np.full(shape, v.lo), np.full(shape, v.hi))

    # -- shape handling ------------------------------------------------------
    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    @property
    def size(self):
        return self.lo.size

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx):
        lo, hi = self.lo[idx], self.hi[idx]
        if np.ndim(lo) == 0:
            return Interval._make(float(lo), float(hi))
        return IArray._raw(lo, hi)

    def reshape(self, *shape):
        return IArray._raw(self.lo.reshape(*shape), self.hi.reshape(*shape))

    @property
    def T(self):
        return IArray._raw(self.lo.T, self.hi.T)

    def transpose(self, *axes):
        return IArray._raw(self.lo.transpose(*axes), self.hi.transpose(*axes))

    def flatten(self):
        return IArray._raw(self.lo.ravel().copy(), self.hi.ravel().copy())

    def set(self, idx, value):
        """Return a copy with ``self[idx] = value``."""
        lo, hi = self.lo.copy(), self.hi.copy()
        vl, vh = _lohi(value)
        lo[idx], hi[idx] = vl, vh
        return IArray._raw(lo, hi)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    # -- queries ---------------------------------------------------------------
    def mid(self):
        m = 0.5 * self.lo + 0.5 * self.hi
        return np.clip(m, self.lo, self.hi)

    def rad(self):
        m = self.mid()
        return np.maximum(_vadd(self.hi, -m, True), _vadd(m, -self.lo, True))

    def width(self):
        return _vadd(self.hi, -self.lo, True)

    def mag(self):
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self):
        m = np.minimum(np.abs(self.lo), np.abs(self.hi))
        return np.where((self.lo <= 0) & (self.hi >= 0), 0.0, m)

    def contains(self, x):
        x = np.asarray(x)
        return (self.lo <= x) & (x <= self.hi)

    def contains_iarray(self, other: "IArray"):
        return (self.lo <= other.lo) & (other.hi <= self.hi)

    def hull(self, other):
        ol, oh = _lohi(other)
        return IArray._raw(np.minimum(self.lo, ol), np.maximum(self.hi, oh))

    def __abs__(self):
        return IArray._raw(self.mig(), self.mag())

    def __repr__(self):
        return f"IArray(shape={self.shape})"

    # -- arithmetic ------------------------------------------------------------
    def __neg__(self):
        return IArray._raw(-self.hi, -self.lo)

    def __add__(self, other):
        if isinstance(other, CIArray):
            return NotImplemented
        ol, oh = _lohi(other)
        return IArray._raw(_vadd(self.lo, ol, False), _vadd(self.hi, oh, True))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, CIArray):
            return NotImplemented
        ol, oh = _lohi(other)
        return IArray._raw(_vadd(self.lo, -oh, False), _vadd(self.hi, -ol, True))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CIArray):
            return NotImplemented
        ol, oh = _lohi(other)
        a, b = self.lo, self.hi
        lo = np.minimum(
            np.minimum(_vmul(a, ol, False), _vmul(a, oh, False)),
            np.minimum(_vmul(b, ol, False), _vmul(b, oh, False)),
        )
        hi = np.maximum(
            np.maximum(_vmul(a, ol, True), _vmul(a, oh, True)),
            np.maximum(_vmul(b, ol, True), _vmul(b, oh, True)),
        )
        return IArray._raw(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, CIArray):
            return NotImplemented
        ol, oh = _lohi(other)
        if np.any((ol <= 0) & (oh >= 0)):
            raise DomainError("division by an interval containing 0")
        a, b = self.lo, self.hi
        lo = np.minimum(
            np.minimum(_vdiv(a, ol, False), _vdiv(a, oh, False)),
            np.minimum(_vdiv(b, ol, False), _vdiv(b, oh, False)),
        )
        hi = np.maximum(
            np.maximum(_vdiv(a, ol, True), _vdiv(a, oh, True)),
            np.maximum(_vdiv(b, ol, True), _vdiv(b, oh, True)),
        )
        return IArray._raw(lo, hi)

    def __rtruediv__(self, other):
        ol, oh = _lohi(other)
        return IArray._raw(np.broadcast_to(ol, self.shape), np.broadcast_to(oh, self.shape)) / self

    def sqr(self):
        m, g = self.mag(), self.mig()
        return IArray._raw(_vmul(g, g, False), _vmul(m, m, True))

    def sqrt(self):
        if np.any(self.lo < 0):
            raise DomainError("sqrt of an interval with negative part")
        return IArray._raw(_vsqrt(self.lo, False), _vsqrt(self.hi, True))

    def exp(self):
        return IArray._raw(_vexp(self.lo, False), _vexp(self.hi, True))

    def log(self):
        if np.any(self.lo <= 0):
            raise DomainError("log of an interval with nonpositive part")
        return IArray._raw(_vlog(self.lo, False), _vlog(self.hi, True))

    def pow_real(self, y):
        """Elementwise ``self ** y`` for positive bases."""
        return (self.log() * y).exp()

    def sum(self, axis=None):
        lo, hi = _sum_bounds(self.lo, self.hi, axis)
        if np.ndim(lo) == 0:
            return Interval._make(float(lo), float(hi))
        return IArray._raw(lo, hi)

    def max_upper(self) -> float:
        return float(np.max(self.hi)) if self.size else 0.0

    def __matmul__(self, other):
        return _rigorous_bilinear(self, other, np.matmul)


def _midrad_arrays(x):
    """Midpoint array and an upper bound on the radius."""
    if isinstance(x, IArray):
        return x.mid(), x.rad()
    lo, hi = _lohi(x)
    lo = np.asarray(lo)
    if np.array_equal(lo, hi):
        return lo, np.zeros_like(lo)
    iv = IArray(lo, hi)
    return iv.mid(), iv.rad()


def _rigorous_bilinear(a, b, op, nterms=None):
    """Enclose ``op(a, b)`` for a bilinear ``op`` with nonnegative structure.

    ``op`` must be a sum of products (matrix product or convolution). The
    midpoint is the native floating result; the radius bounds the input
    radii and the rounding error of the native evaluation.
    """
    am, ar = _midrad_arrays(a)
    bm, br = _midrad_arrays(b)
    if nterms is None:
        nterms = am.shape[-1] if am.ndim else 1
    n = max(int(nterms), 1)
    g = _gamma(n)
    aam, abm = np.abs(am), np.abs(bm)
    if not (np.any(aam) or np.any(ar)) or not (np.any(abm) or np.any(br)):
        z = op(np.zeros_like(aam), np.zeros_like(abm))
        return IArray(z, z)
    with np.errstate(all="ignore"):
        mid = op(am, bm)
        _check_finite(mid)
        inner_b = _vadd(_vmul(np.full_like(abm, g), abm, True), br, True)
        outer_b = _vadd(abm, br, True)
        rad = op(aam, inner_b)
        if np.any(ar):
            rad = rad + op(ar, outer_b)
        _check_finite(rad)
        rad = _vmul(rad, np.full_like(rad, 1.0 + 2.02 * g + 4 * _U), True)
        rad = _vadd(rad, np.full_like(rad, 2 * n * _ETA), True)
    return IArray(_vadd(mid, -rad, False), _vadd(mid, rad, True), check=True)


def _conv_op(a, b):
    return signal.convolve(a, b, mode="full", method="direct")


def rigorous_convolve(a, b):
    """Enclosure of the full N-D discrete convolution of two real interval arrays."""
    am = a.lo if isinstance(a, IArray) else np.asarray(a)
    bm = b.lo if isinstance(b, IArray) else np.asarray(b)
    nterms = min(np.size(am), np.size(bm))
    return _rigorous_bilinear(a, b, _conv_op, nterms=nterms)


# ---------------------------------------------------------------------------
# complex rectangles
# ---------------------------------------------------------------------------


class CIArray:
    """Array of complex rectangles ``re + i im`` with interval parts."""

    __slots__ = ("re", "im")
    __array_priority__ = 1001

    def __init__(self, re, im=None):
        if not isinstance(re, IArray):
            re = IArray(re)
        if im is None:
            im = IArray.zeros(re.shape)
        elif not isinstance(im, IArray):
            im = IArray(im)
        if re.shape != im.shape:
            raise DomainError("real and imaginary shapes differ")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("CIArray is immutable")

    @classmethod
    def zeros(cls, shape):
        return cls(IArray.zeros(shape), IArray.zeros(shape))

    @classmethod
    def point(cls, z):
        z = np.asarray(z, dtype=complex)
        return cls(IArray.point(z.real.copy()), IArray.point(z.imag.copy()))

    @classmethod
    def from_complex_midrad(cls, z, rad):
        z = np.asarray(z, dtype=complex)
        return cls(IArray.from_midrad(z.real, rad), IArray.from_midrad(z.imag, rad))

    @property
    def shape(self):
        return self.re.shape

    @property
    def ndim(self):
        return self.re.ndim

    @property
    def size(self):
        return self.re.size

    def __len__(self):
        return len(self.re)

    def __getitem__(self, idx):
        r, i = self.re[idx], self.im[idx]
        if isinstance(r, Interval):
            return CInterval(r, i)
        return CIArray(r, i)

    def reshape(self, *shape):
        return CIArray(self.re.reshape(*shape), self.im.reshape(*shape))

    @property
    def T(self):
        return CIArray(self.re.T, self.im.T)

    def transpose(self, *axes):
        return CIArray(self.re.transpose(*axes), self.im.transpose(*axes))

    def flatten(self):
        return CIArray(self.re.flatten(), self.im.flatten())

    def set(self, idx, value):
        v = _as_ci(value)
        return CIArray(self.re.set(idx, v.re), self.im.set(idx, v.im))

    def mid(self):
        return self.re.mid() + 1j * self.im.mid()

    def rad(self):
        """Upper bound of the distance from the midpoint to any point."""
        rr, ri = self.re.rad(), self.im.rad()
        return _vsqrt(_vadd(_vmul(rr, rr, True), _vmul(ri, ri, True), True), True)

    def mag(self):
        """Upper bound of the modulus elementwise."""
        mr, mi = self.re.mag(), self.im.mag()
        return _vsqrt(_vadd(_vmul(mr, mr, True), _vmul(mi, mi, True), True), True)

    def mig(self):
        """Lower bound of the modulus elementwise."""
        gr, gi = self.re.mig(), self.im.mig()
        sq = np.maximum(_vadd(_vmul(gr, gr, False), _vmul(gi, gi, False), False), 0.0)
        return _vsqrt(sq, False)

    def abs(self) -> IArray:
        return IArray._raw(self.mig(), self.mag())

    def contains(self, z):
        z = np.asarray(z)
        return self.re.contains(z.real) & self.im.contains(z.imag)

    def contains_ciarray(self, other: "CIArray"):
        return self.re.contains_iarray(other.re) & self.im.contains_iarray(other.im)

    def hull(self, other):
        o = _as_ci(other)
        return CIArray(self.re.hull(o.re), self.im.hull(o.im))

    def conj(self):
        return CIArray(self.re, -self.im)

    def __neg__(self):
        return CIArray(-self.re, -self.im)

    def __add__(self, other):
        o = _as_ci(other)
        return CIArray(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_ci(other)
        return CIArray(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (IArray, Interval)) or _is_real_scalar(other):
            return CIArray(self.re * other, self.im * other)
        o = _as_ci(other)
        return CIArray(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (IArray, Interval)) or _is_real_scalar(other):
            return CIArray(self.re / other, self.im / other)
        o = _as_ci(other)
        den = o.re.sqr() + o.im.sqr()
        num = self * o.conj()
        return CIArray(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return _as_ci(other) / self

    def sum(self, axis=None):
        r, i = self.re.sum(axis), self.im.sum(axis)
        if isinstance(r, Interval):
            return CInterval(r, i)
        return CIArray(r, i)

    def __matmul__(self, other):
        o = _as_ci(other)
        a_real, b_real = _is_zero(self.im), _is_zero(o.im)
        if a_real and b_real:
            r = self.re @ o.re
            return CIArray(r, IArray.zeros(r.shape))
        if b_real:
            return CIArray(self.re @ o.re, self.im @ o.re)
        if a_real:
            return CIArray(self.re @ o.re, self.re @ o.im)
        return CIArray(self.re @ o.re - self.im @ o.im, self.re @ o.im + self.im @ o.re)

    def __rmatmul__(self, other):
        return _as_ci(other) @ self

    def convolve(self, other):
        """Rigorous full N-D convolution."""
        o = _as_ci(other)
        if _is_zero(self.im) and _is_zero(o.im):
            r = rigorous_convolve(self.re, o.re)
            return CIArray(r, IArray.zeros(r.shape))
        rr = rigorous_convolve(self.re, o.re)
        ii = rigorous_convolve(self.im, o.im)
        ri = rigorous_convolve(self.re, o.im)
        ir = rigorous_convolve(self.im, o.re)
        return CIArray(rr - ii, ri + ir)

    def __repr__(self):
        return f"CIArray(shape={self.shape})"


def _is_zero(x: IArray) -> bool:
    return not (np.any(x.lo) or np.any(x.hi))


def _is_real_scalar(x):
    return isinstance(x, (int, float, Fraction, Decimal, np.floating, np.integer)) and not isinstance(x, bool)


class CInterval:
    """Complex rectangle ``re + i im`` with scalar interval parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        re = _as_interval(re)
        im = _as_interval(0.0 if im is None else im)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("CInterval is immutable")

    def __reduce__(self):
        return (CInterval, (self.re, self.im))

    @classmethod
    def point(cls, z: complex):
        z = complex(z)
        return cls(Interval(z.real), Interval(z.imag))

    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    def mag(self) -> float:
        return _sqrt_hi(_add_hi(_mul_hi(self.re.mag(), self.re.mag()), _mul_hi(self.im.mag(), self.im.mag())))

    def mig(self) -> float:
        a, b = self.re.mig(), self.im.mig()
        return _sqrt_lo(max(_add_lo(_mul_lo(a, a), _mul_lo(b, b)), 0.0))

    def abs(self) -> Interval:
        return Interval._make(self.mig(), self.mag())

    def conj(self):
        return CInterval(self.re, -self.im)

    def __contains__(self, z) -> bool:
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    def __neg__(self):
        return CInterval(-self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, (IArray, CIArray)):
            return NotImplemented
        o = _as_cscalar(other)
        return CInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (IArray, CIArray)):
            return NotImplemented
        o = _as_cscalar(other)
        return CInterval(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return _as_cscalar(other) - self

    def __mul__(self, other):
        if isinstance(other, (IArray, CIArray)):
            return NotImplemented
        o = _as_cscalar(other)
        return CInterval(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_cscalar(other)
        den = o.re.sqr() + o.im.sqr()
        num = self * o.conj()
        return CInterval(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return _as_cscalar(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return CInterval(1.0) / self**(-n)
        r = CInterval(1.0)
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, other):
        if isinstance(other, CInterval):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"CInterval({self.re!r}, {self.im!r})"


def _as_cscalar(x) -> CInterval:
    if isinstance(x, CInterval):
        return x
    if isinstance(x, complex):
        return CInterval(Interval(x.real), Interval(x.imag))
    if isinstance(x, np.complexfloating):
        return _as_cscalar(complex(x))
    return CInterval(_as_interval(x), Interval._make(0.0, 0.0))


def _as_ci(x) -> CIArray:
    if isinstance(x, CIArray):
        return x
    if isinstance(x, IArray):
        return CIArray(x, IArray.zeros(x.shape))
    if isinstance(x, CInterval):
        return CIArray(IArray._raw(np.float64(x.re.lo), np.float64(x.re.hi)),
                       IArray._raw(np.float64(x.im.lo), np.float64(x.im.hi)))
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return CIArray.point(x)
        return CIArray(IArray.point(x))
    c = _as_cscalar(x)
    return _as_ci(c)


_LN2_LO = Interval._make(_LN2_LO_LO, _LN2_LO_HI)
LN2 = Interval._make(_LN2_HI, _LN2_HI) + _LN2_LO
