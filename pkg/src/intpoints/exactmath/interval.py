"""Outward-rounded real intervals and complex boxes on top of mpmath's libmp.

Basic field operations and square roots use libmp's exactly rounded
primitives with floor/ceiling rounding.  Transcendental functions (log,
exp, pi) are evaluated with guard bits and then widened by a relative
margin far larger than libmp's error, which keeps the enclosure rigorous
without relying on directed rounding inside those routines.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath
from mpmath import libmp
from mpmath.libmp import (
    fzero,
    fone,
    from_int,
    from_rational,
    from_str,
    mpf_add,
    mpf_sub,
    mpf_mul,
    mpf_div,
    mpf_sqrt,
    mpf_neg,
    mpf_abs,
    mpf_cmp,
    mpf_lt,
    mpf_le,
    mpf_exp,
    mpf_log,
    mpf_pi,
    mpf_shift,
    round_floor as FLOOR,
    round_ceiling as CEIL,
    round_nearest as NEAREST,
    to_str,
    to_float,
)

DEFAULT_PRECISION = 256
_GUARD = 24


class IntervalDomainError(ValueError):
    pass


def _mk(raw) -> mpmath.mpf:
    """mpf from a raw tuple without rounding to the global precision."""
    return mpmath.mp.make_mpf(raw)


def _is_neg(x) -> bool:
    return mpf_cmp(x, fzero) < 0


def _mul_lo(a, b, p):
    return mpf_mul(a, b, p, FLOOR)


def _mul_hi(a, b, p):
    return mpf_mul(a, b, p, CEIL)


def _widen(v, p):
    """Enclosure [lo, hi] of a value known to relative accuracy 2^-(p+8)."""
    if v == fzero:
        return fzero, fzero
    margin = mpf_shift(mpf_abs(v), -(p + 4))
    return mpf_sub(v, margin, p, FLOOR), mpf_add(v, margin, p, CEIL)


def _to_raw(x, p, rnd):
    if isinstance(x, int):
        return from_int(x, p, rnd)
    if isinstance(x, Fraction) or isinstance(x, Rational):
        x = Fraction(x)
        return from_rational(x.numerator, x.denominator, p, rnd)
    if isinstance(x, float):
        return libmp.from_float(x, p, rnd)
    if isinstance(x, str):
        return from_str(x, p, rnd)
    if isinstance(x, mpmath.mpf):
        return libmp.mpf_pos(x._mpf_, p, rnd)
    raise TypeError(f"cannot convert {type(x).__name__} to an interval endpoint")


class RealInterval:
    """A closed interval [lo, hi] with binary floating endpoints."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PRECISION):
        if hi is None:
            hi = lo
        self.prec = prec
        self.lo = lo if isinstance(lo, tuple) else _to_raw(lo, prec, FLOOR)
        self.hi = hi if isinstance(hi, tuple) else _to_raw(hi, prec, CEIL)
        if mpf_lt(self.hi, self.lo):
            raise IntervalDomainError("lower endpoint exceeds upper endpoint")

    # -- construction -----------------------------------------------------

    @classmethod
    def point(cls, x, prec: int = DEFAULT_PRECISION) -> "RealInterval":
        return cls(x, x, prec)

    @classmethod
    def hull(cls, items) -> "RealInterval":
        items = list(items)
        lo = items[0].lo
        hi = items[0].hi
        prec = items[0].prec
        for it in items[1:]:
            if mpf_lt(it.lo, lo):
                lo = it.lo
            if mpf_lt(hi, it.hi):
                hi = it.hi
            prec = max(prec, it.prec)
        return cls(lo, hi, prec)

    @classmethod
    def pi(cls, prec: int = DEFAULT_PRECISION) -> "RealInterval":
        lo, hi = _widen(mpf_pi(prec + _GUARD, NEAREST), prec)
        return cls(lo, hi, prec)

    @classmethod
    def parse(cls, text: str, prec: int = DEFAULT_PRECISION) -> "RealInterval":
        """Interval around a decimal string, rounded outward."""
        return cls(from_str(text, prec, FLOOR), from_str(text, prec, CEIL), prec)

    # -- accessors --------------------------------------------------------

    def _coerce(self, other) -> "RealInterval":
        if isinstance(other, RealInterval):
            return other
        return RealInterval.point(other, self.prec)

    @property
    def lower(self) -> mpmath.mpf:
        return _mk(self.lo)

    @property
    def upper(self) -> mpmath.mpf:
        return _mk(self.hi)

    def mid(self) -> mpmath.mpf:
        return _mk(mpf_shift(mpf_add(self.lo, self.hi, self.prec + 2), -1))

    def width(self) -> mpmath.mpf:
        return _mk(mpf_sub(self.hi, self.lo, self.prec, CEIL))

    def rel_width(self) -> float:
        m = max(abs(mpmath.mpf(self.lo)), abs(mpmath.mpf(self.hi)))
        if m == 0:
            return 0.0
        return float(mpmath.mpf(mpf_sub(self.hi, self.lo, 53, CEIL)) / m)

    def contains(self, x) -> bool:
        if isinstance(x, RealInterval):
            return mpf_le(self.lo, x.lo) and mpf_le(x.hi, self.hi)
        lo = _to_raw(x, self.prec + 64, FLOOR)
        hi = _to_raw(x, self.prec + 64, CEIL)
        return mpf_le(self.lo, lo) and mpf_le(hi, self.hi)

    def contains_zero(self) -> bool:
        return mpf_le(self.lo, fzero) and mpf_le(fzero, self.hi)

    def overlaps(self, other: "RealInterval") -> bool:
        return mpf_le(self.lo, other.hi) and mpf_le(other.lo, self.hi)

    def is_positive(self) -> bool:
        return mpf_lt(fzero, self.lo)

    def is_negative(self) -> bool:
        return mpf_lt(self.hi, fzero)

    def certainly_lt(self, other) -> bool:
        other = self._coerce(other)
        return mpf_lt(self.hi, other.lo)

    def certainly_le(self, other) -> bool:
        other = self._coerce(other)
        return mpf_le(self.hi, other.lo)

    def with_prec(self, prec: int) -> "RealInterval":
        return RealInterval(mpf_add(self.lo, fzero, prec, FLOOR), mpf_add(self.hi, fzero, prec, CEIL), prec)

    def __repr__(self) -> str:
        return f"RealInterval([{to_str(self.lo, 12)}, {to_str(self.hi, 12)}])"

    def decimal_bounds(self, digits: int = 20) -> tuple[str, str]:
        """Decimal strings d_lo <= lo and hi <= d_hi."""
        return _decimal_down(self.lo, digits), _decimal_up(self.hi, digits)

    def log10_upper(self) -> float:
        """A float upper bound of log10(hi) for hi > 0 (reporting only)."""
        return float(mpmath.log10(mpmath.mpf(self.hi)))

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return RealInterval(mpf_neg(self.hi), mpf_neg(self.lo), self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        p = max(self.prec, other.prec)
        return RealInterval(mpf_add(self.lo, other.lo, p, FLOOR), mpf_add(self.hi, other.hi, p, CEIL), p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        p = max(self.prec, other.prec)
        return RealInterval(mpf_sub(self.lo, other.hi, p, FLOOR), mpf_sub(self.hi, other.lo, p, CEIL), p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        p = max(self.prec, other.prec)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        lows = [_mul_lo(a, c, p), _mul_lo(a, d, p), _mul_lo(b, c, p), _mul_lo(b, d, p)]
        highs = [_mul_hi(a, c, p), _mul_hi(a, d, p), _mul_hi(b, c, p), _mul_hi(b, d, p)]
        lo = lows[0]
        for x in lows[1:]:
            if mpf_lt(x, lo):
                lo = x
        hi = highs[0]
        for x in highs[1:]:
            if mpf_lt(hi, x):
                hi = x
        return RealInterval(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.contains_zero():
            raise IntervalDomainError("division by an interval containing zero")
        p = max(self.prec, other.prec)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        lows = [mpf_div(x, y, p, FLOOR) for x in (a, b) for y in (c, d)]
        highs = [mpf_div(x, y, p, CEIL) for x in (a, b) for y in (c, d)]
        lo = min(lows, key=_key)
        hi = max(highs, key=_key)
        return RealInterval(lo, hi, p)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if isinstance(n, int):
            return self.ipow(n)
        return power(self, n)

    def ipow(self, n: int) -> "RealInterval":
        if n < 0:
            return RealInterval.point(1, self.prec) / self.ipow(-n)
        if n == 0:
            return RealInterval.point(1, self.prec)
        if n % 2 == 0 and self.contains_zero():
            m = self.abs()
            r = _ipow_pos(m, n)
            return RealInterval(fzero, r.hi, self.prec)
        if self.is_negative() or (self.contains_zero() and n % 2 == 1):
            if n % 2 == 0:
                return _ipow_pos(-self, n)
            # odd powers are increasing
            return RealInterval(_pow_endpoint(self.lo, n, self.prec, FLOOR), _pow_endpoint(self.hi, n, self.prec, CEIL), self.prec)
        return _ipow_pos(self, n)

    def abs(self) -> "RealInterval":
        if mpf_le(fzero, self.lo):
            return self
        if mpf_le(self.hi, fzero):
            return -self
        hi = self.hi if mpf_lt(mpf_neg(self.lo), self.hi) else mpf_neg(self.lo)
        return RealInterval(fzero, hi, self.prec)

    def max(self, other) -> "RealInterval":
        other = self._coerce(other)
        return RealInterval(max(self.lo, other.lo, key=_key), max(self.hi, other.hi, key=_key), max(self.prec, other.prec))

    def min(self, other) -> "RealInterval":
        other = self._coerce(other)
        return RealInterval(min(self.lo, other.lo, key=_key), min(self.hi, other.hi, key=_key), max(self.prec, other.prec))

    # -- elementary functions --------------------------------------------

    def sqrt(self) -> "RealInterval":
        return sqrt(self)

    def log(self) -> "RealInterval":
        return log(self)

    def exp(self) -> "RealInterval":
        return exp(self)


def _key(x):
    return _mk(x)


def _pow_endpoint(x, n, p, rnd):
    return libmp.mpf_pow_int(x, n, p, rnd)


def _ipow_pos(x: RealInterval, n: int) -> RealInterval:
    return RealInterval(_pow_endpoint(x.lo, n, x.prec, FLOOR), _pow_endpoint(x.hi, n, x.prec, CEIL), x.prec)


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x
    if not man:
        return Fraction(0)
    man = int(man)
    v = Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)
    return -v if sign else v


def _decimal_down(x, digits):
    exact = mpf_to_fraction(x)
    d = Decimal(to_str(x, digits))
    if Fraction(d) <= exact:
        return str(d)
    with localcontext() as ctx:
        ctx.prec = digits + 10
        ulp = Decimal(1).scaleb(d.adjusted() - digits + 1)
        while Fraction(d) > exact:
            d -= ulp
    return str(d)


def _decimal_up(x, digits):
    s = _decimal_down(mpf_neg(x), digits)
    return s[1:] if s.startswith("-") else "-" + s


def _unary(x: RealInterval, fn, increasing=True) -> RealInterval:
    p = x.prec
    wp = p + _GUARD
    lo = _widen(fn(x.lo, wp, NEAREST), p)[0]
    hi = _widen(fn(x.hi, wp, NEAREST), p)[1]
    if not increasing:
        lo, hi = hi, lo
    return RealInterval(lo, hi, p)


def sqrt(x: RealInterval) -> RealInterval:
    if _is_neg(x.lo):
        raise IntervalDomainError("sqrt of an interval with negative part")
    p = x.prec
    return RealInterval(mpf_sqrt(x.lo, p, FLOOR), mpf_sqrt(x.hi, p, CEIL), p)


def log(x: RealInterval) -> RealInterval:
    if not x.is_positive():
        raise IntervalDomainError("log needs a positive lower bound")
    return _unary(x, mpf_log)


def exp(x: RealInterval) -> RealInterval:
    return _unary(x, mpf_exp)


def power(x: RealInterval, y) -> RealInterval:
    """x**y for x > 0 (any real y), via exp(y log x)."""
    if isinstance(y, int):
        return x.ipow(y)
    if not isinstance(y, RealInterval):
        y = RealInterval.point(y, x.prec)
    if not x.is_positive():
        raise IntervalDomainError("real power needs a positive base")
    return exp(y * log(x))


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> Fraction:
    p, q = mpmath.bernfrac(n)
    return Fraction(int(p), int(q))


def _log_gamma_large(z: RealInterval) -> RealInterval:
    """log Gamma(z) for z >= 2p/3 by Stirling's series with remainder bound.

    For real z > 0 the error after the k-th term is bounded by the first
    omitted term in absolute value.
    """
    p = z.prec
    half_log_2pi = log(RealInterval.point(2, p) * RealInterval.pi(p)) * Fraction(1, 2)
    s = (z - Fraction(1, 2)) * log(z) - z + half_log_2pi
    target = mpf_shift(fone, -(p + 8))
    zz = z * z
    zpow = z  # z^(2k-1)
    k = 1
    while True:
        b = _bernoulli(2 * k)
        term = RealInterval.point(Fraction(b.numerator, b.denominator * 2 * k * (2 * k - 1)), p) / zpow
        nb = _bernoulli(2 * k + 2)
        nxt = RealInterval.point(abs(Fraction(nb.numerator, nb.denominator * (2 * k + 2) * (2 * k + 1))), p) / (zpow * zz)
        s = s + term
        if mpf_lt(nxt.hi, target) or k > 4 * p:
            err = nxt.hi
            return RealInterval(mpf_sub(s.lo, err, p, FLOOR), mpf_add(s.hi, err, p, CEIL), p)
        zpow = zpow * zz
        k += 1


def gamma(x: RealInterval) -> RealInterval:
    """Enclosure of Gamma on a positive real interval.

    Gamma is not monotone on (0, 3], so the endpoints are not enough; the
    interval is processed through the recurrence as a whole, which is sound
    because every step is an interval operation.
    """
    if not x.is_positive():
        raise IntervalDomainError("gamma is implemented for positive arguments only")
    p = x.prec
    shift = max(20, (2 * p) // 3)
    z = x + shift
    lg = _log_gamma_large(z)
    denom = RealInterval.point(1, p)
    for k in range(shift):
        denom = denom * (x + k)
    return exp(lg) / denom


def interval_elementary(x: RealInterval, op: str, arg=None) -> RealInterval:
    """Dispatch for log, exp, sqrt, power and gamma."""
    if op == "log":
        return log(x)
    if op == "exp":
        return exp(x)
    if op == "sqrt":
        return sqrt(x)
    if op == "power":
        return power(x, arg)
    if op == "gamma":
        return gamma(x)
    raise ValueError(f"unknown operation {op!r}")


class ComplexBox:
    """Rectangle re x im of real intervals."""

    __slots__ = ("re", "im")

    def __init__(self, re: RealInterval, im: RealInterval | None = None):
        self.re = re
        self.im = im if im is not None else RealInterval.point(0, re.prec)

    @classmethod
    def disc(cls, center, radius, prec: int) -> "ComplexBox":
        """Smallest box (up to rounding) containing the closed disc."""
        with mpmath.workprec(max(prec, mpmath.mp.prec) + 64):
            center = mpmath.mpc(center)
            radius = mpmath.mpf(radius)
        r = RealInterval(-radius, radius, prec)
        re = RealInterval.point(center.real, prec) + r
        im = RealInterval.point(center.imag, prec) + r
        return cls(re, im)

    @classmethod
    def point(cls, x, prec: int = DEFAULT_PRECISION) -> "ComplexBox":
        if isinstance(x, ComplexBox):
            return x
        if isinstance(x, RealInterval):
            return cls(x)
        return cls(RealInterval.point(x, prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    def _coerce(self, other) -> "ComplexBox":
        if isinstance(other, ComplexBox):
            return other
        if isinstance(other, RealInterval):
            return ComplexBox(other)
        return ComplexBox(RealInterval.point(other, self.prec))

    def __add__(self, other):
        o = self._coerce(other)
        return ComplexBox(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return ComplexBox(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return ComplexBox(-self.re, -self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        return ComplexBox(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self):
        return ComplexBox(self.re, -self.im)

    def abs2(self) -> RealInterval:
        return self.re.ipow(2) + self.im.ipow(2)

    def abs(self) -> RealInterval:
        return sqrt(self.abs2())

    def __truediv__(self, other):
        o = self._coerce(other)
        d = o.abs2()
        n = self * o.conj()
        return ComplexBox(n.re / d, n.im / d)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def sqrt(self) -> "ComplexBox":
        """Box around the square root branch nearest to sqrt(center).

        With s0 ~ sqrt(center) and eps >= |z - s0^2| on the box, every root
        on that branch lies within eps/|s0| of s0 as long as eps <= |s0|^2/4.
        """
        p = self.prec
        with mpmath.workprec(p + 16):
            s0 = mpmath.sqrt(self.center())
        s = ComplexBox(RealInterval.point(s0.real, p), RealInterval.point(s0.imag, p))
        diff = self - s * s
        eps = (diff.re.abs().ipow(2) + diff.im.abs().ipow(2)).sqrt()
        m2 = s.abs2()
        if not (eps * 4).certainly_le(m2):
            raise IntervalDomainError("box too wide (or too close to 0) for a square root")
        r = (eps / m2.sqrt()).upper
        return ComplexBox.disc(s0, r, p)

    def overlaps(self, other: "ComplexBox") -> bool:
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def is_real(self) -> bool:
        return self.im.lo == fzero and self.im.hi == fzero

    def center(self) -> mpmath.mpc:
        return mpmath.mpc(self.re.mid(), self.im.mid())

    def radius(self) -> mpmath.mpf:
        return max(self.re.width(), self.im.width()) / 2

    def __repr__(self):
        return f"ComplexBox({self.re!r}, {self.im!r})"


def round_to_integer(x) -> int:
    """The unique integer in an interval (or real part of a box) of width < 1.

    Raises if the enclosure does not pin down a single integer.
    """
    if isinstance(x, ComplexBox):
        if not x.im.contains_zero():
            raise IntervalDomainError("box does not meet the real axis")
        x = x.re
    lo = int(math.ceil(mpf_to_fraction(x.lo)))
    hi = int(math.floor(mpf_to_fraction(x.hi)))
    if lo != hi:
        raise IntervalDomainError("enclosure does not isolate a unique integer")
    return lo
