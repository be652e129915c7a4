"""Exact algebraic numbers and absolute logarithmic heights.

An algebraic number is stored as its primitive irreducible minimal
polynomial together with a complex box isolating the chosen conjugate.
Sums, products and field elements are formed with resultants; the right
irreducible factor is picked out by refining boxes until exactly one root
of the candidate factors meets the box of the target value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence


from .exactmath.interval import ComplexBox, RealInterval
from .exactmath.poly import IntPolynomial, poly_resultant
from .exactmath.roots import MAX_PRECISION, isolate_roots


class AlgebraicError(ValueError):
    pass


def _normalize(f: IntPolynomial) -> IntPolynomial:
    f = f.primitive()
    return -f if f.lc < 0 else f


def _interpolate(xs: Sequence[int], ys: Sequence[int]) -> IntPolynomial:
    """Integer polynomial through the points (Newton divided differences)."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    acc = [Fraction(0)]
    for i in range(n - 1, -1, -1):
        # acc = acc * (x - xs[i]) + coef[i]
        shifted = [Fraction(0)] + acc
        for k in range(len(acc)):
            shifted[k] -= xs[i] * acc[k]
        shifted[0] += coef[i]
        acc = shifted
    out = []
    for c in acc:
        if c.denominator != 1:
            raise AlgebraicError("interpolated resultant is not integral")
        out.append(int(c))
    return IntPolynomial(out)


def bivariate_resultant(f: IntPolynomial, specialise: Callable[[int], IntPolynomial], degree: int) -> IntPolynomial:
    """Res_y(f(y), G(x, y)) as a polynomial in x of degree <= `degree`.

    `specialise(k)` must return G(k, y); its y-degree must not depend on k.
    """
    xs = list(range(-(degree // 2), degree - degree // 2 + 1))
    ys = [poly_resultant(f, specialise(k)) for k in xs]
    return _interpolate(xs, ys)


@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """A root of `min_poly` singled out by `root_box`."""

    min_poly: IntPolynomial
    root_box: ComplexBox = field(repr=False)

    def __post_init__(self):
        if self.min_poly.degree < 1:
            raise AlgebraicError("minimal polynomial must have positive degree")

    # -- construction -----------------------------------------------------

    @classmethod
    def rational(cls, q, prec: int = 256) -> "AlgebraicNumber":
        q = Fraction(q)
        poly = IntPolynomial((-q.numerator, q.denominator))
        return cls(poly, ComplexBox(RealInterval.point(q, prec)))

    @classmethod
    def root_of(cls, poly: IntPolynomial, index: int, prec: int = 256) -> "AlgebraicNumber":
        """The index-th root of an irreducible polynomial in (re, im) order."""
        poly = _normalize(poly)
        boxes = isolate_roots(poly, prec)
        return cls(poly, boxes[index])

    @classmethod
    def nearest_root(cls, poly: IntPolynomial, approx: complex, prec: int = 256) -> "AlgebraicNumber":
        """The root of `poly` closest to `approx`, with its minimal polynomial."""
        _, facs = poly.factor()
        best = None
        for g, _e in facs:
            if g.degree < 1:
                continue
            g = _normalize(g)
            for b in isolate_roots(g, prec):
                dist = abs(complex(b.center()) - complex(approx))
                if best is None or dist < best[0]:
                    best = (dist, g, b)
        if best is None:
            raise AlgebraicError("polynomial has no roots")
        return cls(best[1], best[2])

    @classmethod
    def select_root(cls, poly: IntPolynomial, target: Callable[[int], ComplexBox], prec: int = 128) -> "AlgebraicNumber":
        """Root of `poly` (any factor) lying in target(prec), refined until unique."""
        if not poly.coeffs:
            raise AlgebraicError("zero polynomial")
        _, facs = poly.factor()
        factors = [_normalize(g) for g, _ in facs if g.degree >= 1]
        while prec <= MAX_PRECISION:
            box = target(prec)
            hits = []
            for g in factors:
                for b in isolate_roots(g, prec):
                    if b.overlaps(box):
                        hits.append((g, b))
            if len(hits) == 1:
                return cls(hits[0][0], hits[0][1])
            if not hits:
                raise AlgebraicError("no root of the candidate polynomial meets the target box")
            prec *= 2
        raise AlgebraicError("could not separate the target root")

    # -- basic data -------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.min_poly.degree

    @property
    def is_integer(self) -> bool:
        return self.min_poly.lc == 1

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise AlgebraicError("not a rational number")
        c0, c1 = self.min_poly.coeffs
        return Fraction(-c0, c1)

    def is_zero(self) -> bool:
        return self.min_poly.coeffs == (0, 1)

    def conjugates(self, prec: int = 256) -> list[ComplexBox]:
        return isolate_roots(self.min_poly, prec)

    def box(self, prec: int) -> ComplexBox:
        """Isolating box for this conjugate at (at least) the given precision."""
        if self.root_box.prec >= prec:
            return self.root_box
        if self.is_rational:
            return ComplexBox(RealInterval.point(self.as_fraction(), prec))
        p = prec
        while p <= MAX_PRECISION:
            hits = [b for b in isolate_roots(self.min_poly, p) if b.overlaps(self.root_box)]
            if len(hits) == 1:
                return hits[0]
            p *= 2
        raise AlgebraicError("could not refine the root box")

    def refined(self, prec: int) -> "AlgebraicNumber":
        return AlgebraicNumber(self.min_poly, self.box(prec))

    def approx(self) -> complex:
        return complex(self.root_box.center())

    def same_as(self, other: "AlgebraicNumber") -> bool:
        if self.min_poly != other.min_poly:
            return False
        return self.root_box.overlaps(other.root_box)

    def __repr__(self) -> str:
        return f"AlgebraicNumber({self.min_poly!r}, ~{self.approx():.6g})"

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "AlgebraicNumber":
        f = self.min_poly.scale_variable(-1)
        return AlgebraicNumber(_normalize(f), -self.root_box)

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero():
            raise AlgebraicError("zero has no inverse")
        f = _normalize(self.min_poly.reverse())

        def target(p):
            return ComplexBox.point(1, p) / self.box(p)

        return AlgebraicNumber.select_root(f, target)

    def _combine(self, other, op: str) -> "AlgebraicNumber":
        if not isinstance(other, AlgebraicNumber):
            other = AlgebraicNumber.rational(other)
        f, g = self.min_poly, other.min_poly
        dg = g.degree
        if op == "add":
            # roots a + b: Res_y(f(y), g(x - y))
            def spec(k):
                return g.compose(IntPolynomial((k, -1)))
        else:
            if self.is_zero() or other.is_zero():
                return AlgebraicNumber.rational(0)
            # roots a * b: Res_y(f(y), y^dg g(x / y))
            def spec(k):
                return IntPolynomial([g.coeffs[dg - i] * k ** (dg - i) for i in range(dg + 1)])
        R = bivariate_resultant(f, spec, f.degree * dg)

        def target(p):
            a, b = self.box(p), other.box(p)
            return a + b if op == "add" else a * b

        return AlgebraicNumber.select_root(R, target)

    def __add__(self, other):
        return self._combine(other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, AlgebraicNumber):
            other = AlgebraicNumber.rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._combine(other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, AlgebraicNumber):
            other = AlgebraicNumber.rational(other)
        return self * other.inverse()

    def __pow__(self, n: int) -> "AlgebraicNumber":
        if n < 0:
            return self.inverse() ** (-n)
        acc = AlgebraicNumber.rational(1)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            n >>= 1
            if n:
                base = base * base
        return acc

    # -- elements of Q(alpha) ---------------------------------------------

    @classmethod
    def from_field_element(cls, alpha: "AlgebraicNumber", coeffs: Sequence) -> "AlgebraicNumber":
        """sum coeffs[i] * alpha**i, with rational coefficients."""
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        P = IntPolynomial([int(c * den) for c in fr])
        if P.degree < 1:
            return cls.rational(fr[0] if fr else 0)
        f = alpha.min_poly
        # roots den*x - P(a) over the conjugates a
        R = bivariate_resultant(f, lambda k: IntPolynomial((den * k,)) - P, f.degree)

        def target(p):
            return field_element_box(alpha.box(p), fr)

        return cls.select_root(R, target)


def field_element_box(alpha_box: ComplexBox, coeffs: Sequence) -> ComplexBox:
    p = alpha_box.prec
    acc = ComplexBox.point(0, p)
    for c in reversed(list(coeffs)):
        acc = acc * alpha_box + ComplexBox(RealInterval.point(Fraction(c), p))
    return acc


# ---------------------------------------------------------------------------
# heights


def abs_log_height(x: AlgebraicNumber, prec: int = 256) -> RealInterval:
    """h(x) = (log|lc| + sum log max(1, |x_i|)) / deg over all conjugates."""
    if x.is_zero():
        raise AlgebraicError("the height of zero is not used")
    f = x.min_poly
    acc = RealInterval.point(abs(f.lc), prec).log()
    for b in isolate_roots(f, prec):
        acc = acc + b.abs().max(1).log()
    return acc / f.degree


def lehmer_floor(d: int, prec: int = 256) -> RealInterval:
    """Lower bound for deg * h of a non-torsion algebraic number of degree <= d."""
    if d < 1:
        raise ValueError("degree must be positive")
    if d <= 2:
        return RealInterval.point(2, prec).log() / d
    ld = RealInterval.point(d, prec).log()
    return (ld.log() / ld).ipow(3) / 4


def lehmer_prime(d: int, prec: int = 256) -> RealInterval:
    """(1 + pi^2 / lehmer_floor(d)^2)^(1/2)."""
    dk = lehmer_floor(d, prec)
    pi = RealInterval.pi(prec)
    return (1 + pi.ipow(2) / dk.ipow(2)).sqrt()

