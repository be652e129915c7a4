"""Cantor arithmetic over Q on y^2 = F(x), F quintic.

Used to confirm exactly that the supplied coordinates of the known points
in the Mordell-Weil basis are right: sum w_i D_i must equal [P - oo].
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import sympy as sp

X = sp.Symbol("x")


class DivisorError(ValueError):
    pass


def _poly(coeffs_low_first) -> sp.Poly:
    cs = [sp.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in coeffs_low_first]
    return sp.Poly(list(reversed(cs)) or [0], X, domain="QQ")


class RationalJacobian:
    def __init__(self, F: Sequence[int]):
        if len(F) != 6 or F[-1] == 0:
            raise DivisorError("a quintic model is required")
        self.F = _poly(F)
        self.zero = (sp.Poly(1, X, domain="QQ"), sp.Poly(0, X, domain="QQ"))

    def divisor(self, u_low, v_low):
        u, v = _poly(u_low), _poly(v_low)
        u = u.monic()
        if (v * v - self.F).rem(u) != 0:
            raise DivisorError("u does not divide v^2 - F")
        return self._normal(u, v)

    def point(self, x, y):
        x, y = Fraction(x), Fraction(y)
        return self.divisor([-x, 1], [y])

    def _normal(self, u, v):
        v = v.rem(u) if u.degree() > 0 else sp.Poly(0, X, domain="QQ")
        return (u.monic(), v)

    def add(self, D1, D2):
        u1, v1 = D1
        u2, v2 = D2
        d1, e1, e2 = _gcdex(u1, u2)
        d, c1, c2 = _gcdex(d1, v1 + v2)
        s1, s2, s3 = c1 * e1, c1 * e2, c2
        u = sp.Poly(sp.quo(u1 * u2, d * d), X, domain="QQ")
        v = sp.Poly(sp.quo(s1 * u1 * v2 + s2 * u2 * v1 + s3 * (v1 * v2 + self.F), d), X, domain="QQ")
        v = v.rem(u) if u.degree() > 0 else sp.Poly(0, X, domain="QQ")
        while u.degree() > 2:
            u = sp.Poly(sp.quo(self.F - v * v, u), X, domain="QQ")
            v = (-v).rem(u)
        return self._normal(u, v)

    def neg(self, D):
        return (D[0], -D[1])

    def mul(self, n: int, D):
        if n < 0:
            return self.mul(-n, self.neg(D))
        acc = self.zero
        base = D
        while n:
            if n & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            n >>= 1
        return acc

    def combination(self, coords: Sequence[int], basis):
        acc = self.zero
        for c, D in zip(coords, basis):
            if c:
                acc = self.add(acc, self.mul(c, D))
        return acc

    @staticmethod
    def same(D1, D2) -> bool:
        return D1[0] == D2[0] and (D1[1] - D2[1]).is_zero

    @staticmethod
    def is_point_image(D) -> bool:
        return D[0].degree() <= 1


def _gcdex(a: sp.Poly, b: sp.Poly):
    """(d, s, t) with s a + t b = d monic (d = 1 for coprime inputs)."""
    if a.is_zero and b.is_zero:
        return sp.Poly(0, X, domain="QQ"), sp.Poly(0, X, domain="QQ"), sp.Poly(0, X, domain="QQ")
    s, t, d = sp.gcdex(a, b)
    lc = d.LC()
    return d.monic(), s * (1 / lc), t * (1 / lc)


def verify_known_points(F, basis_pairs, points, coords) -> list[str]:
    """Check sum coords_i D_i = [P - oo] exactly; returns a list of failures."""
    J = RationalJacobian(F)
    basis = [J.divisor(u, v) for u, v in basis_pairs]
    failures = []
    for P, w in zip(points, coords):
        lhs = J.combination(w, basis)
        rhs = J.zero if P is None else J.point(*P)
        if P is not None and Fraction(P[1]) ** 2 != sum(Fraction(c) * Fraction(P[0]) ** i for i, c in enumerate(F)):
            failures.append(f"{P} is not on the curve")
        elif not J.same(lhs, rhs):
            failures.append(f"coordinates {tuple(w)} do not give the point {P}")
    return failures
