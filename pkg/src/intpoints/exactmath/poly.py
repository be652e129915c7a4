"""Dense integer polynomials: resultants, discriminants, Sturm sequences.

Factorization over the rationals is delegated to sympy (Zassenhaus:
factoring modulo a prime, Hensel lifting and recombination); everything
else here is implemented directly on Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class PolynomialError(ValueError):
    pass


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients lowest degree first."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Sequence[int]):
        object.__setattr__(self, "coeffs", _trim(int(c) for c in coeffs))

    # -- basic data -------------------------------------------------------

    @classmethod
    def from_high(cls, coeffs: Sequence[int]) -> "IntPolynomial":
        """Build from coefficients listed highest degree first."""
        return cls(list(reversed(list(coeffs))))

    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: int) -> "IntPolynomial":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> "IntPolynomial":
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        if not self.coeffs:
            raise PolynomialError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def high(self) -> list[int]:
        return list(reversed(self.coeffs))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "IntPolynomial(0)"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mon and abs(c) == 1:
                coef = "-" if c < 0 else "+"
                terms.append(f"{coef}{mon}")
            else:
                terms.append(f"{c:+d}{'*' + mon if mon else ''}")
        s = "".join(terms).lstrip("+")
        return f"IntPolynomial({s})"

    # -- ring operations --------------------------------------------------

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial([-c for c in self.coeffs])

    def __add__(self, other) -> "IntPolynomial":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __sub__(self, other) -> "IntPolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "IntPolynomial":
        return _as_poly(other) - self

    def __mul__(self, other) -> "IntPolynomial":
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "IntPolynomial":
        result = IntPolynomial((1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial([i * self.coeffs[i] for i in range(1, len(self.coeffs))])

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        """Primitive part with positive leading coefficient."""
        if not self.coeffs:
            return self
        g = self.content()
        if self.lc < 0:
            g = -g
        return IntPolynomial([c // g for c in self.coeffs])

    def exact_div_int(self, d: int) -> "IntPolynomial":
        out = []
        for c in self.coeffs:
            q, r = divmod(c, d)
            if r:
                raise PolynomialError("inexact division by an integer")
            out.append(q)
        return IntPolynomial(out)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_fraction(self, x: Fraction) -> Fraction:
        """Exact value at a rational point (homogenized, one division)."""
        x = Fraction(x)
        n, d = x.numerator, x.denominator
        acc = 0
        dp = 1
        for c in reversed(self.coeffs):
            acc = acc * n + c * dp
            dp *= d
        return Fraction(acc, dp // d if self.coeffs else 1)

    def compose(self, g: "IntPolynomial") -> "IntPolynomial":
        acc = IntPolynomial(())
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc

    def scale_variable(self, c: int) -> "IntPolynomial":
        """f(c*x)."""
        return IntPolynomial([a * c**i for i, a in enumerate(self.coeffs)])

    def shift(self, c: int) -> "IntPolynomial":
        """f(x + c)."""
        return self.compose(IntPolynomial((c, 1)))

    def reverse(self) -> "IntPolynomial":
        return IntPolynomial(list(reversed(self.coeffs)))

    def substitute_square(self) -> "IntPolynomial":
        """f(x^2)."""
        out = [0] * (2 * len(self.coeffs) - 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[2 * i] = c
        return IntPolynomial(out)

    # -- division ---------------------------------------------------------

    def pseudo_divmod(self, other: "IntPolynomial") -> tuple["IntPolynomial", "IntPolynomial"]:
        """lc(other)^(deg self - deg other + 1) * self = q * other + r."""
        if not other.coeffs:
            raise PolynomialError("division by the zero polynomial")
        m, n = self.degree, other.degree
        if m < n:
            return IntPolynomial(()), self
        b = other.lc
        r = list(self.coeffs)
        q = [0] * (m - n + 1)
        e = m - n + 1
        for k in range(m - n, -1, -1):
            lead = r[n + k]
            q = [b * c for c in q]
            q[k] = lead
            r = [b * c for c in r]
            if lead:
                for j in range(n + 1):
                    r[j + k] -= lead * other.coeffs[j]
            e -= 1
        return IntPolynomial(q), IntPolynomial(r[:n])

    def pseudo_rem(self, other: "IntPolynomial") -> "IntPolynomial":
        return self.pseudo_divmod(other)[1]

    def divmod_rational(self, other: "IntPolynomial") -> tuple[list[Fraction], list[Fraction]]:
        m, n = self.degree, other.degree
        r = [Fraction(c) for c in self.coeffs]
        if m < n:
            return [], r
        q = [Fraction(0)] * (m - n + 1)
        for k in range(m - n, -1, -1):
            c = r[n + k] / other.lc
            q[k] = c
            if c:
                for j in range(n + 1):
                    r[j + k] -= c * other.coeffs[j]
        return q, r[:n]

    def exact_div(self, other: "IntPolynomial") -> "IntPolynomial":
        """Quotient when other divides self over the integers."""
        q, r = self.divmod_rational(other)
        if any(r):
            raise PolynomialError("polynomial division is not exact")
        if any(c.denominator != 1 for c in q):
            raise PolynomialError("quotient is not integral")
        return IntPolynomial([int(c) for c in q])

    def divides(self, other: "IntPolynomial") -> bool:
        _, r = other.divmod_rational(self)
        return not any(r)

    # -- gcd and squarefree ----------------------------------------------

    def gcd(self, other: "IntPolynomial") -> "IntPolynomial":
        return poly_gcd(self, other)

    def squarefree_part(self) -> "IntPolynomial":
        if self.degree <= 0:
            return self.primitive()
        g = poly_gcd(self, self.derivative())
        if g.degree == 0:
            return self.primitive()
        return self.primitive().exact_div(g).primitive()

    def is_squarefree(self) -> bool:
        if self.degree <= 0:
            return True
        return poly_gcd(self, self.derivative()).degree == 0

    # -- factorization (sympy) -------------------------------------------

    def factor(self) -> tuple[int, list[tuple["IntPolynomial", int]]]:
        """Content and irreducible factors with multiplicities."""
        import sympy

        x = sympy.Symbol("x")
        expr = sympy.Poly(self.high(), x, domain="ZZ")
        c, facs = expr.factor_list()
        out = []
        for g, e in facs:
            coeffs = [int(v) for v in g.all_coeffs()]
            out.append((IntPolynomial.from_high(coeffs), int(e)))
        return int(c), out

    def is_irreducible(self) -> bool:
        if self.degree < 1:
            return False
        _, facs = self.factor()
        return len(facs) == 1 and facs[0][1] == 1 and facs[0][0].degree == self.degree


def _as_poly(x) -> IntPolynomial:
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial((x,))
    raise TypeError(f"cannot use {type(x).__name__} as an integer polynomial")


def poly_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Primitive gcd with positive leading coefficient (primitive PRS)."""
    if not a.coeffs:
        return b.primitive()
    if not b.coeffs:
        return a.primitive()
    ca, cb = a.content(), b.content()
    a, b = a.primitive(), b.primitive()
    if a.degree < b.degree:
        a, b = b, a
    while b.coeffs:
        r = a.pseudo_rem(b)
        a, b = b, (r.primitive() if r.coeffs else r)
    return a.primitive()


def poly_resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Sylvester resultant by the subresultant algorithm.

    Equals lc(f)^deg(g) * prod g(a) over the roots a of f.
    """
    if not f.coeffs or not g.coeffs:
        raise PolynomialError("resultant of a zero polynomial")
    A, B = f, g
    if A.degree == 0 and B.degree == 0:
        return 1
    if A.degree == 0:
        return A.lc ** B.degree
    if B.degree == 0:
        return B.lc ** A.degree
    a, b = A.content(), B.content()
    A = A.exact_div_int(a)
    B = B.exact_div_int(b)
    t = a ** B.degree * b ** A.degree
    s = 1
    if A.degree < B.degree:
        A, B = B, A
        if A.degree % 2 and B.degree % 2:
            s = -1
    g_ = 1
    h = 1
    while True:
        delta = A.degree - B.degree
        if A.degree % 2 and B.degree % 2:
            s = -s
        R = A.pseudo_rem(B)
        if not R.coeffs:
            return 0
        A = B
        divisor = g_ * h**delta
        B = R.exact_div_int(divisor)
        g_ = A.lc
        if delta == 0:
            h = h
        else:
            h = g_**delta // h ** (delta - 1)
        if B.degree == 0:
            n = A.degree
            h = B.lc**n // h ** (n - 1) if n >= 1 else 1
            return s * t * h


def poly_discriminant(f: IntPolynomial) -> int:
    """(-1)^(d(d-1)/2) Res(f, f') / lc(f)."""
    d = f.degree
    if d < 1:
        raise PolynomialError("discriminant of a constant polynomial")
    if d == 1:
        return 1
    r = poly_resultant(f, f.derivative())
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    q, rem = divmod(sign * r, f.lc)
    if rem:
        raise PolynomialError("resultant not divisible by the leading coefficient")
    return q


def sturm_sequence(f: IntPolynomial) -> list[IntPolynomial]:
    """Sturm sequence with sign-preserving pseudo-remainders, made primitive."""
    seq = [f, f.derivative()]
    while seq[-1].degree > 0:
        a, b = seq[-2], seq[-1]
        delta = a.degree - b.degree + 1
        r = a.pseudo_rem(b)
        if b.lc < 0 and delta % 2:
            r = -r
        if not r.coeffs:
            break
        c = r.content()
        seq.append(IntPolynomial([-x // c for x in r.coeffs]))
    return seq


def _sign_changes(values: Iterable[int]) -> int:
    changes = 0
    last = 0
    for v in values:
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last and s != last:
            changes += 1
        last = s
    return changes


def _signs_at(seq: list[IntPolynomial], x) -> list[int]:
    if x == "+inf":
        return [p.lc for p in seq]
    if x == "-inf":
        return [p.lc * (-1 if p.degree % 2 else 1) for p in seq]
    x = Fraction(x)
    out = []
    for p in seq:
        v = p.eval_fraction(x)
        out.append((v > 0) - (v < 0))
    return out


def sturm_real_root_count(f: IntPolynomial, interval: tuple | None = None) -> int:
    """Distinct real roots of a squarefree f, in all of R or in (a, b]."""
    if f.degree < 1:
        return 0
    g = poly_gcd(f, f.derivative())
    if g.degree > 0:
        raise PolynomialError(f"polynomial is not squarefree; gcd with derivative is {g!r}")
    seq = sturm_sequence(f)
    if interval is None:
        a, b = "-inf", "+inf"
    else:
        a, b = interval
        a = "-inf" if a is None else a
        b = "+inf" if b is None else b
    return _sign_changes(_signs_at(seq, a)) - _sign_changes(_signs_at(seq, b))


def cauchy_root_bound(f: IntPolynomial) -> Fraction:
    """All complex roots satisfy |z| <= 1 + max |a_i / a_n|."""
    lc = abs(f.lc)
    return 1 + max(Fraction(abs(c), lc) for c in f.coeffs[:-1]) if f.degree > 0 else Fraction(0)
