"""Model normalisation and descent sets.

`normalize_model` turns A Y^2 + B Y = F(X) into a y^2 = f(x) with f monic
and an integral change of variables.  The kappa sets attach to each coset
representative sum (P_i - base) of J(Q)/2J(Q) an algebraic integer kappa
with x - alpha in kappa K*^2 for the integral points in that coset.

Points of a coset representative are given as Galois orbits: a monic
integer polynomial g whose roots are the gamma_i with x(P_i) = gamma_i/d^2.
The product of gamma_i - alpha d^2 over the orbit is (-1)^deg g g(alpha d^2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import sympy

from .exactmath.poly import IntPolynomial, poly_discriminant
from .heights import AlgebraicNumber
from .numberfield import element_norm


class DescentError(ValueError):
    pass


# ---------------------------------------------------------------------------
# arithmetic in Q[x]/(f)


def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def reduce_mod(coeffs: Sequence, f: IntPolynomial) -> tuple[Fraction, ...]:
    c = [Fraction(v) for v in coeffs]
    n = f.degree
    lc = Fraction(f.lc)
    for i in range(len(c) - 1, n - 1, -1):
        q = c[i] / lc
        if q:
            for j in range(n + 1):
                c[i - n + j] -= q * f.coeffs[j]
    c = _trim(c[:n] if len(c) > n else c)
    return tuple(c)


def mul_mod(a: Sequence, b: Sequence, f: IntPolynomial) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * max(len(a) + len(b) - 1, 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += Fraction(x) * Fraction(y)
    return reduce_mod(out, f)


def inverse_mod(a: Sequence, f: IntPolynomial) -> tuple[Fraction, ...]:
    """a^{-1} in Q[x]/(f) by the extended Euclidean algorithm over Q."""
    import sympy as sp

    x = sp.Symbol("x")
    pa = sp.Poly([sp.Rational(v.numerator, v.denominator) for v in reversed([Fraction(c) for c in a])], x, domain="QQ")
    pf = sp.Poly(f.high(), x, domain="QQ")
    s, _t, g = sp.gcdex(pa, pf)
    if g.degree() != 0:
        raise DescentError("element is not invertible modulo f")
    g0 = g.all_coeffs()[0]
    coeffs = [Fraction(int(c.p), int(c.q)) / Fraction(int(g0.p), int(g0.q)) for c in reversed(s.all_coeffs())]
    return reduce_mod(coeffs, f)


def power_mod(a: Sequence, e: int, f: IntPolynomial) -> tuple[Fraction, ...]:
    acc: tuple = (Fraction(1),)
    for _ in range(e):
        acc = mul_mod(acc, a, f)
    return acc


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class TwistModel:
    """a y^2 = f(x) with f monic, reached from A Y^2 + B Y = F(X) via
    x = lam X + shift_x, y = mu Y + shift_y."""

    a: int
    f: IntPolynomial
    lam: int
    shift_x: int
    mu: int
    shift_y: int
    source: tuple = ()

    def forward(self, X, Y) -> tuple:
        return self.lam * X + self.shift_x, self.mu * Y + self.shift_y

    def on_curve(self, x, y) -> bool:
        x, y = Fraction(x), Fraction(y)
        return self.a * y * y == self.f.eval_fraction(x)


def _content_frac(vals) -> int:
    g = 0
    for v in vals:
        g = math.gcd(g, int(v))
    return g


def _square_part(n: int) -> tuple[int, int]:
    """n = core * s^2 with core squarefree (sign kept in core)."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    s = 1
    for p, e in sympy.factorint(n).items():
        s *= p ** (e // 2)
    return sign * n // (s * s), s


def normalize_model(F: Sequence[int] | IntPolynomial, A: int = 1, B: int = 0, check_irreducible: bool = True) -> TwistModel:
    """Integral change of variables from A Y^2 + B Y = F(X) to a y^2 = monic f(x)."""
    F = F if isinstance(F, IntPolynomial) else IntPolynomial(F)
    if A == 0 or F.degree < 1:
        raise DescentError("need A != 0 and a nonconstant right-hand side")
    n = F.degree
    g = math.gcd(2 * A, B)
    # (2A Y + B)^2 = 4 A F + B^2 and y2 = (2A Y + B) / g
    G = F * (4 * A) + B * B
    D = math.gcd(g * g, G.content())
    A1 = g * g // D
    G = G.exact_div_int(D)
    gn = G.lc
    lam = 1
    while True:
        S = Fraction(lam**n, gn)
        T = S * A1
        bs = [S * G.coeffs[k] / Fraction(lam**k) for k in range(n)]
        if T.denominator == 1 and all(b.denominator == 1 for b in bs):
            break
        lam += 1
        if lam > abs(gn) * max(1, abs(A1)) + 2:
            raise DescentError("no integral scaling found")
    f = IntPolynomial([int(b) for b in bs] + [1])
    if check_irreducible and not f.is_irreducible():
        raise DescentError("the normalised right-hand side is reducible; split the problem first")
    a, mu1 = _square_part(int(T))
    mu = mu1 * (2 * A // g)
    shift_y = mu1 * (B // g)
    return TwistModel(a, f, lam, 0, mu, shift_y, source=(tuple(F.coeffs), A, B))


# ---------------------------------------------------------------------------
# descent sets


@dataclass(frozen=True)
class PointOrbit:
    """Galois orbit of points with x = gamma/d^2, gamma a root of gamma_poly."""

    gamma_poly: IntPolynomial
    d: int = 1

    @classmethod
    def rational(cls, x) -> "PointOrbit":
        x = Fraction(x)
        d = math.isqrt(x.denominator)
        if d * d != x.denominator:
            # write x = gamma / d^2 with gamma integral
            d = x.denominator
        gamma = x * d * d
        return cls(IntPolynomial((-int(gamma), 1)), d)

    @property
    def size(self) -> int:
        return self.gamma_poly.degree


@dataclass(frozen=True)
class CosetRep:
    orbits: tuple[PointOrbit, ...]
    label: str = ""

    @property
    def m(self) -> int:
        return sum(o.size for o in self.orbits)


@dataclass
class KappaClass:
    kappa: tuple[Fraction, ...]
    source: CosetRep
    label: str = ""
    tower: object = None
    bound: object = None

    def algebraic(self, alpha: AlgebraicNumber) -> AlgebraicNumber:
        return AlgebraicNumber.from_field_element(alpha, self.kappa)


def _orbit_factor(orbit: PointOrbit, f: IntPolynomial) -> tuple[Fraction, ...]:
    """prod over the orbit of (gamma_i - alpha d^2) as an element of Q(alpha)."""
    g = orbit.gamma_poly
    if g.lc != 1:
        raise DescentError("gamma polynomials must be monic (gamma algebraic integers)")
    t = [Fraction(0), Fraction(orbit.d**2)]  # alpha d^2
    acc: tuple = ()
    for c in reversed(g.coeffs):
        acc = mul_mod(acc, t, f) if acc else ()
        acc = reduce_mod(list(acc) + [0] if not acc else acc, f)
        lst = list(acc) or [Fraction(0)]
        lst[0] += c
        acc = reduce_mod(lst, f)
    sign = -1 if g.degree % 2 else 1
    out = reduce_mod([sign * c for c in acc], f)
    if not out or element_norm(out, f) == 0:
        raise DescentError("a point of the coset has y = 0 (gamma - alpha d^2 is not invertible)")
    return out


def kappa_set_odd(cosets: Sequence[CosetRep], a: int, f: IntPolynomial, twist_parity: int = 1) -> list[KappaClass]:
    """kappa = a^((m + twist_parity) mod 2) prod(gamma_i - alpha d_i^2) per coset.

    twist_parity = 1 gives x - alpha in kappa K*^2 for a y^2 = f(x); with
    twist_parity = 0 the scale factor follows the point count alone.
    """
    if f.degree % 2 == 0:
        raise DescentError("odd degree required")
    out = []
    for rep in cosets:
        acc: tuple = (Fraction(1),)
        for o in rep.orbits:
            acc = mul_mod(acc, _orbit_factor(o, f), f)
        if (rep.m + twist_parity) % 2:
            acc = tuple(c * a for c in acc)
        out.append(KappaClass(reduce_mod(acc, f), rep, rep.label))
    return out


def squarefree_supported(n: int, max_prime_digits: int = 40) -> list[int]:
    """All square-free integers (both signs) supported on the primes of n."""
    if n == 0:
        raise DescentError("zero has no prime support")
    fac = sympy.factorint(abs(n), limit=None)
    for p in fac:
        if len(str(p)) > max_prime_digits and not sympy.isprime(p):
            raise DescentError(f"could not factor cofactor {p}")
    primes = sorted(fac)
    out = []
    for k in range(len(primes) + 1):
        for sub in itertools.combinations(primes, k):
            v = math.prod(sub)
            out.extend([v, -v])
    return sorted(out, key=lambda v: (abs(v), v))


def kappa_set_even(cosets: Sequence[CosetRep], a: int, f: IntPolynomial, P0: PointOrbit | None = None) -> list[KappaClass]:
    """epsilon b over cosets and square-free b supported on a * disc * Norm(epsilon).

    P0 = None means the base point is at infinity (epsilon_0 = 1).
    """
    if f.degree % 2:
        raise DescentError("even degree required")
    if P0 is None:
        eps0: tuple = (Fraction(1),)
    else:
        if P0.size != 1:
            raise DescentError("the base point must be rational")
        eps0 = _orbit_factor(P0, f)
        eps0 = tuple(-c for c in eps0)  # gamma_0 - alpha d_0^2 (one factor, sign restored)
    delta = poly_discriminant(f)
    out = []
    for rep in cosets:
        acc: tuple = (Fraction(1),)
        for o in rep.orbits:
            acc = mul_mod(acc, _orbit_factor(o, f), f)
        if rep.m % 2:
            acc = mul_mod(acc, eps0, f)
        eps = reduce_mod(acc, f)
        nrm = element_norm(eps, f)
        if nrm.denominator != 1:
            raise DescentError("epsilon is not integral")
        for b in squarefree_supported(a * delta * int(nrm)):
            out.append(KappaClass(tuple(c * b for c in eps), rep, f"{rep.label}*{b}" if rep.label else str(b)))
    return out


# ---------------------------------------------------------------------------
# squares in K


def _split_primes(f: IntPolynomial, avoid: int, count: int = 40, start: int = 3):
    """Primes p (not dividing `avoid` or disc f) with simple roots of f mod p."""
    disc = poly_discriminant(f)
    p = start
    found = 0
    while found < count and p < 10**6:
        p = int(sympy.nextprime(p))
        if avoid % p == 0 or disc % p == 0 or f.lc % p == 0:
            continue
        roots = [r for r in range(p) if f(r) % p == 0]
        if roots:
            found += 1
            yield p, roots


def _eval_mod(coeffs: Sequence[Fraction], r: int, p: int) -> int | None:
    acc = 0
    for c in reversed(list(coeffs)):
        if c.denominator % p == 0:
            return None
        acc = (acc * r + c.numerator * pow(c.denominator, -1, p)) % p
    return acc


def square_root_in_field(beta: Sequence, f: IntPolynomial, digits: int = 120) -> tuple[Fraction, ...] | None:
    """xi with xi^2 = beta in Q[x]/(f) if one exists, else None.

    Candidates come from interpolating chosen square roots at the roots of f
    and are verified exactly; a Legendre symbol at a degree-one prime proves
    non-squareness.  Raises when neither route decides.
    """
    beta = reduce_mod(beta, f)
    if not beta:
        return ()
    den = 1
    for c in beta:
        den = den * c.denominator // math.gcd(den, c.denominator)
    for p, roots in _split_primes(f, avoid=2 * den * f.lc):
        for r in roots:
            v = _eval_mod(beta, r, p)
            if v and sympy.legendre_symbol(v, p) == -1:
                return None
    n = f.degree
    with mpmath.workdps(digits + 20):
        rts = mpmath.polyroots(f.high(), maxsteps=400, extraprec=4 * digits)
        vals = [mpmath.polyval(list(reversed([mpmath.mpf(c.numerator) / c.denominator for c in beta])), z) for z in rts]
        sq = [mpmath.sqrt(v) for v in vals]
        V = mpmath.matrix([[z**k for k in range(n)] for z in rts])
        for signs in itertools.product((1, -1), repeat=n - 1):
            s = [sq[0]] + [sg * q for sg, q in zip(signs, sq[1:])]
            try:
                sol = mpmath.lu_solve(V, mpmath.matrix(s))
            except ZeroDivisionError:
                continue
            coeffs = []
            ok = True
            for c in sol:
                if abs(mpmath.im(c)) > mpmath.mpf(10) ** (-digits // 2):
                    ok = False
                    break
                coeffs.append(Fraction(str(mpmath.nstr(mpmath.re(c), digits))).limit_denominator(10 ** (digits // 3)))
            if not ok:
                continue
            xi = reduce_mod(coeffs, f)
            if mul_mod(xi, xi, f) == beta:
                return xi
    raise DescentError("square test undecided; increase precision")


def is_square_in_field(beta: Sequence, f: IntPolynomial) -> bool:
    return square_root_in_field(beta, f) is not None


def matching_kappas(x: int, classes: Sequence[KappaClass], f: IntPolynomial) -> list[int]:
    """Indices of the classes with (x - alpha)/kappa a square in K."""
    out = []
    x_minus_alpha = reduce_mod([x, -1], f)
    for i, kc in enumerate(classes):
        beta = mul_mod(x_minus_alpha, inverse_mod(kc.kappa, f), f)
        if is_square_in_field(beta, f):
            out.append(i)
    return out


def local_filter(classes: Sequence[KappaClass], model: TwistModel, primes: Sequence[int]) -> list[KappaClass]:
    """Drop classes that no integral point can reach, judged at degree-one primes.

    For p not dividing 2 a disc(f) Norm(kappa), an integral x with
    x - alpha = kappa xi^2 gives (x - r)/kappa(r) a square mod p at every
    simple root r of f mod p with x != r.  Undecided classes are kept.
    """
    f, a = model.f, model.a
    disc = poly_discriminant(f)
    keep = []
    for kc in classes:
        nrm = element_norm(kc.kappa, f)
        alive = True
        for p in primes:
            if p == 2 or (2 * a * disc) % p == 0 or nrm.numerator % p == 0 or nrm.denominator % p == 0:
                continue
            roots = [r for r in range(p) if f(r) % p == 0]
            kr = {r: _eval_mod(kc.kappa, r, p) for r in roots}
            if not roots or any(v is None or v == 0 for v in kr.values()):
                continue
            possible = False
            for x in range(p):
                fx = f(x) % p
                # a y^2 = f(x) must be solvable mod p
                if fx and sympy.legendre_symbol(fx * a % p, p) == -1:
                    continue
                if all((x - r) % p == 0 or sympy.legendre_symbol((x - r) * kr[r] % p, p) == 1 for r in roots):
                    possible = True
                    break
            if not possible:
                alive = False
                break
        if alive:
            keep.append(kc)
    return keep
