"""Genus-2 Jacobian arithmetic over prime fields.

Divisor classes are kept in Mumford form (u, v) with u monic of degree at
most 2 and u | v^2 - F.  The curve must have an odd-degree (quintic) model
y^2 = F(x) so that the unique point at infinity can serve as base point;
sextics with a rational root are moved to such a model by the caller
(see ``quintic_model_from_sextic``).

Polynomials over F_q are tuples of ints in [0, q), lowest degree first,
without trailing zeros.  The zero polynomial is the empty tuple.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import sympy

from .lattice import IntegerLattice, hnf


class JacobianError(Exception):
    """Raised for bad reduction, malformed divisors or aborted computations."""


# ---------------------------------------------------------------------------
# polynomials over F_q


def _trim(a):
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return tuple(a[:n])


def padd(a, b, q):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % q
    return _trim(out)


def psub(a, b, q):
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % q
    return _trim(out)


def pneg(a, q):
    return tuple((-c) % q for c in a)


def pmul(a, b, q):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % q for c in out])


def pscale(a, c, q):
    c %= q
    if c == 0:
        return ()
    return tuple((x * c) % q for x in a)


def pdivmod(a, b, q):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), _trim(a)
    r = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, q)
    quo = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i] % q
        if c:
            c = (c * inv) % q
            quo[i - db] = c
            for j in range(db + 1):
                r[i - db + j] -= c * b[j]
        r[i] = 0
    return _trim(quo), _trim([x % q for x in r[:db]])


def pmod(a, b, q):
    return pdivmod(a, b, q)[1]


def pmonic(a, q):
    if not a:
        return a
    if a[-1] == 1:
        return a
    return pscale(a, pow(a[-1], -1, q), q)


def pxgcd(a, b, q):
    """Return (g, s, t) with g = s*a + t*b monic (or zero)."""
    r0, r1 = a, b
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    while r1:
        quo, rem = pdivmod(r0, r1, q)
        r0, r1 = r1, rem
        s0, s1 = s1, psub(s0, pmul(quo, s1, q), q)
        t0, t1 = t1, psub(t0, pmul(quo, t1, q), q)
    if not r0:
        return (), (), ()
    inv = pow(r0[-1], -1, q)
    return pscale(r0, inv, q), pscale(s0, inv, q), pscale(t0, inv, q)


def peval(a, x, q):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % q
    return acc


def pderiv(a, q):
    return _trim([(i * a[i]) % q for i in range(1, len(a))])


def sqrt_mod(a, q):
    """Square root modulo an odd prime, or None for non-residues."""
    a %= q
    if a == 0:
        return 0
    if pow(a, (q - 1) // 2, q) != 1:
        return None
    r = sympy.ntheory.residue_ntheory.sqrt_mod(a, q)
    return int(r)


# ---------------------------------------------------------------------------
# curve and divisors


@dataclass(frozen=True)
class CurveFp:
    q: int
    F: tuple  # coefficients mod q, lowest first, degree 5

    def __post_init__(self):
        if self.q % 2 == 0:
            raise JacobianError("q must be odd")
        if len(self.F) - 1 != 5:
            raise JacobianError("an odd-degree (quintic) model is required for Cantor arithmetic")
        g = pxgcd(self.F, pderiv(self.F, self.q), self.q)[0]
        if len(g) > 1:
            raise JacobianError(f"bad reduction at q={self.q}")

    @classmethod
    def from_integer_poly(cls, coeffs: Sequence[int], q: int) -> "CurveFp":
        F = _trim([c % q for c in coeffs])
        if len(F) != len(coeffs):
            raise JacobianError(f"leading coefficient vanishes at q={q}")
        return cls(q, F)

    @property
    def identity(self):
        return ((1,), ())

    def is_valid(self, D) -> bool:
        u, v = D
        # monic u of degree <= 2, deg v < deg u
        if not u or u[-1] != 1 or len(u) > 3 or len(v) >= len(u):
            return False
        r = pmod(psub(pmul(v, v, self.q), self.F, self.q), u, self.q)
        return not r

    def point(self, x: int, y: int):
        """Mumford form of [P - oo] for the affine point P = (x, y)."""
        q = self.q
        x %= q
        y %= q
        if (y * y - peval(self.F, x, q)) % q:
            raise JacobianError("point not on curve")
        return ((( -x) % q, 1), _trim([y]))

    def add(self, D1, D2):
        return cantor_add(D1, D2, self)

    def neg(self, D):
        u, v = D
        return (u, pneg(v, self.q))

    def mul(self, n: int, D):
        return scalar_mul(n, D, self)


def cantor_add(D1, D2, curve: CurveFp):
    """Reduced sum of two divisor classes."""
    q = curve.q
    F = curve.F
    u1, v1 = D1
    u2, v2 = D2
    if len(u1) == 1:
        return D2
    if len(u2) == 1:
        return D1
    d1, e1, e2 = pxgcd(u1, u2, q)
    if len(d1) == 1:
        # coprime u's: the common case
        u = pmul(u1, u2, q)
        # v = v1 + u1*e1*(v2 - v1) mod u
        v = pmod(padd(v1, pmul(pmul(u1, e1, q), psub(v2, v1, q), q), q), u, q)
    else:
        s = padd(v1, v2, q)
        d, c1, c2 = pxgcd(d1, s, q)
        if not d:
            d, c1, c2 = d1, (1,), ()
        s1 = pmul(c1, e1, q)
        s2 = pmul(c1, e2, q)
        s3 = c2
        u = pmul(u1, u2, q)
        dd = pmul(d, d, q)
        u, rem = pdivmod(u, dd, q)
        if rem:
            raise JacobianError("inconsistent composition")
        num = padd(
            padd(pmul(pmul(s1, u1, q), v2, q), pmul(pmul(s2, u2, q), v1, q), q),
            pmul(s3, padd(pmul(v1, v2, q), F, q), q),
            q,
        )
        v, rem = pdivmod(num, d, q)
        if rem:
            raise JacobianError("inconsistent composition")
        v = pmod(v, u, q)
    return _reduce(u, v, curve)


def _reduce(u, v, curve: CurveFp):
    q = curve.q
    while len(u) > 3:
        u, rem = pdivmod(psub(curve.F, pmul(v, v, q), q), u, q)
        if rem:
            raise JacobianError("reduction step not exact")
        u = pmonic(u, q)
        v = pmod(pneg(v, q), u, q)
    u = pmonic(u, q)
    v = pmod(v, u, q) if len(u) > 1 else ()
    return (u, v)


def cantor_double(D, curve: CurveFp):
    return cantor_add(D, D, curve)


def scalar_mul(n: int, D, curve: CurveFp):
    if n < 0:
        return scalar_mul(-n, curve.neg(D), curve)
    result = curve.identity
    base = D
    while n:
        if n & 1:
            result = cantor_add(result, base, curve)
        n >>= 1
        if n:
            base = cantor_add(base, base, curve)
    return result


def negate(D, curve: CurveFp):
    return curve.neg(D)


def in_curve_image(D) -> bool:
    """True iff the class is [P - oo] for some P (deg u <= 1)."""
    return len(D[0]) <= 2


# ---------------------------------------------------------------------------
# point counting and group order


def _legendre_table(q: int) -> np.ndarray:
    chi = np.full(q, -1, dtype=np.int64)
    chi[0] = 0
    sq = (np.arange(1, q, dtype=np.int64) ** 2) % q
    chi[sq] = 1
    return chi


def _eval_poly_array(coeffs, xs, q):
    acc = np.zeros_like(xs)
    for c in reversed(coeffs):
        acc = (acc * xs + c) % q
    return acc


def point_count(curve: CurveFp, extension: int = 1) -> int:
    """Number of projective points over F_{q^e}, e in {1, 2}."""
    q = curve.q
    chi = _legendre_table(q)
    if extension == 1:
        xs = np.arange(q, dtype=np.int64)
        vals = _eval_poly_array(curve.F, xs, q)
        return int(q + chi[vals].sum()) + 1
    if extension != 2:
        raise ValueError("extension must be 1 or 2")
    # F_{q^2} = F_q[t]/(t^2 - c); the quadratic character of F_{q^2} is
    # the character of F_q applied to the norm.
    c = quadratic_nonresidue(q)
    total = 0
    a = np.arange(q, dtype=np.int64)
    for b in range(q):
        # evaluate F(a + b t) by Horner with pairs (re, im)
        re = np.zeros(q, dtype=np.int64)
        im = np.zeros(q, dtype=np.int64)
        for coef in reversed(curve.F):
            re, im = (re * a + im * b % q * c + coef) % q, (re * b + im * a) % q
        norm = (re * re - c * (im * im % q)) % q
        total += int(chi[norm].sum())
    return q * q + total + 1


def quadratic_nonresidue(q: int) -> int:
    c = 2
    while pow(c, (q - 1) // 2, q) != q - 1:
        c += 1
    return c


def weil_coefficients(N1: int, N2: int, q: int) -> tuple[int, int]:
    """(s1, s2) of the Weil polynomial T^4 - s1 T^3 + s2 T^2 - q s1 T + q^2."""
    s1 = q + 1 - N1
    p2 = q * q + 1 - N2  # s1^2 - 2 s2
    twice = s1 * s1 - p2
    if twice % 2:
        raise JacobianError("point counts inconsistent with a genus-2 zeta function")
    s2 = twice // 2
    if abs(s1) > 4 * math.isqrt(q) + 4:
        raise JacobianError("Weil bound violated by N1")
    return s1, s2


def jacobian_order(N1: int, N2: int, q: int) -> int:
    s1, s2 = weil_coefficients(N1, N2, q)
    order = 1 - s1 + s2 - q * s1 + q * q
    lo = (math.sqrt(q) - 1) ** 4
    hi = (math.sqrt(q) + 1) ** 4
    if not (lo - 1 <= order <= hi + 1):
        raise JacobianError("Weil bound violated by the group order")
    return order


def random_divisor(curve: CurveFp, rng: random.Random):
    """A random class, built as a sum of two random affine points."""
    q = curve.q
    D = curve.identity
    added = 0
    while added < 2:
        x = rng.randrange(q)
        y = sqrt_mod(peval(curve.F, x, q), q)
        if y is None:
            continue
        if rng.random() < 0.5:
            y = (-y) % q
        D = cantor_add(D, curve.point(x, y), curve)
        added += 1
    return D


def _order_candidates(curve: CurveFp, N1: int) -> list[int]:
    q = curve.q
    s1 = q + 1 - N1
    # real Weil polynomial x^2 - s1 x + (s2 - 2q) has roots in [-2 sqrt q, 2 sqrt q]
    sq = math.sqrt(q)
    lo = math.floor(2 * sq * abs(s1) - 2 * q) - 1
    hi = math.ceil(s1 * s1 / 4 + 2 * q) + 1
    base = 1 - s1 - q * s1 + q * q
    return [base + s2 for s2 in range(lo, hi + 1)]


def group_order(curve: CurveFp, rng: random.Random | None = None, trials: int = 6,
                allow_n2: bool = True) -> int:
    """#J(F_q) from N1 plus baby-step/giant-step over the Weil window.

    Every candidate order in the window is tested against random classes;
    the window contains the true order, so a unique survivor is the order.
    Falls back to counting N2 when ambiguity persists.
    """
    rng = rng or random.Random(curve.q)
    N1 = point_count(curve, 1)
    cands = _order_candidates(curve, N1)
    lo, hi = cands[0], cands[-1]
    lo = max(lo, 1)
    alive = None
    for _ in range(trials):
        D = random_divisor(curve, rng)
        hits = _killing_multiples(D, lo, hi, curve)
        alive = hits if alive is None else alive & hits
        if len(alive) == 1:
            return next(iter(alive))
    if allow_n2:
        return jacobian_order(N1, point_count(curve, 2), curve.q)
    raise JacobianError("group order ambiguous")


def _killing_multiples(D, lo: int, hi: int, curve: CurveFp) -> set[int]:
    """All n in [lo, hi] with n*D = 0, by baby steps/giant steps."""
    width = hi - lo + 1
    m = math.isqrt(width) + 1
    baby = {}
    P = curve.identity
    for j in range(m):
        baby.setdefault(P, []).append(j)
        P = cantor_add(P, D, curve)
    # giant: lo*D + i*m*D + j*D = 0  <=>  j*D = -(lo + i m) D
    step = curve.neg(scalar_mul(m, D, curve))
    G = curve.neg(scalar_mul(lo, D, curve))
    out = set()
    for i in range(m + 1):
        js = baby.get(G)
        if js:
            for j in js:
                n = lo + i * m + j
                if lo <= n <= hi:
                    out.add(n)
        G = cantor_add(G, step, curve)
    return out


# ---------------------------------------------------------------------------
# discrete logarithms and relation lattices


def _factor(n: int) -> dict[int, int]:
    return {int(p): int(e) for p, e in sympy.factorint(n).items()}


class _SubgroupSearch:
    """Membership and coordinates in <g_1..g_k> with known relative orders."""

    def __init__(self, gens, radices, curve: CurveFp, cap: int):
        self.gens = list(gens)
        self.radices = list(radices)
        self.curve = curve
        total = 1
        for r in radices:
            total *= r
        self.total = total
        target = math.isqrt(total) + 1
        # baby table over the leading digits
        table = {curve.identity: (0,) * len(gens)}
        prod = 1
        split = len(gens)
        self.partial = None
        for j, (g, r) in enumerate(zip(gens, radices)):
            if prod * r <= target:
                table = self._extend(table, j, r)
                prod *= r
                continue
            s = max(1, -(-target // prod))
            table = self._extend(table, j, s)
            prod *= s
            split = j
            self.partial = s
            break
        if len(table) > cap:
            raise JacobianError("baby-step table exceeds the memory cap")
        self.table = table
        self.split = split

    def _extend(self, table, j, count):
        curve = self.curve
        g = self.gens[j]
        out = {}
        for P, coords in table.items():
            Q = P
            for k in range(count):
                if Q not in out:
                    c = list(coords)
                    c[j] = k
                    out[Q] = tuple(c)
                Q = cantor_add(Q, g, curve)
        return out

    def find(self, x):
        """Coordinates b with x = sum b_j g_j, or None."""
        curve = self.curve
        if self.split == len(self.gens):
            return self.table.get(x)
        j = self.split
        s = self.partial
        giant_ranges = [(-(-self.radices[j] // s), s)] + [(self.radices[k], 1) for k in range(j + 1, len(self.gens))]
        giant_gens = [scalar_mul(s, self.gens[j], curve)] + self.gens[j + 1:]
        # iterate over all giant combinations, tracking x - G
        negs = [curve.neg(g) for g in giant_gens]

        def rec(level, P, digits):
            if level == len(giant_gens):
                hit = self.table.get(P)
                if hit is not None:
                    c = list(hit)
                    c[j] += digits[0] * s
                    for k, d in enumerate(digits[1:]):
                        c[j + 1 + k] += d
                    return tuple(c)
                return None
            Q = P
            for d in range(giant_ranges[level][0]):
                res = rec(level + 1, Q, digits + [d])
                if res is not None:
                    return res
                Q = cantor_add(Q, negs[level], curve)
            return None

        return rec(0, x, [])


def relation_lattice(points, curve: CurveFp, smooth_bound: int, order: int | None = None,
                     cap: int = 1 << 24, factorization: dict | None = None) -> IntegerLattice:
    """Lattice of l with sum l_i P_i = 0 in the maximal smooth_bound-smooth quotient of J(F_q)."""
    if order is None:
        order = group_order(curve)
    fac = factorization or _factor(order)
    k = len(points)
    blocks = []
    moduli = []
    for ell, e in sorted(fac.items()):
        if ell > smooth_bound:
            continue
        cof = order // ell ** e
        Q = [scalar_mul(cof, P, curve) for P in points]
        rels = _primary_relations(Q, ell, e, curve, cap)
        blocks.append(rels)
        moduli.append(ell ** e)
    if not blocks:
        return hnf([[1 if i == j else 0 for j in range(k)] for i in range(k)])
    smooth = 1
    for m in moduli:
        smooth *= m
    rows = []
    for rels, m in zip(blocks, moduli):
        c = smooth // m
        rows.extend([[c * x for x in r] for r in rels])
    return hnf(rows)


def _primary_relations(Q, ell, e, curve, cap):
    """Relations among elements of an ell-group of exponent dividing ell^e."""
    k = len(Q)
    gens = []
    radices = []
    rels = []
    search = None
    for i in range(k):
        # smallest ell^t with ell^t Q_i in <previous>
        P = Q[i]
        t = 0
        while True:
            if search is None:
                coords = () if P == curve.identity else None
            else:
                coords = search.find(P)
            if coords is not None:
                break
            P = scalar_mul(ell, P, curve)
            t += 1
            if t > e:
                raise JacobianError("element order exceeds the primary exponent")
        m = ell ** t
        row = [0] * k
        row[i] = m
        for j, idx in enumerate(gens):
            row[idx] -= coords[j]
        rels.append(row)
        if m > 1:
            gens.append(i)
            radices.append(m)
            search = _SubgroupSearch([Q[g] for g in gens], radices, curve, cap)
    return rels


def discrete_coordinates(x, points, curve: CurveFp, order: int, smooth_bound: int | None = None):
    """Some integer vector l with sum l_i P_i = x in the smooth quotient, or None."""
    fac = _factor(order)
    k = len(points)
    sols = []
    mods = []
    for ell, e in sorted(fac.items()):
        if smooth_bound is not None and ell > smooth_bound:
            continue
        cof = order // ell ** e
        Q = [scalar_mul(cof, P, curve) for P in points]
        X = scalar_mul(cof, x, curve)
        gens = []
        radices = []
        search = None
        for i in range(k):
            P = Q[i]
            t = 0
            while True:
                coords = (() if P == curve.identity else None) if search is None else search.find(P)
                if coords is not None:
                    break
                P = scalar_mul(ell, P, curve)
                t += 1
            if t:
                gens.append(i)
                radices.append(ell ** t)
                search = _SubgroupSearch([Q[g] for g in gens], radices, curve, 1 << 24)
        if search is None:
            if X != curve.identity:
                return None
            sol = [0] * k
        else:
            c = search.find(X)
            if c is None:
                return None
            sol = [0] * k
            for j, g in enumerate(gens):
                sol[g] = c[j]
        sols.append(sol)
        mods.append(ell ** e)
    out = [0] * k
    M = 1
    for m in mods:
        M *= m
    for sol, m in zip(sols, mods):
        c = M // m
        inv = pow(c, -1, m)
        for i in range(k):
            out[i] += sol[i] * c * inv
    return [v % M for v in out] if M > 1 else out


# ---------------------------------------------------------------------------
# curve image and reductions


def curve_points(curve: CurveFp) -> list[tuple[int, int]]:
    """All affine F_q-points."""
    q = curve.q
    chi = _legendre_table(q)
    xs = np.arange(q, dtype=np.int64)
    vals = _eval_poly_array(curve.F, xs, q)
    pts = []
    for x in np.nonzero(chi[vals] >= 0)[0]:
        x = int(x)
        y = sqrt_mod(int(vals[x]), q)
        pts.append((x, y))
        if y:
            pts.append((x, q - y))
    return pts


def curve_image(curve: CurveFp) -> set:
    """The set jC(F_q) = {[P - oo]} including the identity."""
    out = {curve.identity}
    for x, y in curve_points(curve):
        out.add(curve.point(x, y))
    return out


def reduce_rational_divisor(u_coeffs, v_coeffs, curve: CurveFp):
    """Reduce a rational Mumford pair (u, v) with Fraction coefficients mod q."""
    q = curve.q

    def red(c):
        from fractions import Fraction
        c = Fraction(c)
        if c.denominator % q == 0:
            raise JacobianError(f"denominator divisible by {q}")
        return (c.numerator * pow(c.denominator, -1, q)) % q

    u = _trim([red(c) for c in u_coeffs])
    v = _trim([red(c) for c in v_coeffs])
    if len(u) != len(u_coeffs):
        raise JacobianError("degree drops on reduction")
    D = (pmonic(u, q), pmod(v, u, q) if len(u) > 1 else ())
    if not curve.is_valid(D):
        raise JacobianError("reduction is not a valid Mumford pair")
    return D
