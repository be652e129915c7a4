"""Full-rank integer lattices: Hermite normal form, indices, cosets, LLL and
Fincke-Pohst shortest vectors, all in exact integer/rational arithmetic."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactmath.interval import RealInterval


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class IntegerLattice:
    """Row-HNF basis: upper triangular, positive diagonal, reduced above."""

    basis: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def det(self) -> int:
        d = 1
        for i, row in enumerate(self.basis):
            d *= row[i]
        return d

    index = det

    def diagonal(self) -> list[int]:
        return [row[i] for i, row in enumerate(self.basis)]

    def content(self) -> int:
        """Largest B with L inside B Z^r."""
        g = 0
        for row in self.basis:
            for c in row:
                g = math.gcd(g, c)
        return g

    def coordinates(self, vec: Sequence[int]) -> list[int] | None:
        """x with x * basis = vec, or None if vec is not in the lattice."""
        r = self.rank
        v = list(vec)
        x = [0] * r
        for i in range(r):
            piv = self.basis[i][i]
            if v[i] % piv:
                return None
            c = v[i] // piv
            x[i] = c
            if c:
                row = self.basis[i]
                for j in range(i, r):
                    v[j] -= c * row[j]
        return x

    def __contains__(self, vec) -> bool:
        return self.coordinates(vec) is not None

    def contains_lattice(self, other: "IntegerLattice") -> bool:
        return all(row in self for row in other.basis)

    def vector(self, coords: Sequence[int]) -> list[int]:
        r = self.rank
        out = [0] * r
        for c, row in zip(coords, self.basis):
            if c:
                for j in range(r):
                    out[j] += c * row[j]
        return out

    def scaled(self, k: int) -> "IntegerLattice":
        return hnf([[k * c for c in row] for row in self.basis])

    @classmethod
    def standard(cls, r: int) -> "IntegerLattice":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(r)) for i in range(r)))


def hnf(rows: Sequence[Sequence[int]]) -> IntegerLattice:
    """Canonical row-HNF of the lattice spanned by the rows (must be full rank)."""
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        raise LatticeError("no nonzero rows")
    n = len(A[0])
    out = []
    for col in range(n):
        # Euclid on column col among remaining rows
        active = [r for r in A if r[col] != 0]
        rest = [r for r in A if r[col] == 0]
        if not active:
            raise LatticeError("rows do not span a full-rank lattice")
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            p = active[0]
            new = [p]
            for r in active[1:]:
                q = r[col] // p[col]
                rr = [a - q * b for a, b in zip(r, p)]
                if rr[col] != 0:
                    new.append(rr)
                elif any(rr):
                    rest.append(rr)
            active = new
        piv = active[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        A = [r for r in rest if any(r)]
    if len(out) != n:
        raise LatticeError("rank deficiency")
    # reduce entries above the diagonal
    for i in range(n):
        p = out[i][i]
        for k in range(i):
            q = out[k][i] // p
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], out[i])]
    return IntegerLattice(tuple(tuple(r) for r in out))


def kernel_preimage(L: IntegerLattice, relations: IntegerLattice) -> IntegerLattice:
    """{x M : x in relations} where M is the basis of L."""
    rows = [L.vector(x) for x in relations.basis]
    return hnf(rows)


def coordinates_in(L: IntegerLattice, sub: IntegerLattice) -> IntegerLattice:
    rows = []
    for v in sub.basis:
        x = L.coordinates(v)
        if x is None:
            raise LatticeError("sublattice is not contained in the lattice")
        rows.append(x)
    return hnf(rows)


def coset_reps(L: IntegerLattice, Lp: IntegerLattice) -> list[list[int]]:
    """Representatives of the nonzero cosets of L / Lp, as ambient vectors."""
    H = coordinates_in(L, Lp)
    ranges = [range(d) for d in H.diagonal()]
    reps = []
    for c in itertools.product(*ranges):
        if any(c):
            reps.append(L.vector(c))
    return reps


def relative_index(L: IntegerLattice, Lp: IntegerLattice) -> int:
    return coordinates_in(L, Lp).det


# ---------------------------------------------------------------------------
# LLL (integral version: all Gram-Schmidt data kept as integers)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Exact LLL with integer Gram-Schmidt quantities (de Weger's variant)."""
    b = [list(map(int, r)) for r in basis]
    n = len(b)
    if n == 0:
        return b
    num, den = delta.numerator, delta.denominator
    # d[i] = prod_{j<i} |b_j*|^2 (d[0] = 1); lam[i][j] = d[j+1] mu_ij
    d = [1] * (n + 1)
    lam = [[0] * n for _ in range(n)]

    def recompute():
        for i in range(n):
            for j in range(i + 1):
                u = _dot(b[i], b[j])
                for k in range(j):
                    u = (d[k + 1] * u - lam[i][k] * lam[j][k]) // d[k]
                if j < i:
                    lam[i][j] = u
                else:
                    d[i + 1] = u
            if d[i + 1] == 0:
                raise LatticeError("basis vectors are linearly dependent")

    recompute()

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lmb = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + lmb * lmb) // d[k]
        for i in range(k + 1, n):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lmb * t) // d[k]
            lam[i][k - 1] = (B * t + lmb * lam[i][k]) // d[k + 1]
        d[k] = B

    k = 1
    while k < n:
        red(k, k - 1)
        # Lovasz: d[k+1] d[k-1] >= (delta d[k]^2 - lam^2)  (scaled by den)
        if den * d[k + 1] * d[k - 1] < num * d[k] * d[k] - den * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


def gram_schmidt(basis: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact mu coefficients and squared norms |b_i*|^2."""
    n = len(basis)
    bstar: list[list[Fraction]] = []
    Bn: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in basis[i]]
        for j in range(i):
            mu[i][j] = Fraction(_dot(basis[i], bstar[j])) / Bn[j] if Bn[j] else Fraction(0)
            v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
        bstar.append(v)
        Bn.append(sum(x * x for x in v))
    return mu, Bn


def lovasz_holds(basis, delta: Fraction = Fraction(99, 100)) -> bool:
    mu, Bn = gram_schmidt(basis)
    for k in range(1, len(basis)):
        if abs(mu[k][k - 1]) > Fraction(1, 2):
            return False
        if Bn[k] < (delta - mu[k][k - 1] ** 2) * Bn[k - 1]:
            return False
    return True


@dataclass(frozen=True)
class ShortestVector:
    vector: tuple[int, ...] | None
    norm_squared_lower: Fraction  # certified lower bound for m(L)^2
    exact: bool
    nodes: int

    def length_lower(self, prec: int = 256) -> RealInterval:
        """Interval whose lower end is a certified lower bound of m(L)."""
        return RealInterval.point(self.norm_squared_lower, prec).sqrt()


def _isqrt_floor_fraction(t: Fraction) -> int:
    return math.isqrt(t.numerator // t.denominator)


def shortest_vector(L: IntegerLattice | Sequence[Sequence[int]], node_cap: int = 200_000) -> ShortestVector:
    """LLL then Fincke-Pohst enumeration; exact throughout."""
    basis = L.basis if isinstance(L, IntegerLattice) else [list(r) for r in L]
    red = lll_reduce(basis)
    n = len(red)
    mu, Bn = gram_schmidt(red)
    best = min(red, key=lambda v: _dot(v, v))
    R = Fraction(_dot(best, best))
    best_coords = None
    nodes = 0
    x = [0] * n
    # depth-first enumeration from the last coordinate
    partial = [Fraction(0)] * (n + 1)

    def center(i):
        return -sum((x[j] * mu[j][i] for j in range(i + 1, n)), Fraction(0))

    aborted = False

    def rec(i):
        nonlocal R, best_coords, nodes, aborted
        if aborted:
            return
        c = center(i)
        rem = R - partial[i + 1]
        if rem < 0:
            return
        t = rem / Bn[i]
        s = _isqrt_floor_fraction(t) + 1
        c0 = math.floor(c)
        for xi in range(c0 - s - 1, c0 + s + 2):
            nodes += 1
            if nodes > node_cap:
                aborted = True
                return
            dlt = (xi - c) ** 2 * Bn[i]
            val = partial[i + 1] + dlt
            if val > R:
                continue
            x[i] = xi
            partial[i] = val
            if i == 0:
                if val > 0 and (val < R or best_coords is None):
                    if val < R or best_coords is None:
                        R = val
                        best_coords = list(x)
            else:
                rec(i - 1)
        x[i] = 0

    rec(n - 1)
    if aborted:
        lower = min(Bn)
        return ShortestVector(None, lower, False, nodes)
    if best_coords is None:
        vec = tuple(best)
    else:
        vec = tuple(sum(best_coords[i] * red[i][j] for i in range(n)) for j in range(len(red[0])))
    return ShortestVector(vec, Fraction(_dot(vec, vec)), True, nodes)
