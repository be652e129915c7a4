"""Explicit constants: Landau's regulator bound, the Bugeaud-Gyory unit
constants c1..c5, relative-degree constants and Matveev's C(L, n).

Every value is an outward-rounded RealInterval; consumers use the upper
end wherever an upper bound is required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactmath.interval import RealInterval, gamma, log
from .heights import lehmer_floor, lehmer_prime
from .numberfield import FieldError, NumberField

LANDAU_GRID = 1000


@lru_cache(maxsize=None)
def _grid_log_gammas(prec: int) -> tuple:
    """(log s, log(s-1), log Gamma(s/2), log Gamma(s)) for s = 2 - t/1000."""
    out = []
    for t in range(LANDAU_GRID):
        s = RealInterval.point(Fraction(2000 - t, 1000), prec)
        out.append((
            s,
            log(s),
            log(s - 1) if t else RealInterval.point(0, prec),
            log(gamma(s / 2)),
            log(gamma(s)),
        ))
    return tuple(out)


def landau_log_values(field: NumberField, prec: int = 128) -> list[RealInterval]:
    """log f_K(L, 2 - t/1000) for t = 0..999."""
    if field.signature is None or field.disc_bound is None:
        raise FieldError(f"{field.label or 'field'} needs a signature and a discriminant bound")
    u, v = field.signature
    d = field.degree
    L = RealInterval.point(field.disc_bound, prec)
    log2 = RealInterval.point(2, prec).log()
    logpi = RealInterval.pi(prec).log()
    log_a = -log2 * v - logpi * Fraction(d, 2) + log(L) / 2
    base = -log2 * u + RealInterval.point(field.torsion_bound, prec).log()
    vals = []
    for s, ls, ls1, lg_half, lg in _grid_log_gammas(prec):
        val = base + s * log_a + lg_half * u + lg * v + ls * (d + 1) + ls1 * (1 - d)
        vals.append(val)
    return vals


def landau_regulator_bound(field: NumberField, prec: int = 128) -> RealInterval:
    """B_K(L) = min over the grid of f_K(L, s); R_K < B_K(L).

    The returned interval encloses the grid minimum, so its upper end is a
    certified upper bound for the regulator.
    """
    vals = landau_log_values(field, prec)
    lo = min(vals, key=lambda x: x.lower)
    hi = min(vals, key=lambda x: x.upper)
    return RealInterval(lo.lo, hi.hi, prec).exp()


def landau_argmin(field: NumberField, prec: int = 128) -> int:
    vals = landau_log_values(field, prec)
    return min(range(len(vals)), key=lambda t: vals[t].upper)


@dataclass(frozen=True)
class ConstantSet:
    degree: int
    unit_rank: int
    c1: RealInterval
    c2: RealInterval
    c3: RealInterval
    c4: RealInterval
    c5: RealInterval
    partial: RealInterval
    partial_prime: RealInterval


def bg_constants(field: NumberField | None = None, *, degree: int | None = None, unit_rank: int | None = None,
                 prec: int = 256) -> ConstantSet:
    """c1..c5 for a field of the given degree and unit rank."""
    d = field.degree if field is not None else degree
    r = field.unit_rank if field is not None else unit_rank
    if d is None or r is None:
        raise ValueError("degree and unit rank are required")
    dk = lehmer_floor(d, prec)
    dkp = lehmer_prime(d, prec)
    if r == 0:
        z = RealInterval.point(0, prec)
        return ConstantSet(d, 0, z, z, z, z, z, dk, dkp)
    dd = RealInterval.point(d, prec)
    c1 = RealInterval.point(Fraction(math.factorial(r) ** 2, 2 ** (r - 1) * d**r), prec)
    c2 = c1 * (dd / dk).ipow(r - 1)
    c3 = c1 * dd.ipow(r) / dk
    c4 = c3 * (r * d)
    c5 = RealInterval.point(r ** (r + 1), prec) / (dk.ipow(r - 1) * 2)
    return ConstantSet(d, r, c1, c2, c3, c4, c5, dk, dkp)


def rel_degree_const(L_degree: int | NumberField, K_degree: int | NumberField, prec: int = 256) -> RealInterval:
    """max{[L:Q], [K:Q] dK', 0.16 [K:Q] / dK}."""
    dL = L_degree.degree if isinstance(L_degree, NumberField) else L_degree
    dK = K_degree.degree if isinstance(K_degree, NumberField) else K_degree
    if dL % dK:
        raise ValueError("the subfield degree must divide the field degree")
    t1 = RealInterval.point(dL, prec)
    t2 = lehmer_prime(dK, prec) * dK
    t3 = RealInterval.point(Fraction(16, 100) * dK, prec) / lehmer_floor(dK, prec)
    return t1.max(t2).max(t3)


def matveev_C(d: int, n: int, prec: int = 256) -> RealInterval:
    """3 * 30^(n+4) * (n+1)^5.5 * d^2 * (1 + log d)."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    core = RealInterval.point(3 * 30 ** (n + 4) * (n + 1) ** 5 * d * d, prec)
    root = RealInterval.point(n + 1, prec).sqrt()
    return core * root * (1 + RealInterval.point(d, prec).log())
