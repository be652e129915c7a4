"""Upper bounds for log|x| over one descent class.

The unit-equation constants A1, A2 are built from the field constants of
two subfields; the per-class bound combines them with the pair norms N,
the heights of alpha and kappa, and the log-resolution step
y <= a + b log(c + y)  =>  y <= 2 b log b + 2 a + c.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .constants import ConstantSet, bg_constants, matveev_C, rel_degree_const
from .exactmath.interval import RealInterval
from .heights import AlgebraicNumber, abs_log_height
from .numberfield import FieldTower, NumberField


class BoundError(ValueError):
    pass


def _iv(x, prec: int) -> RealInterval:
    return x if isinstance(x, RealInterval) else RealInterval.point(x, prec)


def pdw_resolve(a, b, c, prec: int = 256) -> RealInterval:
    """2 b log b + 2 a + c, with log b clamped at 0 when b < 1."""
    a, b, c = (_iv(v, prec) for v in (a, b, c))
    for name, v in (("a", a), ("b", b), ("c", c)):
        if not v.is_positive():
            raise BoundError(f"{name} must be positive")
    lb = b.log().max(0)
    return b * lb * 2 + a * 2 + c


@dataclass(frozen=True)
class SubfieldData:
    """What the unit-equation bound needs to know about one subfield."""

    degree: int
    unit_rank: int
    regulator: RealInterval
    constants: ConstantSet

    @classmethod
    def of(cls, K: NumberField, prec: int = 256) -> "SubfieldData":
        if K.regulator_bound is None:
            raise BoundError(f"missing regulator bound for {K.label or 'field'}")
        return cls(K.degree, K.unit_rank, K.regulator_bound, bg_constants(K, prec=prec))


def prop81_constants(H, K1: SubfieldData, K2: SubfieldData, L_degree: int,
                     prec: int = 256) -> tuple[RealInterval, RealInterval]:
    """(A1, A2) for nu1 eps1 + nu2 eps2 + nu3 eps3 = 0 with eps_i units of K_i."""
    H = _iv(H, prec)
    if H.lower < 1:
        raise BoundError("H must be at least 1")
    r1, r2 = K1.unit_rank, K2.unit_rank
    n = r1 + r2 + 1
    A1 = (H * 2 * matveev_C(L_degree, n, prec) * K1.constants.c1 * K2.constants.c1
          * rel_degree_const(L_degree, L_degree, prec)
          * rel_degree_const(L_degree, K1.degree, prec).ipow(r1)
          * rel_degree_const(L_degree, K2.degree, prec).ipow(r2)
          * K1.regulator * K2.regulator)
    c4 = K1.constants.c4.max(K2.constants.c4).max(1)
    A2 = H * 2 + A1 + A1 * (c4 * n).log()
    return A1, A2


@dataclass(frozen=True)
class BoundReport:
    label: str
    N: int
    h_alpha: RealInterval
    h_kappa: RealInterval
    Hstar: RealInterval
    A1star: RealInterval
    A2star: RealInterval
    A3star: RealInterval
    log_x_bound: RealInterval
    inputs: dict = field(default_factory=dict)

    @property
    def upper(self):
        return self.log_x_bound.upper


def thm92_terms(*, N: int, degrees: Sequence[int], ranks: Sequence[int], R, L_degree: int,
                h_alpha, h_kappa, prec: int = 256) -> dict:
    """All intermediate quantities of the per-class bound from plain inputs."""
    R = _iv(R, prec)
    h_alpha, h_kappa = _iv(h_alpha, prec), _iv(h_kappa, prec)
    if N < 1:
        raise BoundError("N must be a positive integer")
    r = max(ranks)
    csets = [bg_constants(degree=d, unit_rank=k, prec=prec) for d, k in zip(degrees, ranks)]

    def worst(attr):
        out = getattr(csets[0], attr)
        for c in csets[1:]:
            out = out.max(getattr(c, attr))
        return out

    c1, c4, c5 = worst("c1"), worst("c4"), worst("c5")
    log2 = RealInterval.point(2, prec).log()
    H = c5 * R + RealInterval.point(N, prec).log() / min(degrees) + h_kappa
    H = H.max(1)
    rel = rel_degree_const(L_degree, degrees[0], prec)
    for d in degrees[1:]:
        rel = rel.max(rel_degree_const(L_degree, d, prec))
    A1 = (H * 2 * matveev_C(L_degree, 2 * r + 1, prec) * c1.ipow(2)
          * rel_degree_const(L_degree, L_degree, prec) * rel.ipow(2 * r) * R.ipow(2))
    A2 = H * 2 + A1 + A1 * (c4.max(1) * (2 * r + 1)).log()
    A3 = H + log2 * 2 + h_kappa * 3 + h_alpha
    bound = A1 * 8 * (A1 * 4).log() + A2 * 8 + H + log2 * 20 + h_kappa * 13 + h_alpha * 19
    pdw = pdw_resolve(log2 * 9 + h_alpha * 9 + h_kappa * 5 + A2 * 4, A1 * 4, A3, prec)
    if bound.upper < pdw.lower:
        raise BoundError("closed-form bound fell below the log-resolution bound")
    return {"H": H, "A1": A1, "A2": A2, "A3": A3, "bound": bound, "pdw": pdw, "r": r}


def thm92_bound(tower: FieldTower, alpha: AlgebraicNumber | None = None, label: str = "",
                prec: int = 256) -> BoundReport:
    """Upper bound for log|x| over integers x with x - alpha = kappa xi^2."""
    for K in tower.K:
        if K.regulator_bound is None:
            raise BoundError(f"missing regulator bound for {K.label or 'field'}")
    R = tower.R
    alpha = alpha or tower.alphas[0]
    h_alpha = abs_log_height(alpha, prec)
    h_kappa = abs_log_height(tower.kappas[0], prec)
    degrees = [K.degree for K in tower.K]
    ranks = [K.unit_rank for K in tower.K]
    t = thm92_terms(N=tower.N, degrees=degrees, ranks=ranks, R=R, L_degree=tower.L.degree,
                    h_alpha=h_alpha, h_kappa=h_kappa, prec=prec)
    inputs = {
        "degrees": degrees,
        "unit_ranks": ranks,
        "L_degree": tower.L.degree,
        "L_degree_is_upper_bound": tower.L.degree_is_upper_bound,
        "regulator_provenance": [K.provenance for K in tower.K],
        "R": R,
    }
    return BoundReport(label, tower.N, h_alpha, h_kappa, t["H"], t["A1"], t["A2"], t["A3"], t["bound"], inputs)
