import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intpoints.constants import (
    LANDAU_GRID,
    bg_constants,
    landau_log_values,
    landau_regulator_bound,
    matveev_C,
    rel_degree_const,
)
from intpoints.heights import lehmer_floor, lehmer_prime
from intpoints.numberfield import NumberField, field_invariants, torsion_bound
from intpoints.exactmath.poly import IntPolynomial


def f_K_direct(d, u, v, w, L, s):
    a = mpmath.mpf(2) ** (-v) * mpmath.pi ** (-mpmath.mpf(d) / 2) * mpmath.sqrt(L)
    return (mpmath.mpf(2) ** (-u) * w * a**s * mpmath.gamma(s / 2) ** u * mpmath.gamma(s) ** v
            * s ** (d + 1) * (s - 1) ** (1 - d))


@pytest.mark.parametrize("d,sig,L", [(2, (2, 0), 8), (5, (1, 2), 10**6), (20, (6, 7), 10**40), (40, (12, 14), 10**90)])
def test_landau_matches_direct_grid_minimum(d, sig, L):
    K = NumberField(None, d, sig, L, torsion_bound(d))
    with mpmath.workprec(300):
        vals = [f_K_direct(d, *sig, K.torsion_bound, mpmath.mpf(L), 2 - mpmath.mpf(t) / 1000)
                for t in range(LANDAU_GRID)]
        ref = min(vals)
        B = landau_regulator_bound(K, prec=128)
        assert mpmath.mpf(B.lo) <= ref * (1 + mpmath.mpf(10) ** -30)
        assert ref <= mpmath.mpf(B.hi) * (1 + mpmath.mpf(10) ** -30)


# (D, fundamental unit) of real quadratic fields
REAL_QUADRATIC = [
    (2, 1 + math.sqrt(2)),
    (3, 2 + math.sqrt(3)),
    (5, (1 + math.sqrt(5)) / 2),
    (6, 5 + 2 * math.sqrt(6)),
    (7, 8 + 3 * math.sqrt(7)),
    (13, (3 + math.sqrt(13)) / 2),
    (94, 2143295 + 221064 * math.sqrt(94)),
]


@pytest.mark.parametrize("D,eps", REAL_QUADRATIC)
def test_landau_bounds_true_quadratic_regulators(D, eps):
    K = field_invariants(IntPolynomial([-D, 0, 1]))
    assert math.log(eps) < float(landau_regulator_bound(K).upper)


@given(st.integers(1, 10**60), st.integers(1, 10**60))
def test_landau_monotone_in_discriminant_bound(L1, L2):
    lo, hi = sorted((L1, L2))
    K1 = NumberField(None, 20, (6, 7), lo, torsion_bound(20))
    K2 = NumberField(None, 20, (6, 7), hi, torsion_bound(20))
    assert landau_regulator_bound(K1, 64).lower <= landau_regulator_bound(K2, 64).upper


def test_landau_grid_is_unimodal_on_a_large_field():
    K = NumberField(None, 40, (12, 14), 10**90, torsion_bound(40))
    vals = [float(v.mid()) for v in landau_log_values(K, 64)]
    k = vals.index(min(vals))
    assert all(vals[i] >= vals[i + 1] - 1e-9 for i in range(k))
    assert all(vals[i] <= vals[i + 1] + 1e-9 for i in range(k, len(vals) - 1))


def test_bg_constants_small_example():
    # d = 2, r = 1: c1 = 1/2, c3 = c1 d / lehmer = 2/log 2, c4 = c3 r d = 4/log 2
    c = bg_constants(degree=2, unit_rank=1)
    assert c.c1.contains(Fraction(1, 2)) and c.c2.contains(Fraction(1, 2))
    assert abs(float(c.c3.mid()) - 2 / math.log(2)) < 1e-12
    assert abs(float(c.c4.mid()) - 4 / math.log(2)) < 1e-12
    assert c.c5.contains(Fraction(1, 2))


def test_bg_constants_closed_forms():
    for d, r in [(20, 12), (40, 21), (40, 25)]:
        c = bg_constants(degree=d, unit_rank=r)
        dk = float(lehmer_floor(d).mid())
        c1 = math.factorial(r) ** 2 / (2 ** (r - 1) * d**r)
        assert math.isclose(float(c.c1.mid()), c1, rel_tol=1e-12)
        assert math.isclose(float(c.c2.mid()), c1 * (d / dk) ** (r - 1), rel_tol=1e-9)
        assert math.isclose(float(c.c3.mid()), c1 * d**r / dk, rel_tol=1e-9)
        assert math.isclose(float(c.c4.mid()), c1 * d**r / dk * r * d, rel_tol=1e-9)
        assert math.isclose(float(c.c5.mid()), r ** (r + 1) / (2 * dk ** (r - 1)), rel_tol=1e-9)


@given(st.integers(2, 60), st.integers(1, 30))
def test_c2_c3_dominate_c1(d, r):
    c = bg_constants(degree=d, unit_rank=r, prec=128)
    assert c.c2.upper >= c.c1.lower and c.c3.upper >= c.c1.lower


@given(st.integers(1, 59), st.integers(1, 29))
def test_monotonicity(d, r):
    assert bg_constants(degree=d + 1, unit_rank=r, prec=64).c1.upper <= bg_constants(degree=d, unit_rank=r, prec=64).c1.lower
    assert matveev_C(d, r, 64).upper <= matveev_C(d + 1, r, 64).lower
    assert matveev_C(d, r, 64).upper <= matveev_C(d, r + 1, 64).lower


def test_rank_zero_gives_zero_constants():
    c = bg_constants(degree=2, unit_rank=0)
    assert c.c1.contains(0) and c.c5.contains(0)


@pytest.mark.parametrize("d,n", [(1, 1), (60, 25), (240, 51)])
def test_matveev_closed_form(d, n):
    ref = 3 * 30 ** (n + 4) * (n + 1) ** 5.5 * d**2 * (1 + math.log(d))
    assert math.isclose(float(matveev_C(d, n).mid()), ref, rel_tol=1e-12)


def test_relative_degree_constant():
    for dL, dK in [(60, 20), (240, 40), (4, 2)]:
        ref = max(dL, dK * float(lehmer_prime(dK).mid()), 0.16 * dK / float(lehmer_floor(dK).mid()))
        assert math.isclose(float(rel_degree_const(dL, dK).mid()), ref, rel_tol=1e-12)
    with pytest.raises(ValueError):
        rel_degree_const(7, 2)


def test_upper_ends_survive_higher_precision():
    K = NumberField(None, 40, (4, 18), 10**120, torsion_bound(40))
    assert landau_regulator_bound(K, 256).upper <= landau_regulator_bound(K, 128).upper
    for attr in ("c1", "c2", "c3", "c4", "c5"):
        lo = getattr(bg_constants(degree=40, unit_rank=21, prec=128), attr)
        hi = getattr(bg_constants(degree=40, unit_rank=21, prec=512), attr)
        assert hi.upper <= lo.upper
    assert matveev_C(240, 51, 512).upper <= matveev_C(240, 51, 128).upper
