import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intpoints.boundengine import BoundError, pdw_resolve, thm92_terms
from intpoints.exactmath.interval import RealInterval

pos = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False)


def largest_fixed_point(a, b, c):
    """Largest y > 0 with y = a + b log(c + y), by bisection at high precision."""
    with mpmath.workprec(200):
        a, b, c = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(c)
        g = lambda y: a + b * mpmath.log(c + y) - y
        hi = mpmath.mpf(1)
        while g(hi) >= 0 or b / (c + hi) >= 1:
            hi *= 2
        lo = mpmath.mpf(0)
        if g(lo) < 0:
            return None  # no feasible y > 0 at all
        for _ in range(300):
            mid = (lo + hi) / 2
            if g(mid) >= 0:
                lo = mid
            else:
                hi = mid
        return hi


@given(pos, pos, pos)
def test_pdw_dominates_every_feasible_y(a, b, c):
    y = largest_fixed_point(a, b, c)
    bound = pdw_resolve(a, b, c)
    if y is not None:
        assert mpmath.mpf(y) <= mpmath.mpf(bound.hi)


def test_pdw_closed_form():
    v = pdw_resolve(3, 100, 7)
    assert math.isclose(float(v.mid()), 200 * math.log(100) + 6 + 7, rel_tol=1e-14)
    # log b clamped at zero for b < 1
    assert math.isclose(float(pdw_resolve(3, 0.5, 7).mid()), 13, rel_tol=1e-14)
    with pytest.raises(BoundError):
        pdw_resolve(0, 1, 1)


BASE = dict(N=4096, degrees=[40, 40, 40], ranks=[21, 21, 21], R=10**50, L_degree=240, h_alpha=0.6, h_kappa=0.7)


def bound(**kw):
    args = dict(BASE)
    args.update(kw)
    return thm92_terms(prec=128, **args)


@given(st.integers(1, 60), st.integers(1, 60), st.floats(0, 30), st.floats(0, 30), st.integers(1, 4))
def test_bound_monotone_in_every_input(r_exp, n_exp, hk, ha, lmul):
    ref = bound()["bound"]
    for kw in (
        dict(R=10 ** (50 + r_exp)),
        dict(N=4096 * 2**n_exp),
        dict(h_kappa=0.7 + hk),
        dict(h_alpha=0.6 + ha),
        dict(L_degree=240 * lmul),
    ):
        assert ref.lower <= bound(**kw)["bound"].upper, kw


@given(st.integers(1, 100), st.integers(1, 60), st.sampled_from([(20, 12), (40, 21), (40, 25), (2, 1)]))
def test_stage_ordering(r_exp, n_exp, field):
    d, r = field
    t = thm92_terms(N=2**n_exp, degrees=[d] * 3, ranks=[r] * 3, R=10**r_exp, L_degree=6 * d,
                    h_alpha=0.5, h_kappa=0.5, prec=128)
    assert t["H"].lower >= 1
    assert t["A1"].lower > t["H"].upper
    assert t["A2"].lower > t["A1"].upper
    # the closed form is the resolution of the fixed-point inequality written out, so they coincide
    assert t["bound"].upper >= t["pdw"].lower
    assert abs(t["bound"].mid() - t["pdw"].mid()) <= t["bound"].mid() * mpmath.mpf(10) ** -30


def test_doubled_precision_stays_below_reported():
    lo = bound()["bound"]
    hi = thm92_terms(prec=512, **BASE)["bound"]
    assert hi.upper <= lo.upper
    assert lo.lower <= hi.lower


def test_rejects_nonpositive_N():
    with pytest.raises(BoundError):
        bound(N=0)
