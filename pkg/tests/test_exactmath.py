from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from intpoints.exactmath.interval import ComplexBox, RealInterval, gamma, mpf_to_fraction
from intpoints.exactmath.poly import (
    IntPolynomial,
    PolynomialError,
    poly_discriminant,
    poly_resultant,
    sturm_real_root_count,
)
from intpoints.exactmath.roots import isolate_roots, real_roots

X = sympy.Symbol("x")
small = st.integers(-20, 20)
fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)


def polys(min_deg=1, max_deg=5):
    return st.lists(small, min_size=min_deg + 1, max_size=max_deg + 1).filter(lambda c: c[-1] != 0)


def as_sympy(p: IntPolynomial):
    return sympy.Poly(list(reversed(p.coeffs)), X)


def sylvester_det(f: IntPolynomial, g: IntPolynomial) -> int:
    """Resultant straight from the Sylvester matrix (sympy.resultant's sign is unreliable)."""
    m, n = f.degree, g.degree
    fh, gh = list(reversed(f.coeffs)), list(reversed(g.coeffs))
    rows = [[0] * i + fh + [0] * (n - 1 - i) for i in range(n)]
    rows += [[0] * i + gh + [0] * (m - 1 - i) for i in range(m)]
    return int(sympy.Matrix(rows).det())


def encloses(iv: RealInterval, x: Fraction) -> bool:
    return mpf_to_fraction(iv.lo) <= x <= mpf_to_fraction(iv.hi)


# -- polynomials --------------------------------------------------------------


def test_trailing_zeros_trimmed():
    p = IntPolynomial([1, 2, 0, 0])
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert IntPolynomial([]).is_zero()


@given(polys(), polys())
def test_product_degree_and_leading_coefficient(a, b):
    p, q = IntPolynomial(a), IntPolynomial(b)
    r = p * q
    assert r.degree == p.degree + q.degree
    assert r.lc == p.lc * q.lc


@given(polys(), polys())
def test_resultant_matches_sylvester_oracle(a, b):
    p, q = IntPolynomial(a), IntPolynomial(b)
    assert poly_resultant(p, q) == sylvester_det(p, q)


@given(polys(1, 3), polys(1, 3), polys(1, 3))
def test_resultant_multiplicative(f, g, h):
    f, g, h = IntPolynomial(f), IntPolynomial(g), IntPolynomial(h)
    assert poly_resultant(f, g * h) == poly_resultant(f, g) * poly_resultant(f, h)


@given(polys(2, 6))
def test_discriminant_matches_oracle(a):
    p = IntPolynomial(a)
    assert poly_discriminant(p) == int(sympy.discriminant(as_sympy(p)))


@given(polys(1, 7))
def test_sturm_count_matches_oracle(a):
    p = IntPolynomial(a)
    assume(p.is_squarefree())
    assert sturm_real_root_count(p) == as_sympy(p).count_roots()


@given(polys(1, 6))
def test_isolated_boxes_contain_roots_and_are_disjoint(a):
    p = IntPolynomial(a)
    assume(p.is_squarefree())
    boxes = isolate_roots(p, 128)
    assert len(boxes) == p.degree
    for b in boxes:
        val = ComplexBox.point(0, 128)
        for c in reversed(p.coeffs):
            val = val * b + ComplexBox.point(c, 128)
        assert val.contains_zero()
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            assert not boxes[i].overlaps(boxes[j])
    assert len(real_roots(boxes)) == sturm_real_root_count(p)


def test_isolate_rejects_repeated_roots():
    with pytest.raises(PolynomialError):
        isolate_roots(IntPolynomial.from_roots([1, 1, 2]))


def test_quintic_of_the_worked_example_has_one_real_root():
    f = IntPolynomial([8, -16, 0, 0, 0, 1])
    assert sturm_real_root_count(f) == 3
    assert f.is_irreducible()
    assert poly_discriminant(f) == int(sympy.discriminant(X**5 - 16 * X + 8))


# -- intervals ----------------------------------------------------------------


@given(fractions, fractions, st.sampled_from(["+", "-", "*", "/"]))
def test_arithmetic_encloses_exact_rational(a, b, op):
    assume(op != "/" or b != 0)
    x, y = RealInterval.point(a, 64), RealInterval.point(b, 64)
    exact = {"+": a + b, "-": a - b, "*": a * b, "/": a / b if b else None}[op]
    got = {"+": lambda: x + y, "-": lambda: x - y, "*": lambda: x * y, "/": lambda: x / y}[op]()
    assert encloses(got, exact)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=10**6, max_denominator=1000))
def test_higher_precision_nests_inside_lower(a):
    for fn in (lambda v: v.sqrt(), lambda v: v.log(), lambda v: (v / 1000).exp(), lambda v: v.ipow(3) / 7):
        lo = fn(RealInterval.point(a, 64))
        hi = fn(RealInterval.point(a, 256))
        assert mpf_to_fraction(lo.lo) <= mpf_to_fraction(hi.lo)
        assert mpf_to_fraction(hi.hi) <= mpf_to_fraction(lo.hi)


@given(st.fractions(min_value=Fraction(1, 100), max_value=10**4, max_denominator=100))
def test_transcendentals_enclose_high_precision_value(a):
    with mpmath.workprec(600):
        ref = {
            "sqrt": mpmath.sqrt(mpmath.mpf(a.numerator) / a.denominator),
            "log": mpmath.log(mpmath.mpf(a.numerator) / a.denominator),
        }
    x = RealInterval.point(a, 128)
    for name, iv in (("sqrt", x.sqrt()), ("log", x.log())):
        with mpmath.workprec(600):
            assert mpmath.mpf(iv.lo) <= ref[name] <= mpmath.mpf(iv.hi)


@pytest.mark.parametrize("s", [Fraction(1, 3), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3)])
def test_gamma_encloses_reference(s):
    iv = gamma(RealInterval.point(s, 128))
    with mpmath.workprec(600):
        ref = mpmath.gamma(mpmath.mpf(s.numerator) / s.denominator)
        assert mpmath.mpf(iv.lo) <= ref <= mpmath.mpf(iv.hi)


def test_decimal_bounds_are_directed_at_many_digits():
    iv = RealInterval.point(2, 256).log() * RealInterval.point(10, 256).ipow(130)
    for digits in (5, 28, 40, 60):
        lo, hi = iv.decimal_bounds(digits)
        assert Fraction(lo) <= mpf_to_fraction(iv.lo)
        assert mpf_to_fraction(iv.hi) <= Fraction(hi)


def test_lower_never_exceeds_upper():
    iv = RealInterval(Fraction(1, 3), Fraction(1, 2), 64)
    assert iv.lower <= iv.upper
    assert iv.contains(Fraction(2, 5))
    assert not iv.contains(1)
