import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from intpoints.descent import mul_mod
from intpoints.exactmath.poly import IntPolynomial
from intpoints.numberfield import (
    FieldError,
    NumberField,
    build_tower,
    element_norm,
    field_invariants,
    torsion_bound,
)

QUINTIC = IntPolynomial([8, -16, 0, 0, 0, 1])


def field_disc(poly_high):
    x = sympy.Symbol("x")
    K = sympy.QQ.algebraic_field(sympy.CRootOf(sympy.Poly(poly_high, x), 0))
    return int(K.discriminant())


@pytest.mark.parametrize("D", [2, 3, 5, 6, 7, 13, -1, -3, -5, -23])
def test_quadratic_invariants(D):
    K = field_invariants(IntPolynomial([-D, 0, 1]))
    assert K.degree == 2
    assert K.signature == ((2, 0) if D > 0 else (0, 1))
    assert K.unit_rank == (1 if D > 0 else 0)
    true_disc = D if D % 4 == 1 else 4 * D
    assert K.disc_bound % abs(true_disc) == 0


@pytest.mark.parametrize("high", [[1, 0, 0, -2], [1, 0, -3, 1], [1, -1, -2, 1], [1, 0, 1, 1]])
def test_cubic_disc_bound_divisible_by_field_discriminant(high):
    K = field_invariants(IntPolynomial(list(reversed(high))))
    assert K.disc_bound % abs(field_disc(high)) == 0
    u, v = K.signature
    assert u + 2 * v == 3 and K.unit_rank == u + v - 1


@pytest.mark.parametrize("d", [1, 2, 3, 4, 6, 12, 20, 40])
def test_torsion_bound_is_max_m_with_small_totient(d):
    brute = max(m for m in range(1, 10 * d * d + 10) if sympy.totient(m) <= d)
    assert torsion_bound(d) == brute


def test_signature_must_match_degree():
    with pytest.raises(FieldError):
        NumberField(None, 5, (2, 2), None, 2)


def _rand_elem(rng, n):
    return tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n))


@given(st.integers(0, 10**9))
def test_norm_is_multiplicative(seed):
    rng = random.Random(seed)
    a, b = _rand_elem(rng, 5), _rand_elem(rng, 5)
    na, nb = element_norm(a, QUINTIC), element_norm(b, QUINTIC)
    assert element_norm(mul_mod(a, b, QUINTIC), QUINTIC) == na * nb


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_quadratic_norm_closed_form(a, b):
    assert element_norm((a, b), IntPolynomial([-7, 0, 1])) == a * a - 7 * b * b


@pytest.mark.parametrize("kappa", [[1], [0, -1], [2, -1]])
def test_three_fields_of_the_worked_example_share_invariants(kappa):
    tower = build_tower(QUINTIC, kappa, prec=128)
    invs = {(K.degree, K.signature, K.unit_rank) for K in tower.K}
    assert len(invs) == 1
    (d, (u, v), r), = invs
    assert u + 2 * v == d and r == u + v - 1
    # compositum degree divides [Q(a1):Q] [Q(a1,a2):Q(a1)] [quadratic] = 5 * 4 * 2
    assert 40 % d == 0
    assert tower.L.degree_is_upper_bound
    assert tower.N >= 1
