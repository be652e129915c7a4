"""Number fields given by a primitive element, and the field tower attached
to a descent class kappa of y^2 = a f(x).

Fields are described by the minimal polynomial of a primitive element.
For the tower fields the primitive element is a linear combination of
conjugates, so its characteristic polynomial is the product of the linear
factors over all conjugate tuples, computed in box arithmetic and rounded
to integers.  The irreducible factor through the chosen tuple is the
minimal polynomial.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .exactmath.interval import ComplexBox, IntervalDomainError, RealInterval, round_to_integer
from .exactmath.poly import IntPolynomial, poly_discriminant, poly_resultant, sturm_real_root_count
from .exactmath.roots import MAX_PRECISION, isolate_roots
from .heights import AlgebraicError, AlgebraicNumber, bivariate_resultant, field_element_box


class FieldError(ValueError):
    pass


def _totients(limit: int) -> list[int]:
    phi = list(range(limit + 1))
    for p in range(2, limit + 1):
        if phi[p] == p:
            for k in range(p, limit + 1, p):
                phi[k] -= phi[k] // p
    return phi


def torsion_bound(d: int) -> int:
    """max{m : phi(m) <= d}; phi(m) >= sqrt(m/2) keeps the search finite."""
    limit = 2 * d * d + 2
    phi = _totients(limit)
    return max(m for m in range(1, limit + 1) if phi[m] <= d)


@dataclass(frozen=True)
class NumberField:
    defining_poly: IntPolynomial | None
    degree: int
    signature: tuple[int, int] | None
    disc_bound: int | None
    torsion_bound: int
    regulator_bound: RealInterval | None = None
    provenance: str = "computed"
    label: str = ""
    degree_is_upper_bound: bool = False

    def __post_init__(self):
        if self.signature is not None:
            u, v = self.signature
            if u + 2 * v != self.degree:
                raise FieldError(f"signature {self.signature} does not match degree {self.degree}")

    @property
    def unit_rank(self) -> int:
        if self.signature is None:
            raise FieldError(f"unit rank of {self.label or 'field'} is unknown")
        u, v = self.signature
        return u + v - 1

    def with_regulator(self, R: RealInterval, provenance: str | None = None) -> "NumberField":
        kw = {"regulator_bound": R}
        if provenance is not None:
            kw["provenance"] = provenance
        return replace(self, **kw)

    @classmethod
    def supplied(cls, degree: int, signature: tuple[int, int], disc_bound: int | None = None,
                 regulator_bound: RealInterval | None = None, label: str = "") -> "NumberField":
        return cls(None, degree, tuple(signature), disc_bound, torsion_bound(degree), regulator_bound,
                   "supplied", label)


def field_invariants(theta: AlgebraicNumber | IntPolynomial, label: str = "") -> NumberField:
    f = theta.min_poly if isinstance(theta, AlgebraicNumber) else theta
    d = f.degree
    u = sturm_real_root_count(f)
    if (d - u) % 2:
        raise FieldError("real root count has the wrong parity")
    return NumberField(f, d, (u, (d - u) // 2), abs(poly_discriminant(f)), torsion_bound(d), label=label)


def _multipliers():
    k = 1
    while True:
        yield k
        yield -k
        k += 1


def primitive_combination(gens: Sequence[AlgebraicNumber], max_tries: int = 20) -> tuple[AlgebraicNumber, list[int]]:
    """theta = sum c_i gens_i generating Q(gens), and the multipliers c_i."""
    if not gens:
        raise FieldError("need at least one generator")
    theta = gens[0]
    mults = [1]
    for beta in gens[1:]:
        if beta.is_rational:
            mults.append(0)
            continue
        if theta.is_rational:
            theta, mults = beta, [0] * len(mults) + [1]
            continue
        f, g = theta.min_poly, beta.min_poly
        for c, _ in zip(_multipliers(), range(max_tries)):
            dg = g.degree
            gc = IntPolynomial([g.coeffs[i] * c ** (dg - i) for i in range(dg + 1)])

            def spec(k, gc=gc):
                return gc.compose(IntPolynomial((k, -1)))

            R = bivariate_resultant(f, spec, f.degree * dg)
            if R.is_squarefree():
                th, b, cc = theta, beta, c

                def target(p, th=th, b=b, cc=cc):
                    return th.box(p) + b.box(p) * cc

                try:
                    theta = AlgebraicNumber.select_root(R, target)
                except AlgebraicError as exc:
                    raise FieldError(f"factor selection failed ({exc}); supply the field data instead") from exc
                mults.append(c)
                break
        else:
            raise FieldError("no separating multiplier found; supply the field data instead")
    return theta, mults


def primitive_element(gens: Sequence[AlgebraicNumber]) -> AlgebraicNumber:
    return primitive_combination(gens)[0]


def element_norm(coeffs: Sequence, field: NumberField | IntPolynomial) -> Fraction:
    """Norm to Q of sum coeffs[i] theta^i, theta a root of the defining polynomial."""
    f = field.defining_poly if isinstance(field, NumberField) else field
    if f is None:
        raise FieldError("field has no defining polynomial")
    fr = [Fraction(c) for c in coeffs]
    if len(fr) > f.degree and any(fr[f.degree:]):
        raise FieldError("element is not reduced on the power basis")
    den = 1
    for c in fr:
        den = den * c.denominator // math.gcd(den, c.denominator)
    P = IntPolynomial([int(c * den) for c in fr])
    if not P.coeffs:
        return Fraction(0)
    res = poly_resultant(f, P)
    return Fraction(res, f.lc ** P.degree * den ** f.degree)


# ---------------------------------------------------------------------------
# towers


@dataclass(frozen=True)
class KappaConjugates:
    """Conjugates of alpha and kappa = sum kappa_coeffs[i] alpha^i as boxes."""

    f: IntPolynomial
    kappa_coeffs: tuple[Fraction, ...]
    prec: int
    roots: tuple[ComplexBox, ...]
    kappas: tuple[ComplexBox, ...]

    @classmethod
    def compute(cls, f: IntPolynomial, kappa_coeffs: Sequence, prec: int) -> "KappaConjugates":
        roots = tuple(isolate_roots(f, prec))
        kc = tuple(Fraction(c) for c in kappa_coeffs)
        kappas = tuple(field_element_box(r, kc) for r in roots)
        return cls(f, kc, prec, roots, kappas)


def _charpoly(values: Sequence[ComplexBox]) -> IntPolynomial:
    acc = [ComplexBox.point(1, values[0].prec)]
    for z in values:
        new = [ComplexBox.point(0, z.prec) for _ in range(len(acc) + 1)]
        for i, c in enumerate(acc):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * z
        acc = new
    return IntPolynomial([round_to_integer(c) for c in acc])


@dataclass(frozen=True)
class _Orbit:
    """Minimal polynomial of a tuple generator and the tuples in its orbit."""

    min_poly: IntPolynomial
    members: tuple
    multipliers: tuple[int, ...]


class _TupleFields:
    """Fields generated by coordinates of conjugate tuples.

    A tuple is (a, b, sign); the generator is
    r_a + c1 r_b + c2 * sign * sqrt(kappa_a kappa_b), with sign = 0 for the
    pair field Q(alpha_a, alpha_b).
    """

    def __init__(self, f: IntPolynomial, kappa_coeffs: Sequence, prec: int = 256):
        if f.lc != 1:
            raise FieldError("tower construction needs a monic polynomial")
        if f.degree < 3:
            raise FieldError("degree at least 3 is required")
        self.f = f
        self.kappa_coeffs = tuple(Fraction(c) for c in kappa_coeffs)
        if not any(self.kappa_coeffs):
            raise FieldError("kappa must be nonzero")
        self.prec = prec
        self._cache: dict = {}
        self._polys: dict = {}

    def _data(self, prec):
        if prec not in self._cache:
            self._cache[prec] = KappaConjugates.compute(self.f, self.kappa_coeffs, prec)
        return self._cache[prec]

    def _tuples(self, quadratic: bool):
        n = self.f.degree
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
        if not quadratic:
            return [(a, b, 0) for a, b in pairs]
        return [(a, b, s) for a, b in pairs for s in (1, -1)]

    def _values(self, tuples, mults, prec):
        data = self._data(prec)
        c1, c2 = mults
        roots = data.roots
        sq = {}
        out = []
        for a, b, s in tuples:
            z = roots[a] + roots[b] * c1
            if s:
                key = (min(a, b), max(a, b))
                if key not in sq:
                    sq[key] = (data.kappas[a] * data.kappas[b]).sqrt()
                z = z + sq[key] * (c2 * s)
            out.append(z)
        return out

    def _charpoly(self, quadratic: bool, mults):
        key = (quadratic, mults)
        if key in self._polys:
            return self._polys[key]
        tuples = self._tuples(quadratic)
        prec = self.prec
        while prec <= MAX_PRECISION:
            try:
                P = _charpoly(self._values(tuples, mults, prec))
                break
            except IntervalDomainError:
                prec *= 2
        else:
            raise FieldError("characteristic polynomial did not round to integers")
        self._polys[key] = P
        return P

    def orbit(self, a: int, b: int, quadratic: bool) -> _Orbit:
        tuples = self._tuples(quadratic)
        choices = [(c1, c2) for c1 in (1, -1, 2, -2, 3, -3) for c2 in ((1, 2, -1, 3) if quadratic else (0,))]
        for mults in choices:
            P = self._charpoly(quadratic, mults)
            if P.is_squarefree():
                break
        else:
            raise FieldError("no separating generator among the small multipliers")
        _, facs = P.factor()
        factors = [g if g.lc > 0 else -g for g, _ in facs if g.degree >= 1]
        start = (a, b, 1 if quadratic else 0)
        prec = self.prec
        while prec <= MAX_PRECISION:
            vals = self._values(tuples, mults, prec)
            owner = {}
            ok = True
            for t, z in zip(tuples, vals):
                hits = [i for i, g in enumerate(factors) if _eval_box(g, z).contains_zero()]
                if len(hits) != 1:
                    ok = False
                    break
                owner[t] = hits[0]
            if ok:
                g = factors[owner[start]]
                members = tuple(t for t in tuples if owner[t] == owner[start])
                if len(members) != g.degree:
                    raise FieldError("orbit size does not match the factor degree")
                return _Orbit(g, members, mults)
            prec *= 2
        raise FieldError("could not attribute conjugate tuples to factors")

    def norm_of_difference(self, i: int, j: int, orbit: _Orbit) -> int:
        """Norm from Q(alpha_i, alpha_j) of kappa_i (alpha_i - alpha_j), exactly."""
        prec = self.prec
        while prec <= MAX_PRECISION:
            data = self._data(prec)
            acc = ComplexBox.point(1, prec)
            for a, b, _ in orbit.members:
                acc = acc * data.kappas[a] * (data.roots[a] - data.roots[b])
            try:
                return round_to_integer(acc)
            except IntervalDomainError:
                prec *= 2
        raise FieldError("norm did not round to an integer")


def _eval_box(g: IntPolynomial, z: ComplexBox) -> ComplexBox:
    acc = ComplexBox.point(0, z.prec)
    for c in reversed(g.coeffs):
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class FieldTower:
    f: IntPolynomial
    kappa_coeffs: tuple[Fraction, ...]
    alphas: tuple[AlgebraicNumber, ...]
    kappas: tuple[AlgebraicNumber, ...]
    K: tuple[NumberField, NumberField, NumberField]
    L: NumberField
    pair_norms: dict = field(default_factory=dict)
    generators: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return max(k.unit_rank for k in self.K)

    @property
    def R(self) -> RealInterval | None:
        if any(k.regulator_bound is None for k in self.K):
            return None
        out = self.K[0].regulator_bound
        for k in self.K[1:]:
            out = out.max(k.regulator_bound)
        return out

    @property
    def N(self) -> int:
        """max over ordered pairs of |Norm(kappa_i (alpha_i - alpha_j))|^2."""
        return max(v * v for v in self.pair_norms.values())

    def with_fields(self, K: Sequence[NumberField]) -> "FieldTower":
        return replace(self, K=tuple(K))


TRIPLE_PAIRS = ((0, 1), (0, 2), (1, 2))


def build_tower(f: IntPolynomial, kappa_coeffs: Sequence, prec: int = 256,
                supplied: Sequence[NumberField] | None = None) -> FieldTower:
    """The fields K_1, K_2, K_3 and (the degree of) L for one descent class.

    Conjugates alpha_1, alpha_2, alpha_3 are the first three roots of f in
    (real, imaginary) order.  When `supplied` is given, those field records
    replace the computed K_i (the pair norms are still computed exactly).
    """
    tf = _TupleFields(f, kappa_coeffs, prec)
    data = tf._data(prec)
    n = f.degree
    alphas = tuple(AlgebraicNumber(f, data.roots[i]) for i in range(3))
    kap = []
    for i in range(3):
        kap.append(AlgebraicNumber.from_field_element(alphas[i], tf.kappa_coeffs))
    norms = {}
    pair_orbits = {}
    for i, j in itertools.permutations(range(3), 2):
        orb = tf.orbit(i, j, quadratic=False)
        pair_orbits[(i, j)] = orb
        norms[(i, j)] = tf.norm_of_difference(i, j, orb)
    gens = {}
    if supplied is None:
        Ks = []
        for idx, (a, b) in enumerate(TRIPLE_PAIRS):
            orb = tf.orbit(a, b, quadratic=True)
            gens[f"K{idx + 1}"] = orb.multipliers
            Ks.append(field_invariants(orb.min_poly, label=f"K{idx + 1}"))
    else:
        Ks = list(supplied)
        if len(Ks) != 3:
            raise FieldError("three supplied fields are required")
    # [L:Q] <= [Q(a1,a2):Q] (n - 2) [K1:Q(a1,a2)] [K2:Q(a1,a3)]
    d12 = pair_orbits[(0, 1)].min_poly.degree
    d13 = pair_orbits[(0, 2)].min_poly.degree
    e1 = Ks[0].degree // d12
    e2 = Ks[1].degree // d13
    dL = d12 * (n - 2) * e1 * e2
    L = NumberField(None, dL, None, None, torsion_bound(dL), provenance="degree-bound", label="L",
                    degree_is_upper_bound=True)
    return FieldTower(f, tf.kappa_coeffs, alphas, tuple(kap), tuple(Ks), L, norms, gens)
