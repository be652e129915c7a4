"""Certified complex root isolation for integer polynomials.

Approximations come from mpmath's polyroots; certification uses the
Weierstrass corrections W_i = f(z_i) / (lc * prod_{j != i} (z_i - z_j)).
The discs |z - z_i| <= n |W_i| cover all roots and every connected
component of k discs holds exactly k roots, so pairwise disjoint discs
isolate one root each.  A disc centred on the real axis that isolates a
root of a real polynomial isolates a real root (its conjugate lies in the
same disc).
"""

from __future__ import annotations

import mpmath

from .interval import ComplexBox, RealInterval
from .poly import IntPolynomial, PolynomialError


class RootIsolationError(RuntimeError):
    pass


MAX_PRECISION = 1 << 15


def _approximate_roots(f: IntPolynomial, prec: int) -> list:
    coeffs = f.high()
    extra = 2 * prec + 20 * f.degree
    steps = 100 + 10 * f.degree
    for _ in range(4):
        try:
            with mpmath.workprec(prec):
                return list(mpmath.polyroots(coeffs, maxsteps=steps, extraprec=extra))
        except mpmath.libmp.NoConvergence:
            extra *= 2
            steps *= 2
    raise RootIsolationError("root approximation did not converge")


def _box_eval(f: IntPolynomial, z: ComplexBox) -> ComplexBox:
    acc = ComplexBox.point(0, z.prec)
    for c in reversed(f.coeffs):
        acc = acc * z + c
    return acc


def _certify(f: IntPolynomial, centers: list, prec: int):
    n = f.degree
    pts = [ComplexBox(RealInterval.point(c.real, prec), RealInterval.point(c.imag, prec)) for c in centers]
    lc = abs(f.lc)
    radii = []
    for i, zi in enumerate(pts):
        num = _box_eval(f, zi).abs()
        den = RealInterval.point(lc, prec)
        for j, zj in enumerate(pts):
            if j != i:
                den = den * (zi - zj).abs()
        if not den.is_positive():
            return None
        radii.append((num / den) * n)
    for i in range(n):
        for j in range(i + 1, n):
            dist = (pts[i] - pts[j]).abs()
            if not (radii[i] + radii[j]).certainly_lt(dist):
                return None
    return [r.upper for r in radii]


def isolate_roots(f: IntPolynomial, precision: int = 256) -> list[ComplexBox]:
    """Disjoint boxes, one per complex root, sorted by (real, imag) of centers."""
    if f.degree < 1:
        return []
    if not f.is_squarefree():
        raise PolynomialError("isolate_roots needs a squarefree polynomial")
    real_poly = True
    prec = max(precision, 64)
    while prec <= MAX_PRECISION:
        approx = _approximate_roots(f, prec + 32)
        centers = []
        with mpmath.workprec(prec + 32):
            for z in approx:
                z = mpmath.mpc(z)
                centers.append(z)
        # snap near-real roots onto the axis, then certify
        snapped = []
        with mpmath.workprec(prec + 32):
            tol = mpmath.mpf(2) ** (-(prec // 2))
            for z in centers:
                if real_poly and abs(z.imag) <= tol * max(1, abs(z)):
                    snapped.append(mpmath.mpc(z.real, 0))
                else:
                    snapped.append(z)
        radii = _certify(f, snapped, prec)
        if radii is not None:
            boxes = []
            for z, r in zip(snapped, radii):
                if z.imag == 0:
                    re = RealInterval.point(z.real, prec) + RealInterval(-r, r, prec)
                    box = ComplexBox(re, RealInterval.point(0, prec))
                else:
                    box = ComplexBox.disc(z, r, prec)
                boxes.append((z.real, z.imag, box))
            boxes.sort(key=lambda t: (t[0], t[1]))
            return [b for _, _, b in boxes]
        prec *= 2
    raise RootIsolationError(f"could not certify disjoint root boxes up to {MAX_PRECISION} bits")


def real_roots(boxes: list[ComplexBox]) -> list[ComplexBox]:
    return [b for b in boxes if b.is_real()]
