"""Certificates: a self-contained record of every quantity behind a verdict,
and an independent checker that re-evaluates the bound arithmetic."""

from __future__ import annotations

import hashlib
from fractions import Fraction

import yaml

from .. import __version__
from ..boundengine import thm92_terms
from ..exactmath.interval import RealInterval, mpf_to_fraction
from ..lattice import hnf, shortest_vector
from ..sieve import height_lower_bound
from .config import emit, parse_rational

CERT_SCHEMA = "intpoints-certificate/1"
DIGITS = 40
# relative slack allowed between a stored decimal and the recomputed interval
_SLACK = Fraction(1, 10**25)


def _iv_dict(iv: RealInterval) -> dict:
    lo, hi = iv.decimal_bounds(DIGITS)
    return {"lower": lo, "upper": hi}


def _iv(d, prec: int) -> RealInterval:
    lo = RealInterval.point(Fraction(d["lower"]), prec)
    hi = RealInterval.point(Fraction(d["upper"]), prec)
    return RealInterval(lo.lo, hi.hi, prec)


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def build_certificate(problem, rows, result, prec: int) -> dict:
    from .core import resolve_mus

    cfg = problem.config
    mus = resolve_mus(problem, prec)
    supplied = []
    supplied.append({"item": "Mordell-Weil basis, rank and torsion", "provenance": cfg.provenance["mordell_weil"]})
    supplied.append({"item": "known points", "provenance": cfg.provenance["known_points"]})
    supplied.append({"item": "height constants mu1, mu2, mu3, c_h, s_h", "provenance": cfg.provenance["heights"]})
    if cfg.bootstrap_B is not None:
        supplied.append({"item": f"bootstrap B = {cfg.bootstrap_B}", "provenance": cfg.bootstrap_assertion})
    if any(r.R_provenance == "supplied" for r in rows):
        supplied.append({"item": "regulator bounds", "provenance": cfg.provenance.get("regulators", "supplied")})
    state = result.state
    lb = result.lower
    sv = shortest_vector(state.lattice)
    cert = {
        "schema": CERT_SCHEMA,
        "tool": f"intpoints {__version__}",
        "precision": prec,
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "model": {
            "a": problem.model.a,
            "f": list(problem.model.f.coeffs),
            "x": f"{problem.model.lam}*X + {problem.model.shift_x}",
            "y": f"{problem.model.mu}*Y + {problem.model.shift_y}",
        },
        "supplied": supplied,
        "kappa_table": [
            {
                "coset": r.coset,
                "kappa": [_frac_str(c) for c in r.kappa],
                "field_degrees": r.degrees,
                "unit_ranks": r.unit_ranks,
                "L_degree_upper": r.L_degree,
                "N": str(r.N),
                "h_alpha": _iv_dict(r.h_alpha),
                "h_kappa": _iv_dict(r.h_kappa),
                "R_upper": r.R.decimal_bounds(DIGITS)[1],
                "R_provenance": r.R_provenance,
                "log_x_upper": r.log_x_bound.decimal_bounds(DIGITS)[1],
            }
            for r in rows
        ],
        "sieve": {
            "start": {"B": cfg.bootstrap_B, "justification": "asserted" if cfg.bootstrap_B else "torsion-free"},
            "primes_up_to": result.state.cursor,
            "counters": state.counter_dict,
            "accepted": [[q, str(g)] for q, g in state.accepted],
            "skipped": len(state.skipped),
            "index": str(state.index),
            "lattice": [[str(c) for c in row] for row in state.lattice.basis],
            "m_squared_lower": _frac_str(sv.norm_squared_lower),
            "minimum_exact": sv.exact,
        },
        "heights": {
            "mu1": _iv_dict(mus["mu1"]),
            "mu2": _iv_dict(mus["mu2"]),
            "mu3": _iv_dict(mus["mu3"]),
            "c_h": _iv_dict(mus["c_h"]),
            "s_h": _iv_dict(mus["s_h"]),
        },
        "lower_bound": {
            "status": lb.status,
            "height_lower": None if lb.height is None else lb.height.decimal_bounds(DIGITS)[0],
            "log_x_lower": None if lb.log_x is None else lb.log_x.decimal_bounds(DIGITS)[0],
        },
        "verdict": result.verdict,
    }
    return cert


def dump(cert: dict) -> str:
    return yaml.safe_dump(cert, sort_keys=False, default_flow_style=None, width=120)


def load(path: str) -> dict:
    with open(path) as fh:
        return yaml.safe_load(fh)


def _close_upper(stored: Fraction, iv: RealInterval) -> bool:
    """stored is a faithful upper bound: not below the enclosure, not far above it."""
    lo = Fraction(iv.decimal_bounds(DIGITS + 5)[0])
    hi = Fraction(iv.decimal_bounds(DIGITS + 5)[1])
    return stored >= lo and stored <= hi + abs(hi) * _SLACK


def _close_lower(stored: Fraction, iv: RealInterval) -> bool:
    """stored agrees with the recomputed lower bound up to decimal rounding."""
    lo = Fraction(iv.decimal_bounds(DIGITS + 5)[0])
    hi = Fraction(iv.decimal_bounds(DIGITS + 5)[1])
    return lo - abs(lo) * _SLACK <= stored <= hi + abs(hi) * _SLACK


def verify_certificate(cert: dict) -> tuple[bool, list[str]]:
    """Re-evaluate the bound and lower-bound arithmetic from the certificate alone."""
    failures: list[str] = []
    if cert.get("schema") != CERT_SCHEMA:
        return False, ["unknown certificate schema"]
    prec = int(cert.get("precision", 256))
    if "config" in cert and "config_sha256" in cert:
        text = yaml.safe_dump(cert["config"], sort_keys=False, default_flow_style=None, width=100)
        if hashlib.sha256(text.encode()).hexdigest() != cert["config_sha256"]:
            failures.append("config echo does not match its hash")
    uppers = []
    for row in cert.get("kappa_table", []):
        name = f"row {row.get('coset')}"
        try:
            t = thm92_terms(
                N=int(row["N"]),
                degrees=list(row["field_degrees"]),
                ranks=list(row["unit_ranks"]),
                R=RealInterval.point(Fraction(row["R_upper"]), prec),
                L_degree=int(row["L_degree_upper"]),
                h_alpha=_iv(row["h_alpha"], prec),
                h_kappa=_iv(row["h_kappa"], prec),
                prec=prec,
            )
        except Exception as exc:  # malformed row
            failures.append(f"{name}: cannot recompute ({exc})")
            continue
        stored = Fraction(row["log_x_upper"])
        if not _close_upper(stored, t["bound"]):
            failures.append(f"{name}: stored log-x bound {row['log_x_upper']} disagrees with the recomputation")
        uppers.append(mpf_to_fraction(t["bound"].hi))
    sv = cert.get("sieve", {})
    hts = cert.get("heights", {})
    try:
        mus = {k: _iv(hts[k], prec) for k in ("mu1", "mu2", "mu3", "c_h", "s_h")}
    except Exception as exc:
        return False, failures + [f"heights block unreadable ({exc})"]
    # mu1 and mu3 enter as lower bounds, mu2 as an upper bound
    mu1 = RealInterval(mus["mu1"].lo, mus["mu1"].lo, prec)
    mu2 = RealInterval(mus["mu2"].hi, mus["mu2"].hi, prec)
    mu3 = RealInterval(mus["mu3"].lo, mus["mu3"].lo, prec)
    c_h, s_h = mus["c_h"], mus["s_h"]
    m2 = parse_rational(sv["m_squared_lower"]) if "m_squared_lower" in sv else None
    if "lattice" in sv and sv["lattice"] is not None:
        basis = [[int(c) for c in row] for row in sv["lattice"]]
        L = hnf(basis)
        if [list(r) for r in L.basis] != basis:
            failures.append("sieve lattice is not in Hermite normal form")
        if str(L.det) != str(sv.get("index")):
            failures.append("sieve index does not match the lattice determinant")
        check = shortest_vector(L)
        if m2 is not None and m2 > check.norm_squared_lower:
            failures.append("stored lattice minimum exceeds the recomputed one")
    if m2 is None:
        failures.append("missing lattice minimum")
        return False, failures
    m = RealInterval.point(m2, prec).sqrt()
    lb = height_lower_bound(m, mu1, mu2, mu3, c_h, s_h, prec)
    stored_lb = cert.get("lower_bound", {})
    if lb.status != stored_lb.get("status"):
        failures.append(f"lower-bound status {stored_lb.get('status')} should be {lb.status}")
    elif lb.status == "ok":
        for key, iv in (("height_lower", lb.height), ("log_x_lower", lb.log_x)):
            stored = Fraction(stored_lb[key])
            if not _close_lower(stored, iv):
                failures.append(f"stored {key} {stored_lb[key]} is not supported by the recomputation")
    verdict = cert.get("verdict")
    # the verdict rests on the recomputed lower bound, never on the stored decimal
    if uppers and lb.status == "ok":
        expected = "CONTRADICTED" if mpf_to_fraction(lb.log_x.lo) > max(uppers) else "EXHAUSTED"
    else:
        expected = "EXHAUSTED"
    if verdict != expected:
        failures.append(f"verdict {verdict} does not follow from the recorded bounds (expected {expected})")
    return not failures, failures
