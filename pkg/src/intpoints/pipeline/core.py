"""End-to-end orchestration: model, descent classes, bounds, sieve, verdict."""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .. import __version__
from ..boundengine import thm92_bound
from ..constants import landau_regulator_bound
from ..descent import CosetRep, PointOrbit, kappa_set_odd, normalize_model
from ..exactmath.interval import RealInterval
from ..exactmath.poly import IntPolynomial, poly_discriminant
from ..numberfield import build_tower
from ..sieve import (
    SieveConfig,
    SieveProblem,
    SieveState,
    bootstrap,
    load_checkpoint,
    run as sieve_run,
)
from .config import ConfigError, ProblemConfig, parse_rational, parse_real
from .rational_divisors import verify_known_points

log = logging.getLogger("intpoints")


class PipelineError(RuntimeError):
    def __init__(self, module: str, context: str, message: str):
        super().__init__(f"[{module}] {context}: {message}")
        self.module = module
        self.context = context


# ---------------------------------------------------------------------------
# models and inputs


@dataclass
class Problem:
    config: ProblemConfig
    model: object  # TwistModel
    sieve_F: tuple[int, ...]
    basis_pairs: list  # Mumford pairs on Y^2 = a f(x), Y = a y
    basis_points: list  # rational points of the basis on a y^2 = f(x), or None
    known: list  # (x, Y) on the sieve model, or None for infinity
    W: list[tuple[int, ...]]


def _mumford_of_points(points, a: int):
    """Mumford pair of sum (P_i - oo) for rational points with distinct x."""
    xs = [Fraction(x) for x, _ in points]
    ys = [Fraction(y) * a for _, y in points]
    if len(set(xs)) != len(xs):
        raise ConfigError("basis divisors given by points need distinct x-coordinates")
    u = [Fraction(1)]
    for x in xs:
        u = [(-x) * u[0]] + [u[i - 1] - x * u[i] for i in range(1, len(u))] + [u[-1]]
    # Lagrange interpolation for v
    v = [Fraction(0)] * len(xs)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]
        den = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [(-xj) * basis[0]] + [basis[k - 1] - xj * basis[k] for k in range(1, len(basis))] + [basis[-1]]
            den *= xi - xj
        for k, c in enumerate(basis):
            v[k] += yi * c / den
    while v and v[-1] == 0:
        v.pop()
    return u, v


def prepare(config: ProblemConfig) -> Problem:
    c = config.curve
    try:
        model = normalize_model(IntPolynomial(c["F"]), A=c["A"], B=c["B"])
    except Exception as exc:
        raise PipelineError("descent", "normalize_model", str(exc)) from exc
    a, f = model.a, model.f
    if f.degree != 5:
        raise PipelineError("pipeline", "model", "the sieve needs a quintic model")
    sieve_F = tuple(a * co for co in f.coeffs)
    pairs, pts = [], []
    for D in config.basis:
        if "points" in D:
            P = [(parse_rational(x), parse_rational(y)) for x, y in D["points"]]
            for x, y in P:
                if a * y * y != f.eval_fraction(x):
                    raise ConfigError(f"basis point {(x, y)} is not on the normalised model")
            pairs.append(_mumford_of_points(P, a))
            pts.append(P)
        else:
            pairs.append(([parse_rational(v) for v in D["u"]], [parse_rational(v) * a for v in D["v"]]))
            pts.append(None)
    known, W = [], []
    for p in config.known_points:
        W.append(tuple(p.coords))
        known.append(None if p.at_infinity else (parse_rational(p.x), parse_rational(p.y) * a))
    return Problem(config, model, sieve_F, pairs, pts, known, W)


def check_known_points(problem: Problem) -> list[str]:
    """Exact check over Q that every known point has the recorded coordinates."""
    return verify_known_points(problem.sieve_F, problem.basis_pairs, problem.known, problem.W)


def coset_representatives(problem: Problem) -> list[CosetRep]:
    cfg = problem.config
    if cfg.cosets != "from_basis":
        reps = []
        for entry in cfg.cosets:
            orbits = tuple(PointOrbit(IntPolynomial(o["gamma_poly"]), int(o.get("d", 1))) for o in entry["points"])
            reps.append(CosetRep(orbits, entry.get("label", "")))
        return reps
    if any(p is None for p in problem.basis_points):
        raise ConfigError("cosets: from_basis needs every basis divisor given by rational points")
    reps = []
    r = cfg.rank
    for n in itertools.product((0, 1), repeat=r):
        used = [i for i in range(r) if n[i]]
        orbits = []
        xs = set()
        for i in used:
            for x, y in problem.basis_points[i]:
                if y == 0:
                    raise ConfigError("coset representatives need points with y != 0")
                if x in xs:
                    raise ConfigError("coset representative repeats a point; supply cosets explicitly")
                xs.add(x)
                orbits.append(PointOrbit.rational(x))
        label = "+".join(f"D{i + 1}" for i in used) or "0"
        reps.append(CosetRep(tuple(orbits), label))
    reps.sort(key=lambda rep: (len(rep.orbits), rep.label))
    return reps


def resolve_mus(problem: Problem, prec: int) -> dict:
    """mu1 (lower), mu2 (upper), mu3 (lower), c_h, s_h as intervals."""
    h = problem.config.heights
    out = {"mu1": parse_real(h["mu1"], prec, "heights.mu1"),
           "c_h": parse_real(h.get("c_h", 0), prec, "heights.c_h"),
           "s_h": parse_real(h.get("s_h", 1), prec, "heights.s_h")}
    M = None
    if "pairing_matrix" in h:
        M = [[parse_rational(v) for v in row] for row in h["pairing_matrix"]]
    out["mu3"] = parse_real(h["mu3"], prec, "heights.mu3") if "mu3" in h else mu3_from_matrix(M, prec)
    if "mu2" in h:
        out["mu2"] = parse_real(h["mu2"], prec, "heights.mu2")
    else:
        best = max(sum(w[i] * M[i][j] * w[j] for i in range(len(w)) for j in range(len(w))) for w in problem.W)
        out["mu2"] = RealInterval.point(best, prec).sqrt()
    return out


def _psd(M) -> bool:
    n = len(M)
    for k in range(1, n + 1):
        for idx in itertools.combinations(range(n), k):
            sub = sympy.Matrix([[M[i][j] for j in idx] for i in idx])
            if sub.det() < 0:
                return False
    return True


def mu3_from_matrix(M, prec: int = 256) -> RealInterval:
    """Certified lower bound for min sqrt(lambda_j) of a symmetric rational matrix."""
    n = len(M)
    lam = float(min(np.linalg.eigvalsh(np.array([[float(v) for v in row] for row in M]))))
    if lam <= 0:
        raise ConfigError("pairing matrix must be positive definite")
    candidates = [Fraction(lam).limit_denominator(10**12)]
    candidates += [Fraction(lam) * (1 - Fraction(1, 10**k)) for k in (12, 9, 6, 3)]
    for t in candidates:
        shifted = [[M[i][j] - (t if i == j else 0) for j in range(n)] for i in range(n)]
        if t > 0 and _psd([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in shifted]):
            s = RealInterval.point(t, prec).sqrt()
            return RealInterval(s.lo, s.lo, prec)
    raise ConfigError("could not certify the smallest eigenvalue of the pairing matrix")


# ---------------------------------------------------------------------------
# bounds


@dataclass
class KappaRow:
    coset: str
    kappa: tuple[Fraction, ...]
    degrees: list[int]
    unit_ranks: list[int]
    L_degree: int
    N: int
    h_alpha: RealInterval
    h_kappa: RealInterval
    R: RealInterval
    R_provenance: str
    log_x_bound: RealInterval
    seconds: float


def compute_bounds(problem: Problem, prec: int = 256, regulators: dict | None = None,
                   progress=None) -> list[KappaRow]:
    cfg = problem.config
    regs = dict(cfg.regulators)
    regs.update(regulators or {})
    reps = coset_representatives(problem)
    classes = kappa_set_odd(reps, problem.model.a, problem.model.f, twist_parity=cfg.twist_parity)
    rows = []
    for kc in classes:
        t0 = time.time()
        ctx = f"kappa class {kc.label or '0'}"
        try:
            tower = build_tower(problem.model.f, [int(c) for c in kc.kappa], prec=prec)
            if kc.label in regs:
                R = parse_real(regs[kc.label], prec, f"regulators.{kc.label}")
                prov = "supplied"
                Ks = [K.with_regulator(R, "supplied") for K in tower.K]
            else:
                Ks = []
                for K in tower.K:
                    Ks.append(K.with_regulator(landau_regulator_bound(K, prec=min(prec, 128)), "landau"))
                prov = "landau"
            tower = tower.with_fields(Ks)
            rep = thm92_bound(tower, label=kc.label, prec=prec)
        except Exception as exc:
            raise PipelineError("boundengine", ctx, str(exc)) from exc
        row = KappaRow(kc.label or "0", kc.kappa, [K.degree for K in tower.K], [K.unit_rank for K in tower.K],
                       tower.L.degree, tower.N, rep.h_alpha, rep.h_kappa, tower.R, prov, rep.log_x_bound,
                       time.time() - t0)
        rows.append(row)
        if progress:
            progress(f"{ctx}: unit ranks {row.unit_ranks}, log x <= {rep.log_x_bound.decimal_bounds(4)[1]}")
    return rows


# ---------------------------------------------------------------------------
# sieve


def sieve_config(problem: Problem, primes_up_to: int | None = None) -> SieveConfig:
    s = dict(problem.config.sieve)
    kw = {}
    for k in ("exponent", "multiplier"):
        if k in s:
            kw[k] = float(parse_rational(s[k]))
    for k in ("smooth_bound", "primes_up_to", "prime_start", "lower_bound_every", "workers"):
        if s.get(k) is not None:
            kw[k] = int(s[k])
    if primes_up_to is not None:
        kw["primes_up_to"] = primes_up_to
    kw["B"] = problem.config.bootstrap_B
    kw["torsion_free"] = problem.config.torsion_free
    return SieveConfig(**kw)


def sieve_problem(problem: Problem) -> SieveProblem:
    bad = tuple(int(p) for p in problem.config.sieve.get("bad_primes", []))
    return SieveProblem(problem.sieve_F, tuple((tuple(u), tuple(v)) for u, v in problem.basis_pairs),
                        tuple(problem.W), bad)


def initial_state(problem: Problem) -> SieveState:
    cfg = problem.config
    return bootstrap(cfg.rank, cfg.bootstrap_B, cfg.torsion_free, asserted=bool(cfg.bootstrap_assertion), W=problem.W)


def run_sieve(problem: Problem, target_upper=None, primes_up_to: int | None = None, checkpoint: str | None = None,
              resume: bool = False, prec: int = 256, progress=None):
    scfg = sieve_config(problem, primes_up_to)
    state = initial_state(problem)
    if resume and checkpoint:
        try:
            state = load_checkpoint(checkpoint, scfg)
        except FileNotFoundError:
            pass
    mus = resolve_mus(problem, prec)
    return sieve_run(state, sieve_problem(problem), scfg, target_upper=target_upper,
                     mu=(mus["mu1"], mus["mu2"], mus["mu3"]), height_map=(mus["c_h"], mus["s_h"]),
                     checkpoint=checkpoint, progress=progress, prec=prec)


# ---------------------------------------------------------------------------
# everything


def run_all(config: ProblemConfig, primes_up_to: int | None = None, regulators: dict | None = None,
            checkpoint: str | None = None, prec: int | None = None, progress=None) -> dict:
    from .certificate import build_certificate

    prec = prec or config.precision
    problem = prepare(config)
    failures = check_known_points(problem)
    if failures:
        raise PipelineError("pipeline", "known points", "; ".join(failures))
    rows = compute_bounds(problem, prec, regulators, progress)
    target = max((r.log_x_bound for r in rows), key=lambda iv: iv.upper)
    result = run_sieve(problem, target_upper=target.upper, primes_up_to=primes_up_to, checkpoint=checkpoint,
                       resume=checkpoint is not None, prec=prec, progress=progress)
    return build_certificate(problem, rows, result, prec)
