"""The Mordell-Weil sieve.

Coordinates are taken with respect to a Mordell-Weil basis D_1..D_r of a
torsion-free J(Q); j(P) = [P - oo] on a quintic model y^2 = F(x).  The state
records a lattice L with j(C(Q)) inside W + phi(L), where W holds the
coordinate vectors of the known points.

Two refinement mechanisms are provided:

* `flat_bootstrap` works with residues modulo a growing smooth integer B,
  keeping only classes compatible with j(C(F_q)) in J(F_q)/B J(F_q) for
  many q.  When the survivors are exactly W mod B, L_0 = B Z^r is justified.
* `sieve_step` shrinks L to the kernel of phi_q on L when criteria I-IV hold.

`lower_bound` turns the minimum of L into a lower bound for the height of
any unknown rational point.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
import sympy

from .exactmath.interval import RealInterval
from .jacobian_fp import (
    CurveFp,
    JacobianError,
    _factor,
    _primary_relations,
    _SubgroupSearch,
    cantor_add,
    curve_points,
    group_order,
    in_curve_image,
    reduce_rational_divisor,
    relation_lattice,
    scalar_mul,
)
from .lattice import IntegerLattice, coset_reps, hnf, kernel_preimage, relative_index, shortest_vector

CHECKPOINT_FORMAT = "intpoints-sieve-checkpoint"
CHECKPOINT_VERSION = 1
CRITERIA = ("I", "II", "III", "IV")


class SieveError(RuntimeError):
    pass


class SoundnessError(SieveError):
    """A known point failed to reduce into the curve image: the input data is wrong."""


# ---------------------------------------------------------------------------
# problem data


@dataclass(frozen=True)
class SieveProblem:
    """Curve y^2 = F(x) (F quintic, integer coefficients), basis divisors as
    rational Mumford pairs (u, v) (coefficients lowest first) and the
    coordinate vectors of the known rational points."""

    F: tuple[int, ...]
    basis: tuple
    W: tuple[tuple[int, ...], ...]
    bad_primes: tuple[int, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __post_init__(self):
        if len(self.F) != 6:
            raise SieveError("a quintic model is required")
        for w in self.W:
            if len(w) != len(self.basis):
                raise SieveError("known-point coordinates must match the rank")
        if tuple(0 for _ in self.basis) not in {tuple(w) for w in self.W}:
            raise SieveError("W must contain the image of the point at infinity (the zero vector)")

    def excluded(self, q: int) -> bool:
        if q == 2 or q in self.bad_primes or self.F[-1] % q == 0:
            return True
        for u, v in self.basis:
            for c in list(u) + list(v):
                if Fraction(c).denominator % q == 0:
                    return True
        return False


@dataclass(frozen=True)
class SieveConfig:
    exponent: float = 0.6
    multiplier: float = 2.0
    smooth_bound: int | None = None
    primes_up_to: int = 10_000
    prime_start: int = 3
    B: int | None = None
    torsion_free: bool = True
    lower_bound_every: int = 25
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.exponent < 1:
            raise SieveError("criterion-I exponent must lie in (0, 1)")
        if self.multiplier <= 0:
            raise SieveError("criterion-III multiplier must be positive")

    def digest(self) -> str:
        blob = json.dumps({k: getattr(self, k) for k in self.__dataclass_fields__ if k != "workers"}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


class PrimeData:
    """Everything about J(F_q) the sieve needs, independent of the lattice."""

    def __init__(self, problem: SieveProblem, q: int, smooth_bound: int | None = None):
        self.q = q
        F = [c % q for c in problem.F]
        self.curve = CurveFp.from_integer_poly(list(problem.F), q)
        self.order = group_order(self.curve)
        self.fac = _factor(self.order)
        self.basis = [reduce_rational_divisor(u, v, self.curve) for u, v in problem.basis]
        self.smooth_bound = smooth_bound
        smooth = self.order
        if smooth_bound is not None:
            smooth = math.prod(l**e for l, e in self.fac.items() if l <= smooth_bound)
        self.smooth = smooth
        self.cofactor = self.order // smooth
        self._image = None
        self.W = [self.phi(w) for w in problem.W]

    def phi(self, coords: Sequence[int]):
        """sum coords_i D~_i."""
        C = self.curve
        acc = C.identity
        for c, D in zip(coords, self.basis):
            c %= self.order
            if c:
                acc = cantor_add(acc, scalar_mul(c, D, C), C)
        return acc

    def project(self, X):
        return X if self.cofactor == 1 else scalar_mul(self.cofactor, X, self.curve)

    def in_image(self, X) -> bool:
        """Whether the (projected) class lies in the (projected) curve image."""
        if self.cofactor == 1:
            return in_curve_image(X)
        if self._image is None:
            C = self.curve
            img = {C.identity}
            for x, y in curve_points(C):
                img.add(scalar_mul(self.cofactor, C.point(x, y), C))
            self._image = img
        return self.project(X) in self._image


def _prime_data_or_reason(args):
    problem, q, smooth = args
    try:
        return q, PrimeData(problem, q, smooth), None
    except JacobianError as exc:
        return q, None, str(exc)


def iter_prime_data(problem: SieveProblem, primes: Iterable[int], smooth_bound: int | None = None,
                    workers: int = 1):
    """Yield (q, PrimeData or None, skip reason) in ascending prime order.

    With workers > 1 the per-prime data is computed concurrently; it does not
    depend on the lattice, so results are consumed in order unchanged.
    """
    jobs = [(problem, q, smooth_bound) for q in primes if not problem.excluded(q)]
    if workers <= 1:
        for job in jobs:
            yield _prime_data_or_reason(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_prime_data_or_reason, jobs, chunksize=4)


# ---------------------------------------------------------------------------
# state


@dataclass(frozen=True)
class SieveState:
    lattice: IntegerLattice
    W: tuple[tuple[int, ...], ...]
    cursor: int = 2
    counters: tuple = (("I", 0), ("II", 0), ("III", 0), ("IV", 0))
    accepted: tuple = ()
    skipped: tuple = ()
    bootstrap: tuple = ()

    @property
    def index(self) -> int:
        return self.lattice.det

    @property
    def counter_dict(self) -> dict:
        return dict(self.counters)

    @property
    def snapshot_id(self) -> str:
        blob = json.dumps([[str(c) for c in row] for row in self.lattice.basis] + [self.cursor])
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def bump(self, criterion: str) -> "SieveState":
        c = dict(self.counters)
        c[criterion] += 1
        return replace(self, counters=tuple(c.items()))


def bootstrap(r: int, B: int | None = None, torsion_free: bool = True, asserted: bool = False,
              W: Sequence[Sequence[int]] = ()) -> SieveState:
    """Initial state with L_0 = B Z^r (or Z^r).

    B must be backed either by an external assertion (recorded by the
    caller) or by `flat_bootstrap`; Z^r needs J(Q) torsion-free.
    """
    if r < 1:
        raise SieveError("rank must be positive")
    if B is None or B == 1:
        if not torsion_free:
            raise SieveError("without a B killing torsion the sieve needs a torsion-free J(Q)")
        L = IntegerLattice.standard(r)
    else:
        if B < 1:
            raise SieveError("B must be a positive integer")
        if not asserted:
            raise SieveError("a supplied B needs an explicit assertion that j(C(Q)) lies in W + B J(Q)")
        L = IntegerLattice.standard(r).scaled(B)
    return SieveState(L, tuple(tuple(w) for w in W))


# ---------------------------------------------------------------------------
# criteria I-IV


@dataclass(frozen=True)
class StepOutcome:
    q: int
    accepted: bool
    criterion: str | None  # the failing criterion, None when accepted
    index_gain: int = 1
    detail: str = ""


def kernel_on(L: IntegerLattice, data: PrimeData) -> IntegerLattice:
    """L' = kernel of phi_q restricted to L (into the smooth quotient if configured)."""
    E = [data.phi(row) for row in L.basis]
    if data.cofactor != 1:
        E = [data.project(X) for X in E]
        fac = {l: e for l, e in data.fac.items() if data.smooth % l == 0}
        rel = relation_lattice(E, data.curve, max(fac, default=1), order=data.smooth, factorization=fac) if fac \
            else IntegerLattice.standard(L.rank)
    else:
        rel = relation_lattice(E, data.curve, data.order + 1, order=data.order, factorization=data.fac)
    return kernel_preimage(L, rel)


def sieve_step(state: SieveState, data: PrimeData, config: SieveConfig) -> tuple[SieveState, StepOutcome]:
    q, N = data.q, data.order
    L = state.lattice
    Bp = L.content()
    g = math.gcd(Bp, N)
    if not g > N ** config.exponent:
        return state.bump("I"), StepOutcome(q, False, "I", detail=f"gcd={g} N={N}")
    Lp = kernel_on(L, data)
    if Lp == L:
        return state.bump("II"), StepOutcome(q, False, "II")
    idx = relative_index(L, Lp)
    if not len(state.W) * (idx - 1) < config.multiplier * q:
        return state.bump("III"), StepOutcome(q, False, "III", detail=f"index={idx}")
    reps = coset_reps(L, Lp)
    images = [data.phi(l) for l in reps]
    C = data.curve
    for wt in data.W:
        for X in images:
            if data.in_image(cantor_add(wt, X, C)):
                return state.bump("IV"), StepOutcome(q, False, "IV")
    # every known point must reduce into the curve image
    for w, wt in zip(state.W, data.W):
        if not data.in_image(wt):
            raise SoundnessError(f"known point with coordinates {w} does not reduce into jC(F_{q})")
    new = replace(state, lattice=Lp, accepted=state.accepted + ((q, idx),))
    return new, StepOutcome(q, True, None, idx)


# ---------------------------------------------------------------------------
# flat bootstrap


class _PrimaryInfo:
    """The ell-primary part of J(F_q) seen through the basis: the relation
    lattice R (kernel of Z^r -> J(F_q)[ell^oo]) and the data needed to take
    discrete logarithms there."""

    def __init__(self, data: PrimeData, ell: int):
        C = data.curve
        e = data.fac[ell]
        self.ell = ell
        self.cof = data.order // ell**e
        self.Q = [scalar_mul(self.cof, D, C) for D in data.basis]
        rows = _primary_relations(self.Q, ell, e, C, 1 << 22)
        self.R = hnf(rows)
        self.gens = [i for i, row in enumerate(rows) if row[i] > 1]
        self.radices = [rows[i][i] for i in self.gens]


def _reduce_rows(arr: np.ndarray, H: IntegerLattice) -> np.ndarray:
    """Canonical representatives of arr modulo the HNF lattice H (row vectors)."""
    a = arr.astype(object).copy()
    for i, row in enumerate(H.basis):
        piv = row[i]
        qv = a[:, i] // piv
        a = a - np.outer(qv, np.array(row, dtype=object))
    return a


@dataclass(frozen=True)
class BootstrapLevel:
    ell: int
    B: int
    survivors: int
    w_classes: int
    primes_used: int
    seconds: float


@dataclass(frozen=True)
class BootstrapResult:
    B: int
    success: bool
    levels: tuple[BootstrapLevel, ...]
    survivors: tuple[tuple[int, ...], ...]


def flat_bootstrap(problem: SieveProblem, schedule: Sequence[int], primes: Sequence[int],
                   max_survivors: int = 200_000, info_ratio: float = 0.25,
                   progress: Callable[[str], None] | None = None) -> BootstrapResult:
    """Residues mod B compatible with j(C(F_q)) for all q in `primes`.

    The schedule lists the primes ell by which B grows, one factor per level.
    A class c mod B survives prime q if some P in C(F_q) has j(P) = c.D in
    J(F_q)/B J(F_q); this is tested one ell-primary component at a time.
    Success means the survivors are exactly the classes of W, which proves
    j(C(Q)) inside W + B Z^r (J(Q) torsion-free).  Primes q are used at a
    level only when the quotient they see has at least info_ratio * q
    elements.
    """
    r = problem.rank
    datas: dict[int, PrimeData] = {}
    skipped = 0
    for q, d, _reason in iter_prime_data(problem, primes):
        if d is None:
            skipped += 1
            continue
        datas[q] = d
    infos: dict[tuple[int, int], _PrimaryInfo] = {}
    Bfac: dict[int, int] = {}
    B = 1
    S = np.zeros((1, r), dtype=object)
    levels = []
    t0 = time.time()
    Wvec = [tuple(w) for w in problem.W]
    for ell in schedule:
        Bfac[ell] = Bfac.get(ell, 0) + 1
        Bnew = B * ell
        lifts = np.array(list(itertools.product(range(ell), repeat=r)), dtype=object) * B
        S = ((S[:, None, :] + lifts[None, :, :]).reshape(-1, r)) % Bnew
        B = Bnew
        used = 0
        for q, d in datas.items():
            parts = [l for l in Bfac if l in d.fac]
            if ell not in parts:
                continue
            bound = math.prod(l ** min(d.fac[l], r * Bfac[l]) for l in parts)
            if bound < info_ratio * q:
                continue
            # per-ell moduli M_l = R_l + l^b Z^r
            mods = []
            for l in parts:
                key = (q, l)
                if key not in infos:
                    infos[key] = _PrimaryInfo(d, l)
                info = infos[key]
                M = hnf(list(info.R.basis) + [[l ** Bfac[l] if i == j else 0 for j in range(r)] for i in range(r)])
                mods.append((info, M))
            size = math.prod(M.det for _, M in mods)
            if size < info_ratio * q or size == 1:
                continue
            allowed = _joint_allowed(d, mods, r)
            keys = np.empty(len(S), dtype=object)
            reduced = [_reduce_rows(S, M) for _, M in mods]
            for i in range(len(S)):
                keys[i] = tuple(tuple(int(v) for v in red[i]) for red in reduced)
            mask = np.array([k in allowed for k in keys], dtype=bool)
            S = S[mask]
            used += 1
            if len(S) == 0:
                break
        wset = {tuple(int(v) % B for v in w) for w in Wvec}
        sset = {tuple(int(v) for v in row) for row in S}
        if not wset <= sset:
            raise SoundnessError("a known point was sieved out during the bootstrap")
        lvl = BootstrapLevel(ell, B, len(sset), len(wset), used, round(time.time() - t0, 2))
        levels.append(lvl)
        if progress:
            progress(f"bootstrap ell={ell} B={B} survivors={len(sset)} W-classes={len(wset)} primes={used}")
        if len(S) > max_survivors:
            return BootstrapResult(B, False, tuple(levels), tuple(sorted(sset)))
    success = sset == wset
    return BootstrapResult(B, success, tuple(levels), tuple(sorted(sset)))


def _joint_allowed(d: PrimeData, mods, r: int) -> set:
    """Keys (per-ell residues) realised by a single point of C(F_q)."""
    ells = tuple(sorted(info.ell for info, _ in mods))
    cache = d.__dict__.setdefault("_joint_raw", {})
    if ells not in cache:
        cache[ells] = _joint_points(d, [info for info, _ in sorted(mods, key=lambda m: m[0].ell)], r)
    raw = cache[ells]
    ordered = sorted(mods, key=lambda m: m[0].ell)
    if not raw:
        return set()
    cols = []
    for k, (_info, M) in enumerate(ordered):
        arr = np.array([vecs[k] for vecs in raw], dtype=object)
        cols.append(_reduce_rows(arr, M))
    order = [ells.index(info.ell) for info, _ in mods]
    out = set()
    for i in range(len(raw)):
        out.add(tuple(tuple(int(v) for v in cols[k][i]) for k in order))
    return out


def _joint_points(d: PrimeData, infos, r: int) -> list:
    """Per-ell coordinate vectors of j(P) for every P in C(F_q) whose
    projections all lie in the subgroups generated by the basis."""
    C = d.curve
    parts = []
    for info in infos:
        cof, gens, radices, Q = info.cof, info.gens, info.radices, info.Q
        search = _SubgroupSearch([Q[g] for g in gens], radices, C, 1 << 22) if gens else None
        parts.append((cof, gens, search))
    out = []
    pts = [None] + curve_points(C)
    for pt in pts:
        if pt is not None and pt[1] > d.q - pt[1]:
            continue
        P = C.identity if pt is None else C.point(*pt)
        vecs = []
        for cof, gens, search in parts:
            X = scalar_mul(cof, P, C)
            c = (() if X == C.identity else None) if search is None else search.find(X)
            if c is None:
                break
            vec = [0] * r
            for j, gidx in enumerate(gens):
                vec[gidx] = c[j]
            vecs.append(tuple(vec))
        else:
            out.append(tuple(vecs))
            out.append(tuple(tuple(-v for v in vec) for vec in vecs))
    return out


# ---------------------------------------------------------------------------
# lower bounds


@dataclass(frozen=True)
class LowerBound:
    status: str  # "ok" or "not-yet"
    m_lower: RealInterval
    height: RealInterval | None
    log_x: RealInterval | None
    exact_minimum: bool

    @property
    def log_x_lower(self):
        return None if self.log_x is None else self.log_x.lower


def height_lower_bound(m, mu1, mu2, mu3, c_h=0, s_h=1, prec: int = 256) -> LowerBound:
    """(mu3 m - mu2)^2 + mu1 and the implied lower bound for log x."""
    iv = lambda v: v if isinstance(v, RealInterval) else RealInterval.point(v, prec)
    m, mu1, mu2, mu3, c_h, s_h = (iv(v) for v in (m, mu1, mu2, mu3, c_h, s_h))
    t = mu3 * m - mu2
    m_lo = RealInterval(m.lo, m.lo, prec)
    t_lo = mu3 * m_lo - mu2
    if t_lo.lower < 0:
        return LowerBound("not-yet", m, None, None, False)
    h = t_lo * t_lo + mu1
    h = RealInterval(h.lo, h.lo, prec)
    lx = (h - c_h) / s_h
    lx = RealInterval(lx.lo, lx.lo, prec)
    return LowerBound("ok", m, h, lx, False)


def lower_bound(lattice: IntegerLattice, mu1, mu2, mu3, c_h=0, s_h=1, prec: int = 256,
                node_cap: int = 200_000) -> LowerBound:
    sv = shortest_vector(lattice, node_cap=node_cap)
    m = sv.length_lower(prec)
    lb = height_lower_bound(m, mu1, mu2, mu3, c_h, s_h, prec)
    return replace(lb, exact_minimum=sv.exact)


# ---------------------------------------------------------------------------
# the driver


@dataclass(frozen=True)
class SieveRun:
    state: SieveState
    verdict: str  # CONTRADICTED or EXHAUSTED
    lower: LowerBound
    log: tuple[str, ...]
    seconds: float


def run(state: SieveState, problem: SieveProblem, config: SieveConfig, target_upper=None,
        mu=(0, 0, 1), height_map=(0, 1), checkpoint: str | None = None,
        progress: Callable[[str], None] | None = None, prec: int = 256) -> SieveRun:
    """Sweep primes q in (state.cursor, config.primes_up_to); verdict against target_upper.

    target_upper is an upper bound for log|x| over all integral points (the
    maximum over the descent classes); CONTRADICTED means the certified lower
    bound for log x of any point outside W exceeds it.
    """
    t0 = time.time()
    log: list[str] = []

    def note(msg):
        log.append(msg)
        if progress:
            progress(msg)

    def evaluate(st):
        return lower_bound(st.lattice, *mu, *height_map, prec=prec)

    def decided(lb):
        return (target_upper is not None and lb.status == "ok"
                and lb.log_x.lower > RealInterval.point(target_upper, prec).upper)

    lb = evaluate(state)
    if decided(lb):
        return SieveRun(state, "CONTRADICTED", lb, tuple(log), time.time() - t0)
    primes = [int(p) for p in sympy.primerange(max(state.cursor + 1, config.prime_start), config.primes_up_to)]
    since = 0
    for q, data, reason in iter_prime_data(problem, primes, config.smooth_bound, config.workers):
        if data is None:
            state = replace(state, cursor=q, skipped=state.skipped + ((q, reason),))
            note(f"q={q} skipped: {reason}")
            continue
        try:
            state, out = sieve_step(state, data, config)
        except JacobianError as exc:
            state = replace(state, skipped=state.skipped + ((q, str(exc)),))
            note(f"q={q} skipped: {exc}")
            out = None
        state = replace(state, cursor=q)
        if out is not None and out.accepted:
            note(f"q={q} accepted index-gain={out.index_gain} index={state.index}")
            since += 1
            if since >= config.lower_bound_every:
                since = 0
                lb = evaluate(state)
                if decided(lb):
                    break
        if checkpoint and out is not None and out.accepted:
            save_checkpoint(checkpoint, state, config)
    lb = evaluate(state)
    verdict = "CONTRADICTED" if decided(lb) else "EXHAUSTED"
    if checkpoint:
        save_checkpoint(checkpoint, state, config)
    note(f"verdict {verdict}; index={state.index}; counters={state.counter_dict}")
    return SieveRun(state, verdict, lb, tuple(log), time.time() - t0)


# ---------------------------------------------------------------------------
# checkpoints


def state_to_dict(state: SieveState) -> dict:
    return {
        "lattice": [[str(c) for c in row] for row in state.lattice.basis],
        "W": [list(w) for w in state.W],
        "cursor": state.cursor,
        "counters": dict(state.counters),
        "accepted": [[q, str(g)] for q, g in state.accepted],
        "skipped": [[q, r] for q, r in state.skipped],
        "bootstrap": [list(x) for x in state.bootstrap],
    }


def state_from_dict(d: dict) -> SieveState:
    basis = tuple(tuple(int(c) for c in row) for row in d["lattice"])
    L = hnf(basis)
    if L.basis != basis:
        raise SieveError("checkpoint lattice is not in Hermite normal form")
    return SieveState(
        L,
        tuple(tuple(w) for w in d["W"]),
        int(d["cursor"]),
        tuple((k, int(d["counters"][k])) for k in CRITERIA),
        tuple((int(q), int(g)) for q, g in d["accepted"]),
        tuple((int(q), r) for q, r in d["skipped"]),
        tuple(tuple(x) for x in d.get("bootstrap", [])),
    )


def save_checkpoint(path: str, state: SieveState, config: SieveConfig) -> None:
    blob = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": config.digest(),
        "snapshot": state.snapshot_id,
        "state": state_to_dict(state),
    }
    with open(path, "w") as fh:
        json.dump(blob, fh, indent=1)


def load_checkpoint(path: str, config: SieveConfig | None = None) -> SieveState:
    with open(path) as fh:
        blob = json.load(fh)
    if blob.get("format") != CHECKPOINT_FORMAT or blob.get("version") != CHECKPOINT_VERSION:
        raise SieveError("unrecognised checkpoint format")
    if config is not None and blob["config"] != config.digest():
        raise SieveError("checkpoint was written under a different sieve configuration")
    state = state_from_dict(blob["state"])
    if state.snapshot_id != blob["snapshot"]:
        raise SieveError("checkpoint snapshot id mismatch")
    return state
