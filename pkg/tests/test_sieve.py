import json
import math
from dataclasses import replace
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from intpoints.exactmath.interval import RealInterval, mpf_to_fraction
from intpoints.jacobian_fp import cantor_add
from intpoints.lattice import IntegerLattice, hnf, relative_index
from intpoints.pipeline import ingest, prepare
from intpoints.pipeline.core import initial_state, sieve_config, sieve_problem
from intpoints.sieve import (
    PrimeData,
    SieveConfig,
    SieveError,
    SieveProblem,
    SoundnessError,
    bootstrap,
    flat_bootstrap,
    height_lower_bound,
    kernel_on,
    load_checkpoint,
    lower_bound,
    run,
    save_checkpoint,
    sieve_step,
)

MU = (Fraction("2.677"), Fraction("2.612"), Fraction("0.378"))


@pytest.fixture(scope="module")
def problem():
    return prepare(ingest("configs/worked_example_supplied_B.yaml"))


@pytest.fixture(scope="module")
def sp(problem):
    return sieve_problem(problem)


def _mod(x: Fraction, q: int) -> int:
    return x.numerator * pow(x.denominator, -1, q) % q


def _subgroup_size(gens, curve):
    seen = {curve.identity}
    frontier = [curve.identity]
    while frontier:
        nxt = []
        for X in frontier:
            for g in gens:
                Y = cantor_add(X, g, curve)
                if Y not in seen:
                    seen.add(Y)
                    nxt.append(Y)
        frontier = nxt
    return len(seen)


def test_bootstrap_requires_justification():
    with pytest.raises(SieveError):
        bootstrap(3, B=12)
    with pytest.raises(SieveError):
        bootstrap(3, torsion_free=False)
    with pytest.raises(SieveError):
        bootstrap(0)
    assert bootstrap(3).index == 1
    assert bootstrap(3, B=12, asserted=True).index == 12**3


def test_config_validation():
    with pytest.raises(SieveError):
        SieveConfig(exponent=1.0)
    with pytest.raises(SieveError):
        SieveConfig(multiplier=0)
    assert SieveConfig(workers=4).digest() == SieveConfig().digest()
    assert SieveConfig(exponent=0.5).digest() != SieveConfig().digest()


def test_problem_requires_zero_vector():
    with pytest.raises(SieveError):
        SieveProblem((1, 0, 0, 0, 0, 1), (((0, 1), (1,)),), ((1,),))


def test_known_points_reduce_to_their_coordinates(problem, sp):
    """phi_q(w) is the reduction of the point itself, for every known point."""
    for q in (3, 5, 7, 11, 13, 271, 373):
        d = PrimeData(sp, q)
        for P, w, wt in zip(problem.known, sp.W, d.W):
            if P is None:
                assert wt == d.curve.identity
            else:
                assert wt == d.curve.point(_mod(P[0], q), _mod(P[1], q))
            assert d.in_image(wt)


def test_kernel_index_equals_image_size(sp):
    for q in (3, 5, 7, 11, 13, 17):
        d = PrimeData(sp, q)
        L = IntegerLattice.standard(3)
        K = kernel_on(L, d)
        assert all(d.phi(row) == d.curve.identity for row in K.basis)
        assert relative_index(L, K) == _subgroup_size(d.basis, d.curve)


def test_criterion_one_blocks_every_prime_from_z3(sp):
    """With L = Z^3 the content is 1, so gcd(1, N) never exceeds N^theta."""
    state = bootstrap(3, W=sp.W)
    cfg = SieveConfig(primes_up_to=300)
    for q in sympy.primerange(3, 300):
        if sp.excluded(q):
            continue
        state, out = sieve_step(state, PrimeData(sp, q), cfg)
        assert out.criterion == "I"
    assert state.index == 1 and not state.accepted


def test_step_invariants_from_supplied_b(problem, sp):
    state = initial_state(problem)
    cfg = sieve_config(problem, 1000)
    seen = set()
    for q in sympy.primerange(3, 1000):
        if sp.excluded(q):
            continue
        d = PrimeData(sp, q)
        new, out = sieve_step(state, d, cfg)
        assert new.W == state.W
        if out.accepted:
            assert new.index > state.index
            assert new.index == state.index * out.index_gain
            assert state.lattice.contains_lattice(new.lattice)
            assert all(d.in_image(wt) for wt in d.W)
        else:
            assert new.lattice == state.lattice
            seen.add(out.criterion)
        state = new
    assert [q for q, _ in state.accepted] == [271]
    assert seen == {"I", "II", "III", "IV"}
    assert sum(state.counter_dict.values()) + len(state.accepted) == \
        len([q for q in sympy.primerange(3, 1000) if not sp.excluded(q)])


def test_wrong_known_point_triggers_soundness_error(problem, sp):
    W = list(sp.W)
    W[1] = (1, 1, 1)  # (0, 2) is really D1
    bad = replace(sp, W=tuple(W))
    state = replace(initial_state(problem), W=bad.W)
    cfg = sieve_config(problem, 400)
    with pytest.raises(SoundnessError):
        for q in sympy.primerange(3, 400):
            if not bad.excluded(q):
                state, _ = sieve_step(state, PrimeData(bad, q), cfg)


def test_run_is_deterministic_and_parallel_safe(problem, sp):
    cfg = sieve_config(problem, 400)
    a = run(initial_state(problem), sp, cfg, mu=MU)
    b = run(initial_state(problem), sp, cfg, mu=MU)
    c = run(initial_state(problem), sp, replace(cfg, workers=2), mu=MU)
    assert a.state.lattice == b.state.lattice == c.state.lattice
    assert a.state.counters == c.state.counters
    assert a.verdict == "EXHAUSTED"


def test_checkpoint_resume_matches_straight_run(problem, sp, tmp_path):
    path = str(tmp_path / "ck.json")
    cfg = sieve_config(problem, 500)
    straight = run(initial_state(problem), sp, cfg, mu=MU)
    run(initial_state(problem), sp, replace(cfg, primes_up_to=300), mu=MU, checkpoint=path)
    with pytest.raises(SieveError):
        load_checkpoint(path, cfg)  # written under primes_up_to=300
    mid = load_checkpoint(path)
    assert mid.cursor < 300
    resumed = run(mid, sp, cfg, mu=MU)
    assert resumed.state.lattice == straight.state.lattice
    assert resumed.state.accepted == straight.state.accepted
    assert resumed.state.counters == straight.state.counters


def test_checkpoint_tampering_detected(problem, sp, tmp_path):
    path = tmp_path / "ck.json"
    cfg = sieve_config(problem, 300)
    state = initial_state(problem)
    save_checkpoint(str(path), state, cfg)
    assert load_checkpoint(str(path), cfg) == state
    blob = json.loads(path.read_text())
    blob["state"]["cursor"] = 999
    path.write_text(json.dumps(blob))
    with pytest.raises(SieveError):
        load_checkpoint(str(path), cfg)
    blob["state"]["cursor"] = state.cursor
    blob["state"]["lattice"][0][1] = "-1"
    path.write_text(json.dumps(blob))
    with pytest.raises(SieveError):
        load_checkpoint(str(path), cfg)


def test_height_lower_bound_worked_numbers():
    m = Fraction("1.156e1080")
    lb = height_lower_bound(m, *MU, c_h=RealInterval.point(2, 256).log(), s_h=2)
    assert lb.status == "ok"
    h = lb.height.lo
    # (0.378 m - 2.612)^2 + 2.677 evaluated independently
    expected = (MU[2] * m - MU[1]) ** 2 + MU[0]
    assert abs(mpf_to_fraction(h) / expected - 1) < Fraction(1, 10**60)
    assert abs(mpf_to_fraction(h) / Fraction("1.9e2159") - 1) < Fraction(1, 100)
    assert lb.log_x.lower >= RealInterval.point(Fraction("0.95e2159"), 256).upper


def test_height_lower_bound_not_yet_when_m_small():
    assert height_lower_bound(Fraction(5), *MU).status == "not-yet"
    assert height_lower_bound(Fraction(7), *MU).status == "ok"


@given(st.fractions(min_value=7, max_value=10**30, max_denominator=10**6),
       st.fractions(min_value=0, max_value=10**6, max_denominator=10**6))
def test_lower_bound_monotone_in_m(m, dm):
    a = height_lower_bound(m, *MU)
    b = height_lower_bound(m + dm, *MU)
    assert a.status == b.status == "ok"
    assert a.height.lower <= b.height.lower
    # the bound never exceeds the exact value at m
    assert mpf_to_fraction(a.height.lo) <= (MU[2] * m - MU[1]) ** 2 + MU[0]


def test_lattice_lower_bound_uses_certified_minimum():
    L = IntegerLattice.standard(3).scaled(10**12)
    lb = lower_bound(L, *MU)
    assert lb.exact_minimum
    assert mpf_to_fraction(lb.height.lo) <= (MU[2] * 10**12 - MU[1]) ** 2 + MU[0]


def test_flat_bootstrap_keeps_known_classes(sp):
    res = flat_bootstrap(sp, [2, 2, 3], list(sympy.primerange(3, 200)))
    assert res.B == 12
    survivors = set(res.survivors)
    W = {tuple(v % 12 for v in w) for w in sp.W}
    assert W <= survivors
    assert res.success == (survivors == W)
    # each level's survivors reduce onto survivors of the previous level
    assert [lvl.B for lvl in res.levels] == [2, 4, 12]
    assert all(lvl.survivors >= lvl.w_classes for lvl in res.levels)


def test_flat_bootstrap_detects_wrong_known_point(sp):
    W = list(sp.W)
    W[1] = (1, 1, 1)
    with pytest.raises(SoundnessError):
        flat_bootstrap(replace(sp, W=tuple(W)), [2, 2, 3], list(sympy.primerange(3, 200)))
