import copy
import math
import subprocess
import sys
from fractions import Fraction

import mpmath
import pytest
import sympy
import yaml
from hypothesis import given, strategies as st

from intpoints.exactmath.interval import RealInterval, mpf_to_fraction
from intpoints.pipeline import (
    ConfigError,
    check_known_points,
    check_solutions,
    dump,
    emit,
    ingest,
    ingest_text,
    load,
    prepare,
    run_all,
    search_box,
    verify_certificate,
)
from intpoints.pipeline.certificate import DIGITS
from intpoints.pipeline.cli import main
from intpoints.pipeline.core import mu3_from_matrix, resolve_mus
from intpoints.pipeline.solutions import BINOMIAL, HYPER, LISTED
from intpoints.sieve import height_lower_bound

CONFIGS = ["configs/worked_example.yaml", "configs/worked_example_supplied_B.yaml"]
REGS = "configs/table_regulators.yaml"


def base_text():
    with open(CONFIGS[0]) as fh:
        return fh.read()


def edited(fn):
    data = yaml.safe_load(base_text())
    fn(data)
    return yaml.safe_dump(data, sort_keys=False)


# ---------------------------------------------------------------------------
# config


@pytest.mark.parametrize("path", CONFIGS)
def test_emit_ingest_round_trip(path):
    cfg = ingest(path)
    assert ingest_text(emit(cfg)) == cfg
    assert ingest_text(emit(ingest_text(emit(cfg)))).digest() == cfg.digest()


@given(st.text(alphabet="abcXY^2 -=", max_size=20), st.sampled_from([64, 128, 256, 512]), st.integers(0, 1),
       st.fractions(min_value=0, max_value=10, max_denominator=1000))
def test_round_trip_property(label, prec, parity, mu1):
    data = yaml.safe_load(base_text())
    data.update(label=label, precision=prec)
    data["descent"]["twist_parity"] = parity
    data["heights"]["mu1"] = str(mu1)
    cfg = ingest_text(yaml.safe_dump(data))
    assert ingest_text(emit(cfg)) == cfg


def test_worked_example_mus_echoed():
    cfg = ingest(CONFIGS[0])
    mus = resolve_mus(prepare(cfg), 256)
    for k, v in (("mu1", "2.676"), ("mu2", "2.613"), ("mu3", "0.377")):
        lo, hi = mpf_to_fraction(mus[k].lo), mpf_to_fraction(mus[k].hi)
        assert lo <= Fraction(v) <= hi and hi - lo < Fraction(1, 10**70)
    assert abs(float(mus["c_h"].lower) - math.log(2)) < 1e-15


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.pop("known_points"), "known_points"),
    (lambda d: d.update(known_points=[]), "known_points"),
    (lambda d: d["mordell_weil"].update(rank=2), "rank and basis length disagree"),
    (lambda d: d["heights"].update(mu1=2.677), "write reals as strings"),
    (lambda d: d["heights"].pop("mu3"), "heights.mu3"),
    (lambda d: d["sieve"].update(depth=3), "unknown sieve setting"),
    (lambda d: d["provenance"].pop("heights"), "provenance"),
    (lambda d: d.update(bootstrap={"B": 12}), "assertion"),
    (lambda d: d["mordell_weil"].update(torsion_free=False), "torsion-free"),
    (lambda d: d["known_points"][3].update(coords=[1, 2]), "known_points.3.coords"),
    (lambda d: d.update(schema="other/2"), "schema"),
])
def test_config_errors_are_diagnosed(mutate, fragment):
    with pytest.raises(ConfigError, match=fragment.replace(".", r"\.")):
        ingest_text(edited(mutate))


def test_config_errors_report_line_numbers():
    text = base_text().replace("rank: 3", "rank: 2")
    # the diagnostic points at the first entry of the offending list
    line = next(i for i, ln in enumerate(text.splitlines(), 1) if ln.strip().startswith("- {points"))
    with pytest.raises(ConfigError, match=f"line {line}"):
        ingest_text(text)


def test_pairing_matrix_gives_mu3():
    def use_matrix(d):
        d["heights"].pop("mu3")
        d["heights"]["pairing_matrix"] = [["0.142884", 0, 0], [0, "0.142884", 0], [0, 0, "0.142884"]]
    cfg = ingest_text(edited(use_matrix))
    mus = resolve_mus(prepare(cfg), 256)
    mu3 = mpf_to_fraction(mus["mu3"].lo)
    assert mu3 <= Fraction("0.378") and Fraction("0.378") - mu3 < Fraction(1, 10**9)
    with pytest.raises(ConfigError, match="symmetric"):
        ingest_text(edited(lambda d: (d["heights"].pop("mu3"),
                                      d["heights"].update(pairing_matrix=[[1, 2, 0], [0, 1, 0], [0, 0, 1]]))))


def test_mu3_is_certified_below_the_true_minimum():
    with mpmath.workdps(60):
        for seed in range(10):
            A = sympy.randMatrix(3, 3, -5, 5, seed=seed)
            M = A.T * A + sympy.eye(3) * sympy.Rational(1, 3)
            Mf = [[Fraction(int(M[i, j].p), int(M[i, j].q)) for j in range(3)] for i in range(3)]
            ev = mpmath.eigsy(mpmath.matrix([[mpmath.mpf(v.numerator) / v.denominator for v in row] for row in Mf]),
                              eigvals_only=True)
            true = mpmath.sqrt(min(ev))
            mu3 = mu3_from_matrix(Mf)
            assert mu3.upper <= true
            assert true - mu3.lower < mpmath.mpf("1e-6")
    with pytest.raises(ConfigError):
        mu3_from_matrix([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(-1)]])


# ---------------------------------------------------------------------------
# known points


def test_known_points_lie_on_normalised_model():
    cfg = ingest(CONFIGS[0])
    for p in cfg.known_points:
        if not p.at_infinity:
            x, y = Fraction(p.x), Fraction(p.y)
            assert 2 * y * y == x**5 - 16 * x + 8


def test_known_point_coordinates_verified_exactly():
    problem = prepare(ingest(CONFIGS[0]))
    assert check_known_points(problem) == []
    problem.W[7] = (3, 0, 2)  # true coordinates of (4, 22) are (3, 0, 1)
    failures = check_known_points(problem)
    assert len(failures) == 1 and "(3, 0, 2)" in failures[0]


def test_off_curve_basis_point_rejected():
    with pytest.raises(ConfigError):
        prepare(ingest_text(edited(lambda d: d["mordell_weil"]["basis"][0].update(points=[["0", "3"]]))))


# ---------------------------------------------------------------------------
# solutions


def test_listed_solutions_verified_and_mutation_fails():
    assert len(LISTED[HYPER]) == 12 and len(LISTED[BINOMIAL]) == 20
    for eq in (HYPER, BINOMIAL):
        assert check_solutions(eq, LISTED[eq]) == []
        listed = set(LISTED[eq])
        for i, (X, Y) in enumerate(LISTED[eq]):
            bad = list(LISTED[eq])
            bad[i] = (X, Y + 1)
            # a few neighbours are themselves solutions, e.g. (0, 0) -> (0, 1)
            assert check_solutions(eq, bad) == ([] if (X, Y + 1) in listed else [(X, Y + 1)])
    assert check_solutions(HYPER, [(30, 4931)]) == [(30, 4931)]
    assert check_solutions(BINOMIAL, [(19, 154)]) == [(19, 154)]


def test_box_search_agrees_with_naive_loop():
    for eq, Xmax, Ymax in ((HYPER, 40, 6000), (BINOMIAL, 25, 200)):
        naive = sorted((X, Y) for X in range(-Xmax, Xmax + 1) for Y in range(-Ymax, Ymax + 1)
                       if not check_solutions(eq, [(X, Y)]))
        assert search_box(eq, Xmax) == naive
    assert set(search_box(HYPER, 300)) == set(LISTED[HYPER])
    assert set(search_box(BINOMIAL, 300)) == set(LISTED[BINOMIAL])


# ---------------------------------------------------------------------------
# certificates


@pytest.fixture(scope="module")
def cert():
    cfg = ingest(CONFIGS[1])
    regs = {str(k): str(v) for k, v in yaml.safe_load(open(REGS)).items()}
    return run_all(cfg, primes_up_to=400, regulators=regs)


def test_fresh_certificate_verifies(cert, tmp_path):
    ok, failures = verify_certificate(cert)
    assert ok, failures
    path = tmp_path / "cert.yaml"
    path.write_text(dump(cert))
    assert verify_certificate(load(str(path))) == (True, [])
    assert cert["verdict"] == "EXHAUSTED"
    assert [r["unit_ranks"][-1] for r in cert["kappa_table"]] == [12, 21, 25, 21, 21, 25, 21, 25]
    items = " ".join(s["item"] for s in cert["supplied"])
    assert "bootstrap B" in items and "regulator" in items


def test_perturbed_bound_is_rejected(cert):
    bad = copy.deepcopy(cert)
    row = bad["kappa_table"][3]
    row["log_x_upper"] = str(Fraction(row["log_x_upper"]) * Fraction(99, 100))
    ok, failures = verify_certificate(bad)
    assert not ok and any("row D3" in f for f in failures)


@pytest.mark.parametrize("tamper", [
    lambda c: c.update(verdict="CONTRADICTED"),
    lambda c: c["config"].update(label="edited"),
    lambda c: c["sieve"].update(index=str(int(c["sieve"]["index"]) + 1)),
    lambda c: c["sieve"].update(m_squared_lower=str(Fraction(c["sieve"]["m_squared_lower"]) * 4)),
    lambda c: c["heights"]["mu3"].update(lower="0.5", upper="0.5"),
    lambda c: c.update(schema="other"),
])
def test_tampered_certificates_fail(cert, tamper):
    bad = copy.deepcopy(cert)
    tamper(bad)
    assert not verify_certificate(bad)[0]


def contradicting_certificate(cert, prec=256):
    """The fresh certificate with the published lattice minimum and height constants substituted."""
    c = copy.deepcopy(cert)
    m = Fraction("1.156e1080")
    for k, v in (("mu1", "2.677"), ("mu2", "2.612"), ("mu3", "0.378")):
        c["heights"][k] = {"lower": v, "upper": v}
    c["sieve"].update(lattice=None, m_squared_lower=str(m * m))
    c_h = RealInterval(RealInterval.point(Fraction(c["heights"]["c_h"]["lower"]), prec).lo,
                       RealInterval.point(Fraction(c["heights"]["c_h"]["upper"]), prec).hi, prec)
    lb = height_lower_bound(RealInterval.point(m * m, prec).sqrt(), Fraction("2.677"), Fraction("2.612"),
                            Fraction("0.378"), c_h, 2, prec)
    c["lower_bound"] = {"status": "ok", "height_lower": lb.height.decimal_bounds(DIGITS)[0],
                        "log_x_lower": lb.log_x.decimal_bounds(DIGITS)[0]}
    c["verdict"] = "CONTRADICTED"
    return c


def test_published_values_certificate_verifies(cert):
    c = contradicting_certificate(cert)
    ok, failures = verify_certificate(c)
    assert ok, failures
    h = Fraction(c["lower_bound"]["height_lower"])
    assert abs(h / Fraction("1.9e2159") - 1) < Fraction(1, 100)
    worst = max(Fraction(r["log_x_upper"]) for r in c["kappa_table"])
    assert Fraction(c["lower_bound"]["log_x_lower"]) > worst
    c["verdict"] = "EXHAUSTED"
    assert not verify_certificate(c)[0]


# ---------------------------------------------------------------------------
# command line


def test_cli_ingest_check_and_config_errors(tmp_path):
    assert main(["ingest-check", "--config", CONFIGS[0]]) == 10
    bad = tmp_path / "bad.yaml"
    bad.write_text(base_text().replace('{x: "4", y: "22", coords: [3, 0, 1]}', '{x: "4", y: "22", coords: [3, 0, 2]}'))
    assert main(["ingest-check", "--config", str(bad)]) == 11
    bad.write_text("schema: nope\n")
    assert main(["ingest-check", "--config", str(bad)]) == 11


def test_cli_solutions(tmp_path):
    assert main(["solutions-check", "--search", "100"]) == 10
    pts = tmp_path / "pts.yaml"
    mutated = [list(p) for p in LISTED[HYPER]]
    mutated[-1][1] += 1
    pts.write_text(yaml.safe_dump(mutated))
    assert main(["solutions-check", "--equation", HYPER, "--points", str(pts)]) == 14


def test_cli_sieve_run_and_verify(tmp_path):
    out = tmp_path / "sieve.json"
    ck = tmp_path / "ck.json"
    assert main(["sieve", "--config", CONFIGS[1], "--primes-up-to", "300", "--checkpoint", str(ck),
                 "--emit", str(out)]) == 10
    summary = yaml.safe_load(out.read_text())
    assert summary["accepted"] == 1 and summary["verdict"] == "EXHAUSTED"
    # resuming from the checkpoint is a no-op at the same bound
    assert main(["sieve", "--config", CONFIGS[1], "--primes-up-to", "300", "--checkpoint", str(ck),
                 "--emit", str(out)]) == 10
    assert yaml.safe_load(out.read_text())["index"] == summary["index"]


def test_cli_verify_exit_codes(cert, tmp_path):
    good = tmp_path / "good.yaml"
    good.write_text(dump(cert))
    assert main(["verify", str(good)]) == 10
    contra = tmp_path / "contra.yaml"
    contra.write_text(dump(contradicting_certificate(cert)))
    assert main(["verify", str(contra)]) == 0
    bad = copy.deepcopy(cert)
    bad["kappa_table"][0]["log_x_upper"] = "1e10"
    tampered = tmp_path / "bad.yaml"
    tampered.write_text(dump(bad))
    assert main(["verify", str(tampered)]) == 12


def test_cli_module_errors_carry_context(tmp_path, capsys):
    text = base_text().replace("F: [0, -1, 0, 0, 0, 1]", "F: [0, -1, 0, 0, 1]")
    cfgp = tmp_path / "quartic.yaml"
    cfgp.write_text(text)
    code = main(["bounds", "--config", str(cfgp)])
    assert code > 10
    assert "[" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "intpoints", "solutions-check", "--equation", BINOMIAL],
                         capture_output=True, text=True)
    assert res.returncode == 10
    assert "20/20" in res.stderr
