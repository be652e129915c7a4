"""Command line interface.

Exit status: 0 CONTRADICTED, 10 EXHAUSTED (or a plain success for the
checking subcommands), larger values for errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import yaml

from .certificate import dump, load, verify_certificate
from .config import ConfigError, ingest
from .core import (
    PipelineError,
    check_known_points,
    compute_bounds,
    prepare,
    resolve_mus,
    run_all,
    run_sieve,
)
from .solutions import EQUATIONS, LISTED, check_solutions, search_box

EXIT_CONTRADICTED = 0
EXIT_EXHAUSTED = 10
EXIT_CONFIG = 11
EXIT_VERIFY = 12
EXIT_MODULE = 13
EXIT_SOLUTIONS = 14


def _regulators(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    return {str(k): str(v) for k, v in data.items()}


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _say(msg: str):
    print(msg, file=sys.stderr, flush=True)


def cmd_ingest_check(args) -> int:
    cfg = ingest(args.config)
    problem = prepare(cfg)
    failures = check_known_points(problem)
    mus = resolve_mus(problem, args.precision or cfg.precision)
    m = problem.model
    _say(f"model: {m.a} y^2 = {m.f}  (x = {m.lam} X + {m.shift_x}, y = {m.mu} Y + {m.shift_y})")
    for k in ("mu1", "mu2", "mu3"):
        _say(f"{k} = {mus[k].decimal_bounds(6)}")
    if failures:
        for f in failures:
            _say(f"known point check failed: {f}")
        return EXIT_CONFIG
    _say(f"{len(problem.W)} known points verified exactly over Q")
    return EXIT_EXHAUSTED


def cmd_bounds(args) -> int:
    cfg = ingest(args.config)
    problem = prepare(cfg)
    rows = compute_bounds(problem, args.precision or cfg.precision, _regulators(args.supply_regulators), _say)
    table = [{
        "coset": r.coset,
        "kappa": [str(c) for c in r.kappa],
        "unit_ranks": r.unit_ranks,
        "R_upper": r.R.decimal_bounds(6)[1],
        "R_provenance": r.R_provenance,
        "log_x_upper": r.log_x_bound.decimal_bounds(6)[1],
    } for r in rows]
    _emit(yaml.safe_dump(table, sort_keys=False), args.emit)
    return EXIT_EXHAUSTED


def cmd_sieve(args) -> int:
    cfg = ingest(args.config)
    problem = prepare(cfg)
    res = run_sieve(problem, target_upper=args.target, primes_up_to=args.primes_up_to,
                    checkpoint=args.checkpoint, resume=bool(args.checkpoint),
                    prec=args.precision or cfg.precision, progress=_say if args.verbose else None)
    st = res.state
    summary = {
        "verdict": res.verdict,
        "index": str(st.index),
        "accepted": len(st.accepted),
        "counters": st.counter_dict,
        "lower_bound": res.lower.status,
        "log_x_lower": None if res.lower.log_x is None else res.lower.log_x.decimal_bounds(6)[0],
        "seconds": round(res.seconds, 1),
    }
    _emit(json.dumps(summary, indent=1) + "\n", args.emit)
    return EXIT_CONTRADICTED if res.verdict == "CONTRADICTED" else EXIT_EXHAUSTED


def cmd_run(args) -> int:
    cfg = ingest(args.config)
    cert = run_all(cfg, primes_up_to=args.primes_up_to, regulators=_regulators(args.supply_regulators),
                   checkpoint=args.checkpoint, prec=args.precision, progress=_say if args.verbose else None)
    _emit(dump(cert), args.emit)
    ok, failures = verify_certificate(cert)
    if not ok:
        for f in failures:
            _say(f"self-verification failed: {f}")
        return EXIT_VERIFY
    return EXIT_CONTRADICTED if cert["verdict"] == "CONTRADICTED" else EXIT_EXHAUSTED


def cmd_verify(args) -> int:
    cert = load(args.certificate)
    ok, failures = verify_certificate(cert)
    for f in failures:
        _say(f)
    if not ok:
        return EXIT_VERIFY
    _say(f"certificate verified; verdict {cert['verdict']}")
    return EXIT_CONTRADICTED if cert["verdict"] == "CONTRADICTED" else EXIT_EXHAUSTED


def cmd_solutions(args) -> int:
    status = EXIT_EXHAUSTED
    for eq in ([args.equation] if args.equation else list(EQUATIONS)):
        pairs = LISTED[eq]
        if args.points:
            with open(args.points) as fh:
                pairs = [tuple(p) for p in yaml.safe_load(fh)]
        bad = check_solutions(eq, pairs)
        _say(f"{eq}: {len(pairs) - len(bad)}/{len(pairs)} listed solutions verified")
        for p in bad:
            _say(f"  not a solution: {p}")
            status = EXIT_SOLUTIONS
        if args.search:
            found = search_box(eq, args.search)
            extra = sorted(set(found) - set(map(tuple, pairs)))
            _say(f"  box |X| <= {args.search}: {len(found)} solutions, {len(extra)} not listed")
            if extra:
                status = EXIT_SOLUTIONS
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="intpoints", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--precision", type=int, metavar="BITS")
        sp.add_argument("--emit", metavar="PATH")

    sp = sub.add_parser("ingest-check", help="validate a config and check the known points exactly")
    common(sp)
    sp.set_defaults(func=cmd_ingest_check)

    sp = sub.add_parser("bounds", help="descent classes and log-x upper bounds")
    common(sp)
    sp.add_argument("--supply-regulators", metavar="PATH")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("sieve", help="run (or resume) the Mordell-Weil sieve")
    common(sp)
    sp.add_argument("--primes-up-to", type=int, metavar="N")
    sp.add_argument("--checkpoint", metavar="PATH")
    sp.add_argument("--target", type=float, help="log-x upper bound to contradict")
    sp.set_defaults(func=cmd_sieve)

    sp = sub.add_parser("run", help="full pipeline with certificate")
    common(sp)
    sp.add_argument("--primes-up-to", type=int, metavar="N")
    sp.add_argument("--checkpoint", metavar="PATH")
    sp.add_argument("--supply-regulators", metavar="PATH")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("verify", help="re-check a certificate")
    sp.add_argument("certificate", metavar="CERT")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("solutions-check", help="verify listed integral solutions exactly")
    sp.add_argument("--equation", choices=list(EQUATIONS))
    sp.add_argument("--points", metavar="PATH", help="YAML list of [X, Y] pairs (default: built-in lists)")
    sp.add_argument("--search", type=int, metavar="XMAX", help="also search |X| <= XMAX exhaustively")
    sp.set_defaults(func=cmd_solutions)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        _say(f"config error: {exc}")
        return EXIT_CONFIG
    except PipelineError as exc:
        _say(str(exc))
        return EXIT_MODULE
    except Exception as exc:  # surfaced with its module of origin
        _say(f"[{type(exc).__module__}] {type(exc).__name__}: {exc}")
        return EXIT_MODULE


if __name__ == "__main__":
    sys.exit(main())
