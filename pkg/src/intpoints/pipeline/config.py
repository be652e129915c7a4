"""Problem configuration: YAML ingest, validation and emission."""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

import yaml

from ..exactmath.interval import RealInterval

CONFIG_SCHEMA = "intpoints-config/1"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# numbers


def parse_rational(value, where: str = "value") -> Fraction:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ConfigError(f"{where}: write reals as strings so they are read exactly")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{where}: cannot read {value!r} as an exact rational") from None


def parse_real(value, prec: int = 256, where: str = "value") -> RealInterval:
    """Exact rationals, decimal strings and log(n)."""
    if isinstance(value, str) and value.strip().startswith("log(") and value.strip().endswith(")"):
        arg = parse_rational(value.strip()[4:-1], where)
        if arg <= 0:
            raise ConfigError(f"{where}: log of a non-positive number")
        return RealInterval.point(arg, prec).log()
    return RealInterval.point(parse_rational(value, where), prec)


# ---------------------------------------------------------------------------
# schema


@dataclass
class KnownPoint:
    coords: list[int]
    x: str | None = None  # None for the point at infinity
    y: str | None = None

    @property
    def at_infinity(self) -> bool:
        return self.x is None


@dataclass
class ProblemConfig:
    label: str
    curve: dict  # {A, B, F}
    rank: int
    torsion_free: bool
    basis: list  # each {"points": [[x, y], ...]} or {"u": [...], "v": [...]}
    known_points: list[KnownPoint]
    heights: dict  # mu1, mu2 | pairing_matrix, mu3 | pairing_matrix, c_h, s_h
    provenance: dict
    cosets: Any = "from_basis"
    twist_parity: int = 1
    bootstrap_B: int | None = None
    bootstrap_assertion: str | None = None
    sieve: dict = field(default_factory=dict)
    regulators: dict = field(default_factory=dict)  # coset label -> R upper bound (string)
    precision: int = 256

    def to_dict(self) -> dict:
        d = {
            "schema": CONFIG_SCHEMA,
            "label": self.label,
            "curve": self.curve,
            "mordell_weil": {
                "rank": self.rank,
                "torsion_free": self.torsion_free,
                "basis": self.basis,
            },
            "descent": {"cosets": self.cosets, "twist_parity": self.twist_parity},
            "known_points": [
                {"coords": list(p.coords)} if p.at_infinity else {"x": p.x, "y": p.y, "coords": list(p.coords)}
                for p in self.known_points
            ],
            "heights": self.heights,
            "bootstrap": {"B": self.bootstrap_B, "assertion": self.bootstrap_assertion},
            "sieve": self.sieve,
            "regulators": self.regulators,
            "provenance": self.provenance,
            "precision": self.precision,
        }
        return d

    def digest(self) -> str:
        return hashlib.sha256(emit(self).encode()).hexdigest()


def emit(config: ProblemConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False, default_flow_style=None, width=100)


def _line_of(text: str, path: list) -> int | None:
    """Line number (1-based) of the YAML node at `path`, if it exists."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None
    for key in path:
        if node is None:
            return None
        if isinstance(node, yaml.MappingNode):
            nxt = None
            for k, v in node.value:
                if k.value == key:
                    nxt = v
                    break
            node = nxt
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            return None
    return None if node is None else node.start_mark.line + 1


class _Reader:
    def __init__(self, data: dict, text: str):
        self.data = data
        self.text = text

    def fail(self, path: list, msg: str):
        line = _line_of(self.text, path)
        loc = ".".join(str(p) for p in path) or "<root>"
        raise ConfigError(f"{loc}{f' (line {line})' if line else ''}: {msg}")

    def get(self, path: list, required: bool = True, default=None):
        node = self.data
        for i, key in enumerate(path):
            if isinstance(node, dict) and key in node:
                node = node[key]
            elif isinstance(node, list) and isinstance(key, int) and key < len(node):
                node = node[key]
            else:
                if required:
                    self.fail(path[:i + 1], "missing required field")
                return default
        return node


def ingest_text(text: str) -> ProblemConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>: expected a mapping")
    rd = _Reader(data, text)
    if rd.get(["schema"]) != CONFIG_SCHEMA:
        rd.fail(["schema"], f"expected {CONFIG_SCHEMA}")
    curve = rd.get(["curve"])
    for k in ("A", "B", "F"):
        rd.get(["curve", k])
    if not isinstance(curve["F"], list) or not all(isinstance(c, int) for c in curve["F"]):
        rd.fail(["curve", "F"], "expected a list of integers (lowest degree first)")
    rank = rd.get(["mordell_weil", "rank"])
    basis = rd.get(["mordell_weil", "basis"])
    if not isinstance(rank, int) or rank < 1:
        rd.fail(["mordell_weil", "rank"], "expected a positive integer")
    if not isinstance(basis, list) or len(basis) != rank:
        rd.fail(["mordell_weil", "basis"], f"expected {rank} basis divisors (rank and basis length disagree)")
    for i, D in enumerate(basis):
        if not isinstance(D, dict) or not ("points" in D or ("u" in D and "v" in D)):
            rd.fail(["mordell_weil", "basis", i], "expected {points: [[x, y], ...]} or {u: [...], v: [...]}")
    torsion_free = bool(rd.get(["mordell_weil", "torsion_free"], required=False, default=False))
    kp = rd.get(["known_points"])
    if not isinstance(kp, list) or not kp:
        rd.fail(["known_points"], "a non-empty list of known points is required")
    points = []
    for i, p in enumerate(kp):
        if not isinstance(p, dict) or "coords" not in p:
            rd.fail(["known_points", i], "each known point needs coords")
        coords = p["coords"]
        if not isinstance(coords, list) or len(coords) != rank or not all(isinstance(c, int) for c in coords):
            rd.fail(["known_points", i, "coords"], f"expected {rank} integers")
        if "x" in p:
            parse_rational(p["x"], f"known_points.{i}.x")
            parse_rational(p.get("y"), f"known_points.{i}.y")
            points.append(KnownPoint(list(coords), str(p["x"]), str(p["y"])))
        else:
            points.append(KnownPoint(list(coords)))
    heights = rd.get(["heights"])
    if "mu1" not in heights:
        rd.fail(["heights", "mu1"], "missing required field")
    if "mu3" not in heights and "pairing_matrix" not in heights:
        rd.fail(["heights", "mu3"], "give mu3 or a pairing_matrix")
    if "mu2" not in heights and "pairing_matrix" not in heights:
        rd.fail(["heights", "mu2"], "give mu2 or a pairing_matrix")
    for k in ("mu1", "mu2", "mu3", "c_h", "s_h"):
        if k in heights:
            parse_real(heights[k], where=f"heights.{k}")
    if "pairing_matrix" in heights:
        M = heights["pairing_matrix"]
        if not isinstance(M, list) or len(M) != rank or any(not isinstance(r, list) or len(r) != rank for r in M):
            rd.fail(["heights", "pairing_matrix"], f"expected a {rank}x{rank} matrix")
        for i in range(rank):
            for j in range(rank):
                if parse_rational(M[i][j]) != parse_rational(M[j][i]):
                    rd.fail(["heights", "pairing_matrix"], "matrix is not symmetric")
    provenance = rd.get(["provenance"])
    for key in ("mordell_weil", "known_points", "heights"):
        if not provenance.get(key):
            rd.fail(["provenance", key], "provenance is required for every supplied datum")
    B = rd.get(["bootstrap", "B"], required=False)
    assertion = rd.get(["bootstrap", "assertion"], required=False)
    if B is not None:
        if not isinstance(B, int) or B < 1:
            rd.fail(["bootstrap", "B"], "expected a positive integer")
        if not assertion:
            rd.fail(["bootstrap", "assertion"], "a supplied B needs a recorded assertion")
    elif not torsion_free:
        rd.fail(["mordell_weil", "torsion_free"], "without B the sieve needs a torsion-free J(Q)")
    regs = rd.get(["regulators"], required=False, default={}) or {}
    for k, v in regs.items():
        parse_real(v, where=f"regulators.{k}")
    if regs and not provenance.get("regulators"):
        rd.fail(["provenance", "regulators"], "supplied regulator bounds need provenance")
    sieve = rd.get(["sieve"], required=False, default={}) or {}
    allowed = {"primes_up_to", "prime_start", "exponent", "multiplier", "smooth_bound", "bad_primes",
               "lower_bound_every", "workers"}
    for k in sieve:
        if k not in allowed:
            rd.fail(["sieve", k], f"unknown sieve setting (allowed: {sorted(allowed)})")
    return ProblemConfig(
        label=str(rd.get(["label"], required=False, default="")),
        curve={"A": curve["A"], "B": curve["B"], "F": list(curve["F"])},
        rank=rank,
        torsion_free=torsion_free,
        basis=basis,
        known_points=points,
        heights=dict(heights),
        provenance=dict(provenance),
        cosets=rd.get(["descent", "cosets"], required=False, default="from_basis"),
        twist_parity=int(rd.get(["descent", "twist_parity"], required=False, default=1)),
        bootstrap_B=B,
        bootstrap_assertion=assertion,
        sieve=dict(sieve),
        regulators={str(k): str(v) for k, v in regs.items()},
        precision=int(rd.get(["precision"], required=False, default=256)),
    )


def ingest(path: str) -> ProblemConfig:
    with open(path) as fh:
        return ingest_text(fh.read())
