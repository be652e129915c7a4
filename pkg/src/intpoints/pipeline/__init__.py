"""Config ingest, orchestration, certificates and the command line."""

from .certificate import build_certificate, dump, load, verify_certificate
from .config import ConfigError, ProblemConfig, emit, ingest, ingest_text
from .core import (
    PipelineError,
    Problem,
    check_known_points,
    compute_bounds,
    prepare,
    run_all,
    run_sieve,
)
from .solutions import check_solutions, search_box

__all__ = [
    "ConfigError", "PipelineError", "Problem", "ProblemConfig",
    "build_certificate", "check_known_points", "check_solutions", "compute_bounds", "dump", "emit",
    "ingest", "ingest_text", "load", "prepare", "run_all", "run_sieve", "search_box", "verify_certificate",
]
