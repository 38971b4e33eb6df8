"""Command-line frontend.

Subcommands read a JSON input, run one pipeline and write a JSON result:

- ``solve-kkm``: polytope + cover + anchors -> solver certificate.
- ``pierce``: d-interval families -> colourful matching + certificate.
- ``divide``: players -> allocation + certificate.
- ``hypergraph``: hypergraph -> ν, τ, ν* and bounds.
- ``check-cover``: polytope + cover -> sampled weak-cover check.

Exit codes: 0 success, 2 hypothesis or cover violation (violation JSON
written), 1 any other error.
"""

from __future__ import annotations

import argparse
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence

from pydantic import ValidationError

from src.cake import divide
from src.config import settings
from src.cover import falsify_weak_cover
from src.d_interval import pierce
from src.errors import CoverViolation, HypothesisViolation
from src.reporting import (
    RationalEncoder,
    allocation_to_dict,
    certificate_to_dict,
    hypergraph_report,
    hypergraph_table,
    hypothesis_violation_to_dict,
    matching_to_dict,
    violation_to_dict,
)
from src.schemas import HypergraphInput, PiercingInput, PlayersInput, RunConfig, SolveInput
from src.solver import run_pipeline, solve_summary
from src.utils.file_io import append_jsonl, load_json, write_json

logger = logging.getLogger(__name__)

# Used by solve-kkm and divide when --eps is omitted
DEFAULT_EPS = Fraction(1, 16)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

# --------------------------------------------------------------------------- #
# Helpers                                                                     #
# --------------------------------------------------------------------------- #


def _out_path(config: RunConfig) -> Path:
    if config.out is not None:
        return config.out
    return settings.OUTPUT_DIR / f"{config.input.stem}_{config.command}.json"


def _write(config: RunConfig, payload: Dict[str, Any]) -> Path:
    return write_json(_out_path(config), payload, encoder=RationalEncoder)


def _write_trace(config: RunConfig, trace: List[Dict[str, Any]] | None) -> None:
    if trace is None:
        return
    path = _out_path(config).with_suffix(".trace.jsonl")
    if path.exists():
        path.unlink()
    count = append_jsonl(path, trace, encoder=RationalEncoder)
    logger.info("Trace with %d records written to %s", count, path)


# --------------------------------------------------------------------------- #
# Commands                                                                    #
# --------------------------------------------------------------------------- #


def cmd_solve_kkm(config: RunConfig) -> int:
    """Solves a KKM instance and writes the certificate (or the violation)."""
    logger.info("--- Solve: loading %s ---", config.input)
    try:
        data = SolveInput.model_validate(load_json(config.input, ["polytope", "cover"]))
        P = data.polytope.build()
        oracle = data.cover.build(P)
        anchors = data.build_anchors(P)
        trace: List[Dict[str, Any]] | None = [] if config.trace else None
        run = run_pipeline(P, oracle, anchors, config.eps or DEFAULT_EPS, trace)
    except CoverViolation as e:
        logger.warning("Cover violation: %s", e)
        _write(config, violation_to_dict(e.certificate, P))
        return EXIT_VIOLATION
    except Exception as e:
        logger.error("solve-kkm failed: %s", e, exc_info=True)
        return EXIT_ERROR

    payload = certificate_to_dict(run.certificate)
    payload["summary"] = solve_summary(run)
    _write(config, payload)
    _write_trace(config, trace)
    return EXIT_OK


def cmd_pierce(config: RunConfig) -> int:
    """Finds a colourful matching of d-intervals."""
    logger.info("--- Pierce: loading %s ---", config.input)
    try:
        instance = PiercingInput.model_validate(load_json(config.input, ["variant", "d", "families"])).build()
        trace: List[Dict[str, Any]] | None = [] if config.trace else None
        result = pierce(
            instance,
            config.eps,
            check=not config.skip_hypothesis,
            enforce_cap=not config.no_hypothesis_cap,
            trace=trace,
        )
    except HypothesisViolation as e:
        logger.warning("Hypothesis violation: %s", e)
        _write(config, hypothesis_violation_to_dict(list(e.colors), list(e.cover), e.required))
        return EXIT_VIOLATION
    except CoverViolation as e:
        logger.warning("Cover violation: %s", e)
        _write(config, violation_to_dict(e.certificate, instance.polytope()))
        return EXIT_VIOLATION
    except Exception as e:
        logger.error("pierce failed: %s", e, exc_info=True)
        return EXIT_ERROR

    _write(config, matching_to_dict(result, instance))
    _write_trace(config, trace)
    return EXIT_OK


def cmd_divide(config: RunConfig) -> int:
    """Divides d cakes among hungry players."""
    logger.info("--- Divide: loading %s ---", config.input)
    try:
        data = PlayersInput.model_validate(load_json(config.input, ["m", "d", "players"]))
        trace: List[Dict[str, Any]] | None = [] if config.trace else None
        result = divide(data.build(), data.m, data.d, config.eps or DEFAULT_EPS, trace)
    except CoverViolation as e:
        logger.warning("Players are not hungry at %r", e.certificate.point)
        _write(config, {"violation": "cover", "point": e.certificate.point, "colors": list(e.certificate.colors)})
        return EXIT_VIOLATION
    except Exception as e:
        logger.error("divide failed: %s", e, exc_info=True)
        return EXIT_ERROR

    _write(config, allocation_to_dict(result))
    _write_trace(config, trace)
    return EXIT_OK


def cmd_hypergraph(config: RunConfig) -> int:
    """Reports ν, τ, ν* and the applicable lower bounds."""
    logger.info("--- Hypergraph: loading %s ---", config.input)
    try:
        data = HypergraphInput.model_validate(load_json(config.input, ["vertices", "edges"]))
        report = hypergraph_report(data.build(), data.d)
    except Exception as e:
        logger.error("hypergraph failed: %s", e, exc_info=True)
        return EXIT_ERROR

    logger.info("Hypergraph invariants:\n%s", hypergraph_table(report).to_string())
    _write(config, report)
    return EXIT_OK


def cmd_check_cover(config: RunConfig) -> int:
    """Samples the cover for a weak-cover violation."""
    logger.info("--- Check cover: loading %s ---", config.input)
    try:
        data = SolveInput.model_validate(load_json(config.input, ["polytope", "cover"]))
        P = data.polytope.build()
        oracle = data.cover.build(P)
        m = config.weak_m or P.k
        samples = config.samples or settings.COVER_SAMPLES
        found = falsify_weak_cover(oracle, P, m, samples, config.seed)
    except Exception as e:
        logger.error("check-cover failed: %s", e, exc_info=True)
        return EXIT_ERROR

    if found is not None:
        _write(config, violation_to_dict(found, P))
        return EXIT_VIOLATION
    _write(config, {"violation": None, "m": m, "samples": samples, "seed": config.seed})
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "solve-kkm": cmd_solve_kkm,
    "pierce": cmd_pierce,
    "divide": cmd_divide,
    "hypergraph": cmd_hypergraph,
    "check-cover": cmd_check_cover,
}

# --------------------------------------------------------------------------- #
# CLI entry-point                                                             #
# --------------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kkm", description="Sparse colourful KKM solver and applications.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        cmd = sub.add_parser(name, help=func.__doc__)
        cmd.add_argument("input", type=Path, help="JSON input file")
        cmd.add_argument("--eps", default=None, help="triangulation diameter as NUM/DEN")
        cmd.add_argument("--seed", type=int, default=0, help="sampling seed (check-cover)")
        cmd.add_argument("--trace", action="store_true", help="write the elimination trace as JSON lines")
        cmd.add_argument("--out", type=Path, default=None, help="result file (default: OUTPUT_DIR)")
        cmd.add_argument("--samples", type=int, default=None, help="points per face (check-cover)")
        cmd.add_argument("--weak-m", dest="weak_m", type=int, default=None, help="weakness parameter m (check-cover)")
        cmd.add_argument(
            "--skip-hypothesis", action="store_true", help="skip the exact piercing hypothesis check (pierce)"
        )
        cmd.add_argument(
            "--no-hypothesis-cap",
            dest="no_hypothesis_cap",
            action="store_true",
            help="run the hypothesis check beyond HYPOTHESIS_FAMILY_CAP families (pierce)",
        )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL, format="[%(levelname)s] %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.model_validate({k: v for k, v in vars(args).items() if v is not None})
    except ValidationError as e:
        logger.error("Invalid arguments: %s", e)
        return EXIT_ERROR
    return COMMANDS[config.command](config)
