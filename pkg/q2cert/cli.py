"""Command-line entry points: ``classify``, ``batch``, ``sweep`` and ``verify``."""

from __future__ import annotations

import argparse
import asyncio
from collections.abc import Sequence
import json
import logging
from pathlib import Path
import sys
from typing import Any

from .certificate import certificate_from_json, certificate_to_json
from .config import LOG_LEVELS, Q2CertConfig
from .coordinator import BatchCoordinator
from .errors import CounterexampleError, Q2CertError
from .graph import parse_graph6
from .pipeline import classify, conjecture_sweep
from .verifier import verify_certificate

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.write("\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="q2cert", description="Certify q(G) = 2 for dense graphs.")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify one graph6 word ('-' reads stdin)")
    p.add_argument("graph6")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol-residual", type=float)
    p.add_argument("--tol-rank", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--exact-only", action="store_true", default=None)
    p.add_argument("--json", type=Path, dest="json_out", help="write the certificate here")

    p = sub.add_parser("batch", help="classify a graph6 file into JSON lines")
    p.add_argument("source", type=Path)
    p.add_argument("destination", type=Path)
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("sweep", help="classify every dense graph of one order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-cobar-edges", type=int)
    p.add_argument("--report", type=Path, required=True)

    p = sub.add_parser("verify", help="re-check a certificate file")
    p.add_argument("certificate", type=Path)
    return parser


def _config(args: argparse.Namespace) -> Q2CertConfig:
    keys = ("seed", "tol_residual", "tol_rank", "restarts", "exact_only", "jobs", "log_level")
    return Q2CertConfig.load({k: getattr(args, k, None) for k in keys})


def _cmd_classify(args: argparse.Namespace, config: Q2CertConfig) -> int:
    word = sys.stdin.readline() if args.graph6 == "-" else args.graph6
    cert = classify(parse_graph6(word), config)
    text = certificate_to_json(cert, indent=2)
    if args.json_out is not None:
        args.json_out.write_text(text + "\n", encoding="utf-8")
        _emit(f"{cert.verdict} {' '.join(cert.routes)}")
    else:
        _emit(text)
    return EXIT_OK


def _cmd_batch(args: argparse.Namespace, config: Q2CertConfig) -> int:
    coordinator = BatchCoordinator(config, args.jobs)
    summary = asyncio.run(coordinator.async_run(args.source, args.destination))
    _emit(json.dumps(summary.as_dict(), sort_keys=True))
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace, config: Q2CertConfig) -> int:
    payload: dict[str, Any]
    try:
        report = conjecture_sweep(args.n, args.max_cobar_edges, config)
    except CounterexampleError as err:
        _LOGGER.error("Sweep halted on %s: %s", err.graph6, err.reason)
        payload = {
            "counterexample": {
                "certificate": json.loads(err.certificate_json),
                "graph6": err.graph6,
                "reason": err.reason,
            },
            "n": args.n,
        }
        args.report.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return EXIT_FAILED
    payload = report.as_dict()
    args.report.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    _emit(f"n={report.n}: {sum(r.classes for r in report.rows)} classes, {len(report.findings)} findings")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace, config: Q2CertConfig) -> int:
    cert = certificate_from_json(args.certificate.read_text(encoding="utf-8"))
    report = verify_certificate(cert, config)
    if report.ok:
        _emit(f"verified {cert.verdict}")
        return EXIT_OK
    failing = report.failing_step
    _emit(f"failed at {failing.name}: {failing.message}" if failing else "failed")
    return EXIT_FAILED


_COMMANDS = {
    "batch": _cmd_batch,
    "classify": _cmd_classify,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config(args)
    except Q2CertError as err:
        sys.stderr.write(f"q2cert: {err}\n")
        return EXIT_USAGE
    logging.basicConfig(
        level=config.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    try:
        return _COMMANDS[args.command](args, config)
    except (Q2CertError, OSError) as err:
        _LOGGER.error("%s failed: %s", args.command, err)
        sys.stderr.write(f"q2cert: {err}\n")
        return EXIT_FAILED
