"""Command-line front end.

Exit statuses:

* ``verify``: 0 certified, 1 rejected or failed (certificate still written), 2 input error
* ``profile``: 0 chain written, 1 geometric hypothesis violated, 2 input error
* ``sweep``: 0 CSV written, 2 invalid grid or input error
* ``oracle``: 0 no flags, 1 at least one interface flagged, 2 input error
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import oracle
from .chain_engine import certify
from .documents import (
    dumps,
    parse_chain_document,
    parse_profile_spec,
    serialize_certificate,
    serialize_chain,
    write_atomic,
)
from .errors import (
    CurvatureHypothesisViolated,
    InvalidGrid,
    LockError,
    NonpositiveMeanCurvature,
    NotAsymptoticallyFlat,
)
from .lock_core import DEFAULT_TOL
from .radial_geometry import chain_from_profile
from .sweep import TEMPLATES, write_sweep

log = logging.getLogger("lockcert")

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INPUT = 2


def _read(path) -> bytes:
    return Path(path).read_bytes()


def run_verify(chain_path, tol_flag: float | None, out_path) -> int:
    try:
        chain, doc_tol = parse_chain_document(_read(chain_path))
    except (OSError, LockError) as exc:
        log.error("cannot read chain %s: %s", chain_path, exc)
        return EXIT_INPUT
    tol = tol_flag if tol_flag is not None else (doc_tol if doc_tol is not None else DEFAULT_TOL)
    try:
        cert = certify(chain, tol)
    except LockError as exc:
        log.error("certificate construction failed: %s", exc)
        return EXIT_INPUT
    try:
        write_atomic(out_path, serialize_certificate(cert))
    except OSError as exc:
        log.error("cannot write %s: %s", out_path, exc)
        return EXIT_INPUT
    log.info("%s: %s (square_sum=%r)", chain_path, cert.label, cert.square_sum)
    return EXIT_OK if cert.certified else EXIT_REJECTED


def run_profile(spec_path, samples: int, chain_path) -> int:
    try:
        profile = parse_profile_spec(_read(spec_path))
    except (OSError, LockError) as exc:
        log.error("cannot read profile %s: %s", spec_path, exc)
        return EXIT_INPUT
    try:
        chain = chain_from_profile(profile, samples)
    except (CurvatureHypothesisViolated, NonpositiveMeanCurvature, NotAsymptoticallyFlat) as exc:
        log.error("profile violates a hypothesis: %s", exc)
        return EXIT_REJECTED
    except LockError as exc:
        log.error("invalid profile: %s", exc)
        return EXIT_INPUT
    try:
        write_atomic(chain_path, serialize_chain(chain))
    except OSError as exc:
        log.error("cannot write %s: %s", chain_path, exc)
        return EXIT_INPUT
    return EXIT_OK


def run_sweep(template: str, grid, csv_path, workers: int | None = None) -> int:
    try:
        rows = write_sweep(grid, csv_path, template, workers)
    except InvalidGrid as exc:
        log.error("invalid grid: %s", exc)
        return EXIT_INPUT
    except OSError as exc:
        log.error("cannot write %s: %s", csv_path, exc)
        return EXIT_INPUT
    log.info("wrote %d rows to %s", len(rows), csv_path)
    return EXIT_OK


def run_oracle(chain_path, theta_range: float, theta_steps: int, out=None) -> int:
    try:
        chain, doc_tol = parse_chain_document(_read(chain_path))
        results = oracle.scan_chain(
            chain, theta_range, theta_steps, doc_tol if doc_tol is not None else DEFAULT_TOL
        )
    except (OSError, LockError, ValueError) as exc:
        log.error("oracle failed on %s: %s", chain_path, exc)
        return EXIT_INPUT
    report = dumps({
        "range": theta_range,
        "steps": theta_steps,
        "interfaces": [r.as_dict() for r in results],
    })
    if out is None:
        sys.stdout.write(report)
    else:
        write_atomic(out, report)
    return EXIT_REJECTED if any(r.flags for r in results) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lockcert", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="build and write a lock certificate for a chain")
    p.add_argument("--chain", required=True)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("profile", help="turn a radial profile into a chain spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--emit-chain", required=True)

    p = sub.add_parser("sweep", help="map verdicts over a grid of two-jump chains")
    p.add_argument("--template", choices=TEMPLATES, default="two-jump")
    p.add_argument("--grid", required=True, help="JSON file or inline JSON object")
    p.add_argument("--csv", required=True)

    p = sub.add_parser("oracle", help="brute-force scan of boost angles")
    p.add_argument("--chain", required=True)
    p.add_argument("--range", type=float, default=10.0, dest="theta_range")
    p.add_argument("--steps", type=int, default=200_001)
    p.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    if args.command == "verify":
        return run_verify(args.chain, args.tol, args.out)
    if args.command == "profile":
        if args.samples < 1:
            log.error("--samples must be >= 1")
            return EXIT_INPUT
        return run_profile(args.spec, args.samples, args.emit_chain)
    if args.command == "sweep":
        return run_sweep(args.template, args.grid, args.csv)
    return run_oracle(args.chain, args.theta_range, args.steps, args.out)


if __name__ == "__main__":
    sys.exit(main())
