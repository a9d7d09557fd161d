"""Command line front end: ``wachforge {build,solve,verify,selftest}``.

Exit codes: 0 all verdicts true, 2 validation error, 3 solver obstruction,
4 verification failure (including a corrupted baseline file).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from . import pipeline
from .config import RunConfig, load_config
from .family import SpecError
from .padic import NoSolution, PrecisionError
from .report import (IntegrityError, check_integrity, document, dumps, summary_lines,
                     write_text, write_with_hash)
from .wach import Obstruction

log = logging.getLogger("wachforge")

EXIT_OK, EXIT_VALIDATION, EXIT_OBSTRUCTION, EXIT_FAILURE = 0, 2, 3, 4


def _jobs(value) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("WACHFORGE_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SpecError(f"WACHFORGE_JOBS must be an integer, got {env!r}", "WACHFORGE_JOBS")
    return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", default="runs", help="directory for run artifacts")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--jobs", type=int, help="worker processes (default: $WACHFORGE_JOBS or 1)")
    common.add_argument("--json-only", action="store_true", help="print only the JSON report")
    ap = argparse.ArgumentParser(prog="wachforge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="family data, filtration and exponents")
    sub.add_parser("solve", parents=[common], help="solve for G and check the module axioms")
    sub.add_parser("verify", parents=[common], help="full reduction-constancy suite")
    sub.add_parser("selftest", parents=[common], help="exhaustive small-scale suites")
    return ap


def _config(args) -> RunConfig:
    if not args.config:
        raise SpecError("--config is required for this command", "--config")
    cfg = load_config(args.config)
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 2 ** 64:
            raise SpecError("seed must fit in an unsigned 64-bit integer", "--seed")
        cfg.seed = args.seed
    return cfg


def _emit(args, run_dir: str | None, doc: dict) -> None:
    text = dumps(doc)
    summary = "\n".join(summary_lines(doc)) + "\n"
    if run_dir is not None:
        os.makedirs(run_dir, exist_ok=True)
        write_text(os.path.join(run_dir, f"{doc['command']}.json"), text)
        write_text(os.path.join(run_dir, f"{doc['command']}.txt"), summary)
    sys.stdout.write(text if args.json_only else summary)


def _baseline(run_dir: str, baseline: dict) -> None:
    """Persist the residual baseline, or check it against the stored copy."""
    path = os.path.join(run_dir, "baseline.json")
    text = dumps(baseline)
    if os.path.exists(path):
        check_integrity(path)
        with open(path) as fh:
            if fh.read() != text:
                raise IntegrityError("baseline.json: stored residual differs from recomputed")
        log.info("baseline matches %s", path)
    else:
        write_with_hash(path, text)


def run(args) -> int:
    if args.command == "selftest":
        body = pipeline.run_selftest()
        run_dir = os.path.join(args.out, "selftest") if args.out else None
        _emit(args, run_dir, document("selftest", None, body))
        return EXIT_OK if body["verdict"] else EXIT_FAILURE
    cfg = _config(args)
    jobs = _jobs(args.jobs)
    run_dir = os.path.join(args.out, cfg.digest()[:16])
    os.makedirs(run_dir, exist_ok=True)
    write_text(os.path.join(run_dir, "config.json"), dumps(cfg.canonical()))
    if args.command == "build":
        body = pipeline.run_build(cfg)
    elif args.command == "solve":
        body = pipeline.run_solve(cfg, jobs)
    else:
        body = pipeline.run_verify(cfg, jobs)
        _baseline(run_dir, body.pop("_baseline"))
    _emit(args, run_dir, document(args.command, cfg.canonical(), body))
    if not body["verdict"]:
        failed = next(name for name, ok, _ in body["checks"] if not ok)
        print(f"wachforge: verification failed at {failed}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except SpecError as exc:
        print(f"wachforge: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Obstruction as exc:
        print(f"wachforge: solver obstruction at degree {exc.degree}: {exc}", file=sys.stderr)
        return EXIT_OBSTRUCTION
    except (PrecisionError, NoSolution) as exc:
        print(f"wachforge: solver failure: {exc}", file=sys.stderr)
        return EXIT_OBSTRUCTION
    except IntegrityError as exc:
        print(f"wachforge: integrity error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
