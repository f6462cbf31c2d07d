import argparse
import logging
import sys
from typing import Optional, Sequence

from slipfield.config import load_document
from slipfield.errors import ConfigError, IntegrationError, SolverError
from slipfield.log import configure_logging
from slipfield.services.scenarios import SCENARIOS, get_scenario, run
from slipfield.services.validation import parse_grids, validate
from slipfield.version import __version__

log = logging.getLogger("slipfield.cli")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="slipfield",
        description="Phase-field screw dislocation runs on a 2D-1D slip model.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="Integrate one scenario and write a run directory.")
    run_parser.add_argument(
        "--scenario",
        choices=sorted(SCENARIOS),
        default="custom",
        help="Preset layered under the config file (explicit keys win).",
    )
    run_parser.add_argument("--config", help="JSON configuration document.")
    run_parser.add_argument("--out", help="Output directory (overrides output.dir).")

    validate_parser = sub.add_parser("validate", help="Check Laplace and DtN convergence.")
    validate_parser.add_argument(
        "--grids",
        default="64x32,128x64,256x128",
        help="Comma separated NXxNY sizes, coarsest first.",
    )
    return parser.parse_args(argv)


def _run(args: argparse.Namespace) -> int:
    document = load_document(args.config)
    if args.out:
        document["output.dir"] = args.out
    scenario = get_scenario(args.scenario)
    cfg = scenario.resolve(document)
    out = run(cfg, scenario=scenario.name)
    print(out.directory)
    return EXIT_OK


def _validate(args: argparse.Namespace) -> int:
    report = validate(parse_grids(args.grids))
    for line in report.lines():
        print(line)
    if not report.passed:
        log.error("Validation failed acceptance thresholds.")
        return EXIT_ACCEPTANCE
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parse_args(argv)
    configure_logging()
    try:
        if args.command == "run":
            return _run(args)
        return _validate(args)
    except ConfigError as exc:
        log.error("Configuration error: %s", exc)
        return EXIT_CONFIG
    except IntegrationError as exc:
        t = exc.state.t if exc.state is not None else float("nan")
        log.error("Integration failed near t=%.6g: %s", t, exc)
        return EXIT_NUMERICAL
    except SolverError as exc:
        log.error("Laplace solve failed: %s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
