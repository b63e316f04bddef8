"""
Command-line entry point ``verify``.

    verify run <scenario> [--config FILE] [--tolerance X] [--windows 64,128] [--report json|md] [--out PATH]
    verify sweep <scenario> --windows 64,128,256 [...]
    verify all [--config DIR]

Exit status is 0 when every check passes, 1 when a check fails and 2 on a
configuration error.
"""

import argparse
import logging
import sys
from pathlib import Path

from src import __version__
from src.cz import TolerancePolicy
from src.errors import LabError
from src.reports import Report, ReportFormat, emit
from src.verification_service import Scenario, VerificationService

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _windows(text: str) -> list[int]:
    try:
        windows = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"windows must be comma-separated integers: {text!r}") from e
    if not windows or any(n < 1 for n in windows):
        raise argparse.ArgumentTypeError(f"windows must be positive integers: {text!r}")
    return windows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verify", description="Run regulator and spectral-invariant verification scenarios."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--root", default="./test_data", help="directory holding settings.yaml (default: %(default)s)"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument(
        "--report", choices=[f.value for f in ReportFormat], default=ReportFormat.JSON.value
    )
    output.add_argument("--out", type=Path, help="write the report here instead of stdout")

    single = argparse.ArgumentParser(add_help=False, parents=[output])
    single.add_argument("scenario", help="registered scenario name")
    single.add_argument("--config", type=Path, help="JSON scenario file")
    single.add_argument("--tolerance", type=float, help="absolute tolerance override")
    single.add_argument("--windows", type=_windows, help="comma-separated window sizes N")

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("run", parents=[single], help="run one scenario")
    commands.add_parser("sweep", parents=[single], help="run one scenario over a window sweep")
    run_all = commands.add_parser("all", parents=[output], help="run every scenario")
    run_all.add_argument("--config", type=Path, help="directory of JSON scenario files")
    return parser


def _request(service: VerificationService, args: argparse.Namespace) -> Scenario:
    if args.config is not None:
        request = service.load_scenario_file(args.config)
        if request.name != args.scenario:
            raise LabError("BadConfig", f"{args.config} describes {request.name!r}, not {args.scenario!r}")
    else:
        request = Scenario(name=args.scenario)
    update = {}
    if args.tolerance is not None:
        update["tolerance"] = TolerancePolicy(abs_tol=args.tolerance)
    if args.windows is not None:
        update["windows"] = args.windows
    return request.model_copy(update=update)


def _write(reports: list[Report], args: argparse.Namespace) -> None:
    text = emit(reports, args.report)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
        logger.info("Report written to %s", args.out)


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, run the requested scenarios and return the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    service = VerificationService(root_dir=args.root)
    try:
        if args.command == "all":
            reports = service.run_all(args.config)
        elif args.command == "sweep":
            reports = [service.sweep(_request(service, args))]
        else:
            reports = [service.run_scenario(_request(service, args))]
    except FileNotFoundError as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except LabError as e:
        if e.is_config_error:
            logger.error("Configuration error: %s", e)
            return EXIT_CONFIG
        logger.error("Verification aborted: %s", e)
        return EXIT_FAIL

    _write(reports, args)
    return EXIT_PASS if all(report.passed for report in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
