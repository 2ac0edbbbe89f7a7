# ============================================================
# foliation_kit/app.py — Command-Line Entry Point
# ============================================================
# Architecture overview:
#   1. Parse the command line.
#   2. Configure logging from Config (stderr only).
#   3. Load the problem file and the optional tolerance file.
#   4. Hand everything to engine.run().
#   5. Write the JSON report to --out or stdout and exit with
#      the engine's code.
#
# To run:
#   foliation-kit run problem.json --seed 7 --out report.json
#
# Or from the project root:
#   python -m foliation_kit run problem.json
# ============================================================

import argparse
import sys

from foliation_kit import __version__
from foliation_kit.config import Config, Tolerances
from foliation_kit.engine import run
from foliation_kit.errors import FoliationKitError
from foliation_kit.extensions import init_logging, logger
from foliation_kit.models.problem import ProblemFile
from foliation_kit.report import dumps


def create_parser():
    """
    Build the argument parser.

    Kept separate from main() so tests can parse argument lists
    without running anything.
    """
    parser = argparse.ArgumentParser(
        prog='foliation-kit',
        description='Exact computations for foliations with first integral P^q/Q^p.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', default=Config.LOG_LEVEL,
                        help='logging level for stderr output (default: %(default)s)')
    commands = parser.add_subparsers(dest='action', required=True)

    run_parser = commands.add_parser('run', help='run the commands listed in a problem file')
    run_parser.add_argument('problem', help='path to the problem JSON file')
    run_parser.add_argument('--seed', type=int, default=None,
                            help='random seed, overrides the problem file')
    run_parser.add_argument('--tol-file', default=None,
                            help='JSON object of tolerance overrides')
    run_parser.add_argument('--out', default=None,
                            help='write the report here instead of stdout')
    run_parser.add_argument('--workers', type=int, default=None,
                            help='concurrent commands (default: FOLIATION_KIT_MAX_WORKERS)')
    return parser


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(text)


def main(argv=None):
    """
    Run the CLI and return the process exit code.

    Returns:
        int: 0 success, 1 verification failure, 2 input error,
             3 resource or escalation cap.
    """
    args = create_parser().parse_args(argv)
    init_logging(args.log_level)

    # --- Step 1: inputs ---
    try:
        problem = ProblemFile.load(args.problem)
        tolerances = Tolerances.from_file(args.tol_file) if args.tol_file else Tolerances()
    except FoliationKitError as exc:
        logger.error("❌ %s", exc.message)
        return exc.exit_code

    # --- Step 2: run ---
    report, exit_code = run(problem, seed=args.seed, tolerances=tolerances,
                            max_workers=args.workers)

    # --- Step 3: output ---
    try:
        _write(dumps(report), args.out)
    except OSError as exc:
        logger.error("❌ Cannot write report: %s", exc)
        return 2
    logger.info("Report written (exit code %d)", exit_code)
    return exit_code


if __name__ == '__main__':
    sys.exit(main())
