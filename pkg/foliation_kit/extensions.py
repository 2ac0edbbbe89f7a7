# ============================================================
# foliation_kit/extensions.py — Shared Runtime Instances
# ============================================================
# Shared instances live here (instead of in app.py) so that
# library modules can import them without circular imports.
#
# Pattern:
#   1. Create the instance here (uninitialised).
#   2. In app.py, call init_logging(...) once at startup.
#   3. Other modules just `from foliation_kit.extensions import logger`.
#
# Library code never configures handlers itself; if nothing
# calls init_logging (e.g. under pytest) records simply go to
# whatever the host application configured.
# ============================================================

import logging
import sys
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger('foliation_kit')

_handler = None  # type: logging.Handler | None


def init_logging(level='INFO'):
    """
    Attach a single stderr handler to the package logger.

    stdout is reserved for the JSON report, so log lines must
    never be written there. Calling this twice only updates
    the level.
    """
    global _handler

    logger.setLevel(level.upper() if isinstance(level, str) else level)
    if _handler is None:
        _handler = logging.StreamHandler(sys.stderr)
        _handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s %(name)s: %(message)s'))
        logger.addHandler(_handler)
        logger.propagate = False
    return logger


def command_executor(max_workers):
    """
    Executor used by engine.run for independent commands.

    Returns None for a single worker so the engine runs commands
    inline and stack traces stay readable.
    """
    if max_workers <= 1:
        return None
    return ThreadPoolExecutor(max_workers=max_workers,
                              thread_name_prefix='foliation-kit')
