# ============================================================
# foliation_kit/config.py — Runtime Configuration
# ============================================================
# Reads environment variables from .env and exposes them as
# constants that the rest of the package can import.
#
# Numeric code never reads Config directly: it receives a
# frozen Tolerances record, built from Config and optionally
# overridden by a --tol-file JSON document.
# ============================================================

import json
import os
from dataclasses import dataclass, fields, replace

import jsonschema
from dotenv import load_dotenv

from foliation_kit.errors import SchemaError

# Load variables from the .env file at project root
load_dotenv(os.path.join(os.path.dirname(__file__), '..', '.env'))


def _flag(name, default):
    return os.getenv(name, default).lower() in ('true', '1', 'yes')


class Config:
    """
    Central configuration class.

    All settings are read from environment variables with defaults
    that reproduce the reference tolerances out-of-the-box.
    """

    # --- Logging ---
    LOG_LEVEL = os.getenv('FOLIATION_KIT_LOG_LEVEL', 'INFO')

    # --- Numeric tolerances ---
    FIBER_RESIDUAL = float(os.getenv('FOLIATION_KIT_FIBER_RESIDUAL', 1e-10))
    INTEGRAL_TOL = float(os.getenv('FOLIATION_KIT_INTEGRAL_TOL', 1e-8))
    MELNIKOV_RTOL = float(os.getenv('FOLIATION_KIT_MELNIKOV_RTOL', 1e-6))
    NEWTON_TOL = float(os.getenv('FOLIATION_KIT_NEWTON_TOL', 1e-12))
    MAX_STEPS = int(os.getenv('FOLIATION_KIT_MAX_STEPS', 4096))
    LOOP_NODES = int(os.getenv('FOLIATION_KIT_LOOP_NODES', 128))

    # --- Exact-arithmetic budgets ---
    ESCALATION_ROUNDS = int(os.getenv('FOLIATION_KIT_ESCALATION_ROUNDS', 4))
    MAX_UNKNOWNS = int(os.getenv('FOLIATION_KIT_MAX_UNKNOWNS', 6000))
    RESAMPLE_ATTEMPTS = int(os.getenv('FOLIATION_KIT_RESAMPLE_ATTEMPTS', 20))

    # --- Runner ---
    MAX_WORKERS = int(os.getenv('FOLIATION_KIT_MAX_WORKERS', 1))
    REPORT_TIMING = _flag('FOLIATION_KIT_REPORT_TIMING', 'false')


@dataclass(frozen=True)
class Tolerances:
    """Every numeric threshold used by periods, brieskorn and the runner."""

    fiber_residual: float = Config.FIBER_RESIDUAL
    integral_tol: float = Config.INTEGRAL_TOL
    melnikov_rtol: float = Config.MELNIKOV_RTOL
    newton_tol: float = Config.NEWTON_TOL
    max_steps: int = Config.MAX_STEPS
    loop_nodes: int = Config.LOOP_NODES
    escalation_rounds: int = Config.ESCALATION_ROUNDS
    max_unknowns: int = Config.MAX_UNKNOWNS
    resample_attempts: int = Config.RESAMPLE_ATTEMPTS

    @classmethod
    def from_file(cls, path):
        """
        Build tolerances from a JSON override file.

        Args:
            path (str): file holding a JSON object of overrides,
                        e.g. {"integral_tol": 1e-9}.

        Returns:
            Tolerances: defaults with the overrides applied.

        Raises:
            SchemaError: unreadable file, unknown key, wrong type.
        """
        try:
            with open(path, encoding='utf-8') as handle:
                overrides = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"Cannot read tolerance file: {exc}", {'path': str(path)})
        return cls().with_overrides(overrides)

    def with_overrides(self, overrides):
        if not overrides:
            return self
        try:
            jsonschema.validate(overrides, TOLERANCE_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SchemaError(f"Invalid tolerance overrides: {exc.message}",
                              {'path': list(exc.absolute_path)})
        return replace(self, **overrides)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


# JSON schema for --tol-file documents and the problem file "tolerances" key.
TOLERANCE_SCHEMA = {
    'type': 'object',
    'additionalProperties': False,
    'properties': {
        'fiber_residual': {'type': 'number', 'exclusiveMinimum': 0},
        'integral_tol': {'type': 'number', 'exclusiveMinimum': 0},
        'melnikov_rtol': {'type': 'number', 'exclusiveMinimum': 0},
        'newton_tol': {'type': 'number', 'exclusiveMinimum': 0},
        'max_steps': {'type': 'integer', 'minimum': 1},
        'loop_nodes': {'type': 'integer', 'minimum': 16},
        'escalation_rounds': {'type': 'integer', 'minimum': 0},
        'max_unknowns': {'type': 'integer', 'minimum': 1},
        'resample_attempts': {'type': 'integer', 'minimum': 1},
    },
}
