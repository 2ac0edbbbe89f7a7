# ============================================================
# foliation_kit/report.py — Report Serialization
# ============================================================
# Turns command results into JSON-safe values:
#
#   rationals         → "a/b" strings ("a" when integral)
#   polynomials       → canonical text (format_poly)
#   differential forms → DifferentialForm.to_dict()
#   complex numbers   → [re, im]
#   numpy scalars / arrays → floats / nested lists
#
# The report is written with a fixed key order and no timing
# (unless asked for), so identical inputs give identical bytes.
# ============================================================

import hashlib
import json
from fractions import Fraction

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement

from foliation_kit import __version__
from foliation_kit.algebra.forms import DifferentialForm
from foliation_kit.algebra.parser import format_poly

REPORT_SCHEMA_VERSION = 1


def rational(value):
    value = QQ(value) if not isinstance(value, Fraction) else value
    numerator, denominator = int(value.numerator), int(value.denominator)
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


def complex_pair(value):
    value = complex(value)
    return [float(value.real), float(value.imag)]


def to_json(value):
    """Recursively convert a result value to plain JSON types."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return complex_pair(value)
    if isinstance(value, Fraction) or QQ.of_type(value):
        return rational(value)
    if isinstance(value, PolyElement):
        return format_poly(value)
    if isinstance(value, DifferentialForm):
        return value.to_dict()
    if isinstance(value, np.ndarray):
        return [to_json(v) for v in value.tolist()]
    if hasattr(value, 'to_dict'):
        return to_json(value.to_dict())
    if isinstance(value, dict):
        return {str(k): to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    raise TypeError(f"Cannot serialize {type(value).__name__} into a report")


def provenance(raw, seed):
    return {
        'input_sha256': hashlib.sha256(raw).hexdigest(),
        'seed': seed,
        'tool_version': __version__,
    }


def build_report(raw, seed, instance, blocks, exit_code, timing=None):
    report = {
        'schema': REPORT_SCHEMA_VERSION,
        'provenance': provenance(raw, seed),
        'instance': to_json(instance),
        'results': [to_json(block) for block in blocks],
        'exit_code': exit_code,
    }
    if timing is not None:
        report['timing'] = to_json(timing)
    return report


def dumps(report):
    return json.dumps(report, indent=2, ensure_ascii=False) + '\n'
