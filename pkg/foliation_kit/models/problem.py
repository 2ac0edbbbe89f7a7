# ============================================================
# foliation_kit/models/problem.py — Problem File Model
# ============================================================
# A problem file is one JSON document describing a single
# instance and the commands to run on it.
#
# Schema (version 1):
# {
#   "schema":      1,
#   "variables":   ["X", "Y", "Z"],   — 3 names: homogeneous P, Q
#                                       2 names: affine P, Q
#   "P": str, "Q": str, "p": int, "q": int,
#   "random":      {"m", "n", "p", "q", "bound"?}   — instead of P, Q
#   "morphism":    {"components": [str × 3], "variables"?}
#                  | {"random": {"s": int, "bound"?}}
#   "deformation": {"F1": [str × 3], "alpha1"?: [str × 3]}
#                  | {"random": {"bound"?, "alpha1"?: bool}}
#   "alpha":       Form   — input of decompose (affine, poles on Q)
#   "omega":       Form   — input of exactness (defaults to alpha)
#   "melnikov":    {"ts": [number], "center"?: [x, y],
#                   "direction"?: "omega_W" | "omega_e" | "pullback"}
#   "commands":    [str],
#   "tolerances":  {...}  — same keys as a --tol-file
#   "seed":        int
# }
#
# Form sub-document:
# {
#   "coefficients": [str],       — 2 (affine x, y) or 3 (homogeneous)
#   "variables"?:   [str],
#   "divisor"?:     "Q" | "PQ",  — default "Q"
#   "pole_order"?:  int          — default 0
# }
# ============================================================

import json
from dataclasses import dataclass, field

import jsonschema

from foliation_kit.config import TOLERANCE_SCHEMA
from foliation_kit.errors import SchemaError

SCHEMA_VERSION = 1

COMMANDS = ('check', 'milnor', 'basis', 'decompose', 'exactness', 'pullback-tangent',
            'verify-332', 'melnikov', 'critical-values')

_POLY_TRIPLE = {'type': 'array', 'items': {'type': 'string'}, 'minItems': 3, 'maxItems': 3}
_NAMES = {'type': 'array', 'items': {'type': 'string', 'pattern': '^[A-Za-z_][A-Za-z0-9_]*$'},
          'uniqueItems': True}

FORM_SCHEMA = {
    'type': 'object',
    'additionalProperties': False,
    'required': ['coefficients'],
    'properties': {
        'coefficients': {'type': 'array', 'items': {'type': 'string'},
                         'minItems': 2, 'maxItems': 3},
        'variables': _NAMES,
        'divisor': {'enum': ['Q', 'PQ']},
        'pole_order': {'type': 'integer', 'minimum': 0},
    },
}

PROBLEM_SCHEMA = {
    'type': 'object',
    'additionalProperties': False,
    'required': ['schema', 'commands'],
    'properties': {
        'schema': {'const': SCHEMA_VERSION},
        'variables': dict(_NAMES, minItems=2, maxItems=3),
        'P': {'type': 'string'},
        'Q': {'type': 'string'},
        'p': {'type': 'integer', 'minimum': 1},
        'q': {'type': 'integer', 'minimum': 1},
        'random': {
            'type': 'object',
            'additionalProperties': False,
            'required': ['m', 'n', 'p', 'q'],
            'properties': {
                'm': {'type': 'integer', 'minimum': 3},
                'n': {'type': 'integer', 'minimum': 2},
                'p': {'type': 'integer', 'minimum': 1},
                'q': {'type': 'integer', 'minimum': 1},
                'bound': {'type': 'integer', 'minimum': 1},
            },
        },
        'morphism': {
            'oneOf': [
                {'type': 'object', 'additionalProperties': False, 'required': ['components'],
                 'properties': {'components': _POLY_TRIPLE, 'variables': dict(_NAMES, minItems=3,
                                                                               maxItems=3)}},
                {'type': 'object', 'additionalProperties': False, 'required': ['random'],
                 'properties': {'random': {
                     'type': 'object', 'additionalProperties': False, 'required': ['s'],
                     'properties': {'s': {'type': 'integer', 'minimum': 2},
                                    'bound': {'type': 'integer', 'minimum': 1}}}}},
            ],
        },
        'deformation': {
            'oneOf': [
                {'type': 'object', 'additionalProperties': False, 'required': ['F1'],
                 'properties': {'F1': _POLY_TRIPLE, 'alpha1': _POLY_TRIPLE}},
                {'type': 'object', 'additionalProperties': False, 'required': ['random'],
                 'properties': {'random': {
                     'type': 'object', 'additionalProperties': False,
                     'properties': {'bound': {'type': 'integer', 'minimum': 1},
                                    'alpha1': {'type': 'boolean'}}}}},
            ],
        },
        'alpha': FORM_SCHEMA,
        'omega': FORM_SCHEMA,
        'melnikov': {
            'type': 'object',
            'additionalProperties': False,
            'required': ['ts'],
            'properties': {
                'ts': {'type': 'array', 'items': {'type': 'number'}, 'minItems': 1},
                'center': {'type': 'array', 'items': {'type': 'number'},
                           'minItems': 2, 'maxItems': 2},
                'direction': {'enum': ['omega_W', 'omega_e', 'pullback']},
            },
        },
        'commands': {'type': 'array', 'items': {'enum': list(COMMANDS)}, 'minItems': 1},
        'tolerances': TOLERANCE_SCHEMA,
        'seed': {'type': 'integer', 'minimum': 0},
    },
    'dependentRequired': {'P': ['Q', 'p', 'q'], 'Q': ['P', 'p', 'q']},
    'oneOf': [{'required': ['P']}, {'required': ['random']}],
}


@dataclass
class ProblemFile:
    """
    A validated problem file.

    Usage:
        problem = ProblemFile.load('problem.json')
        problem.commands     → ('check', 'milnor')
        problem.raw          → the exact bytes, hashed into the report
    """

    commands: tuple
    variables: tuple = ('X', 'Y', 'Z')
    P: str = None
    Q: str = None
    p: int = None
    q: int = None
    random: dict = None
    morphism: dict = None
    deformation: dict = None
    alpha: dict = None
    omega: dict = None
    melnikov: dict = None
    tolerances: dict = field(default_factory=dict)
    seed: int = None
    raw: bytes = b''

    # ----- Loading -----

    @staticmethod
    def validate(data):
        """
        Check a decoded document against PROBLEM_SCHEMA.

        Raises:
            SchemaError: with the JSON path of the first violation.
        """
        validator = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)
        errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
        if errors:
            first = errors[0]
            path = '/'.join(str(part) for part in first.absolute_path) or '<root>'
            raise SchemaError(f"Invalid problem file at {path}: {first.message}",
                              {'path': list(first.absolute_path)})

    @classmethod
    def from_dict(cls, data, raw=None):
        cls.validate(data)
        if raw is None:
            raw = json.dumps(data, sort_keys=True).encode('utf-8')
        return cls(
            commands=tuple(data['commands']),
            variables=tuple(data.get('variables', ('X', 'Y', 'Z'))),
            P=data.get('P'),
            Q=data.get('Q'),
            p=data.get('p'),
            q=data.get('q'),
            random=data.get('random'),
            morphism=data.get('morphism'),
            deformation=data.get('deformation'),
            alpha=data.get('alpha'),
            omega=data.get('omega'),
            melnikov=data.get('melnikov'),
            tolerances=dict(data.get('tolerances', {})),
            seed=data.get('seed'),
            raw=raw,
        )

    @classmethod
    def load(cls, path):
        """
        Read and validate a problem file.

        Raises:
            SchemaError: unreadable file, invalid JSON, or a schema violation.
        """
        try:
            with open(path, 'rb') as handle:
                raw = handle.read()
            data = json.loads(raw.decode('utf-8'))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SchemaError(f"Cannot read problem file: {exc}", {'path': str(path)})
        return cls.from_dict(data, raw)

    # ----- Queries -----

    @property
    def is_random(self):
        return self.random is not None
