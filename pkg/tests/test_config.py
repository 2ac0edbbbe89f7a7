import json
from concurrent.futures import ThreadPoolExecutor

import pytest

from foliation_kit.config import TOLERANCE_SCHEMA, Tolerances
from foliation_kit.errors import SchemaError
from foliation_kit.extensions import command_executor


def test_overrides_replace_single_fields():
    base = Tolerances()
    tightened = base.with_overrides({'integral_tol': 1e-9, 'loop_nodes': 256})
    assert tightened.integral_tol == 1e-9
    assert tightened.loop_nodes == 256
    assert tightened.fiber_residual == base.fiber_residual


def test_empty_overrides_keep_the_instance():
    base = Tolerances()
    assert base.with_overrides({}) is base
    assert base.with_overrides(None) is base


@pytest.mark.parametrize('overrides', [
    {'bogus': 1.0},
    {'integral_tol': 0},
    {'integral_tol': 'small'},
    {'loop_nodes': 8},
    {'max_steps': 2.5},
])
def test_invalid_overrides(overrides):
    with pytest.raises(SchemaError):
        Tolerances().with_overrides(overrides)


def test_from_file(tmp_path):
    path = tmp_path / 'tol.json'
    path.write_text(json.dumps({'newton_tol': 1e-13, 'escalation_rounds': 1}))
    tolerances = Tolerances.from_file(path)
    assert tolerances.newton_tol == 1e-13
    assert tolerances.escalation_rounds == 1


def test_from_file_rejects_bad_documents(tmp_path):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"integral_tol": ')
    with pytest.raises(SchemaError):
        Tolerances.from_file(broken)
    with pytest.raises(SchemaError):
        Tolerances.from_file(tmp_path / 'missing.json')


def test_as_dict_covers_the_schema():
    assert set(Tolerances().as_dict()) == set(TOLERANCE_SCHEMA['properties'])


def test_command_executor():
    assert command_executor(1) is None
    executor = command_executor(2)
    assert isinstance(executor, ThreadPoolExecutor)
    executor.shutdown()
