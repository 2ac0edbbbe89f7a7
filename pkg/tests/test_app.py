import json

import pytest

from foliation_kit.app import create_parser, main


@pytest.fixture
def problem_path(tmp_path, problem_data):
    path = tmp_path / 'problem.json'
    path.write_text(json.dumps(problem_data))
    return path


def test_parser_reads_run_options():
    args = create_parser().parse_args(['run', 'problem.json', '--seed', '7',
                                       '--tol-file', 'tol.json', '--workers', '2'])
    assert (args.action, args.problem, args.seed) == ('run', 'problem.json', 7)
    assert args.tol_file == 'tol.json'
    assert args.workers == 2
    assert args.out is None


def test_parser_requires_an_action():
    with pytest.raises(SystemExit):
        create_parser().parse_args([])


def test_run_writes_the_report(tmp_path, problem_path):
    out = tmp_path / 'report.json'
    assert main(['run', str(problem_path), '--out', str(out)]) == 0
    report = json.loads(out.read_text())
    assert report['exit_code'] == 0
    assert report['results'][0]['result']['mu_f'] == 10


def test_run_prints_to_stdout(problem_path, capsys):
    assert main(['run', str(problem_path), '--seed', '4']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['provenance']['seed'] == 4


def test_missing_problem_file(tmp_path):
    assert main(['run', str(tmp_path / 'absent.json')]) == 2


def test_invalid_tolerance_file(tmp_path, problem_path):
    tol = tmp_path / 'tol.json'
    tol.write_text(json.dumps({'integral_tol': -1}))
    assert main(['run', str(problem_path), '--tol-file', str(tol)]) == 2


def test_unwritable_output(tmp_path, problem_path):
    target = tmp_path / 'missing-dir' / 'report.json'
    assert main(['run', str(problem_path), '--out', str(target)]) == 2
