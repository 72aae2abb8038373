import json
from unittest.mock import MagicMock

import pytest

from decoupling_lab import __version__
from decoupling_lab.__main__ import build_parser, main
from decoupling_lab.utils.error_handler import InvariantError

TYPICALITY_CONFIG = {
    'schema_version': 1,
    'command': 'typicality',
    'channel': {'builtin': 'dephasing', 'params': {'p': 0.5}},
    'phi': {'diagonal': [0.75, 0.25]},
    'n': [4],
    'delta': 0.3,
}


@pytest.fixture(autouse=True)
def quiet_logging(monkeypatch):
    monkeypatch.setattr('decoupling_lab.__main__.setup_logging', lambda: None)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / 'typicality.json'
    path.write_text(json.dumps(TYPICALITY_CONFIG))
    return path


def test_parser_defaults():
    args = build_parser().parse_args(['decouple', '--config', 'c.json'])
    assert args.command == 'decouple'
    assert args.seed is None
    assert args.format is None


@pytest.mark.parametrize("argv", [
    ['teleport', '--config', 'c.json'],
    ['decouple'],
    ['decouple', '--config', 'c.json', '--seed', '-1'],
    ['decouple', '--config', 'c.json', '--threads', '0'],
    ['decouple', '--config', 'c.json', '--format', 'xml'],
])
def test_usage_errors_exit_with_two(argv):
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(argv)
    assert excinfo.value.code == 2


def test_version(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(['--version'])
    assert __version__ in capsys.readouterr().out


def test_typicality_run(tmp_path, config_file):
    out = tmp_path / 'out'
    assert main(['typicality', '--config', str(config_file), '--out', str(out), '--seed', '9']) == 0
    manifest = json.loads((out / 'manifest.json').read_text())
    assert manifest['seed'] == 9
    assert manifest['command'] == 'typicality'
    assert manifest['files'] == ['typicality.json']
    assert json.loads((out / 'typicality.json').read_text())['reports'][0]['pass'] is True


def test_config_error_exits_with_two(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({**TYPICALITY_CONFIG, 'schema_version': 7}))
    assert main(['typicality', '--config', str(path), '--out', str(tmp_path / 'out')]) == 2
    assert main(['typicality', '--config', str(tmp_path / 'missing.json'), '--out', str(tmp_path / 'out')]) == 2


def test_command_mismatch_exits_with_two(tmp_path, config_file):
    assert main(['capacity', '--config', str(config_file), '--out', str(tmp_path / 'out')]) == 2


def test_failed_checks_exit_with_one(monkeypatch, tmp_path, config_file):
    service = MagicMock()
    service.run.return_value = False
    monkeypatch.setattr('decoupling_lab.__main__.get_service', lambda command: service)
    assert main(['typicality', '--config', str(config_file), '--out', str(tmp_path / 'out')]) == 1
    assert (tmp_path / 'out' / 'manifest.json').exists()


def test_invariant_error_exits_with_one(monkeypatch, tmp_path, config_file):
    service = MagicMock()
    service.run.side_effect = InvariantError("broken")
    monkeypatch.setattr('decoupling_lab.__main__.get_service', lambda command: service)
    assert main(['typicality', '--config', str(config_file), '--out', str(tmp_path / 'out')]) == 1


def test_format_and_threads_reach_the_service(monkeypatch, tmp_path, config_file):
    service = MagicMock()
    service.run.return_value = True
    monkeypatch.setattr('decoupling_lab.__main__.get_service', lambda command: service)
    main(['typicality', '--config', str(config_file), '--out', str(tmp_path / 'out'),
          '--threads', '3', '--format', 'csv'])
    _, writer, threads, fmt = service.run.call_args.args
    assert (threads, fmt) == (3, 'csv')
    assert writer.out_dir == tmp_path / 'out'


def test_decouple_reruns_are_byte_identical(tmp_path):
    path = tmp_path / 'decouple.json'
    path.write_text(json.dumps({
        'schema_version': 1,
        'command': 'decouple',
        'samples': 30,
        'instances': [
            {'id': 'rand', 'random': {'dim_s': 4, 'dim_e': 3, 'R_dim': 2}},
            {'id': 'erasure', 'channel': {'builtin': 'erasure', 'params': {'d': 2, 'p': 0.2}}, 'R_dim': 2},
        ],
    }))
    first, second = tmp_path / 'first', tmp_path / 'second'
    assert main(['decouple', '--config', str(path), '--seed', '42', '--out', str(first), '--threads', '1']) == 0
    assert main(['decouple', '--config', str(path), '--seed', '42', '--out', str(second), '--threads', '4']) == 0
    for name in ('decouple.csv', 'summary.json'):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert json.loads((first / 'manifest.json').read_text())['seed'] == 42
