import csv
import json
from unittest.mock import MagicMock

import pytest

from decoupling_lab.experiment_config import parse_config
from decoupling_lab.factories import get_service
from decoupling_lab.results.result_writer import ResultWriter, RunManifest
from decoupling_lab.services.capacity_service import CapacityService
from decoupling_lab.services.code_service import CODE_COLUMNS, CodeService
from decoupling_lab.services.decouple_service import DECOUPLE_COLUMNS, DecoupleService
from decoupling_lab.services.typicality_service import TypicalityService


@pytest.fixture
def writer(tmp_path):
    result_writer = ResultWriter(tmp_path, MagicMock())
    result_writer.write_manifest(RunManifest(command='test', config_path=None, seed=0, out_dir=str(tmp_path),
                                             version='1.0.0', threads=1))
    return result_writer


def read_csv(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


def test_service_initialization():
    mock_logger = MagicMock()
    service = DecoupleService(mock_logger)
    assert service is not None
    mock_logger.info.assert_called_with('Decouple service initialized')
    assert isinstance(get_service('typicality'), TypicalityService)


DECOUPLE_CFG = {
    'schema_version': 1,
    'seed': 11,
    'samples': 20,
    'instances': [
        {'id': 'noiseless', 'trivial': {'dim_s': 4, 'R_dim': 2}},
        {'id': 'erasure', 'channel': {'builtin': 'erasure', 'params': {'d': 4, 'p': 0.3}}, 'R_dim': 2},
    ],
}


def test_decouple_service_writes_table(tmp_path, writer):
    cfg = parse_config(DECOUPLE_CFG, 'decouple')
    assert DecoupleService(MagicMock()).run(cfg, writer, threads=1)

    rows = read_csv(tmp_path / 'decouple.csv')
    assert list(rows[0]) == DECOUPLE_COLUMNS
    assert [(row['instance_id'], row['metric']) for row in rows] == [
        ('noiseless', 'hs2'), ('noiseless', 'trace'), ('erasure', 'hs2'), ('erasure', 'trace'),
    ]
    assert {row['n_samples'] for row in rows} == {'20'}
    erasure_hs, erasure_trace = rows[2], rows[3]
    assert (erasure_hs['|S|'], erasure_hs['|R|'], erasure_hs['|E|']) == ('4', '2', '5')
    assert float(erasure_hs['exact_value']) == pytest.approx(0.0675)
    assert float(erasure_hs['mean']) == pytest.approx(0.0675)
    assert erasure_trace['exact_value'] == ''
    summary = json.loads((tmp_path / 'summary.json').read_text())
    assert summary['instances'] == 2
    assert summary['seed'] == 11
    assert summary['all_within_band'] is True
    assert summary['checks'][1]['twirl_exact'] == pytest.approx(0.0675)


def test_decouple_service_reports_band_failure(monkeypatch, tmp_path, writer):
    monkeypatch.setattr('decoupling_lab.config.SIGMA_BAND', -1.0)
    cfg = parse_config({**DECOUPLE_CFG, 'instances': DECOUPLE_CFG['instances'][1:]}, 'decouple')
    assert DecoupleService(MagicMock()).run(cfg, writer, threads=1) is False
    summary = json.loads((tmp_path / 'summary.json').read_text())
    assert summary['all_within_band'] is False


def test_decouple_rows_are_reproducible():
    cfg = parse_config({
        'schema_version': 1,
        'seed': 4,
        'samples': 8,
        'instances': [{'id': 'r', 'random': {'dim_s': 3, 'dim_e': 2, 'R_dim': 2}}],
    }, 'decouple')
    first = DecoupleService(MagicMock()).evaluate(cfg, threads=1)
    second = DecoupleService(MagicMock()).evaluate(cfg, threads=2)
    assert first == second


def test_code_service_rows(tmp_path, writer):
    cfg = parse_config({
        'schema_version': 1,
        'seed': 2,
        'channel': {'builtin': 'erasure', 'params': {'d': 2, 'p': 0.1}},
        'n': [1, 2],
        'R_dim': 2,
        'trials': 3,
        'subspace_mode': 'full-input',
    }, 'code')
    assert CodeService(MagicMock()).run(cfg, writer, threads=1)
    rows = read_csv(tmp_path / 'code.csv')
    assert list(rows[0]) == CODE_COLUMNS
    assert [row['n'] for row in rows] == ['1', '1', '1', '2', '2', '2']
    assert float(rows[3]['rate']) == pytest.approx(0.5)
    summary = json.loads((tmp_path / 'summary.json').read_text())
    assert [block['n'] for block in summary['blocks']] == [1, 2]
    assert summary['all_within_bound'] is True


def test_code_service_reports_bound_violation(monkeypatch, tmp_path, writer):
    monkeypatch.setattr('decoupling_lab.coding.experiment.oneshot_bound', lambda instance: 0.0)
    cfg = parse_config({
        'schema_version': 1,
        'channel': {'builtin': 'erasure', 'params': {'d': 2, 'p': 0.1}},
        'n': [1],
        'R_dim': 2,
        'trials': 2,
    }, 'code')
    assert CodeService(MagicMock()).run(cfg, writer, threads=1) is False
    summary = json.loads((tmp_path / 'summary.json').read_text())
    assert summary['all_within_bound'] is False
    assert summary['blocks'][0]['within_oneshot_bound'] is False


def test_code_service_runs_documented_example_with_defaults(tmp_path, writer):
    cfg = parse_config({
        'schema_version': 1,
        'channel': {'builtin': 'erasure', 'params': {'d': 2, 'p': 0.1}},
        'n': 3,
        'R_dim': 2,
        'trials': 2,
    }, 'code')
    assert CodeService(MagicMock()).run(cfg, writer, threads=1)
    rows = read_csv(tmp_path / 'code.csv')
    assert {row['n'] for row in rows} == {'3'}
    assert all(float(row['bound_gap']) >= -1e-8 for row in rows)


def test_capacity_service(tmp_path, writer):
    cfg = parse_config({
        'schema_version': 1,
        'channel': {'builtin': 'identity', 'params': {'d': 2}},
        'copies': [1],
        'restarts': 1,
        'iterations': 50,
    }, 'capacity')
    assert CapacityService(MagicMock()).run(cfg, writer, threads=1, fmt='csv')
    document = json.loads((tmp_path / 'capacity.json').read_text())
    assert document['results'][0]['coherent_information'] == pytest.approx(1.0)
    assert read_csv(tmp_path / 'capacity.csv')[0]['channel'] == 'identity(2)'


def test_typicality_service(tmp_path, writer):
    cfg = parse_config({
        'schema_version': 1,
        'channel': {'builtin': 'dephasing', 'params': {'p': 0.5}},
        'phi': {'diagonal': [0.75, 0.25]},
        'n': [4],
        'delta': 0.3,
    }, 'typicality')
    assert TypicalityService(MagicMock()).run(cfg, writer, fmt='csv')
    document = json.loads((tmp_path / 'typicality.json').read_text())
    report = document['reports'][0]
    assert report['type'] == [3, 1]
    assert report['pass'] is True
    assert report['dims']['S'] == 4
    names = {row['name'] for row in read_csv(tmp_path / 'typicality.csv')}
    assert {'typ1_env_dim', 'typ2_purity_relaxed', 'typ3_distance'} <= names
