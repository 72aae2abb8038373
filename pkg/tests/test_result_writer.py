import json
from unittest.mock import MagicMock

import numpy as np
import pytest

from decoupling_lab.results.result_writer import ResultWriter, RunManifest, format_float, jsonable


@pytest.fixture
def manifest(tmp_path):
    return RunManifest(command='decouple', config_path='configs/decouple.json', seed=7,
                       out_dir=str(tmp_path), version='1.0.0', threads=2)


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(1.0) == "1"
    assert format_float(float('nan')) == "nan"
    assert format_float(float('-inf')) == "-inf"
    assert float(format_float(1 / 3)) == 1 / 3


def test_jsonable_converts_numpy_and_non_finite():
    value = jsonable({'a': np.float64(0.5), 'b': np.arange(3), 'c': np.bool_(True), 'd': float('inf'), 1: (2,)})
    assert value == {'a': 0.5, 'b': [0, 1, 2], 'c': True, 'd': 'inf', '1': [2]}
    json.dumps(value, allow_nan=False)


def test_manifest_comes_first(tmp_path):
    writer = ResultWriter(tmp_path / 'out', MagicMock())
    assert (tmp_path / 'out').is_dir()
    with pytest.raises(RuntimeError):
        writer.write_json('summary.json', {})


def test_manifest_lists_written_files(tmp_path, manifest):
    writer = ResultWriter(tmp_path, MagicMock())
    writer.write_manifest(manifest)
    writer.write_csv('table.csv', ['x', 'ok'], [{'x': 0.25, 'ok': True}, {'x': 2, 'ok': False}])
    writer.write_json('summary.json', {'value': np.float64(1.5)})

    document = json.loads((tmp_path / 'manifest.json').read_text())
    assert document['files'] == ['table.csv', 'summary.json']
    assert document['seed'] == 7
    assert document['command'] == 'decouple'
    assert 'timestamp' in document
    assert list(tmp_path.glob('*.tmp')) == []


def test_csv_cells(tmp_path, manifest):
    writer = ResultWriter(tmp_path, MagicMock())
    writer.write_manifest(manifest)
    writer.write_csv('table.csv', ['x', 'ok', 'name'], [{'x': 0.1, 'ok': np.bool_(True), 'name': 'a', 'extra': 1}])
    assert (tmp_path / 'table.csv').read_text() == "x,ok,name\n0.10000000000000001,true,a\n"


def test_json_rejects_nothing_after_conversion(tmp_path, manifest):
    writer = ResultWriter(tmp_path, MagicMock())
    writer.write_manifest(manifest)
    path = writer.write_json('report.json', {'c_prime': float('inf')})
    assert json.loads(path.read_text()) == {'c_prime': 'inf'}
