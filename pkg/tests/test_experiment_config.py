import json
from pathlib import Path

import numpy as np
import pytest

from decoupling_lab.coding.experiment import SubspaceMode
from decoupling_lab.experiment_config import (
    CapacityConfig,
    CodeConfig,
    DecoupleConfig,
    TypicalityConfig,
    load_config,
    parse_channel,
    parse_config,
    parse_phi,
)
from decoupling_lab.sampling.seeded_source import SeededSource
from decoupling_lab.utils.error_handler import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / 'configs'


def field_of(document, command):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(document, command)
    return excinfo.value.field


def test_shipped_configs_parse():
    assert isinstance(load_config(CONFIGS / 'decouple.json', 'decouple'), DecoupleConfig)
    assert isinstance(load_config(CONFIGS / 'code.json', 'code'), CodeConfig)
    assert isinstance(load_config(CONFIGS / 'capacity.json', 'capacity'), CapacityConfig)
    assert isinstance(load_config(CONFIGS / 'typicality.json', 'typicality'), TypicalityConfig)


def test_decouple_config():
    cfg = parse_config({
        'schema_version': 1,
        'seed': 3,
        'instances': [
            {'id': 'e', 'channel': {'builtin': 'erasure', 'params': {'d': 4, 'p': 0.3}}, 'R_dim': 2},
            {'id': 'r', 'random': {'dim_s': 3, 'dim_e': 2, 'R_dim': 1}},
            {'id': 't', 'trivial': {'dim_s': 2, 'R_dim': 1}},
        ],
    }, 'decouple')
    assert cfg.samples == 1000
    assert cfg.seed == 3
    assert [spec.kind for spec in cfg.instances] == ['channel', 'random', 'trivial']
    built = [spec.build(SeededSource(0)) for spec in cfg.instances]
    assert [(inst.dim_s, inst.dim_r) for inst in built] == [(4, 2), (3, 1), (2, 1)]
    assert built[0].instance_id == 'e'


def test_code_config_defaults():
    cfg = parse_config({
        'schema_version': 1,
        'command': 'code',
        'channel': {'builtin': 'dephasing', 'params': {'p': 0.1}},
        'n': 2,
        'R_dim': 2,
    }, 'code')
    assert cfg.n == (2,)
    assert cfg.trials == 10
    assert cfg.delta == 0.3
    assert cfg.seed == 0
    assert cfg.subspace_mode is SubspaceMode.FULL_INPUT
    np.testing.assert_allclose(cfg.phi.matrix, np.eye(2) / 2)


@pytest.mark.parametrize("document, command, field", [
    ({'schema_version': 2, 'instances': []}, 'decouple', 'schema_version'),
    ({'schema_version': 1, 'command': 'code', 'instances': []}, 'decouple', 'command'),
    ({'schema_version': 1, 'instances': [], 'colour': 1}, 'decouple', None),
    ({'schema_version': 1, 'instances': []}, 'decouple', 'instances'),
    ({'schema_version': 1, 'instances': [{'id': 'a', 'trivial': {'dim_s': 2, 'R_dim': 1}},
                                         {'id': 'a', 'trivial': {'dim_s': 2, 'R_dim': 1}}]}, 'decouple', 'instances'),
    ({'schema_version': 1, 'samples': 1, 'instances': [{'id': 'a', 'trivial': {'dim_s': 2, 'R_dim': 1}}]},
     'decouple', 'samples'),
    ({'schema_version': 1, 'instances': [{'id': 'a', 'random': {'dim_s': 2, 'dim_e': 0, 'R_dim': 1}}]},
     'decouple', 'instances[0].random.dim_e'),
    ({'schema_version': 1, 'instances': [{'id': 'a', 'channel': {'builtin': 'nope'}, 'R_dim': 1}]},
     'decouple', 'instances[0].channel.builtin'),
    ({'schema_version': 1, 'instances': [{'id': 'a', 'trivial': {'dim_s': 2, 'R_dim': 1}, 'R_dim': 1}]},
     'decouple', 'instances[0].R_dim'),
    ({'schema_version': 1, 'channel': {'builtin': 'identity'}, 'n': [], 'R_dim': 1}, 'code', 'n'),
    ({'schema_version': 1, 'channel': {'builtin': 'identity'}, 'n': 1, 'R_dim': 1, 'delta': 2}, 'code', 'delta'),
    ({'schema_version': 1, 'channel': {'builtin': 'identity'}, 'n': 1, 'R_dim': 1,
      'subspace_mode': 'all'}, 'code', 'subspace_mode'),
    ({'schema_version': 1, 'channel': {'builtin': 'identity'}, 'n': 1, 'R_dim': 1,
      'phi': {'diagonal': [1.0]}}, 'code', 'phi.diagonal'),
    ({'schema_version': 1, 'channel': {'builtin': 'identity'}, 'copies': [1, 0]}, 'capacity', 'copies[1]'),
    ({'schema_version': 1, 'channel': {'builtin': 'identity'}, 'seed': -1}, 'capacity', 'seed'),
    ({'schema_version': 1, 'channel': {'builtin': 'identity', 'file': 'x.json'}, 'n': 1}, 'typicality', 'channel'),
])
def test_config_errors_name_the_field(document, command, field):
    assert field_of(document, command) == field


def test_parse_channel_variants():
    random = parse_channel({'random': {'in_dim': 2, 'out_dim': 3, 'kraus': 2, 'seed': 5}})
    again = parse_channel({'random': {'in_dim': 2, 'out_dim': 3, 'kraus': 2, 'seed': 5}})
    assert (random.in_dim, random.out_dim, random.env_dim) == (2, 3, 2)
    np.testing.assert_array_equal(random.kraus[0], again.kraus[0])

    inline = parse_channel({
        'name': 'flip', 'in_dim': 2, 'out_dim': 2, 'kraus': [[[0, 0], [1, 0], [1, 0], [0, 0]]],
    })
    assert inline.name == 'flip'

    with pytest.raises(ConfigError) as excinfo:
        parse_channel({'random': {'in_dim': 2, 'out_dim': 3, 'kraus': 2}, 'params': {}})
    assert excinfo.value.field == 'channel.params'


def test_parse_channel_file_is_relative_to_config(tmp_path):
    (tmp_path / 'channels').mkdir()
    (tmp_path / 'channels' / 'erasure.json').write_text((CONFIGS / 'erasure_qubit.json').read_text())
    config_path = tmp_path / 'typicality.json'
    config_path.write_text(json.dumps({
        'schema_version': 1,
        'channel': {'file': 'channels/erasure.json'},
        'n': [2],
    }))
    cfg = load_config(config_path, 'typicality')
    assert cfg.channel.name == 'erasure_qubit_0.25'
    assert cfg.channel.out_dim == 3


def test_parse_phi():
    np.testing.assert_allclose(parse_phi(None, 2).matrix, np.eye(2) / 2)
    np.testing.assert_allclose(parse_phi({'diagonal': [0.75, 0.25]}, 2).matrix, np.diag([0.75, 0.25]))
    phi = parse_phi({'matrix': [[[0.5, 0], [0, 0.5]], [[0, -0.5], [0.5, 0]]]}, 2)
    assert phi.matrix[0, 1] == pytest.approx(0.5j)
    with pytest.raises(ConfigError):
        parse_phi({'diagonal': [1.5, -0.5]}, 2)
    with pytest.raises(ConfigError):
        parse_phi({'diagonal': [1, 0], 'matrix': []}, 2)


def test_load_config_reports_json_position(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{\n  "schema_version": 1,\n  "n": [1,\n}')
    with pytest.raises(ConfigError, match="line 4"):
        load_config(path, 'typicality')
    with pytest.raises(ConfigError):
        load_config(tmp_path / 'missing.json', 'typicality')
