"""
Experiment configs for the command-line runner.

Configs are JSON objects with a ``schema_version`` field. Unknown fields
are rejected and every error names the offending field path, e.g.
``instances[1].channel.params``.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from decoupling_lab import config
from decoupling_lab.channels.builtin import builtin, random_channel
from decoupling_lab.channels.channel import Channel
from decoupling_lab.channels.channel_io import CHANNEL_FIELDS, channel_from_dict, load_channel
from decoupling_lab.coding.experiment import SubspaceMode
from decoupling_lab.decoupling.instance import DecouplingInstance, from_channel, random_instance, trivial_instance
from decoupling_lab.sampling.seeded_source import SeededSource
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator
from decoupling_lab.utils.error_handler import ConfigError, ValidationError

logger = logging.getLogger(__name__)

COMMANDS = ('decouple', 'code', 'capacity', 'typicality')
COMMON_FIELDS = ('schema_version', 'command', 'seed')


def _fields(document: Any, path: str, allowed: Sequence[str], required: Sequence[str] = ()) -> Dict[str, Any]:
    if not isinstance(document, dict):
        raise ConfigError("expected a JSON object", path or None)
    unknown = sorted(set(document) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown fields {unknown}", path or None)
    missing = [name for name in required if name not in document]
    if missing:
        raise ConfigError(f"missing fields {missing}", path or None)
    return document


def _join(path: str, name: str) -> str:
    return f"{path}.{name}" if path else name


def _int(value: Any, path: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"expected an integer >= {minimum}, got {value!r}", path)
    return value


def _float(value: Any, path: str, low: float = 0.0, high: float = float('inf')) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not low <= value <= high:
        raise ConfigError(f"expected a number in [{low}, {high}], got {value!r}", path)
    return float(value)


def _int_list(value: Any, path: str) -> Tuple[int, ...]:
    if isinstance(value, list):
        if not value:
            raise ConfigError("expected a non-empty list", path)
        return tuple(_int(v, f"{path}[{i}]") for i, v in enumerate(value))
    return (_int(value, path),)


def _seed(document: Dict[str, Any], path: str = 'seed') -> int:
    return _int(document.get('seed', 0), path, minimum=0)


def parse_channel(spec: Any, path: str = 'channel', base_dir: Path = None) -> Channel:
    """A channel spec: builtin, file, random, or an inline channel document."""
    if isinstance(spec, dict) and set(spec) <= set(CHANNEL_FIELDS) and 'kraus' in spec:
        return channel_from_dict(spec, path)
    spec = _fields(spec, path, ('builtin', 'params', 'file', 'random'))
    kinds = [kind for kind in ('builtin', 'file', 'random') if kind in spec]
    if len(kinds) != 1:
        raise ConfigError("give exactly one of 'builtin', 'file', 'random' or an inline 'kraus' document", path)
    kind = kinds[0]
    if kind != 'builtin' and 'params' in spec:
        raise ConfigError("'params' only applies to builtin channels", _join(path, 'params'))

    if kind == 'builtin':
        params = spec.get('params', {})
        if not isinstance(params, dict):
            raise ConfigError("expected a JSON object", _join(path, 'params'))
        try:
            return builtin(spec['builtin'], **params)
        except ValidationError as e:
            raise ConfigError(str(e), _join(path, 'builtin')) from None
    if kind == 'file':
        file_path = Path(spec['file'])
        if base_dir is not None and not file_path.is_absolute():
            file_path = base_dir / file_path
        return load_channel(file_path)

    rpath = _join(path, 'random')
    rspec = _fields(spec['random'], rpath, ('in_dim', 'out_dim', 'kraus', 'seed'), ('in_dim', 'out_dim', 'kraus'))
    return random_channel(
        _int(rspec['in_dim'], _join(rpath, 'in_dim')),
        _int(rspec['out_dim'], _join(rpath, 'out_dim')),
        _int(rspec['kraus'], _join(rpath, 'kraus')),
        SeededSource(_seed(rspec, _join(rpath, 'seed'))),
    )


def parse_phi(spec: Any, d: int, path: str = 'phi') -> DensityOperator:
    """``"maximally_mixed"`` (or absent), ``{"diagonal": [...]}`` or ``{"matrix": [[[re, im], ...], ...]}``."""
    space = TensorSpace.of(("A'", d))
    if spec is None or spec == 'maximally_mixed':
        return DensityOperator.maximally_mixed(space)
    spec = _fields(spec, path, ('diagonal', 'matrix'))
    if len(spec) != 1:
        raise ConfigError("give exactly one of 'diagonal' or 'matrix'", path)
    try:
        if 'diagonal' in spec:
            probs = np.asarray(spec['diagonal'], dtype=float)
            if probs.shape != (d,):
                raise ConfigError(f"expected {d} probabilities", _join(path, 'diagonal'))
            return DensityOperator.diagonal(space, probs)
        pairs = np.asarray(spec['matrix'], dtype=float)
        if pairs.shape != (d, d, 2):
            raise ConfigError(f"expected a {d}x{d} matrix of [re, im] pairs", _join(path, 'matrix'))
        return DensityOperator(space, pairs[..., 0] + 1j * pairs[..., 1])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"malformed state: {e}", path) from None
    except ValidationError as e:
        raise ConfigError(str(e), path) from None


@dataclass(frozen=True)
class InstanceSpec:
    instance_id: str
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    channel: Optional[Channel] = None

    def build(self, src: SeededSource) -> DecouplingInstance:
        if self.kind == 'channel':
            return from_channel(self.channel, self.params['R_dim'], self.instance_id)
        if self.kind == 'trivial':
            return trivial_instance(self.params['dim_s'], self.params['R_dim'], self.instance_id)
        return random_instance(self.params['dim_s'], self.params['dim_e'], self.params['R_dim'], src,
                               kraus=self.params.get('kraus'), instance_id=self.instance_id)


@dataclass(frozen=True)
class DecoupleConfig:
    instances: Tuple[InstanceSpec, ...]
    samples: int
    seed: int


@dataclass(frozen=True)
class CodeConfig:
    channel: Channel
    phi: DensityOperator
    n: Tuple[int, ...]
    r_dim: int
    trials: int
    delta: float
    seed: int
    subspace_mode: SubspaceMode


@dataclass(frozen=True)
class CapacityConfig:
    channel: Channel
    copies: Tuple[int, ...]
    restarts: int
    iterations: int
    seed: int


@dataclass(frozen=True)
class TypicalityConfig:
    channel: Channel
    phi: DensityOperator
    n: Tuple[int, ...]
    delta: float
    seed: int


ExperimentConfig = Union[DecoupleConfig, CodeConfig, CapacityConfig, TypicalityConfig]


def _parse_instance(spec: Any, path: str, base_dir: Path) -> InstanceSpec:
    spec = _fields(spec, path, ('id', 'channel', 'random', 'trivial', 'R_dim'), ('id',))
    instance_id = str(spec['id'])
    kinds = [kind for kind in ('channel', 'random', 'trivial') if kind in spec]
    if len(kinds) != 1:
        raise ConfigError("give exactly one of 'channel', 'random' or 'trivial'", path)
    kind = kinds[0]
    if kind == 'channel':
        if 'R_dim' not in spec:
            raise ConfigError("missing fields ['R_dim']", path)
        channel = parse_channel(spec['channel'], _join(path, 'channel'), base_dir)
        return InstanceSpec(instance_id, 'channel', {'R_dim': _int(spec['R_dim'], _join(path, 'R_dim'))}, channel)
    if 'R_dim' in spec:
        raise ConfigError(f"R_dim belongs inside '{kind}'", _join(path, 'R_dim'))

    kpath = _join(path, kind)
    if kind == 'trivial':
        params = _fields(spec['trivial'], kpath, ('dim_s', 'R_dim'), ('dim_s', 'R_dim'))
        return InstanceSpec(instance_id, 'trivial', {
            'dim_s': _int(params['dim_s'], _join(kpath, 'dim_s')),
            'R_dim': _int(params['R_dim'], _join(kpath, 'R_dim')),
        })
    params = _fields(spec['random'], kpath, ('dim_s', 'dim_e', 'R_dim', 'kraus'), ('dim_s', 'dim_e', 'R_dim'))
    parsed = {name: _int(params[name], _join(kpath, name)) for name in params}
    return InstanceSpec(instance_id, 'random', parsed)


def parse_config(document: Any, command: str, base_dir: Path = None) -> ExperimentConfig:
    """Validate a parsed JSON document for ``command``.

    Raises:
        ConfigError: On any schema violation, with the field path
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}", 'command')
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    version = document.get('schema_version')
    if version != config.CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version!r}, expected {config.CONFIG_SCHEMA_VERSION}",
                          'schema_version')
    if document.get('command', command) != command:
        raise ConfigError(f"config is for {document['command']!r}, not {command!r}", 'command')

    if command == 'decouple':
        _fields(document, '', COMMON_FIELDS + ('instances', 'samples'), ('instances',))
        raw = document['instances']
        if not isinstance(raw, list) or not raw:
            raise ConfigError("expected a non-empty list", 'instances')
        instances = tuple(_parse_instance(spec, f"instances[{i}]", base_dir) for i, spec in enumerate(raw))
        ids = [spec.instance_id for spec in instances]
        if len(set(ids)) != len(ids):
            raise ConfigError("instance ids must be unique", 'instances')
        return DecoupleConfig(instances, _int(document.get('samples', 1000), 'samples', minimum=2), _seed(document))

    if command == 'capacity':
        _fields(document, '', COMMON_FIELDS + ('channel', 'copies', 'restarts', 'iterations'), ('channel',))
        return CapacityConfig(
            channel=parse_channel(document['channel'], 'channel', base_dir),
            copies=_int_list(document.get('copies', [1]), 'copies'),
            restarts=_int(document.get('restarts', 4), 'restarts'),
            iterations=_int(document.get('iterations', 2000), 'iterations'),
            seed=_seed(document),
        )

    if command == 'typicality':
        _fields(document, '', COMMON_FIELDS + ('channel', 'phi', 'n', 'delta'), ('channel', 'n'))
        channel = parse_channel(document['channel'], 'channel', base_dir)
        return TypicalityConfig(
            channel=channel,
            phi=parse_phi(document.get('phi'), channel.in_dim),
            n=_int_list(document['n'], 'n'),
            delta=_float(document.get('delta', 0.3), 'delta', 0.0, 1.0),
            seed=_seed(document),
        )

    _fields(document, '', COMMON_FIELDS + ('channel', 'phi', 'n', 'R_dim', 'trials', 'delta', 'subspace_mode'),
            ('channel', 'n', 'R_dim'))
    channel = parse_channel(document['channel'], 'channel', base_dir)
    try:
        mode = SubspaceMode(document.get('subspace_mode', SubspaceMode.FULL_INPUT.value))
    except ValueError:
        raise ConfigError(f"expected one of {[m.value for m in SubspaceMode]}", 'subspace_mode') from None
    return CodeConfig(
        channel=channel,
        phi=parse_phi(document.get('phi'), channel.in_dim),
        n=_int_list(document['n'], 'n'),
        r_dim=_int(document['R_dim'], 'R_dim'),
        trials=_int(document.get('trials', 10), 'trials'),
        delta=_float(document.get('delta', 0.3), 'delta', 0.0, 1.0),
        seed=_seed(document),
        subspace_mode=mode,
    )


def load_config(path: Union[str, Path], command: str) -> ExperimentConfig:
    """Read and validate an experiment config file.

    Raises:
        ConfigError: If the file is unreadable, not JSON, or invalid
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", str(path)) from None
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}", str(path)) from None
    parsed = parse_config(document, command, base_dir=path.parent)
    logger.debug(f"Loaded {command} config from {path}")
    return parsed
