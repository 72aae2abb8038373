"""
Channel import/export as JSON documents.

Document layout::

    {"name": str, "in_dim": int, "out_dim": int,
     "kraus": [[[re, im], ...], ...]}

Each Kraus matrix is a flat row-major list of [re, im] pairs. Nested
row lists are accepted on import.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from decoupling_lab.channels.channel import Channel
from decoupling_lab.utils.error_handler import ConfigError, ValidationError
from decoupling_lab.utils.file_utils import atomic_write_text

logger = logging.getLogger(__name__)

CHANNEL_FIELDS = ('name', 'in_dim', 'out_dim', 'kraus')


def channel_to_dict(channel: Channel) -> Dict[str, Any]:
    return {
        'name': channel.name,
        'in_dim': channel.in_dim,
        'out_dim': channel.out_dim,
        'kraus': [
            [[float(z.real), float(z.imag)] for z in k.ravel()]
            for k in channel.kraus
        ],
    }


def _matrix_from_pairs(entries, shape, field: str) -> np.ndarray:
    try:
        pairs = np.asarray(entries, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("Kraus entries must be numeric [re, im] pairs", field) from None
    if pairs.shape[-1:] != (2,):
        raise ConfigError("Kraus entries must be [re, im] pairs", field)
    values = pairs[..., 0] + 1j * pairs[..., 1]
    if values.size != shape[0] * shape[1]:
        raise ConfigError(f"Kraus matrix has {values.size} entries, expected {shape[0] * shape[1]}", field)
    return values.reshape(shape)


def channel_from_dict(document: Dict[str, Any], context: str = 'channel') -> Channel:
    """Build a Channel from a parsed JSON document.

    Raises:
        ConfigError: On missing/unknown fields or malformed matrices
    """
    if not isinstance(document, dict):
        raise ConfigError("Channel document must be a JSON object", context)
    unknown = set(document) - set(CHANNEL_FIELDS)
    if unknown:
        raise ConfigError(f"Unknown fields {sorted(unknown)}", context)
    missing = [f for f in CHANNEL_FIELDS if f not in document]
    if missing:
        raise ConfigError(f"Missing fields {missing}", context)

    in_dim, out_dim = document['in_dim'], document['out_dim']
    if not (isinstance(in_dim, int) and isinstance(out_dim, int)) or in_dim < 1 or out_dim < 1:
        raise ConfigError("in_dim and out_dim must be positive integers", context)
    if not isinstance(document['kraus'], list) or not document['kraus']:
        raise ConfigError("kraus must be a non-empty list", f"{context}.kraus")

    kraus = tuple(
        _matrix_from_pairs(entries, (out_dim, in_dim), f"{context}.kraus[{k}]")
        for k, entries in enumerate(document['kraus'])
    )
    try:
        return Channel(in_dim, out_dim, kraus, name=str(document['name']))
    except ValidationError as e:
        raise ConfigError(str(e), context) from None


def save_channel(channel: Channel, path: Union[str, Path]) -> None:
    atomic_write_text(path, json.dumps(channel_to_dict(channel), indent=2) + "\n")
    logger.info(f"Saved {channel} to {path}")


def load_channel(path: Union[str, Path]) -> Channel:
    """Read a channel document.

    Raises:
        ConfigError: If the file is unreadable or malformed
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read channel file: {e}", str(path)) from None
    return channel_from_dict(document, context=str(path))
