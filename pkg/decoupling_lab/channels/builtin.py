"""
Built-in channel family.
"""

from typing import Callable, Dict

import numpy as np

from decoupling_lab.channels.channel import Channel
from decoupling_lab.sampling.seeded_source import RandomLike
from decoupling_lab.sampling.unitaries import haar_isometry, shift_and_phase
from decoupling_lab.utils.error_handler import ValidationError


def _probability(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return value


def _dimension(d: int) -> int:
    if int(d) != d or d < 1:
        raise ValidationError(f"Dimension must be a positive integer, got {d}")
    return int(d)


def identity(d: int = 2) -> Channel:
    d = _dimension(d)
    return Channel(d, d, (np.eye(d),), name=f"identity({d})")


def erasure(d: int = 2, p: float = 0.0) -> Channel:
    """Erasure with the flag |e⟩ as the last basis vector of a (d+1)-dim output."""
    d = _dimension(d)
    p = _probability("erasure probability", p)
    keep = np.sqrt(1 - p) * np.vstack([np.eye(d), np.zeros((1, d))])
    flags = []
    for i in range(d):
        k = np.zeros((d + 1, d))
        k[d, i] = np.sqrt(p)
        flags.append(k)
    return Channel(d, d + 1, (keep, *flags), name=f"erasure({d},{p:g})")


def depolarizing(d: int = 2, p: float = 0.0) -> Channel:
    """ρ -> (1−p)ρ + p·I/d through the d² Weyl operators."""
    d = _dimension(d)
    p = _probability("depolarizing probability", p)
    shift, phase = shift_and_phase(d)
    kraus = []
    for a in range(d):
        for b in range(d):
            weyl = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(phase, b)
            weight = 1 - p + p / d ** 2 if a == b == 0 else p / d ** 2
            kraus.append(np.sqrt(weight) * weyl)
    return Channel(d, d, tuple(kraus), name=f"depolarizing({d},{p:g})")


def dephasing(p: float = 0.0) -> Channel:
    """Qubit dephasing {√(1−p) I, √p Z}."""
    p = _probability("dephasing probability", p)
    return Channel(2, 2, (np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * np.diag([1.0, -1.0])),
                   name=f"dephasing({p:g})")


def amplitude_damping(gamma: float = 0.0) -> Channel:
    gamma = _probability("damping rate", gamma)
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return Channel(2, 2, (k0, k1), name=f"amplitude_damping({gamma:g})")


def random_channel(in_dim: int, out_dim: int, kraus: int, src: RandomLike) -> Channel:
    """Kraus operators read off a Haar-random isometry into out_dim·kraus."""
    in_dim, out_dim, kraus = _dimension(in_dim), _dimension(out_dim), _dimension(kraus)
    blocks = haar_isometry(in_dim, out_dim * kraus, src).reshape(out_dim, kraus, in_dim)
    return Channel(in_dim, out_dim, tuple(blocks[:, k, :] for k in range(kraus)),
                   name=f"random({in_dim},{out_dim},{kraus})")


BUILTINS: Dict[str, Callable[..., Channel]] = {
    'identity': identity,
    'erasure': erasure,
    'depolarizing': depolarizing,
    'dephasing': dephasing,
    'amplitude_damping': amplitude_damping,
}


def builtin(name: str, **params) -> Channel:
    """Look up a built-in channel by name.

    Raises:
        ValidationError: On an unknown name or invalid parameters
    """
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ValidationError(f"Unknown channel {name!r}; known: {sorted(BUILTINS)}") from None
    try:
        return factory(**params)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"Bad parameters for {name!r}: {e}") from None
