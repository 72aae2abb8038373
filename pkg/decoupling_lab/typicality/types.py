"""
Method of types over a finite alphabet.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from decoupling_lab.utils.error_handler import ValidationError


@dataclass(frozen=True, order=True)
class TypeVector:
    """Letter counts of a length-n string."""

    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValidationError(f"Type counts must be non-negative, got {counts}")
        object.__setattr__(self, 'counts', counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def alphabet_size(self) -> int:
        return len(self.counts)

    @property
    def probabilities(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n

    def l1_distance(self, p: Sequence[float]) -> float:
        return float(np.sum(np.abs(self.probabilities - np.asarray(p, dtype=float))))

    def sup_distance(self, p: Sequence[float]) -> float:
        return float(np.max(np.abs(self.probabilities - np.asarray(p, dtype=float))))

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.counts) + ")"


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def enumerate_types(n: int, alphabet_size: int) -> List[TypeVector]:
    """All compositions of n into ``alphabet_size`` parts, largest first count first."""
    if n < 1:
        raise ValidationError(f"Block length must be positive, got {n}")
    if alphabet_size < 1:
        raise ValidationError(f"Alphabet size must be positive, got {alphabet_size}")
    return [TypeVector(c) for c in _compositions(n, alphabet_size)]


def type_class_dim(t: TypeVector) -> int:
    """Multinomial coefficient n! / Π counts!."""
    dim = math.factorial(t.n)
    for c in t.counts:
        dim //= math.factorial(c)
    return dim


@lru_cache(maxsize=32)
def string_counts(n: int, alphabet_size: int) -> np.ndarray:
    """Letter counts of every string in alphabet^n, first letter most significant."""
    strings = np.indices((alphabet_size,) * n).reshape(n, -1).T
    counts = np.stack([(strings == x).sum(axis=1) for x in range(alphabet_size)], axis=1)
    counts.setflags(write=False)
    return counts


def strings_of_type(t: TypeVector) -> np.ndarray:
    """Indices of the basis strings whose type is ``t``."""
    counts = string_counts(t.n, t.alphabet_size)
    return np.flatnonzero(np.all(counts == np.asarray(t.counts), axis=1))


def select_type(p: Sequence[float], n: int, delta: float) -> TypeVector:
    """The n-type closest to ``p`` in ℓ1, ties broken by ascending counts.

    Raises:
        ValidationError: If no type lies within ``delta``, reporting the minimal distance
    """
    p = np.asarray(p, dtype=float)
    best = min(enumerate_types(n, len(p)), key=lambda t: (round(t.l1_distance(p), 12), t.counts))
    distance = best.l1_distance(p)
    if distance > delta + 1e-12:
        raise ValidationError(
            f"No {n}-type within ℓ1 distance {delta} of {np.round(p, 6).tolist()}; "
            f"closest is {best} at {distance:.6g}"
        )
    return best
