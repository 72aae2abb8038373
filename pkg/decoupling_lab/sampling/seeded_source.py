"""
Reproducible random streams.

A source is a value: (master_seed, stream_id, namespace). Generators are
built from a counter-based Philox bit generator keyed through
``SeedSequence`` spawn keys, so per-trial sources derived by index are
independent of scheduling and thread count.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from decoupling_lab.utils.error_handler import ValidationError

MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class SeededSource:
    master_seed: int
    stream_id: int = 0
    namespace: Tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) <= MAX_SEED:
            raise ValidationError(f"Seed must be an unsigned 64-bit integer, got {self.master_seed}")
        if int(self.stream_id) < 0:
            raise ValidationError(f"Stream id must be non-negative, got {self.stream_id}")

    @property
    def spawn_key(self) -> Tuple[int, ...]:
        return tuple(self.namespace) + (int(self.stream_id),)

    def generator(self) -> np.random.Generator:
        """A fresh generator; two calls on equal sources draw identical streams."""
        sequence = np.random.SeedSequence(int(self.master_seed), spawn_key=self.spawn_key)
        return np.random.Generator(np.random.Philox(sequence))

    def derive(self, index: int) -> "SeededSource":
        """Child source for trial ``index`` of this stream."""
        return SeededSource(self.master_seed, int(index), self.spawn_key)

    def __str__(self) -> str:
        path = "/".join(str(k) for k in self.spawn_key)
        return f"{self.master_seed}:{path}"


RandomLike = Union[SeededSource, np.random.Generator]


def as_generator(src: RandomLike) -> np.random.Generator:
    if isinstance(src, np.random.Generator):
        return src
    if isinstance(src, SeededSource):
        return src.generator()
    raise TypeError(f"Expected SeededSource or numpy Generator, got {type(src).__name__}")
