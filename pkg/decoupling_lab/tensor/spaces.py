"""
Labeled tensor-product spaces.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError


@dataclass(frozen=True)
class TensorSpace:
    """An ordered list of labeled finite-dimensional factors.

    Two spaces are equal when they list the same labels with the same
    dimensions in the same order.
    """

    factors: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(label), int(dim)) for label, dim in self.factors)
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise SpaceMismatchError(f"Duplicate factor labels in {labels}")
        for label, dim in factors:
            if dim < 1:
                raise ValidationError(f"Factor {label!r} has non-positive dimension {dim}")
        object.__setattr__(self, 'factors', factors)

    @classmethod
    def of(cls, *factors: Tuple[str, int]) -> "TensorSpace":
        return cls(tuple(factors))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.factors else 1

    def __len__(self) -> int:
        return len(self.factors)

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpaceMismatchError(f"Unknown factor label {label!r} in {self.labels}") from None

    def dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def sub(self, labels: Iterable[str]) -> "TensorSpace":
        """Space of the given factors, in the given order."""
        return TensorSpace(tuple((label, self.dim(label)) for label in labels))

    def without(self, labels: Iterable[str]) -> "TensorSpace":
        drop = set(labels)
        for label in drop:
            self.index(label)
        return TensorSpace(tuple(f for f in self.factors if f[0] not in drop))

    def concat(self, other: "TensorSpace") -> "TensorSpace":
        collision = set(self.labels) & set(other.labels)
        if collision:
            raise SpaceMismatchError(
                f"Label collision {sorted(collision)}; relabel one side first"
            )
        return TensorSpace(self.factors + other.factors)

    def relabel(self, mapping: Dict[str, str]) -> "TensorSpace":
        for label in mapping:
            self.index(label)
        return TensorSpace(tuple((mapping.get(label, label), dim) for label, dim in self.factors))

    def permutation(self, labels: Sequence[str]) -> Tuple[int, ...]:
        """Axis permutation that brings this space's factors into ``labels`` order."""
        if sorted(labels) != sorted(self.labels):
            raise SpaceMismatchError(f"{list(labels)} is not a permutation of {list(self.labels)}")
        return tuple(self.index(label) for label in labels)

    def __str__(self) -> str:
        return "⊗".join(f"{label}[{dim}]" for label, dim in self.factors) or "trivial"


def space(*factors: Tuple[str, int]) -> TensorSpace:
    """Shorthand for ``TensorSpace.of``."""
    return TensorSpace.of(*factors)
