"""
Type-class and δ-typical projectors in the eigenbasis of a single-copy state.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Tuple

import numpy as np

from decoupling_lab.tensor.linalg import canonical_eigh, check_budget
from decoupling_lab.tensor.states import DensityOperator
from decoupling_lab.typicality.types import (
    TypeVector,
    enumerate_types,
    strings_of_type,
    type_class_dim,
)
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError

logger = logging.getLogger(__name__)

# Slack on the sup-norm membership test so exact boundary types are kept
MEMBERSHIP_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class TypicalDecomposition:
    """Π_t for every n-type and Π_δ = Σ_{‖t−p‖∞ ≤ δ} Π_t."""

    base_state: DensityOperator
    n: int
    delta: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    types: Tuple[TypeVector, ...]
    retained: Tuple[TypeVector, ...]
    product_basis: np.ndarray = field(repr=False)

    @property
    def dims(self) -> Dict[TypeVector, int]:
        return {t: type_class_dim(t) for t in self.types}

    @property
    def rank(self) -> int:
        return sum(type_class_dim(t) for t in self.retained)

    def type_basis(self, t: TypeVector) -> np.ndarray:
        """Orthonormal columns spanning the type class of ``t``."""
        return self.product_basis[:, strings_of_type(t)]

    def type_projector(self, t: TypeVector) -> np.ndarray:
        basis = self.type_basis(t)
        return basis @ basis.conj().T

    def typical_basis(self) -> np.ndarray:
        if not self.retained:
            return self.product_basis[:, :0]
        return np.hstack([self.type_basis(t) for t in self.retained])

    @property
    def projector(self) -> np.ndarray:
        basis = self.typical_basis()
        return basis @ basis.conj().T


def typical_projector(phi: DensityOperator, n: int, delta: float) -> TypicalDecomposition:
    """Decompose (C^d)^{⊗n} by types in φ's canonical eigenbasis.

    Raises:
        BudgetExceededError: If d^{2n} entries exceed the budget
    """
    if len(phi.space) != 1:
        raise SpaceMismatchError(f"Typical projectors need a single-factor state, got {phi.space}")
    if n < 1:
        raise ValidationError(f"Block length must be positive, got {n}")
    if delta < 0:
        raise ValidationError(f"δ must be non-negative, got {delta}")
    d = phi.dim
    check_budget(f"typical projector (d={d}, n={n})", d ** (2 * n))

    eigenvalues, eigenvectors = canonical_eigh(phi.matrix)
    p = np.clip(eigenvalues, 0.0, None)
    types = tuple(enumerate_types(n, d))
    retained = tuple(t for t in types if t.sup_distance(p) <= delta + MEMBERSHIP_EPS)
    product_basis = reduce(np.kron, [eigenvectors] * n) if n > 1 else eigenvectors
    product_basis = np.asarray(product_basis)
    product_basis.setflags(write=False)
    decomposition = TypicalDecomposition(
        base_state=phi,
        n=n,
        delta=float(delta),
        eigenvalues=p,
        eigenvectors=eigenvectors,
        types=types,
        retained=retained,
        product_basis=product_basis,
    )
    logger.debug(f"Typical projector d={d} n={n} δ={delta}: {len(retained)}/{len(types)} types, "
                 f"rank {decomposition.rank}")
    return decomposition
