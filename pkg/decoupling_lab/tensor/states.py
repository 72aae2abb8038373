"""
States and operators over labeled tensor spaces.

All three types are immutable: arrays are copied on construction and marked
read-only, so values can be shared freely between worker threads.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy import linalg

from decoupling_lab import config
from decoupling_lab.tensor.linalg import (
    canonical_eigh,
    hermitian_part,
    hermiticity_error,
    isometry_error,
)
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError


def _frozen(array, dtype=complex) -> np.ndarray:
    array = np.array(array, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    """A pure (possibly subnormalized) state on a tensor space."""

    space: TensorSpace
    amplitudes: np.ndarray
    subnormalized: bool = False

    def __post_init__(self):
        amplitudes = _frozen(np.ravel(self.amplitudes))
        if amplitudes.shape != (self.space.total_dim,):
            raise SpaceMismatchError(
                f"Amplitude vector of length {amplitudes.size} does not fit space {self.space}"
            )
        object.__setattr__(self, 'amplitudes', amplitudes)
        norm = self.norm
        if self.subnormalized:
            if norm > 1 + config.NORM_TOL:
                raise ValidationError(f"Subnormalized state has norm {norm:.15g} > 1")
        elif abs(norm - 1) > config.NORM_TOL:
            raise ValidationError(f"State norm is {norm:.15g}, expected 1")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.space.dims)

    def as_matrix(self, left: Sequence[str]) -> np.ndarray:
        """Amplitudes reshaped across the cut ``left | rest``."""
        from decoupling_lab.tensor.operations import reorder

        right = [label for label in self.space.labels if label not in left]
        ordered = reorder(self, list(left) + right)
        return ordered.amplitudes.reshape(
            self.space.sub(left).total_dim, self.space.sub(right).total_dim
        )

    def normalized(self) -> "StateVector":
        norm = self.norm
        if norm == 0:
            raise ValidationError("Cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / norm)

    def density(self) -> "DensityOperator":
        return DensityOperator(
            self.space,
            np.outer(self.amplitudes, self.amplitudes.conj()),
            subnormalized=self.subnormalized,
            check_positive=False,
        )

    @classmethod
    def basis(cls, space: TensorSpace, index: int) -> "StateVector":
        amplitudes = np.zeros(space.total_dim, dtype=complex)
        amplitudes[index] = 1
        return cls(space, amplitudes)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A mixed (possibly subnormalized) state on a tensor space.

    ``check_positive=False`` skips the eigenvalue check for operators derived
    from valid states by trusted operations. ``check_trace=False`` skips the
    unit-trace check for the rescaled projections of the decoupling module.
    Hermiticity is always checked.
    """

    space: TensorSpace
    matrix: np.ndarray
    subnormalized: bool = False
    check_positive: bool = True
    check_trace: bool = True

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        d = self.space.total_dim
        if matrix.shape != (d, d):
            raise SpaceMismatchError(f"Matrix of shape {matrix.shape} does not fit space {self.space}")
        error = hermiticity_error(matrix)
        if error > config.TOLERANCE:
            raise ValidationError(f"Density operator is not Hermitian (deviation {error:.3e})")
        matrix = _frozen(hermitian_part(matrix))
        object.__setattr__(self, 'matrix', matrix)

        trace = self.trace
        if self.check_trace:
            if self.subnormalized:
                if trace > 1 + config.TOLERANCE:
                    raise ValidationError(f"Subnormalized state has trace {trace:.15g} > 1")
            elif abs(trace - 1) > config.TOLERANCE:
                raise ValidationError(f"Trace is {trace:.15g}, expected 1")
        if self.check_positive:
            smallest = float(np.linalg.eigvalsh(matrix)[0]) if d else 0.0
            if smallest < -config.NEGATIVE_EIGENVALUE_TOL:
                raise ValidationError(f"Density operator has negative eigenvalue {smallest:.3e}")

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def eigh(self) -> Tuple[np.ndarray, np.ndarray]:
        return canonical_eigh(self.matrix)

    def normalized(self) -> "DensityOperator":
        trace = self.trace
        if trace <= 0:
            raise ValidationError("Cannot normalize an operator with non-positive trace")
        return DensityOperator(self.space, self.matrix / trace, check_positive=False)

    def with_matrix(self, matrix: np.ndarray, **flags) -> "DensityOperator":
        """Same space, new matrix; flags default to the derived-state setting."""
        flags.setdefault('check_positive', False)
        return DensityOperator(self.space, matrix, **flags)

    @classmethod
    def maximally_mixed(cls, space: TensorSpace) -> "DensityOperator":
        d = space.total_dim
        return cls(space, np.eye(d) / d, check_positive=False)

    @classmethod
    def from_vector(cls, state: StateVector) -> "DensityOperator":
        return state.density()

    @classmethod
    def diagonal(cls, space: TensorSpace, probabilities: Sequence[float]) -> "DensityOperator":
        return cls(space, np.diag(np.asarray(probabilities, dtype=complex)))


@dataclass(frozen=True, eq=False)
class LinearOp:
    """A linear map between tensor spaces; ``isometry=True`` is verified."""

    in_space: TensorSpace
    out_space: TensorSpace
    matrix: np.ndarray
    isometry: bool = False
    name: str = field(default='', compare=False)

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        expected = (self.out_space.total_dim, self.in_space.total_dim)
        if matrix.shape != expected:
            raise SpaceMismatchError(
                f"Operator of shape {matrix.shape} does not map {self.in_space} -> {self.out_space}"
            )
        object.__setattr__(self, 'matrix', matrix)
        if self.isometry:
            error = isometry_error(matrix)
            if error > config.TOLERANCE:
                raise ValidationError(f"Operator {self.name or ''} is not an isometry (deviation {error:.3e})")

    @property
    def is_square(self) -> bool:
        return self.in_space.total_dim == self.out_space.total_dim

    @property
    def is_unitary(self) -> bool:
        return self.is_square and isometry_error(self.matrix) <= config.TOLERANCE

    def adjoint(self) -> "LinearOp":
        return LinearOp(
            self.out_space,
            self.in_space,
            self.matrix.conj().T,
            isometry=self.isometry and self.is_square,
            name=f"{self.name}†" if self.name else '',
        )

    def __matmul__(self, other: "LinearOp") -> "LinearOp":
        if other.out_space != self.in_space:
            raise SpaceMismatchError(f"Cannot compose {self.in_space} with {other.out_space}")
        return LinearOp(
            other.in_space,
            self.out_space,
            self.matrix @ other.matrix,
            isometry=self.isometry and other.isometry,
        )

    @classmethod
    def identity(cls, space: TensorSpace) -> "LinearOp":
        return cls(space, space, np.eye(space.total_dim), isometry=True, name='I')

    @classmethod
    def unitary(cls, space: TensorSpace, matrix: np.ndarray, name: str = '') -> "LinearOp":
        return cls(space, space, matrix, isometry=True, name=name)


class SchmidtDecomposition(NamedTuple):
    """``ψ = Σ_k c_k |left_k⟩|right_k⟩`` with nonincreasing ``c_k``."""

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    left_space: TensorSpace
    right_space: TensorSpace

    def reconstruct(self) -> np.ndarray:
        return ((self.left * self.coefficients) @ self.right.T).ravel()


def maximally_entangled(d: int, labels: Tuple[str, str] = ("R", "R'")) -> StateVector:
    """|Φ⟩ = (1/√d) Σ_i |i⟩|i⟩."""
    if d < 1:
        raise ValidationError(f"Dimension must be positive, got {d}")
    return StateVector(
        TensorSpace.of((labels[0], d), (labels[1], d)),
        np.eye(d).ravel() / np.sqrt(d),
    )


def schmidt(state: StateVector, left: Sequence[str]) -> SchmidtDecomposition:
    """Schmidt decomposition across ``left | rest``.

    Zero coefficients are dropped, except that at least one is kept.

    Raises:
        ValidationError: If either side of the cut is empty
    """
    left = list(left)
    right = [label for label in state.space.labels if label not in left]
    for label in left:
        state.space.index(label)
    if not left or not right:
        raise ValidationError(f"Schmidt cut {left} | {right} has an empty side")

    matrix = state.as_matrix(left)
    u, s, vh = linalg.svd(matrix, full_matrices=False)
    keep = max(1, int(np.sum(s > config.NORM_TOL)))
    return SchmidtDecomposition(
        coefficients=s[:keep],
        left=u[:, :keep],
        right=vh[:keep].T,
        left_space=state.space.sub(left),
        right_space=state.space.sub(right),
    )


def purify(rho: DensityOperator, label: str = None) -> StateVector:
    """Canonical purification on ``(ρ's space, purifying factor of dim rank ρ)``.

    Uses the canonical eigenbasis so the result is deterministic.
    """
    if label is None:
        label = "".join(rho.space.labels) + "'"
    eigenvalues, eigenvectors = rho.eigh()
    rank = max(1, int(np.sum(eigenvalues > config.NORM_TOL)))
    weights = np.sqrt(np.clip(eigenvalues[:rank], 0.0, None))
    amplitudes = (eigenvectors[:, :rank] * weights).ravel()
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    return StateVector(rho.space.concat(TensorSpace.of((label, rank))), amplitudes)
