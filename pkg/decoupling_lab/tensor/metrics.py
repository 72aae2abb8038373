"""
Norms, fidelities and entropies.

Logs are base 2 throughout. ``trace_distance`` is the full trace norm
``‖ρ − σ‖₁`` (range [0, 2]), not the halved variant.
"""

import string
from typing import Iterable, Union

import numpy as np
from scipy import linalg
from scipy.special import entr

from decoupling_lab.tensor.linalg import clamp_spectrum, hermitian_part, psd_sqrt
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, LinearOp, StateVector
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError

Matrix = Union[np.ndarray, DensityOperator, LinearOp]


def _as_matrix(x: Matrix) -> np.ndarray:
    if isinstance(x, DensityOperator):
        return x.matrix
    if isinstance(x, LinearOp):
        return x.matrix
    return np.asarray(x, dtype=complex)


def _same_space(rho: DensityOperator, sigma: DensityOperator) -> None:
    if rho.space != sigma.space:
        raise SpaceMismatchError(f"States live on different spaces: {rho.space} vs {sigma.space}")


def trace_norm(x: Matrix) -> float:
    """Sum of singular values."""
    matrix = _as_matrix(x)
    if matrix.size == 0:
        return 0.0
    return float(np.sum(linalg.svdvals(matrix)))


def hs_norm_sq(x: Matrix) -> float:
    """Squared Hilbert–Schmidt norm, Σ|X_ij|²."""
    matrix = _as_matrix(x)
    return float(np.sum(np.abs(matrix) ** 2))


def purity(rho: DensityOperator) -> float:
    """Tr ρ²."""
    return hs_norm_sq(rho.matrix)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """‖ρ − σ‖₁ for Hermitian arguments on the same space."""
    _same_space(rho, sigma)
    difference = hermitian_part(rho.matrix - sigma.matrix)
    return float(np.sum(np.abs(np.linalg.eigvalsh(difference))))


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """F(ρ, σ) = ‖√ρ √σ‖₁², clipped to [0, 1]."""
    _same_space(rho, sigma)
    product = psd_sqrt(rho.matrix, truncate=True) @ psd_sqrt(sigma.matrix, truncate=True)
    overlap = np.sum(linalg.svdvals(product))
    return float(np.clip(overlap ** 2, 0.0, 1.0))


def fidelity_pure(phi: StateVector, rho: DensityOperator) -> float:
    """⟨φ|ρ|φ⟩."""
    if phi.space != rho.space:
        raise SpaceMismatchError(f"States live on different spaces: {phi.space} vs {rho.space}")
    value = np.vdot(phi.amplitudes, rho.matrix @ phi.amplitudes).real
    return float(np.clip(value, 0.0, 1.0))


def entropy_of_spectrum(probabilities: Iterable[float]) -> float:
    """Shannon entropy in bits under the clamp policy."""
    probabilities = clamp_spectrum(np.asarray(list(probabilities), dtype=float))
    return float(np.sum(entr(probabilities)) / np.log(2))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """H(ρ) = −Tr ρ log₂ ρ."""
    return max(0.0, entropy_of_spectrum(np.linalg.eigvalsh(rho.matrix)))


def swap_operator(d: int, labels=("X", "X~")) -> LinearOp:
    """The swap F|i⟩|j⟩ = |j⟩|i⟩ on two copies of a d-dimensional space."""
    if d < 1:
        raise ValidationError(f"Dimension must be positive, got {d}")
    matrix = np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)
    space = TensorSpace.of((labels[0], d), (labels[1], d))
    return LinearOp.unitary(space, matrix, name='F')


def swap_trick_purity(rho: DensityOperator, swapped: Iterable[str] = None) -> float:
    """Tr[(ρ⊗ρ) F_L] where F_L swaps the factors ``swapped`` between the two copies.

    With every factor swapped this is Tr ρ²; with a subset L it is the
    purity of the marginal on L.
    """
    labels = rho.space.labels
    swapped = set(labels if swapped is None else swapped)
    for label in swapped:
        rho.space.index(label)
    n = len(labels)
    if 2 * n > len(string.ascii_letters):
        raise ValidationError(f"Too many factors ({n}) for the swap contraction")
    first = string.ascii_letters[:n]
    second = string.ascii_letters[n:2 * n]
    cols_first = "".join(second[k] if labels[k] in swapped else first[k] for k in range(n))
    cols_second = "".join(first[k] if labels[k] in swapped else second[k] for k in range(n))
    tensor = rho.matrix.reshape(rho.space.dims * 2)
    value = np.einsum(f"{first}{cols_first},{second}{cols_second}->", tensor, tensor)
    return float(np.real(value))
