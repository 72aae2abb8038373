"""
Dense linear-algebra helpers shared by every numeric module.
"""

import logging
from typing import Tuple

import numpy as np
from scipy import linalg

from decoupling_lab import config
from decoupling_lab.utils.error_handler import BudgetExceededError, ValidationError

logger = logging.getLogger(__name__)

# Components smaller than this do not fix an eigenvector's phase
PHASE_EPS = 1e-12


def check_budget(what: str, entries: int) -> None:
    """Reject an allocation of ``entries`` complex numbers above the budget."""
    budget = config.DIMENSION_BUDGET
    if entries > budget:
        raise BudgetExceededError(what, int(entries), budget)


def hermiticity_error(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2


def clamp_spectrum(eigenvalues: np.ndarray, tol: float = None) -> np.ndarray:
    """Zero eigenvalues in [-tol, 0) and reject anything more negative.

    Raises:
        ValidationError: If an eigenvalue lies below ``-tol``
    """
    tol = config.NEGATIVE_EIGENVALUE_TOL if tol is None else tol
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.size and eigenvalues.min() < -tol:
        raise ValidationError(f"Negative eigenvalue {eigenvalues.min():.3e} below -{tol:g}")
    return np.clip(eigenvalues, 0.0, None)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible component is real positive."""
    vectors = np.array(vectors, dtype=complex)
    for k in range(vectors.shape[1]):
        column = vectors[:, k]
        nonzero = np.flatnonzero(np.abs(column) > PHASE_EPS)
        if nonzero.size:
            pivot = column[nonzero[0]]
            vectors[:, k] = column * (abs(pivot) / pivot)
    return vectors


def canonical_eigh(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with nonincreasing eigenvalues and canonical phases.

    Returns:
        Tuple of (eigenvalues, eigenvectors as columns)
    """
    eigenvalues, eigenvectors = linalg.eigh(hermitian_part(np.asarray(matrix, dtype=complex)))
    order = np.argsort(-eigenvalues, kind='stable')
    return eigenvalues[order], fix_phases(eigenvectors[:, order])


def rank_cutoff(eigenvalues: np.ndarray) -> float:
    """Round-off floor for a spectrum, as in numpy's matrix_rank."""
    eigenvalues = np.asarray(eigenvalues)
    if eigenvalues.size == 0:
        return 0.0
    return float(np.finfo(float).eps * eigenvalues.size * np.max(np.abs(eigenvalues)))


def psd_sqrt(matrix: np.ndarray, truncate: bool = False) -> np.ndarray:
    """Square root of a positive semidefinite matrix under the clamp policy.

    With ``truncate`` eigenvalues below the round-off floor are zeroed too.
    """
    eigenvalues, eigenvectors = linalg.eigh(hermitian_part(np.asarray(matrix, dtype=complex)))
    eigenvalues = clamp_spectrum(eigenvalues)
    if truncate:
        eigenvalues = np.where(eigenvalues > rank_cutoff(eigenvalues), eigenvalues, 0.0)
    roots = np.sqrt(eigenvalues)
    return (eigenvectors * roots) @ eigenvectors.conj().T


def inverse_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Inverse square root of a positive definite matrix."""
    eigenvalues, eigenvectors = linalg.eigh(hermitian_part(np.asarray(matrix, dtype=complex)))
    if eigenvalues.min() <= config.TOLERANCE:
        raise ValidationError(f"Matrix is not positive definite (min eigenvalue {eigenvalues.min():.3e})")
    return (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.conj().T


def isometry_error(matrix: np.ndarray) -> float:
    gram = matrix.conj().T @ matrix
    return float(np.max(np.abs(gram - np.eye(gram.shape[0])))) if gram.size else 0.0


def range_basis(projector: np.ndarray, rank: int = None) -> np.ndarray:
    """Orthonormal columns spanning the range of a Hermitian projector.

    Coordinate projectors return the matching standard basis vectors.
    """
    projector = np.asarray(projector, dtype=complex)
    diagonal = np.diag(projector).real
    if np.array_equal(projector, np.diag(np.diag(projector))):
        selected = np.flatnonzero(diagonal > 0.5)
        return np.eye(projector.shape[0], dtype=complex)[:, selected[:rank]]
    eigenvalues, eigenvectors = canonical_eigh(projector)
    if rank is None:
        rank = int(np.sum(eigenvalues > 0.5))
    return eigenvectors[:, :rank]
