"""
Haar-random unitaries, Weyl operators and twirls.
"""

import logging
from typing import List, NamedTuple, Tuple, Union

import numpy as np
from scipy import linalg

from decoupling_lab.sampling.seeded_source import RandomLike, as_generator
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, LinearOp, StateVector
from decoupling_lab.utils.error_handler import ValidationError

logger = logging.getLogger(__name__)


class TwirlProjection(NamedTuple):
    """M ≈ identity_coef·I + swap_coef·F, with the HS-norm residual."""

    identity_coef: complex
    swap_coef: complex
    residual: float


def ginibre(rows: int, cols: int, src: RandomLike) -> np.ndarray:
    rng = as_generator(src)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_matrix(d: int, src: RandomLike) -> np.ndarray:
    """Haar unitary as a bare array: Ginibre, QR, and the phase fix that makes R's diagonal positive."""
    if d < 1:
        raise ValidationError(f"Dimension must be positive, got {d}")
    q, r = linalg.qr(ginibre(d, d, src))
    diagonal = np.diag(r)
    magnitude = np.abs(diagonal)
    phases = np.where(magnitude > 0, diagonal / np.where(magnitude > 0, magnitude, 1), 1)
    return q * phases


def haar_unitary(d: int, src: RandomLike, label: str = "S") -> LinearOp:
    """Haar-distributed unitary on a single factor ``label``."""
    return LinearOp.unitary(TensorSpace.of((label, d)), haar_matrix(d, src), name='U')


def haar_isometry(in_dim: int, out_dim: int, src: RandomLike) -> np.ndarray:
    """First ``in_dim`` columns of a Haar unitary on ``out_dim``."""
    if in_dim > out_dim:
        raise ValidationError(f"No isometry from dimension {in_dim} into {out_dim}")
    return haar_matrix(out_dim, src)[:, :in_dim]


def random_state_vector(space: TensorSpace, src: RandomLike) -> StateVector:
    """Uniformly random pure state."""
    vector = ginibre(space.total_dim, 1, src).ravel()
    return StateVector(space, vector / np.linalg.norm(vector))


def random_density(space: TensorSpace, src: RandomLike, rank: int = None) -> DensityOperator:
    """Random mixed state G G† / Tr(G G†) with G Ginibre of the given rank."""
    d = space.total_dim
    g = ginibre(d, rank or d, src)
    rho = g @ g.conj().T
    return DensityOperator(space, rho / np.trace(rho).real)


def shift_and_phase(d: int) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic shift X|k⟩ = |k+1⟩ and phase Z = diag(ω^k), ω = e^{2πi/d}."""
    shift = np.roll(np.eye(d), 1, axis=0)
    phase = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return shift, phase


def weyl_unitaries(d: int, label: str = "S") -> List[LinearOp]:
    """The d² operators X^a Z^b, ordered with ``a`` as the major index."""
    if d < 1:
        raise ValidationError(f"Dimension must be positive, got {d}")
    shift, phase = shift_and_phase(d)
    space = TensorSpace.of((label, d))
    operators = []
    for a in range(d):
        shift_a = np.linalg.matrix_power(shift, a)
        for b in range(d):
            operators.append(
                LinearOp.unitary(space, shift_a @ np.linalg.matrix_power(phase, b), name=f"W({a},{b})")
            )
    return operators


def _matrix(m: Union[np.ndarray, LinearOp]) -> np.ndarray:
    return m.matrix if isinstance(m, LinearOp) else np.asarray(m, dtype=complex)


def weyl_twirl(m: Union[np.ndarray, LinearOp], d: int) -> np.ndarray:
    """(1/d²) Σ W M W†; the Weyl set twirls first moments to Tr[M]/d · I exactly."""
    m = _matrix(m)
    total = np.zeros_like(m)
    for w in weyl_unitaries(d):
        total += w.matrix @ m @ w.matrix.conj().T
    return total / d ** 2


def weyl_twirl_two_copy(m: Union[np.ndarray, LinearOp], d: int) -> np.ndarray:
    """(1/d²) Σ (W†⊗W†) M (W⊗W) over the Weyl set.

    Unlike the Haar twirl this does not in general land in span{I, F}.
    """
    m = _matrix(m)
    total = np.zeros_like(m)
    for w in weyl_unitaries(d):
        ww = np.kron(w.matrix, w.matrix)
        total += ww.conj().T @ m @ ww
    return total / d ** 2


def haar_twirl_mc(m: Union[np.ndarray, LinearOp], d: int, n_samples: int,
                  src: RandomLike) -> Tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo estimate of E_U (U†⊗U†) M (U⊗U) with elementwise standard errors."""
    if n_samples < 2:
        raise ValidationError(f"Need at least 2 samples, got {n_samples}")
    m = _matrix(m)
    rng = as_generator(src)
    mean = np.zeros_like(m)
    second = np.zeros(m.shape)
    for _ in range(n_samples):
        u = haar_matrix(d, rng)
        uu = np.kron(u, u)
        sample = uu.conj().T @ m @ uu
        mean += sample
        second += np.abs(sample) ** 2
    mean /= n_samples
    variance = (second / n_samples - np.abs(mean) ** 2) * n_samples / (n_samples - 1)
    return mean, np.sqrt(np.clip(variance, 0.0, None) / n_samples)


def twirl_schur_project(m: Union[np.ndarray, LinearOp], d: int = None) -> TwirlProjection:
    """Least-squares projection of a two-copy operator onto span{I, F}.

    For the Haar twirl this projection is exact: twirling equals the
    Hilbert–Schmidt orthogonal projection onto the commutant span{I, F}.
    """
    m = _matrix(m)
    if d is None:
        d = int(round(np.sqrt(m.shape[0])))
    if m.shape != (d * d, d * d):
        raise ValidationError(f"Expected a {d * d}x{d * d} two-copy operator, got {m.shape}")
    identity = np.eye(d * d)
    swap = np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)
    basis = np.stack([identity.ravel(), swap.ravel()], axis=1).astype(complex)
    coefficients, *_ = np.linalg.lstsq(basis, m.ravel(), rcond=None)
    residual = np.linalg.norm(m.ravel() - basis @ coefficients)
    return TwirlProjection(complex(coefficients[0]), complex(coefficients[1]), float(residual))
