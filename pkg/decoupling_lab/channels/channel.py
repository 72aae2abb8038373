"""
Channel representations: Kraus sets, Stinespring isometries, complementary
channels, Choi states and coherent information.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Tuple

import numpy as np

from decoupling_lab import config
from decoupling_lab.tensor.linalg import canonical_eigh, check_budget, inverse_sqrt
from decoupling_lab.tensor.metrics import von_neumann_entropy
from decoupling_lab.tensor.operations import apply_local, marginal
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, LinearOp, StateVector
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Channel:
    """A CPTP map stored as Kraus operators of shape (out_dim, in_dim)."""

    in_dim: int
    out_dim: int
    kraus: Tuple[np.ndarray, ...]
    name: str = field(default='channel')

    def __post_init__(self):
        if not self.kraus:
            raise ValidationError(f"Channel {self.name!r} has no Kraus operators")
        operators = []
        for k, op in enumerate(self.kraus):
            op = np.array(op, dtype=complex)
            if op.shape != (self.out_dim, self.in_dim):
                raise ValidationError(
                    f"Kraus operator {k} of {self.name!r} has shape {op.shape}, "
                    f"expected {(self.out_dim, self.in_dim)}"
                )
            op.setflags(write=False)
            operators.append(op)
        object.__setattr__(self, 'kraus', tuple(operators))
        error = self.trace_preservation_error()
        if error > config.TOLERANCE:
            raise ValidationError(f"Channel {self.name!r} is not trace preserving (deviation {error:.3e})")

    @property
    def env_dim(self) -> int:
        return len(self.kraus)

    def trace_preservation_error(self) -> float:
        total = sum(k.conj().T @ k for k in self.kraus)
        return float(np.max(np.abs(total - np.eye(self.in_dim))))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Σ_k K ρ K† on a bare matrix."""
        rho = np.asarray(rho, dtype=complex)
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def __call__(self, rho: DensityOperator, out_label: str = None) -> DensityOperator:
        """Apply to a single-factor state."""
        if len(rho.space) != 1 or rho.dim != self.in_dim:
            raise SpaceMismatchError(f"Channel {self.name!r} expects one factor of dimension {self.in_dim}")
        label = out_label or rho.space.labels[0]
        return DensityOperator(TensorSpace.of((label, self.out_dim)), self.apply(rho.matrix), check_positive=False)

    def __str__(self) -> str:
        return f"{self.name}({self.in_dim}->{self.out_dim}, {self.env_dim} Kraus)"


@dataclass(frozen=True)
class StinespringIsometry:
    """V: A' -> B⊗E with V = Σ_k K_k ⊗ |k⟩^E."""

    isometry: LinearOp
    env_dim: int

    @property
    def in_label(self) -> str:
        return self.isometry.in_space.labels[0]

    @property
    def out_labels(self) -> Tuple[str, str]:
        return self.isometry.out_space.labels

    def apply(self, state: StateVector) -> StateVector:
        """Dilate the factor named by the input label."""
        return apply_local(state, self.isometry)


def stinespring(channel: Channel, in_label: str = "A'", out_labels: Tuple[str, str] = ("B", "E")) -> StinespringIsometry:
    """Stack the Kraus operators over an orthonormal environment basis."""
    matrix = np.stack(channel.kraus, axis=1).reshape(channel.out_dim * channel.env_dim, channel.in_dim)
    isometry = LinearOp(
        TensorSpace.of((in_label, channel.in_dim)),
        TensorSpace.of((out_labels[0], channel.out_dim), (out_labels[1], channel.env_dim)),
        matrix,
        isometry=True,
        name=f"V[{channel.name}]",
    )
    return StinespringIsometry(isometry, channel.env_dim)


def complementary(channel: Channel) -> Channel:
    """The channel A' -> E that discards B from the dilation."""
    rows = np.stack(channel.kraus, axis=1)  # (out, env, in)
    return Channel(channel.in_dim, channel.env_dim, tuple(rows[b] for b in range(channel.out_dim)),
                   name=f"{channel.name}^c")


def choi(channel: Channel, labels: Tuple[str, str] = ("A", "B")) -> DensityOperator:
    """(I⊗N)(Φ) on (A, B)."""
    d = channel.in_dim
    space = TensorSpace.of((labels[0], d), (labels[1], channel.out_dim))
    check_budget("Choi state", space.total_dim ** 2)
    vectors = np.stack([k.T.ravel() for k in channel.kraus], axis=1) / np.sqrt(d)
    return DensityOperator(space, vectors @ vectors.conj().T, check_positive=False)


def channel_from_choi(rho: DensityOperator, name: str = 'choi') -> Channel:
    """Recover a Kraus set from a two-factor Choi state.

    Raises:
        ValidationError: If the input marginal is not maximally mixed
    """
    if len(rho.space) != 2:
        raise SpaceMismatchError(f"Choi state needs two factors, got {rho.space}")
    in_label, out_label = rho.space.labels
    d_in, d_out = rho.space.dims
    input_marginal = marginal(rho, [in_label]).matrix
    deviation = float(np.sum(np.abs(np.linalg.eigvalsh(input_marginal - np.eye(d_in) / d_in))))
    if deviation > config.MARGINAL_TOL:
        raise ValidationError(f"Choi input marginal is not maximally mixed (‖ρ^A − π‖₁ = {deviation:.3e})")

    eigenvalues, eigenvectors = canonical_eigh(rho.matrix)
    kraus = [
        np.sqrt(d_in * value) * eigenvectors[:, k].reshape(d_in, d_out).T
        for k, value in enumerate(eigenvalues)
        if value > config.NEGATIVE_EIGENVALUE_TOL
    ]
    total = sum(k.conj().T @ k for k in kraus)
    correction = float(np.max(np.abs(total - np.eye(d_in))))
    if correction > config.TOLERANCE:
        logger.warning(f"Restoring trace preservation of {name!r} (deviation {correction:.3e})")
        root = inverse_sqrt(total)
        kraus = [k @ root for k in kraus]
    return Channel(d_in, d_out, tuple(kraus), name=name)


def tensor_power(channel: Channel, n: int) -> Channel:
    """N^{⊗n} with all n-fold Kraus products, first copy most significant.

    Raises:
        BudgetExceededError: If the Kraus set would not fit the budget
    """
    if n < 1:
        raise ValidationError(f"Block length must be positive, got {n}")
    if n == 1:
        return channel
    required = (channel.env_dim * channel.out_dim * channel.in_dim) ** n
    check_budget(f"{channel.name}^⊗{n}", required)
    kraus = tuple(
        reduce(np.kron, product) for product in itertools.product(channel.kraus, repeat=n)
    )
    return Channel(channel.in_dim ** n, channel.out_dim ** n, kraus, name=f"{channel.name}^{n}")


def output_entropies(phi: DensityOperator, channel: Channel) -> Tuple[float, float]:
    """(H(B), H(E)) on the dilated output V φ V†."""
    if phi.dim != channel.in_dim:
        raise SpaceMismatchError(f"Input of dimension {phi.dim} does not fit {channel}")
    rho = phi.matrix
    out = channel.apply(rho)
    stacked = np.stack(channel.kraus)
    env = np.einsum('kbi,ij,lbj->kl', stacked, rho, stacked.conj())
    h_b = von_neumann_entropy(DensityOperator(TensorSpace.of(("B", channel.out_dim)), out, check_positive=False))
    h_e = von_neumann_entropy(DensityOperator(TensorSpace.of(("E", channel.env_dim)), env, check_positive=False))
    return h_b, h_e


def coherent_information(phi: DensityOperator, channel: Channel) -> float:
    """I_c(φ, N) = H(B) − H(E) in bits."""
    h_b, h_e = output_entropies(phi, channel)
    return h_b - h_e


def apply_channel(state: DensityOperator, channel: Channel, label: str, out_label: str = None) -> DensityOperator:
    """Apply the channel to factor ``label`` of a multipartite state."""
    out_label = out_label or label
    in_space = TensorSpace.of((label, channel.in_dim))
    out_space = TensorSpace.of((out_label, channel.out_dim))
    total = None
    for k in channel.kraus:
        branch = apply_local(state, LinearOp(in_space, out_space, k)).matrix
        total = branch if total is None else total + branch
    first = state.space.index(label)
    new_space = TensorSpace(
        state.space.factors[:first] + out_space.factors + state.space.factors[first + 1:]
    )
    return DensityOperator(new_space, total, subnormalized=state.subnormalized, check_positive=False,
                           check_trace=state.check_trace)