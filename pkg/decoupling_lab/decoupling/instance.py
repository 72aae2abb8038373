"""
Decoupling instances: a state Ψ^{SE} maximally mixed on S and a projector P
of S onto a subspace R.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from decoupling_lab import config
from decoupling_lab.channels.builtin import random_channel
from decoupling_lab.channels.channel import Channel, choi, complementary
from decoupling_lab.sampling.seeded_source import RandomLike, as_generator
from decoupling_lab.sampling.unitaries import haar_matrix
from decoupling_lab.tensor.linalg import range_basis
from decoupling_lab.tensor.metrics import purity, trace_distance
from decoupling_lab.tensor.operations import marginal
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, LinearOp
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DecouplingInstance:
    """The pair (Ψ^{SE}, P^{S→R}).

    ``psi_se`` has exactly two factors, S first. ``projector`` acts on S.
    """

    psi_se: DensityOperator
    projector: LinearOp
    instance_id: str = ''
    basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.psi_se.space) != 2:
            raise SpaceMismatchError(f"Ψ^SE needs exactly two factors, got {self.psi_se.space}")
        s_label = self.psi_se.space.labels[0]
        s_space = self.psi_se.space.sub([s_label])
        if self.projector.in_space != s_space or self.projector.out_space != s_space:
            raise SpaceMismatchError(f"Projector must act on {s_space}")

        deviation = trace_distance(marginal(self.psi_se, [s_label]), DensityOperator.maximally_mixed(s_space))
        if deviation > config.MARGINAL_TOL:
            raise ValidationError(f"Ψ^S is not maximally mixed (‖Ψ^S − π‖₁ = {deviation:.3e})")

        p = self.projector.matrix
        error = max(np.max(np.abs(p @ p - p)), np.max(np.abs(p - p.conj().T)))
        if error > config.TOLERANCE:
            raise ValidationError(f"P is not an orthogonal projector (deviation {error:.3e})")
        rank = int(round(np.trace(p).real))
        if rank < 1:
            raise ValidationError("Projector has rank 0")
        object.__setattr__(self, 'basis', range_basis(p, rank))

    @property
    def s_label(self) -> str:
        return self.psi_se.space.labels[0]

    @property
    def e_label(self) -> str:
        return self.psi_se.space.labels[1]

    @property
    def dim_s(self) -> int:
        return self.psi_se.space.dims[0]

    @property
    def dim_e(self) -> int:
        return self.psi_se.space.dims[1]

    @property
    def dim_r(self) -> int:
        return self.basis.shape[1]

    @property
    def purity(self) -> float:
        """Tr[(Ψ^{SE})²]."""
        return purity(self.psi_se)

    @property
    def env_purity(self) -> float:
        """Tr[(Ψ^E)²]."""
        return purity(marginal(self.psi_se, [self.e_label]))

    def __str__(self) -> str:
        name = self.instance_id or 'instance'
        return f"{name}(|S|={self.dim_s}, |R|={self.dim_r}, |E|={self.dim_e})"


def coordinate_projector(dim_s: int, dim_r: int, label: str = "S") -> LinearOp:
    """Projector onto the first ``dim_r`` basis vectors of S."""
    if not 1 <= dim_r <= dim_s:
        raise ValidationError(f"Need 1 <= |R| <= |S|, got |R|={dim_r}, |S|={dim_s}")
    diagonal = np.zeros(dim_s)
    diagonal[:dim_r] = 1
    space = TensorSpace.of((label, dim_s))
    return LinearOp(space, space, np.diag(diagonal), name='P')


def random_projector(dim_s: int, dim_r: int, src: RandomLike, label: str = "S") -> LinearOp:
    if not 1 <= dim_r <= dim_s:
        raise ValidationError(f"Need 1 <= |R| <= |S|, got |R|={dim_r}, |S|={dim_s}")
    columns = haar_matrix(dim_s, src)[:, :dim_r]
    space = TensorSpace.of((label, dim_s))
    return LinearOp(space, space, columns @ columns.conj().T, name='P')


def from_channel(channel: Channel, dim_r: int, instance_id: str = '') -> DecouplingInstance:
    """Ψ^{SE} = (I ⊗ N^c)(Φ^{SA'}): the reference and environment of a maximally entangled input."""
    psi_se = choi(complementary(channel), labels=("S", "E"))
    return DecouplingInstance(psi_se, coordinate_projector(channel.in_dim, dim_r),
                              instance_id or channel.name)


def random_instance(dim_s: int, dim_e: int, dim_r: int, src: RandomLike,
                    kraus: int = None, instance_id: str = '') -> DecouplingInstance:
    """Random Ψ^{SE} as the Choi state of a random channel S -> E, with a random projector."""
    rng = as_generator(src)
    channel = random_channel(dim_s, dim_e, kraus or dim_s * dim_e, rng)
    psi_se = choi(channel, labels=("S", "E"))
    return DecouplingInstance(psi_se, random_projector(dim_s, dim_r, rng), instance_id or 'random')


def trivial_instance(dim_s: int, dim_r: int, instance_id: str = 'noiseless') -> DecouplingInstance:
    """Ψ = π_S ⊗ |0⟩⟨0| with a one-dimensional environment."""
    space = TensorSpace.of(("S", dim_s), ("E", 1))
    return DecouplingInstance(DensityOperator.maximally_mixed(space), coordinate_projector(dim_s, dim_r),
                              instance_id)
