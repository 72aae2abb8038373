"""
Uhlmann decoder: from a joint pure state ψ^{RBE}, the isometry W: B -> R̂B'
that aligns ψ with the decoupled target |Φ⟩^{RR̂}|ξ⟩^{B'E}.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from decoupling_lab import config
from decoupling_lab.channels.channel import Channel, apply_channel, tensor_power
from decoupling_lab.tensor.linalg import canonical_eigh, rank_cutoff
from decoupling_lab.tensor.metrics import fidelity, fidelity_pure, trace_distance
from decoupling_lab.tensor.operations import marginal, tensor
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, LinearOp, StateVector, maximally_entangled
from decoupling_lab.utils.error_handler import InvariantError, SpaceMismatchError, ValidationError

logger = logging.getLogger(__name__)

DECODED_LABEL = "R^"
SIDE_LABEL = "B'"
FIDELITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DecoderResult:
    """The decoding isometry and the fidelities it certifies.

    ``achieved_fidelity`` is |⟨σ|(I⊗W)|ψ⟩|² and equals ``uhlmann_fidelity``
    = F(ψ^{RE}, π⊗ψ^E). ``entanglement_fidelity`` is the fidelity of the
    decoded state with |Φ⟩^{RR̂}, which can only be larger.
    """

    W: LinearOp
    channel: Channel
    achieved_fidelity: float
    uhlmann_fidelity: float
    entanglement_fidelity: float
    decoupling_tdist: float

    @property
    def dim_side(self) -> int:
        return self.W.out_space.dim(SIDE_LABEL)

    def verify(self) -> None:
        """Check the decoding bound and Uhlmann saturation.

        Raises:
            InvariantError: If either fails
        """
        if self.achieved_fidelity < 1 - self.decoupling_tdist - FIDELITY_TOL:
            raise InvariantError(
                f"Decoder fidelity {self.achieved_fidelity!r} below 1 − ‖ψ^RE − π⊗ψ^E‖₁ "
                f"= {1 - self.decoupling_tdist!r}"
            )
        if abs(self.achieved_fidelity - self.uhlmann_fidelity) > FIDELITY_TOL:
            raise InvariantError(
                f"Decoder overlap {self.achieved_fidelity!r} differs from F(ψ^RE, π⊗ψ^E) "
                f"= {self.uhlmann_fidelity!r}"
            )
        if self.entanglement_fidelity < self.achieved_fidelity - FIDELITY_TOL:
            raise InvariantError(
                f"Decoded fidelity {self.entanglement_fidelity!r} below the aligned overlap "
                f"{self.achieved_fidelity!r}"
            )


def build_decoder(psi: StateVector, labels: Sequence[str] = None, verify: bool = True) -> DecoderResult:
    """Construct the Uhlmann decoder for a pure state on (R, B, E).

    Args:
        psi: Normalized joint state
        labels: The (R, B, E) factor labels; defaults to ψ's own order
        verify: Raise InvariantError when the certified bounds fail

    Returns:
        DecoderResult with W, the decoding channel and its fidelities

    Raises:
        ValidationError: If ψ is subnormalized or B is degenerate
    """
    if len(psi.space) != 3:
        raise SpaceMismatchError(f"Expected a state on (R, B, E), got {psi.space}")
    r_label, b_label, e_label = labels or psi.space.labels
    if psi.subnormalized:
        raise ValidationError("Decoder needs a normalized state")
    d_r, d_b, d_e = psi.space.dim(r_label), psi.space.dim(b_label), psi.space.dim(e_label)
    if d_b < 1:
        raise ValidationError("B is degenerate")

    psi_re = marginal(psi, [r_label, e_label])
    psi_r = marginal(psi_re, [r_label])
    deviation = trace_distance(psi_r, DensityOperator.maximally_mixed(psi_r.space))
    if deviation > config.DECODER_MARGINAL_TOL:
        logger.warning(f"ψ^R is {deviation:.3e} from maximally mixed; decoding against π⊗ψ^E anyway")

    # Canonical purification ξ of ψ^E, padded to |B'| = max(|B|, rank ψ^E)
    env = marginal(psi_re, [e_label])
    eigenvalues, eigenvectors = canonical_eigh(env.matrix)
    rank = max(1, int(np.sum(eigenvalues > rank_cutoff(eigenvalues))))
    d_side = max(d_b, rank)
    xi = np.zeros((d_e, d_side), dtype=complex)
    xi[:, :rank] = eigenvectors[:, :rank] * np.sqrt(np.clip(eigenvalues[:rank], 0.0, None))

    m_psi = psi.as_matrix([r_label, e_label])  # (R·E, B)
    m_sigma = np.kron(np.eye(d_r), xi) / np.sqrt(d_r)  # (R·E, R̂·B')
    overlap = m_sigma.conj().T @ m_psi
    u, _, vh = linalg.svd(overlap, full_matrices=False)
    w_matrix = (u @ vh).conj()

    out_space = TensorSpace.of((DECODED_LABEL, d_r), (SIDE_LABEL, d_side))
    w = LinearOp(TensorSpace.of((b_label, d_b)), out_space, w_matrix, isometry=True, name='W')
    aligned = m_psi @ w_matrix.T
    achieved = float(abs(np.vdot(m_sigma.ravel(), aligned.ravel())) ** 2)

    blocks = w_matrix.reshape(d_r, d_side, d_b)
    channel = Channel(d_b, d_r, tuple(blocks[:, j, :] for j in range(d_side)), name='uhlmann_decoder')

    target = tensor(DensityOperator.maximally_mixed(psi_r.space), env)
    result = DecoderResult(
        W=w,
        channel=channel,
        achieved_fidelity=achieved,
        uhlmann_fidelity=fidelity(psi_re, target),
        entanglement_fidelity=_decoded_fidelity(marginal(psi, [r_label, b_label]), channel),
        decoupling_tdist=trace_distance(psi_re, target),
    )
    logger.debug(
        f"Decoder |B'|={d_side}: overlap {result.achieved_fidelity:.12f}, "
        f"Uhlmann {result.uhlmann_fidelity:.12f}, decoded {result.entanglement_fidelity:.12f}"
    )
    if verify:
        result.verify()
    return result


def _decoded_fidelity(rho_rb: DensityOperator, decoder: Channel) -> float:
    """F(Φ^{RR̂}, (I⊗D)(ρ^{RB}))."""
    r_label, b_label = rho_rb.space.labels
    decoded = apply_channel(rho_rb, decoder, b_label, DECODED_LABEL)
    phi = maximally_entangled(decoder.out_dim, (r_label, DECODED_LABEL))
    return fidelity_pure(phi, decoded)


def entanglement_fidelity(encoding: StateVector, channel: Channel, decoder: Channel, n: int = 1) -> float:
    """F(Φ^{RR̂}, (I ⊗ D∘N^{⊗n})(Υ)) for an encoding on (R, A'^n).

    Args:
        encoding: Pure state with the reference first and the channel input second
        channel: Single-copy channel N
        decoder: Decoding channel B^n -> R̂
        n: Number of channel uses

    Raises:
        SpaceMismatchError: If the dimensions do not chain
    """
    if len(encoding.space) != 2:
        raise SpaceMismatchError(f"Encoding must live on (R, A'^n), got {encoding.space}")
    r_label, a_label = encoding.space.labels
    block = tensor_power(channel, n)
    if block.in_dim != encoding.space.dim(a_label) or block.out_dim != decoder.in_dim:
        raise SpaceMismatchError(
            f"Encoding input {encoding.space.dim(a_label)}, channel {block}, decoder input {decoder.in_dim}"
        )
    if decoder.out_dim != encoding.space.dim(r_label):
        raise SpaceMismatchError(f"Decoder outputs dimension {decoder.out_dim}, reference is {encoding.space.dim(r_label)}")
    received = apply_channel(encoding.density(), block, a_label, "B")
    decoded = apply_channel(received, decoder, "B", DECODED_LABEL)
    phi = maximally_entangled(decoder.out_dim, (r_label, DECODED_LABEL))
    return fidelity_pure(phi, decoded)

