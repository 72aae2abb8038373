"""
Random-subspace entanglement-generation codes, end to end.

A code is an |R|-dimensional subspace of a chosen S ⊂ A'^n, picked by a
Haar unitary on S. Each trial pushes the encoded maximally entangled state
through the Stinespring dilation of N^{⊗n}, measures how far ψ^{RE^n} is
from π ⊗ ψ^{E^n}, builds the Uhlmann decoder and records the entanglement
fidelity it achieves.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from decoupling_lab import config
from decoupling_lab.channels.channel import Channel, stinespring, tensor_power
from decoupling_lab.decoder.uhlmann_decoder import build_decoder
from decoupling_lab.decoupling.decoupling import decoupling_distance, hs_distance_sq, oneshot_bound, psi_u
from decoupling_lab.decoupling.instance import DecouplingInstance, coordinate_projector
from decoupling_lab.sampling.seeded_source import SeededSource
from decoupling_lab.sampling.unitaries import haar_unitary
from decoupling_lab.tensor.linalg import canonical_eigh, isometry_error
from decoupling_lab.tensor.operations import marginal
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, StateVector
from decoupling_lab.typicality.flattening import channel_state, flatten_code
from decoupling_lab.typicality.typical_subspace import typical_projector
from decoupling_lab.typicality.types import select_type
from decoupling_lab.utils.error_handler import InvariantError, ValidationError

logger = logging.getLogger(__name__)

FIDELITY_TOL = 1e-8


class SubspaceMode(str, Enum):
    FULL_INPUT = 'full-input'
    TYPE_CLASS = 'type-class'
    FLATTENED = 'flattened'


@dataclass(frozen=True, eq=False)
class CodeExperimentConfig:
    """One rate point: |R| out of the selected S ⊂ A'^n, for ``trials`` codes.

    ``phi`` defaults to the maximally mixed input.
    """

    channel: Channel
    n: int
    r_dim: int
    trials: int = 10
    phi: Optional[DensityOperator] = None
    delta: float = 0.3
    seed: int = 0
    subspace_mode: SubspaceMode = SubspaceMode.FULL_INPUT
    threads: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"Block length must be positive, got {self.n}")
        if self.r_dim < 1:
            raise ValidationError(f"Code dimension must be positive, got {self.r_dim}")
        if self.trials < 1:
            raise ValidationError(f"Need at least one trial, got {self.trials}")
        object.__setattr__(self, 'subspace_mode', SubspaceMode(self.subspace_mode))
        if self.phi is None:
            object.__setattr__(
                self, 'phi', DensityOperator.maximally_mixed(TensorSpace.of(("A'", self.channel.in_dim)))
            )
        elif self.phi.dim != self.channel.in_dim:
            raise ValidationError(f"Input state of dimension {self.phi.dim} does not fit {self.channel}")

    @property
    def rate(self) -> float:
        """Q = (1/n) log₂|R|."""
        return float(np.log2(self.r_dim)) / self.n


@dataclass(frozen=True)
class CodeExperimentRecord:
    trial: int
    decoupling_distance: float
    hs_distance_sq: float
    oneshot_bound: float
    achieved_fidelity: float
    uhlmann_fidelity: float
    wall_time: float = field(default=0.0, compare=False)

    @property
    def infidelity(self) -> float:
        return 1 - self.achieved_fidelity

    @property
    def bound_gap(self) -> float:
        """decoupling distance − (1 − F); non-negative up to round-off."""
        return self.decoupling_distance - self.infidelity

    def to_row(self) -> Dict[str, Any]:
        return {
            "trial": self.trial,
            "decoupling_distance": self.decoupling_distance,
            "hs_distance_sq": self.hs_distance_sq,
            "oneshot_bound": self.oneshot_bound,
            "achieved_fidelity": self.achieved_fidelity,
            "uhlmann_fidelity": self.uhlmann_fidelity,
            "infidelity": self.infidelity,
            "bound_gap": self.bound_gap,
        }


RECORD_COLUMNS = list(CodeExperimentRecord(0, 0.0, 0.0, 0.0, 0.0, 0.0).to_row())


def select_subspace(cfg: CodeExperimentConfig) -> np.ndarray:
    """Orthonormal columns of S in A'^n coordinates for the configured mode."""
    d, n = cfg.channel.in_dim, cfg.n
    if cfg.subspace_mode is SubspaceMode.FULL_INPUT:
        return np.eye(d ** n, dtype=complex)
    if cfg.subspace_mode is SubspaceMode.TYPE_CLASS:
        decomposition = typical_projector(cfg.phi, n, cfg.delta)
        return decomposition.type_basis(select_type(decomposition.eigenvalues, n, cfg.delta))

    code = flatten_code(channel_state(cfg.channel, cfg.phi), n, cfg.delta)
    # |k⟩^A pairs with the k-th eigenvector of φ on A'; S maps over conjugated
    _, eigenvectors = canonical_eigh(cfg.phi.matrix)
    pairing = reduce(np.kron, [eigenvectors] * n) if n > 1 else eigenvectors
    logger.debug(f"Flattened subspace: {code}")
    return pairing @ code.s_basis.conj()


def code_instance(block_dilation: np.ndarray, subspace: np.ndarray, r_dim: int,
                  dims: Tuple[int, int]) -> DecouplingInstance:
    """Ψ^{SE^n} = (I ⊗ N^c)(Φ_S) with the coordinate projector onto R."""
    s_dim = subspace.shape[1]
    d_b, d_e = dims
    pushed = (block_dilation @ subspace).T.reshape(s_dim, d_b, d_e) / np.sqrt(s_dim)
    state = StateVector(TensorSpace.of(("S", s_dim), ("B", d_b), ("E", d_e)), pushed)
    return DecouplingInstance(marginal(state, ["S", "E"]), coordinate_projector(s_dim, r_dim),
                              instance_id='code')


def run_code_experiment(cfg: CodeExperimentConfig) -> List[CodeExperimentRecord]:
    """Run ``cfg.trials`` random codes; trial i draws from ``seed`` stream i.

    Raises:
        ValidationError: If |R| > |S|
        InvariantError: If a trial violates the decoding bound or the
            encoded state disagrees with the decoupling construction
        BudgetExceededError: If N^{⊗n} does not fit the budget
    """
    subspace = select_subspace(cfg)
    s_dim = subspace.shape[1]
    if cfg.r_dim > s_dim:
        raise ValidationError(f"|R| = {cfg.r_dim} exceeds |S| = {s_dim} ({cfg.subspace_mode.value})")

    block = tensor_power(cfg.channel, cfg.n)
    dilation = stinespring(block).isometry.matrix
    dims = (block.out_dim, block.env_dim)
    instance = code_instance(dilation, subspace, cfg.r_dim, dims)
    bound = oneshot_bound(instance)
    source = SeededSource(cfg.seed)
    space = TensorSpace.of(("R", cfg.r_dim), ("B", dims[0]), ("E", dims[1]))

    def trial(index: int) -> CodeExperimentRecord:
        started = time.perf_counter()
        unitary = haar_unitary(s_dim, source.derive(index), "S")
        encoding = subspace @ unitary.matrix[:cfg.r_dim].T  # (A'^n, R)
        if isometry_error(encoding) > config.TOLERANCE:
            raise InvariantError(f"Trial {index}: encoding is not maximally entangled with R")
        pushed = (dilation @ encoding).T / np.sqrt(cfg.r_dim)
        psi = StateVector(space, pushed)
        psi_re = marginal(psi, ["R", "E"])

        expected = psi_u(instance, unitary)
        mismatch = float(np.max(np.abs(expected.matrix - psi_re.matrix)))
        if mismatch > config.TOLERANCE:
            raise InvariantError(f"Trial {index}: encoded ψ^RE differs from ψ_U by {mismatch:.3e}")

        decoder = build_decoder(psi, verify=True)
        record = CodeExperimentRecord(
            trial=index,
            decoupling_distance=decoupling_distance(psi_re),
            hs_distance_sq=hs_distance_sq(psi_re),
            oneshot_bound=bound,
            achieved_fidelity=decoder.entanglement_fidelity,
            uhlmann_fidelity=decoder.uhlmann_fidelity,
            wall_time=time.perf_counter() - started,
        )
        if record.bound_gap < -FIDELITY_TOL:
            raise InvariantError(
                f"Trial {index}: fidelity {record.achieved_fidelity!r} below "
                f"1 − {record.decoupling_distance!r}"
            )
        return record

    workers = cfg.threads or config.DEFAULT_THREADS
    if workers <= 1 or cfg.trials < 2:
        records = [trial(i) for i in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(trial, range(cfg.trials)))
    logger.info(
        f"{cfg.channel.name} n={cfg.n} |R|={cfg.r_dim} |S|={s_dim} ({cfg.subspace_mode.value}): "
        f"mean F = {np.mean([r.achieved_fidelity for r in records]):.6f} over {cfg.trials} trials"
    )
    return records


def summarize(records: List[CodeExperimentRecord]) -> Dict[str, float]:
    """Means with standard errors of the distance and fidelity columns."""
    distances = np.array([r.decoupling_distance for r in records])
    fidelities = np.array([r.achieved_fidelity for r in records])
    n = len(records)

    def stderr(values: np.ndarray) -> float:
        return float(np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0

    return {
        "trials": n,
        "mean_decoupling_distance": float(distances.mean()),
        "stderr_decoupling_distance": stderr(distances),
        "mean_fidelity": float(fidelities.mean()),
        "stderr_fidelity": stderr(fidelities),
        "min_bound_gap": float(min(r.bound_gap for r in records)),
        "oneshot_bound": records[0].oneshot_bound,
    }
