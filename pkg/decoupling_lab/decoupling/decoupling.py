"""
Random-unitary decoupling: the states ψ_U^{RE}, their Hilbert–Schmidt and
trace distances from π ⊗ ψ^E, the exact Haar average and the one-shot bound.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import NamedTuple

import numpy as np

from decoupling_lab import config
from decoupling_lab.decoupling.instance import DecouplingInstance
from decoupling_lab.sampling.seeded_source import SeededSource
from decoupling_lab.sampling.unitaries import haar_unitary, twirl_schur_project, weyl_unitaries
from decoupling_lab.tensor.metrics import hs_norm_sq, purity, trace_distance
from decoupling_lab.tensor.operations import marginal, tensor
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, LinearOp
from decoupling_lab.utils.error_handler import InvariantError, SpaceMismatchError, ValidationError

logger = logging.getLogger(__name__)


class Metric(str, Enum):
    HS2 = 'hs2'  # ‖ψ − π⊗ψ^E‖₂²
    TRACE = 'trace'  # ‖ψ − π⊗ψ^E‖₁
    TRACE_SQ = 'trace_sq'  # ‖ψ − π⊗ψ^E‖₁²


class HaarAverage(NamedTuple):
    value: float
    relaxed_bound: float


class MonteCarloEstimate(NamedTuple):
    mean: float
    stderr: float
    n_samples: int


class DecouplingChain(NamedTuple):
    """One shared sample of ‖·‖₁, ‖·‖₁² and |R||E|·‖·‖₂²."""

    trace: MonteCarloEstimate
    trace_sq: MonteCarloEstimate
    scaled_hs: MonteCarloEstimate

    def holds(self, band: float = None) -> bool:
        band = config.SIGMA_BAND if band is None else band
        first = self.trace.mean ** 2 <= self.trace_sq.mean + band * self.trace_sq.stderr
        second = self.trace_sq.mean <= self.scaled_hs.mean + band * self.scaled_hs.stderr
        return first and second


def psi_u(inst: DecouplingInstance, unitary: LinearOp) -> DensityOperator:
    """ψ_U = (|S|/|R|)(PU ⊗ I) Ψ (U†P ⊗ I) on (R, E).

    R is identified with the range of P through the instance's basis. The
    trace is 1 whenever Ψ^S = π; a deviation beyond the warning threshold is
    logged, not corrected.

    Raises:
        ValidationError: If ``unitary`` is not a unitary on S
    """
    if unitary.in_space.dims != (inst.dim_s,) or unitary.out_space.dims != (inst.dim_s,):
        raise SpaceMismatchError(f"Unitary must act on a single factor of dimension {inst.dim_s}")
    if not unitary.is_unitary:
        raise ValidationError("U is not unitary")

    reduced = inst.basis.conj().T @ unitary.matrix  # (R, S)
    dims = (inst.dim_s, inst.dim_e, inst.dim_s, inst.dim_e)
    psi = np.einsum('rs,setf,qt->reqf', reduced, inst.psi_se.matrix.reshape(dims), reduced.conj())
    d = inst.dim_r * inst.dim_e
    matrix = (inst.dim_s / inst.dim_r) * psi.reshape(d, d)

    deviation = abs(np.trace(matrix).real - 1)
    if deviation > config.TRACE_WARNING_TOL:
        logger.warning(f"Tr ψ_U deviates from 1 by {deviation:.3e} on {inst}")
    space = TensorSpace.of(("R", inst.dim_r), (inst.e_label, inst.dim_e))
    return DensityOperator(space, matrix, check_positive=False, check_trace=False)


def decoupled_target(psi: DensityOperator) -> DensityOperator:
    """π^R ⊗ ψ^E for a state on (R, E)."""
    r_label, e_label = psi.space.labels
    return tensor(DensityOperator.maximally_mixed(psi.space.sub([r_label])), marginal(psi, [e_label]))


def hs_distance_sq(psi: DensityOperator) -> float:
    """‖ψ − π⊗ψ^E‖₂², checked against Tr[ψ²] − Tr[(ψ^E)²]/|R|.

    Raises:
        ValidationError: If ψ^R is not maximally mixed
        InvariantError: If the two sides disagree beyond tolerance
    """
    if len(psi.space) != 2:
        raise SpaceMismatchError(f"Expected a state on (R, E), got {psi.space}")
    r_label, e_label = psi.space.labels
    r_space = psi.space.sub([r_label])
    deviation = trace_distance(marginal(psi, [r_label]), DensityOperator.maximally_mixed(r_space))
    if deviation > config.MARGINAL_TOL:
        raise ValidationError(f"ψ^R is not maximally mixed (‖ψ^R − π‖₁ = {deviation:.3e})")

    direct = hs_norm_sq(psi.matrix - decoupled_target(psi).matrix)
    identity = purity(psi) - purity(marginal(psi, [e_label])) / r_space.total_dim
    if abs(direct - identity) > config.TOLERANCE:
        raise InvariantError(f"HS identity violated: direct {direct!r} vs swap form {identity!r}")
    return direct


def decoupling_distance(psi: DensityOperator) -> float:
    """‖ψ − π⊗ψ^E‖₁."""
    return trace_distance(psi, decoupled_target(psi))


def exact_haar_average_hs(inst: DecouplingInstance) -> HaarAverage:
    """Closed-form E_U ‖ψ_U − π⊗ψ_U^E‖₂² with the relaxed bound Tr[(Ψ^{SE})²].

    Raises:
        ValidationError: If |S| = 1, where the closed form is singular
    """
    s, r = inst.dim_s, inst.dim_r
    if s == 1:
        raise ValidationError("The Haar average formula needs |S| >= 2")
    scale = (1 - r ** -2) / (1 - s ** -2)
    value = scale * (inst.purity - inst.env_purity / s)
    return HaarAverage(max(0.0, value), inst.purity)


def twirl_exact_average_hs(inst: DecouplingInstance) -> float:
    """Exact Haar average through the two-copy twirl projected onto span{I, F}.

    Independent of the closed form: the two-copy operators (P⊗P)F(P⊗P)
    and P⊗P are projected onto the commutant, and the swap trick turns the
    coefficients into purities of Ψ and Ψ^E.
    """
    s, r = inst.dim_s, inst.dim_r
    p = inst.projector.matrix
    pp = np.kron(p, p)
    swap = np.eye(s * s).reshape(s, s, s, s).transpose(1, 0, 2, 3).reshape(s * s, s * s)
    swapped = twirl_schur_project(pp @ swap @ pp, s)
    plain = twirl_schur_project(pp, s)
    alpha = (swapped.identity_coef - plain.identity_coef / r).real
    beta = (swapped.swap_coef - plain.swap_coef / r).real
    return float((s / r) ** 2 * (alpha * inst.env_purity + beta * inst.purity))


def weyl_average_hs(inst: DecouplingInstance) -> float:
    """Finite average of the HS² distance over the |S|² Weyl unitaries.

    Weyl operators form a 1-design only, so this generally differs from the
    Haar average; it coincides for instances whose distance is U-independent.
    """
    values = [hs_distance_sq(psi_u(inst, w)) for w in weyl_unitaries(inst.dim_s, inst.s_label)]
    return float(np.mean(values))


def _distance(inst: DecouplingInstance, metric: Metric, unitary: LinearOp) -> float:
    psi = psi_u(inst, unitary)
    if metric is Metric.HS2:
        return hs_distance_sq(psi)
    distance = decoupling_distance(psi)
    return distance if metric is Metric.TRACE else distance ** 2


def sample_distances(inst: DecouplingInstance, metric: Metric, n_samples: int, src: SeededSource,
                     threads: int = None) -> np.ndarray:
    """Distances for Haar draws 0..n_samples-1, in draw order.

    Draw ``i`` uses ``src.derive(i)`` so the result does not depend on
    ``threads``.
    """
    metric = Metric(metric)

    def trial(index: int) -> float:
        return _distance(inst, metric, haar_unitary(inst.dim_s, src.derive(index), inst.s_label))

    workers = threads or config.DEFAULT_THREADS
    if workers <= 1 or n_samples < 2 * workers:
        return np.array([trial(i) for i in range(n_samples)])
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return np.array(list(executor.map(trial, range(n_samples))))


def _estimate(values: np.ndarray) -> MonteCarloEstimate:
    n = len(values)
    return MonteCarloEstimate(float(np.mean(values)), float(np.std(values, ddof=1) / np.sqrt(n)), n)


def mc_average(inst: DecouplingInstance, metric: Metric, n_samples: int, src: SeededSource,
               threads: int = None) -> MonteCarloEstimate:
    """Monte-Carlo mean and standard error of a decoupling distance over Haar U.

    Raises:
        ValidationError: If fewer than two samples are requested
    """
    if n_samples < 2:
        raise ValidationError(f"Need at least 2 samples, got {n_samples}")
    estimate = _estimate(sample_distances(inst, metric, n_samples, src, threads))
    logger.debug(f"{inst} {Metric(metric).value}: {estimate.mean:.6g} ± {estimate.stderr:.2g}")
    return estimate


def decoupling_chain(inst: DecouplingInstance, n_samples: int, src: SeededSource,
                     threads: int = None) -> DecouplingChain:
    """(E‖·‖₁)² ≤ E‖·‖₁² ≤ |R||E|·E‖·‖₂² evaluated on one shared sample."""
    if n_samples < 2:
        raise ValidationError(f"Need at least 2 samples, got {n_samples}")

    def trial(index: int):
        psi = psi_u(inst, haar_unitary(inst.dim_s, src.derive(index), inst.s_label))
        return decoupling_distance(psi), hs_distance_sq(psi)

    workers = threads or config.DEFAULT_THREADS
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        pairs = np.array(list(executor.map(trial, range(n_samples))))
    trace_values, hs_values = pairs[:, 0], pairs[:, 1]
    return DecouplingChain(
        _estimate(trace_values),
        _estimate(trace_values ** 2),
        _estimate(inst.dim_r * inst.dim_e * hs_values),
    )


def oneshot_bound(inst: DecouplingInstance) -> float:
    """√(|R||E|·Tr[(Ψ^{SE})²])."""
    return float(np.sqrt(inst.dim_r * inst.dim_e * inst.purity))
