"""
Flattened typical codes.

Starting from the n-fold purified channel state φ^{ABE}, the type-class
projection Ω, its triply projected version Ω'_δ and the Schmidt-flattened
Ω_δ are built in explicit coordinates. Dropping the Schmidt directions with
small weight leaves a subspace S of the type class on which the flattened
state Ψ_δ is maximally mixed. Every inequality relating these states is then
checked on the actual numbers by ``verify_typ_bounds``.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy import linalg

from decoupling_lab import config
from decoupling_lab.channels.channel import Channel, stinespring
from decoupling_lab.tensor.linalg import canonical_eigh, check_budget
from decoupling_lab.tensor.metrics import von_neumann_entropy
from decoupling_lab.tensor.operations import marginal, reorder
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, StateVector
from decoupling_lab.typicality.types import TypeVector, select_type
from decoupling_lab.typicality.typical_subspace import TypicalDecomposition, typical_projector
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError

logger = logging.getLogger(__name__)

# Exactly flat coefficients must never be discarded
DISCARD_EPS = 1e-12


def pure_trace_distance(u: np.ndarray, v: np.ndarray) -> float:
    """‖|u⟩⟨u| − |v⟩⟨v|‖₁ for unit vectors."""
    overlap = abs(np.vdot(np.ravel(u), np.ravel(v))) ** 2
    return float(2 * np.sqrt(max(0.0, 1 - overlap)))


def input_purification(phi: DensityOperator, labels: Tuple[str, str] = ("A", "A'")) -> StateVector:
    """|φ⟩^{AA'} = Σ_k √p_k |k⟩^A |v_k⟩^{A'}, so φ^A is diagonal in the standard basis."""
    if len(phi.space) != 1:
        raise SpaceMismatchError(f"Input state must be single-factor, got {phi.space}")
    eigenvalues, eigenvectors = canonical_eigh(phi.matrix)
    weights = np.sqrt(np.clip(eigenvalues, 0.0, None))
    amplitudes = (weights[:, None] * eigenvectors.T).ravel()
    d = phi.dim
    space = TensorSpace.of((labels[0], d), (labels[1], d))
    return StateVector(space, amplitudes / np.linalg.norm(amplitudes))


def channel_state(channel: Channel, phi: DensityOperator) -> StateVector:
    """(I ⊗ V_N)|φ⟩^{AA'} on (A, B, E)."""
    if phi.dim != channel.in_dim:
        raise SpaceMismatchError(f"Input of dimension {phi.dim} does not fit {channel}")
    return stinespring(channel).apply(input_purification(phi))


def _n_fold(amplitudes: np.ndarray, dims: Sequence[int], n: int) -> np.ndarray:
    """|φ⟩^{⊗n} with axes regrouped as (A^n, B^n, E^n)."""
    flat = reduce(np.kron, [amplitudes] * n) if n > 1 else amplitudes
    k = len(dims)
    order = [axis for part in range(k) for axis in range(part, k * n, k)]
    return flat.reshape(tuple(dims) * n).transpose(order).reshape([d ** n for d in dims])


@dataclass(frozen=True, eq=False)
class FlattenedCode:
    """Everything the flattening pipeline produced at one (n, δ).

    Coordinates: ``omega`` lives on (A_t, B^n, E^n) in the type-class basis;
    ``omega_prime`` on (A_t, B_δ, E_δ); ``psi`` on (S, B^n, E^n) and
    ``psi_delta`` on (S, B_δ, E_δ). ``schmidt_basis`` columns are the
    Schmidt vectors of Ω'_δ in A_t coordinates.
    """

    n: int
    delta: float
    chosen_type: TypeVector
    type_basis: np.ndarray = field(repr=False)
    schmidt_basis: np.ndarray = field(repr=False)
    side_basis: np.ndarray = field(repr=False)
    alphas: np.ndarray
    kept: Tuple[int, ...]
    discarded: Tuple[int, ...]
    epsilon: float
    omega: StateVector = field(repr=False)
    omega_prime: StateVector = field(repr=False)
    psi: StateVector = field(repr=False)
    psi_delta: StateVector = field(repr=False)
    typical_b: TypicalDecomposition = field(repr=False)
    typical_e: TypicalDecomposition = field(repr=False)
    entropies: Dict[str, float]

    @property
    def dim_at(self) -> int:
        return self.type_basis.shape[1]

    @property
    def dim_s(self) -> int:
        return len(self.kept)

    @property
    def dim_b_delta(self) -> int:
        return self.typical_b.rank

    @property
    def dim_e_delta(self) -> int:
        return self.typical_e.rank

    @property
    def s_basis(self) -> np.ndarray:
        """Orthonormal columns of S inside A^n."""
        return self.type_basis @ self.schmidt_basis[:, list(self.kept)]

    @property
    def projector_s(self) -> np.ndarray:
        basis = self.s_basis
        return basis @ basis.conj().T

    @property
    def threshold(self) -> float:
        return (1 - np.sqrt(self.epsilon)) / self.dim_at

    @property
    def iota(self) -> float:
        """nH(A) − log₂|S|."""
        return self.n * self.entropies["A"] - float(np.log2(self.dim_s))

    def flattened_coordinates(self, indices: Sequence[int] = None) -> np.ndarray:
        """(1/√k) Σ_{i} |u_i⟩|w_i⟩ over ``indices`` (all by default), on (A_t, B_δ, E_δ)."""
        indices = list(range(self.dim_at)) if indices is None else list(indices)
        shape = (self.dim_b_delta, self.dim_e_delta)
        coords = np.einsum('xi,iyz->xyz', self.schmidt_basis[:, indices],
                           self.side_basis[indices].reshape((len(indices),) + shape))
        return coords / np.sqrt(len(indices))

    def __str__(self) -> str:
        return (f"FlattenedCode(n={self.n}, δ={self.delta}, t={self.chosen_type}, |A_t|={self.dim_at}, "
                f"|S|={self.dim_s}, |B_δ|={self.dim_b_delta}, |E_δ|={self.dim_e_delta}, ε={self.epsilon:.3g})")


def flatten_code(phi_abe: StateVector, n: int, delta: float, labels: Sequence[str] = None) -> FlattenedCode:
    """Run the flattening pipeline on a purified channel state.

    Args:
        phi_abe: Pure state on (A, B, E), e.g. from ``channel_state``
        n: Block length
        delta: Typicality width
        labels: The (A, B, E) factor labels; defaults to the state's order

    Raises:
        ValidationError: If no n-type is within δ of φ^A, Ω'_δ vanishes,
            or the type class is larger than B_δ ⊗ E_δ
        BudgetExceededError: If the n-fold state does not fit the budget
    """
    if len(phi_abe.space) != 3:
        raise SpaceMismatchError(f"Expected a state on (A, B, E), got {phi_abe.space}")
    a_label, b_label, e_label = labels or phi_abe.space.labels
    phi_abe = reorder(phi_abe.normalized(), [a_label, b_label, e_label])
    dims = phi_abe.space.dims
    check_budget(f"{n}-fold channel state", int(np.prod(dims)) ** n)

    rho_a, rho_b, rho_e = (marginal(phi_abe, [label]) for label in (a_label, b_label, e_label))
    typical_a = typical_projector(rho_a, n, delta)
    chosen = select_type(typical_a.eigenvalues, n, delta)
    typical_b = typical_projector(rho_b, n, delta)
    typical_e = typical_projector(rho_e, n, delta)

    type_basis = typical_a.type_basis(chosen)
    q_b, q_e = typical_b.typical_basis(), typical_e.typical_basis()
    dim_at, dim_b, dim_e = type_basis.shape[1], q_b.shape[1], q_e.shape[1]

    joint = _n_fold(phi_abe.amplitudes, dims, n)
    omega = np.einsum('ax,abe->xbe', type_basis.conj(), joint)
    omega /= np.linalg.norm(omega)
    projected = np.einsum('xbe,by,ez->xyz', omega, q_b.conj(), q_e.conj())
    overlap = float(np.linalg.norm(projected))
    if overlap < config.BOUND_TOL:
        raise ValidationError(f"Ω'_δ vanishes at n={n}, δ={delta}; widen δ")
    if dim_at > dim_b * dim_e:
        raise ValidationError(f"Type class of dimension {dim_at} exceeds |B_δ||E_δ| = {dim_b * dim_e}")
    omega_prime = projected / overlap
    epsilon = 2 * float(np.sqrt(max(0.0, 1 - overlap ** 2)))

    u, s, vh = linalg.svd(omega_prime.reshape(dim_at, dim_b * dim_e), full_matrices=True)
    alphas = np.zeros(dim_at)
    alphas[:len(s)] = s ** 2
    threshold = (1 - np.sqrt(epsilon)) / dim_at - DISCARD_EPS
    kept = tuple(int(i) for i in np.flatnonzero(alphas >= threshold))
    discarded = tuple(int(i) for i in np.flatnonzero(alphas < threshold))
    if not kept:
        raise ValidationError(f"Every Schmidt direction was discarded at ε={epsilon:.3g}")

    s_basis = u[:, list(kept)]
    psi = np.einsum('xj,xbe->jbe', s_basis.conj(), omega)
    psi /= np.linalg.norm(psi)
    psi_delta = vh[list(kept)].reshape(len(kept), dim_b, dim_e) / np.sqrt(len(kept))

    s_dim = len(kept)
    code = FlattenedCode(
        n=n,
        delta=float(delta),
        chosen_type=chosen,
        type_basis=type_basis,
        schmidt_basis=u,
        side_basis=vh[:dim_at],
        alphas=alphas,
        kept=kept,
        discarded=discarded,
        epsilon=epsilon,
        omega=StateVector(TensorSpace.of(("A_t", dim_at), ("B^n", dims[1] ** n), ("E^n", dims[2] ** n)), omega),
        omega_prime=StateVector(TensorSpace.of(("A_t", dim_at), ("B_d", dim_b), ("E_d", dim_e)), omega_prime),
        psi=StateVector(TensorSpace.of(("S", s_dim), ("B^n", dims[1] ** n), ("E^n", dims[2] ** n)), psi),
        psi_delta=StateVector(TensorSpace.of(("S", s_dim), ("B_d", dim_b), ("E_d", dim_e)), psi_delta),
        typical_b=typical_b,
        typical_e=typical_e,
        entropies={
            "A": von_neumann_entropy(rho_a),
            "B": von_neumann_entropy(rho_b),
            "E": von_neumann_entropy(rho_e),
        },
    )
    logger.debug(f"Built {code}")
    return code


@dataclass(frozen=True)
class BoundCheck:
    """lhs ≤ rhs, with ``required`` checks gating the report."""

    name: str
    lhs: float
    rhs: float
    required: bool = True

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + config.BOUND_TOL

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "pass": self.passed,
            "slack": self.slack,
            "required": self.required,
        }


@dataclass(frozen=True)
class TypicalityReport:
    n: int
    delta: float
    chosen_type: TypeVector
    dims: Dict[str, int]
    epsilon: float
    iota: float
    c_prime: float
    bounds: Tuple[BoundCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.bounds if check.required)

    @property
    def failures(self) -> List[BoundCheck]:
        return [check for check in self.bounds if check.required and not check.passed]

    def check(self, name: str) -> BoundCheck:
        for bound in self.bounds:
            if bound.name == name:
                return bound
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "delta": self.delta,
            "type": list(self.chosen_type.counts),
            "dims": dict(self.dims),
            "epsilon_measured": self.epsilon,
            "iota": self.iota,
            "iota_per_copy": self.iota / self.n,
            "c_prime": self.c_prime,
            "pass": self.passed,
            "bounds": [check.to_dict() for check in self.bounds],
        }


def gentle_measurement(rho: DensityOperator, projector: np.ndarray) -> Tuple[float, float]:
    """Disturbance ‖ρ − ΠρΠ/Tr[Πρ]‖₁ and its bound 2√(1 − Tr[Πρ]).

    Raises:
        ValidationError: If the projector annihilates ρ
    """
    projector = np.asarray(projector, dtype=complex)
    if projector.shape != (rho.dim, rho.dim):
        raise SpaceMismatchError(f"Projector of shape {projector.shape} does not act on {rho.space}")
    weight = float(np.trace(projector @ rho.matrix).real)
    if weight <= config.BOUND_TOL:
        raise ValidationError("Projector annihilates the state")
    post = projector @ rho.matrix @ projector / weight
    disturbance = float(np.sum(np.abs(np.linalg.eigvalsh(rho.matrix - post))))
    return disturbance, float(2 * np.sqrt(max(0.0, 1 - weight)))


def _purity(matrix: np.ndarray) -> float:
    return float(np.real(np.vdot(matrix, matrix)))


def verify_typ_bounds(code: FlattenedCode) -> TypicalityReport:
    """Evaluate every inequality of the flattening argument on ``code``.

    Required checks follow from the construction for any φ; typ1 is the
    exception and is only expected at favourable (n, δ). Informational
    checks are the asymptotic forms, which need not hold at small n.
    """
    n, delta, eps = code.n, code.delta, code.epsilon
    h_b, h_e = code.entropies["B"], code.entropies["E"]
    dim_at, dim_s = code.dim_at, code.dim_s
    root = np.sqrt(eps)

    embed_b, embed_e = code.typical_b.typical_basis(), code.typical_e.typical_basis()
    omega = code.omega.as_tensor()
    s_coords = code.schmidt_basis[:, list(code.kept)]

    def full(coords_at: np.ndarray) -> np.ndarray:
        return np.einsum('xyz,by,ez->xbe', coords_at, embed_b, embed_e)

    omega_prime_full = full(code.omega_prime.as_tensor())
    flat_full = full(code.flattened_coordinates())
    psi_full = np.einsum('xj,jbe->xbe', s_coords, code.psi.as_tensor())
    psi_delta_full = full(np.einsum('xj,jyz->xyz', s_coords, code.psi_delta.as_tensor()))

    psi_delta_b = np.einsum('jyz,jwz->yw', code.psi_delta.as_tensor(), code.psi_delta.as_tensor().conj())
    omega_prime_b = np.einsum('xyz,xwz->yw', code.omega_prime.as_tensor(), code.omega_prime.as_tensor().conj())
    psi_delta_s = np.einsum('jyz,kyz->jk', code.psi_delta.as_tensor(), code.psi_delta.as_tensor().conj())

    factor = 1 - 1.5 * root
    c_prime = 1 / factor ** 2 if factor > 0 else float('inf')
    domination_gap = float(np.min(np.linalg.eigvalsh(omega_prime_b - factor * psi_delta_b)))
    s_weight = dim_s / dim_at
    psi_distance = pure_trace_distance(psi_full, psi_delta_full)
    typ3_rhs = min(2.0, eps + 2 * root + 2 * np.sqrt(2) * eps ** 0.25)
    strict_purity = 2.0 ** (-n * (h_b - delta))

    omega_weight = float(np.linalg.norm(np.einsum('xj,xbe->jbe', s_coords.conj(), omega)) ** 2)
    flat_weight = float(np.linalg.norm(np.einsum('xj,xyz->jyz', s_coords.conj(), code.flattened_coordinates())) ** 2)

    bounds = (
        BoundCheck("typ1_env_dim", float(code.dim_e_delta), float(2.0 ** (n * (h_e + delta)))),
        BoundCheck("typ2_purity_relaxed", max(factor, 0.0) ** 2 * _purity(psi_delta_b), _purity(omega_prime_b)),
        BoundCheck("typ3_distance", psi_distance, typ3_rhs),
        BoundCheck("subspace_dim", (1 - root / 2) * dim_at, float(dim_s)),
        BoundCheck("flattening_l1", float(np.sum(np.abs(code.alphas - 1 / dim_at))), eps),
        BoundCheck("discard_count", float(len(code.discarded)), root * dim_at / 2),
        BoundCheck("domination_b", -domination_gap, 0.0),
        BoundCheck("maximally_mixed_s", float(np.max(np.abs(psi_delta_s - np.eye(dim_s) / dim_s))), 1e-10),
        BoundCheck("gentle_omega", pure_trace_distance(omega, psi_full),
                   float(2 * np.sqrt(max(0.0, 1 - omega_weight)))),
        BoundCheck("gentle_flattened", pure_trace_distance(flat_full, psi_delta_full),
                   float(2 * np.sqrt(max(0.0, 1 - flat_weight)))),
        BoundCheck("typ2_purity_strict", _purity(psi_delta_b), strict_purity, required=False),
        BoundCheck("omega_purity", _purity(omega_prime_b), strict_purity, required=False),
        BoundCheck("typ3_literal", psi_distance, eps, required=False),
        BoundCheck("flattening_pure", pure_trace_distance(flat_full, omega_prime_full), eps, required=False),
    )
    report = TypicalityReport(
        n=n,
        delta=delta,
        chosen_type=code.chosen_type,
        dims={
            "A_t": dim_at,
            "S": dim_s,
            "B_delta": code.dim_b_delta,
            "E_delta": code.dim_e_delta,
            "discarded": len(code.discarded),
        },
        epsilon=eps,
        iota=code.iota,
        c_prime=c_prime,
        bounds=bounds,
    )
    if not report.passed:
        logger.warning(f"{code}: failed {[check.name for check in report.failures]}")
    return report

