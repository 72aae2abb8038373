"""
Coherent-information maximization: single-letter and over blocks of n copies.

Inputs are parameterized by an unnormalized purification v ∈ C^{d×d}, so
every iterate φ = vv†/Tr[vv†] is a valid density matrix without projection.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from decoupling_lab import config
from decoupling_lab.channels.channel import Channel, coherent_information, tensor_power
from decoupling_lab.sampling.seeded_source import SeededSource
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator
from decoupling_lab.utils.error_handler import InvariantError, ValidationError

logger = logging.getLogger(__name__)

CAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CapacityResult:
    """Best input found and the coherent information it reaches.

    ``value`` is per channel use; ``history`` is the best-so-far value after
    each objective evaluation of the winning restart.
    """

    channel_name: str
    n: int
    value: float
    state: DensityOperator
    history: Tuple[float, ...]
    restarts: int
    evaluations: int

    def to_dict(self) -> Dict[str, Any]:
        eigenvalues = np.linalg.eigvalsh(self.state.matrix)[::-1]
        return {
            "channel": self.channel_name,
            "n": self.n,
            "coherent_information": self.value,
            "lower_bound": True,
            "restarts": self.restarts,
            "evaluations": self.evaluations,
            "input_spectrum": [float(x) for x in np.clip(eigenvalues, 0.0, None)],
            "input_state": [[[float(z.real), float(z.imag)] for z in row] for row in self.state.matrix],
        }


def state_from_params(params: np.ndarray, d: int, label: str = "A'") -> DensityOperator:
    """φ = vv†/Tr[vv†] for v = params[:d²] + i·params[d²:]."""
    params = np.asarray(params, dtype=float)
    v = (params[:d * d] + 1j * params[d * d:]).reshape(d, d)
    gram = v @ v.conj().T
    weight = np.trace(gram).real
    space = TensorSpace.of((label, d))
    if weight <= np.finfo(float).tiny:
        return DensityOperator.maximally_mixed(space)
    return DensityOperator(space, gram / weight, check_positive=False)


def params_from_state(phi: DensityOperator) -> np.ndarray:
    """A purification parameter vector reproducing ``phi``."""
    eigenvalues, eigenvectors = np.linalg.eigh(phi.matrix)
    v = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
    flat = v.ravel()
    return np.concatenate([flat.real, flat.imag])


def _ascend(channel: Channel, start: np.ndarray, iterations: int) -> Tuple[float, np.ndarray, List[float], int]:
    d = channel.in_dim
    best = [-np.inf]
    history: List[float] = []

    def objective(params: np.ndarray) -> float:
        value = coherent_information(state_from_params(params, d), channel)
        best[0] = max(best[0], value)
        history.append(best[0])
        return -value

    result = minimize(
        objective,
        start,
        method='Nelder-Mead',
        options={'maxiter': iterations, 'maxfev': 4 * iterations, 'xatol': 1e-10, 'fatol': 1e-13,
                 'adaptive': True},
    )
    return float(-result.fun), np.asarray(result.x), history, int(result.nfev)


def maximize_coherent_information(channel: Channel, restarts: int = 4, iterations: int = 2000,
                                  src: SeededSource = None, starts: Sequence[DensityOperator] = (),
                                  threads: int = None) -> CapacityResult:
    """Nelder–Mead ascent of I_c(φ, N) over inputs from several starts.

    Restart 0 starts at π; extra ``starts`` follow; the remaining restarts
    start from random purifications drawn from ``src.derive(k)``. The value
    is a lower bound on the single-letter maximum.

    Raises:
        InvariantError: If the value exceeds log₂ min(d_in, d_out)
    """
    if restarts < 1:
        raise ValidationError(f"Need at least one restart, got {restarts}")
    src = src or SeededSource(0)
    d = channel.in_dim
    initial = [params_from_state(DensityOperator.maximally_mixed(TensorSpace.of(("A'", d))))]
    initial += [params_from_state(phi) for phi in starts]
    k = len(initial)
    while len(initial) < max(restarts, k):
        initial.append(src.derive(len(initial)).generator().standard_normal(2 * d * d))

    workers = threads or config.DEFAULT_THREADS
    if workers <= 1 or len(initial) < 2:
        runs = [_ascend(channel, x0, iterations) for x0 in initial]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            runs = list(executor.map(lambda x0: _ascend(channel, x0, iterations), initial))

    # First best wins ties so the result does not depend on scheduling
    winner = max(range(len(runs)), key=lambda i: (runs[i][0], -i))
    value, params, history, _ = runs[winner]
    ceiling = float(np.log2(min(channel.in_dim, channel.out_dim)))
    if value > ceiling + CAP_TOL:
        raise InvariantError(f"I_c = {value!r} exceeds log₂ min(d_in, d_out) = {ceiling!r}")
    logger.debug(f"{channel.name}: I_c = {value:.10f} from restart {winner} of {len(runs)}")
    return CapacityResult(
        channel_name=channel.name,
        n=1,
        value=value,
        state=state_from_params(params, d),
        history=tuple(history),
        restarts=len(runs),
        evaluations=sum(run[3] for run in runs),
    )


def multicopy_lower_bound(channel: Channel, n: int, restarts: int = 4, iterations: int = 2000,
                          src: SeededSource = None, single: Optional[CapacityResult] = None,
                          threads: int = None) -> CapacityResult:
    """(1/n) max I_c(φ, N^{⊗n}), seeded with the product φ*^{⊗n} when ``single`` is given.

    Raises:
        BudgetExceededError: If N^{⊗n} does not fit the budget
    """
    if n == 1:
        return single or maximize_coherent_information(channel, restarts, iterations, src, threads=threads)
    block = tensor_power(channel, n)
    starts = []
    if single is not None:
        product = reduce(np.kron, [single.state.matrix] * n)
        starts.append(DensityOperator(TensorSpace.of(("A'", block.in_dim)), product, check_positive=False))
    result = maximize_coherent_information(block, restarts, iterations, src, starts, threads)
    logger.info(f"{channel.name}^{n}: (1/n) I_c = {result.value / n:.10f}")
    return CapacityResult(
        channel_name=channel.name,
        n=n,
        value=result.value / n,
        state=result.state,
        history=tuple(h / n for h in result.history),
        restarts=result.restarts,
        evaluations=result.evaluations,
    )
