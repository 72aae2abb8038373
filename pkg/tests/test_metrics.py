import numpy as np
import pytest

from decoupling_lab.channels import random_channel
from decoupling_lab.sampling.seeded_source import SeededSource
from decoupling_lab.sampling.unitaries import random_density
from decoupling_lab.tensor.metrics import (
    entropy_of_spectrum,
    fidelity,
    fidelity_pure,
    hs_norm_sq,
    purity,
    swap_operator,
    swap_trick_purity,
    trace_distance,
    trace_norm,
    von_neumann_entropy,
)
from decoupling_lab.tensor.operations import marginal, tensor
from decoupling_lab.tensor.spaces import space
from decoupling_lab.tensor.states import DensityOperator, StateVector, maximally_entangled
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError


def qubit(probabilities, label="A"):
    return DensityOperator.diagonal(space((label, 2)), probabilities)


def test_trace_distance_range():
    zero, one = qubit([1, 0]), qubit([0, 1])
    assert trace_distance(zero, zero) == pytest.approx(0.0)
    assert trace_distance(zero, one) == pytest.approx(2.0)
    assert trace_distance(qubit([0.75, 0.25]), qubit([0.5, 0.5])) == pytest.approx(0.5)


def test_trace_distance_needs_same_space():
    with pytest.raises(SpaceMismatchError):
        trace_distance(qubit([1, 0], "A"), qubit([1, 0], "B"))


def test_trace_norm_and_hs_norm():
    matrix = np.diag([0.5, -0.25])
    assert trace_norm(matrix) == pytest.approx(0.75)
    assert hs_norm_sq(matrix) == pytest.approx(0.3125)


def test_fidelity_of_commuting_states():
    rho, sigma = qubit([0.75, 0.25]), qubit([0.5, 0.5])
    expected = (np.sqrt(0.75 * 0.5) + np.sqrt(0.25 * 0.5)) ** 2
    assert fidelity(rho, sigma) == pytest.approx(expected)
    assert fidelity(rho, rho) == pytest.approx(1.0)
    assert fidelity(qubit([1, 0]), qubit([0, 1])) == pytest.approx(0.0)


def test_fidelity_pure_matches_general_fidelity():
    plus = StateVector(space(("A", 2)), np.array([1, 1]) / np.sqrt(2))
    rho = qubit([0.9, 0.1])
    assert fidelity_pure(plus, rho) == pytest.approx(0.5)
    assert fidelity(plus.density(), rho) == pytest.approx(0.5)


def test_entropies():
    assert entropy_of_spectrum([0.5, 0.5]) == pytest.approx(1.0)
    assert entropy_of_spectrum([1.0, 0.0]) == pytest.approx(0.0)
    assert entropy_of_spectrum([0.5, 0.5, -1e-14]) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        entropy_of_spectrum([1.1, -0.1])
    assert von_neumann_entropy(DensityOperator.maximally_mixed(space(("A", 4)))) == pytest.approx(2.0)


def test_entangled_state_is_pure_with_mixed_marginal():
    psi = maximally_entangled(2).density()
    assert purity(psi) == pytest.approx(1.0)
    assert von_neumann_entropy(psi) == pytest.approx(0.0, abs=1e-9)
    assert von_neumann_entropy(marginal(psi, ["R"])) == pytest.approx(1.0)


def test_swap_operator_exchanges_factors():
    f = swap_operator(3)
    assert f.is_unitary
    a, b = np.eye(3)[0], np.eye(3)[2]
    np.testing.assert_allclose(f.matrix @ np.kron(a, b), np.kron(b, a))


def test_swap_trick_purity_matches_direct_purities():
    rng = np.random.default_rng(3)
    g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    rho = DensityOperator(space(("A", 2), ("B", 3)), g @ g.conj().T / np.trace(g @ g.conj().T).real)
    assert swap_trick_purity(rho) == pytest.approx(purity(rho))
    assert swap_trick_purity(rho, ["B"]) == pytest.approx(purity(marginal(rho, ["B"])))


def test_purity_of_product_multiplies():
    rho = tensor(qubit([0.75, 0.25]), qubit([0.5, 0.5], "B"))
    assert purity(rho) == pytest.approx((0.75 ** 2 + 0.25 ** 2) * 0.5)


def test_fuchs_van_de_graaf_on_random_pairs():
    rng = SeededSource(2024).generator()
    for _ in range(1000):
        d = int(rng.integers(2, 5))
        rho, sigma = (random_density(space(("A", d)), rng) for _ in range(2))
        half_distance = trace_distance(rho, sigma) / 2
        f = fidelity(rho, sigma)
        assert 1 - np.sqrt(f) <= half_distance + 1e-9
        assert half_distance <= np.sqrt(1 - f) + 1e-9


def test_channels_contract_trace_distance_and_raise_fidelity():
    rng = SeededSource(77).generator()
    for _ in range(200):
        d_in, d_out, kraus = (int(k) for k in rng.integers(2, 5, size=3))
        rho, sigma = (random_density(space(("A", d_in)), rng) for _ in range(2))
        channel = random_channel(d_in, d_out, kraus, rng)
        out_rho, out_sigma = channel(rho, "B"), channel(sigma, "B")
        assert trace_distance(out_rho, out_sigma) <= trace_distance(rho, sigma) + 1e-9
        assert fidelity(out_rho, out_sigma) >= fidelity(rho, sigma) - 1e-9
