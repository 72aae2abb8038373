import numpy as np
import pytest

from decoupling_lab.channels import amplitude_damping, dephasing, identity
from decoupling_lab.tensor.operations import marginal
from decoupling_lab.tensor.spaces import space
from decoupling_lab.tensor.states import DensityOperator
from decoupling_lab.typicality import (
    BoundCheck,
    TypeVector,
    channel_state,
    enumerate_types,
    flatten_code,
    gentle_measurement,
    input_purification,
    pure_trace_distance,
    select_type,
    strings_of_type,
    type_class_dim,
    typical_projector,
    verify_typ_bounds,
)
from decoupling_lab.utils.error_handler import BudgetExceededError, SpaceMismatchError, ValidationError


def qubit_input(probabilities):
    return DensityOperator.diagonal(space(("A'", 2)), probabilities)


def mixed_input():
    return DensityOperator.maximally_mixed(space(("A'", 2)))


def test_enumerate_types_order_and_count():
    assert [t.counts for t in enumerate_types(2, 2)] == [(2, 0), (1, 1), (0, 2)]
    types = enumerate_types(4, 3)
    assert len(types) == 15
    assert sum(type_class_dim(t) for t in types) == 81
    with pytest.raises(ValidationError):
        enumerate_types(0, 2)


def test_type_vector_properties():
    t = TypeVector((3, 1))
    assert t.n == 4
    assert str(t) == "(3,1)"
    np.testing.assert_allclose(t.probabilities, [0.75, 0.25])
    assert t.l1_distance([0.5, 0.5]) == pytest.approx(0.5)
    assert t.sup_distance([0.5, 0.5]) == pytest.approx(0.25)
    assert type_class_dim(t) == 4
    # Three copies of letter 0, one of letter 1
    np.testing.assert_array_equal(strings_of_type(t), [1, 2, 4, 8])
    with pytest.raises(ValidationError):
        TypeVector((2, -1))


def test_select_type():
    assert select_type([0.75, 0.25], 4, 0.0) == TypeVector((3, 1))
    # (2,1) and (1,2) tie; ascending counts wins
    assert select_type([0.5, 0.5], 3, 0.5) == TypeVector((1, 2))
    with pytest.raises(ValidationError, match="closest is"):
        select_type([0.5, 0.5], 3, 0.1)


def test_typical_projector_ranks():
    narrow = typical_projector(qubit_input([0.75, 0.25]), 4, 0.1)
    assert narrow.retained == (TypeVector((3, 1)),)
    assert narrow.rank == 4
    projector = narrow.projector
    np.testing.assert_allclose(projector @ projector, projector, atol=1e-12)
    assert np.trace(projector).real == pytest.approx(4.0)

    wide = typical_projector(mixed_input(), 3, 0.5)
    assert wide.rank == 8


def test_type_projectors_resolve_identity():
    decomposition = typical_projector(DensityOperator.maximally_mixed(space(("X", 3))), 2, 1.0)
    total = sum(decomposition.type_projector(t) for t in decomposition.types)
    np.testing.assert_allclose(total, np.eye(9), atol=1e-12)


def test_typical_projector_preconditions(monkeypatch):
    with pytest.raises(SpaceMismatchError):
        typical_projector(DensityOperator.maximally_mixed(space(("A", 2), ("B", 2))), 2, 0.1)
    with pytest.raises(ValidationError):
        typical_projector(mixed_input(), 2, -0.1)
    monkeypatch.setattr('decoupling_lab.config.DIMENSION_BUDGET', 1000)
    with pytest.raises(BudgetExceededError):
        typical_projector(mixed_input(), 6, 0.1)


def test_input_purification_diagonalizes_reference():
    phi = DensityOperator(space(("A'", 2)), np.array([[0.6, 0.2], [0.2, 0.4]]))
    purified = input_purification(phi)
    reference = marginal(purified, ["A"]).matrix
    np.testing.assert_allclose(reference, np.diag(np.diag(reference)), atol=1e-12)
    np.testing.assert_allclose(marginal(purified, ["A'"]).matrix, phi.matrix, atol=1e-12)


def test_channel_state_layout():
    state = channel_state(amplitude_damping(0.3), mixed_input())
    assert state.space.labels == ("A", "B", "E")
    assert state.space.dims == (2, 2, 2)


def test_gentle_measurement():
    rho = DensityOperator.diagonal(space(("A", 2)), [0.75, 0.25])
    disturbance, bound = gentle_measurement(rho, np.diag([1, 0]))
    assert disturbance == pytest.approx(0.5)
    assert bound == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        gentle_measurement(DensityOperator.diagonal(space(("A", 2)), [0, 1]), np.diag([1, 0]))


def test_pure_trace_distance():
    assert pure_trace_distance(np.array([1, 0]), np.array([0, 1])) == pytest.approx(2.0)
    assert pure_trace_distance(np.array([1, 0]), np.array([1, 1]) / np.sqrt(2)) == pytest.approx(np.sqrt(2))


def test_bound_check():
    check = BoundCheck("x", 1.0, 1.0 - 1e-12)
    assert check.passed
    assert not BoundCheck("y", 1.0, 0.5).passed
    assert BoundCheck("z", 0.25, 1.0).to_dict() == {
        "name": "z", "lhs": 0.25, "rhs": 1.0, "pass": True, "slack": 0.75, "required": True,
    }


def test_flattening_of_noiseless_channel_is_exact():
    code = flatten_code(channel_state(identity(2), mixed_input()), 2, 0.3)
    assert code.chosen_type == TypeVector((1, 1))
    assert (code.dim_at, code.dim_s, code.dim_b_delta, code.dim_e_delta) == (2, 2, 2, 1)
    assert code.epsilon == pytest.approx(0.0, abs=1e-6)
    assert code.discarded == ()
    np.testing.assert_allclose(code.alphas, [0.5, 0.5], atol=1e-12)
    assert code.iota == pytest.approx(1.0)
    assert verify_typ_bounds(code).passed


def test_flattened_subspace_is_orthonormal_in_the_type_class():
    code = flatten_code(channel_state(dephasing(0.5), qubit_input([0.75, 0.25])), 4, 0.3)
    basis = code.s_basis
    np.testing.assert_allclose(basis.conj().T @ basis, np.eye(code.dim_s), atol=1e-10)
    projector = code.projector_s
    np.testing.assert_allclose(projector @ projector, projector, atol=1e-10)


def test_dephasing_report_at_biased_input():
    code = flatten_code(channel_state(dephasing(0.5), qubit_input([0.75, 0.25])), 4, 0.3)
    report = verify_typ_bounds(code)
    assert report.chosen_type == TypeVector((3, 1))
    assert report.dims == {"A_t": 4, "S": 4, "B_delta": 11, "E_delta": 11, "discarded": 0}
    assert report.epsilon == pytest.approx(0.0, abs=1e-6)
    assert report.passed
    assert report.check("typ1_env_dim").rhs == pytest.approx(2 ** (4 * (0.8112781244591328 + 0.3)))
    assert not report.check("typ2_purity_strict").required
    with pytest.raises(KeyError):
        report.check("nonexistent")


def test_dephasing_report_at_mixed_input():
    code = flatten_code(channel_state(dephasing(0.5), mixed_input()), 4, 0.3)
    report = verify_typ_bounds(code)
    assert report.dims["A_t"] == 6
    assert report.dims["B_delta"] == 14
    assert report.dims["E_delta"] == 14
    assert report.epsilon == pytest.approx(2 * np.sqrt(1 / 8), abs=1e-9)
    assert report.dims["discarded"] == 0
    assert report.passed
    document = report.to_dict()
    assert document["type"] == [2, 2]
    assert document["iota_per_copy"] == pytest.approx(report.iota / 4)


@pytest.mark.parametrize("n, e_delta, b_delta", [(2, 1, 2), (4, 5, 10)])
def test_amplitude_damping_reports_pass(n, e_delta, b_delta):
    code = flatten_code(channel_state(amplitude_damping(0.3), mixed_input()), n, 0.3)
    report = verify_typ_bounds(code)
    assert report.dims["E_delta"] == e_delta
    assert report.dims["B_delta"] == b_delta
    assert report.passed, [check.name for check in report.failures]


@pytest.mark.slow
def test_iota_per_copy_decreases_for_noiseless_channel():
    rates = [flatten_code(channel_state(identity(2), mixed_input()), n, 0.3).iota / n for n in (2, 4, 6)]
    assert rates == sorted(rates, reverse=True)
    assert rates[1] == pytest.approx((4 - np.log2(6)) / 4)


def test_flatten_code_rejects_unreachable_type():
    with pytest.raises(ValidationError):
        flatten_code(channel_state(identity(2), qubit_input([0.9, 0.1])), 3, 0.01)
