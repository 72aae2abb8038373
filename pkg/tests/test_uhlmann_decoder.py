import pytest

from decoupling_lab.channels import amplitude_damping, erasure, identity, stinespring
from decoupling_lab.decoder.uhlmann_decoder import (
    DECODED_LABEL,
    SIDE_LABEL,
    build_decoder,
    entanglement_fidelity,
)
from decoupling_lab.sampling.seeded_source import SeededSource
from decoupling_lab.sampling.unitaries import random_state_vector
from decoupling_lab.tensor.metrics import fidelity, trace_distance
from decoupling_lab.tensor.operations import marginal, tensor
from decoupling_lab.tensor.spaces import space
from decoupling_lab.tensor.states import DensityOperator, StateVector, maximally_entangled
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError


def encoded(channel, d_r):
    return stinespring(channel).apply(maximally_entangled(d_r, ("R", "A'")))


def test_noiseless_channel_decodes_perfectly():
    result = build_decoder(encoded(identity(2), 2))
    assert result.achieved_fidelity == pytest.approx(1.0)
    assert result.uhlmann_fidelity == pytest.approx(1.0)
    assert result.entanglement_fidelity == pytest.approx(1.0)
    assert result.decoupling_tdist == pytest.approx(0.0, abs=1e-9)
    assert result.W.out_space.labels == (DECODED_LABEL, SIDE_LABEL)


def test_erasure_decoder_saturates_uhlmann():
    p = 0.5
    result = build_decoder(encoded(erasure(2, p), 2))
    assert result.W.isometry
    assert result.dim_side == 3
    assert result.uhlmann_fidelity == pytest.approx((1 - p / 2) ** 2)
    assert result.achieved_fidelity == pytest.approx(result.uhlmann_fidelity, abs=1e-8)
    assert result.entanglement_fidelity >= result.achieved_fidelity - 1e-8
    assert result.achieved_fidelity >= 1 - result.decoupling_tdist - 1e-8


def test_decoder_attains_uhlmann_fidelity_on_random_states():
    source = SeededSource(31)
    for index in range(50):
        rng = source.derive(index).generator()
        dims = (int(d) for d in rng.integers(2, 5, size=3))
        psi = random_state_vector(space(*zip(("R", "B", "E"), dims)), rng)
        psi_re = marginal(psi, ["R", "E"])
        target = tensor(DensityOperator.maximally_mixed(marginal(psi_re, ["R"]).space), marginal(psi_re, ["E"]))

        result = build_decoder(psi)
        assert result.achieved_fidelity == pytest.approx(fidelity(psi_re, target), abs=1e-8)
        assert result.achieved_fidelity >= 1 - trace_distance(psi_re, target) - 1e-8
        assert result.entanglement_fidelity >= result.achieved_fidelity - 1e-8


def test_decoding_channel_matches_entanglement_fidelity():
    channel = amplitude_damping(0.2)
    result = build_decoder(encoded(channel, 2))
    assert result.channel.trace_preservation_error() < 1e-10
    value = entanglement_fidelity(maximally_entangled(2, ("R", "A'")), channel, result.channel)
    assert value == pytest.approx(result.entanglement_fidelity, abs=1e-10)


def test_decoder_requires_three_factors_and_normalization():
    with pytest.raises(SpaceMismatchError):
        build_decoder(maximally_entangled(2))
    sub = StateVector(space(("R", 1), ("B", 2), ("E", 1)), [0.5, 0.5], subnormalized=True)
    with pytest.raises(ValidationError):
        build_decoder(sub)


def test_entanglement_fidelity_checks_dimensions():
    result = build_decoder(encoded(identity(2), 2))
    with pytest.raises(SpaceMismatchError):
        entanglement_fidelity(maximally_entangled(2, ("R", "A'")), identity(2), result.channel, n=2)
