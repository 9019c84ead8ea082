import math

import numpy as np
import pytest

from app.bloch import bloch_vector, density_from_point
from app.channels import (apply_channel, channel_from_decay, channel_kind, check_density_matrix,
                          damping_to_flip_prob, decay_to_lambda, flip_prob_to_damping, is_unital,
                          make_channel)
from app.errors import InvalidDensityMatrix, InvalidParameter
from app.models import ChannelKind

PARAMS = np.linspace(0.0, 1.0, 11)


@pytest.mark.parametrize('kind', list(ChannelKind))
def test_channels_preserve_trace_and_positivity(kind, mixed_states):
    for param in PARAMS:
        ch = make_channel(kind, param)
        for rho in mixed_states[:5]:
            out = apply_channel(ch, rho)
            assert abs(np.trace(out) - 1.0) < 1e-12
            assert np.linalg.eigvalsh(out).min() > -1e-12


@pytest.mark.parametrize('kind', list(ChannelKind))
def test_zero_parameter_is_identity(kind):
    ch = make_channel(kind, 0.0)
    assert len(ch.kraus) == 1
    assert np.allclose(ch.kraus[0], np.eye(2))


@pytest.mark.parametrize('param', [-0.1, 1.5, math.nan])
def test_parameter_outside_unit_interval(param):
    with pytest.raises(InvalidParameter):
        make_channel(ChannelKind.BIT_FLIP, param)


def test_channel_kind_lookup():
    assert channel_kind(' AmpDamp ') is ChannelKind.AMPLITUDE_DAMPING
    with pytest.raises(InvalidParameter):
        channel_kind('erasure')


def test_bit_flip_on_ground_state():
    out = apply_channel(make_channel('bitflip', 0.3), density_from_point((0, 0, 1)))
    assert np.allclose(out, np.diag([0.7, 0.3]))


def test_depolarising_affine_form(mixed_states):
    for p in (0.2, 0.7, 1.0):
        ch = make_channel(ChannelKind.DEPOLARISING, p)
        for rho in mixed_states[:5]:
            assert np.allclose(apply_channel(ch, rho), p / 2 * np.eye(2) + (1 - p) * rho, atol=1e-12)


def test_amplitude_damping_relaxes_to_ground_state(mixed_states):
    ch = make_channel(ChannelKind.AMPLITUDE_DAMPING, 1.0)
    assert np.allclose(apply_channel(ch, mixed_states[0]), np.diag([1.0, 0.0]))


def test_phase_damping_equals_phase_flip(mixed_states):
    lam = 0.36
    damping = make_channel(ChannelKind.PHASE_DAMPING, lam)
    flip = make_channel(ChannelKind.PHASE_FLIP, 1 - damping_to_flip_prob(lam))
    for rho in mixed_states[:5]:
        assert np.allclose(apply_channel(damping, rho), apply_channel(flip, rho), atol=1e-12)


def test_flip_probability_conversion():
    assert damping_to_flip_prob(0.0) == 1.0
    assert damping_to_flip_prob(1.0) == 0.5
    assert flip_prob_to_damping(damping_to_flip_prob(0.36)) == pytest.approx(0.36)
    assert flip_prob_to_damping(0.2) == pytest.approx(flip_prob_to_damping(0.8))


def test_decay_to_lambda():
    assert decay_to_lambda(0.0, 5.0) == 0.0
    assert decay_to_lambda(5.0, 5.0) == pytest.approx(1 - math.exp(-1))
    assert decay_to_lambda(1e4, 1.0) == pytest.approx(1.0)
    with pytest.raises(InvalidParameter):
        decay_to_lambda(1.0, 0.0)
    with pytest.raises(InvalidParameter):
        decay_to_lambda(-1.0, 1.0)


def test_channel_from_decay():
    ch = channel_from_decay('ampdamp', 2.0, 4.0)
    assert ch.param == pytest.approx(1 - math.exp(-0.5))
    with pytest.raises(InvalidParameter):
        channel_from_decay('bitflip', 1.0, 1.0)


def test_only_amplitude_damping_is_non_unital():
    for kind in ChannelKind:
        assert is_unital(make_channel(kind, 0.5)) is (kind is not ChannelKind.AMPLITUDE_DAMPING)
    assert is_unital(make_channel(ChannelKind.AMPLITUDE_DAMPING, 0.0))


@pytest.mark.parametrize('rho', [
    np.eye(2),
    np.array([[0.5, 0.5], [0.0, 0.5]]),
    np.array([[1.2, 0.0], [0.0, -0.2]]),
    np.eye(3) / 3,
])
def test_invalid_density_matrices(rho):
    with pytest.raises(InvalidDensityMatrix):
        check_density_matrix(rho)


def test_half_bit_flip_mixes_ground_state():
    out = apply_channel(make_channel(ChannelKind.BIT_FLIP, 0.5), density_from_point((0, 0, 1)))
    assert np.allclose(out, np.eye(2) / 2)


@pytest.mark.parametrize('p', PARAMS)
def test_phase_flip_fixes_ground_state(p):
    ground = density_from_point((0, 0, 1))
    assert np.allclose(apply_channel(make_channel(ChannelKind.PHASE_FLIP, p), ground), ground)


@pytest.mark.parametrize('lam', [0.2, 0.6, 1.0])
def test_amplitude_damping_contracts_bloch_vector(lam):
    x, y, z = 0.3, -0.4, 0.5
    out = bloch_vector(apply_channel(make_channel(ChannelKind.AMPLITUDE_DAMPING, lam),
                                     density_from_point((x, y, z))))
    shrink = math.sqrt(1 - lam)
    assert out.x == pytest.approx(x * shrink, abs=1e-12)
    assert out.y == pytest.approx(y * shrink, abs=1e-12)
    assert out.z == pytest.approx(z * (1 - lam) + lam, abs=1e-12)
