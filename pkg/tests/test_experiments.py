import itertools
import math

import numpy as np
import pytest

from app.errors import InvalidParameter
from app.experiments import (RegionRequest, SweepRequest, TruncationRequest, TTableRequest,
                             find_turning_point, run_region, run_sweep, run_truncation, run_ttable)
from app.models import BlochGridSpec, ChannelKind, EpsilonMode, EpsilonResult, NoiseModel

FULL_SPHERE = BlochGridSpec()
TRUNCATED = BlochGridSpec(r_t=0.95)
FLIPS = [ChannelKind.BIT_FLIP, ChannelKind.PHASE_FLIP, ChannelKind.BIT_PHASE_FLIP]


def epsilons(rows):
    return np.array([result.epsilon for *_, result in rows])


def sweep(channel, t, grid=TRUNCATED, model=NoiseModel.BEFORE, **kwargs):
    return epsilons(run_sweep(SweepRequest(channel, model, t, grid=grid, **kwargs)))


def accept_set(rows):
    return {tuple(np.round(point, 9)) for point, _, accepted in rows if accepted}


def symmetric_images(point):
    for perm in itertools.permutations(point):
        for signs in itertools.product((1, -1), repeat=3):
            yield tuple(np.round(np.multiply(perm, signs), 9) + 0.0)


def test_request_validation():
    with pytest.raises(InvalidParameter):
        SweepRequest(ChannelKind.BIT_FLIP, NoiseModel.BEFORE, 2, param_stop=1.5)
    with pytest.raises(InvalidParameter):
        SweepRequest(ChannelKind.BIT_FLIP, NoiseModel.BEFORE, 2, param_steps=1)
    with pytest.raises(InvalidParameter):
        TTableRequest(ChannelKind.BIT_FLIP, NoiseModel.BEFORE)
    with pytest.raises(InvalidParameter):
        TruncationRequest(ChannelKind.BIT_FLIP, NoiseModel.BEFORE, 2, axis='r')


def test_zero_noise_sweep_starts_at_zero():
    values = sweep(ChannelKind.BIT_FLIP, 2, param_steps=3)
    assert values[0] == pytest.approx(0.0, abs=1e-12)
    assert values[1] > 0


@pytest.mark.parametrize('t', [2, 4])
def test_flip_sweeps_symmetric_and_identical(t):
    curves = [sweep(kind, t) for kind in FLIPS]
    bitflip = curves[0]
    assert np.allclose(bitflip, bitflip[::-1], rtol=0, atol=1e-8)
    assert int(np.argmax(bitflip)) == 5
    for other in curves[1:]:
        assert np.allclose(other, bitflip, rtol=0, atol=1e-8)


@pytest.mark.parametrize('channel,param', [
    (ChannelKind.BIT_FLIP, 0.5),
    (ChannelKind.PHASE_DAMPING, 0.5),
    (ChannelKind.DEPOLARISING, 0.5),
])
def test_epsilon_versus_t_is_a_step_function(channel, param):
    _, rows = run_ttable(TTableRequest(channel, NoiseModel.BEFORE, param=param, grid=TRUNCATED))
    eps = dict((t, result.epsilon) for t, result in rows)
    assert eps[1] == 0.0
    assert eps[3] == pytest.approx(eps[2], rel=1e-6)
    assert eps[5] == pytest.approx(eps[4], rel=1e-6)
    assert eps[4] / eps[3] >= 1.5


@pytest.mark.parametrize('t,param,expected,tol', [
    (2, 1.0, 1.0, 1e-6),
    (4, 1.0 - 1e-6, 2.20, 0.01),
    (5, 1.0 - 1e-6, 4.33, 0.01),
])
def test_amplitude_damping_limits(t, param, expected, tol):
    values = sweep(ChannelKind.AMPLITUDE_DAMPING, t, grid=FULL_SPHERE, param_start=param,
                   param_stop=param, param_steps=2)
    assert values[0] == pytest.approx(expected, abs=tol)


def test_bit_flip_independent_of_polar_truncation():
    rows = run_truncation(TruncationRequest(ChannelKind.BIT_FLIP, NoiseModel.BEFORE, 2, axis='theta'))
    curves = epsilons(rows).reshape(6, 11)
    assert np.allclose(curves, curves[-1], rtol=0, atol=1e-8)


def test_phase_flip_polar_truncation_saturates_at_equator():
    rows = run_truncation(TruncationRequest(ChannelKind.PHASE_FLIP, NoiseModel.BEFORE, 2, axis='theta'))
    curves = epsilons(rows).reshape(6, 11)
    assert np.allclose(curves[2], curves[5], rtol=0, atol=1e-8)
    assert curves[2][5] > curves[0][5]


@pytest.mark.parametrize('channel', list(ChannelKind))
@pytest.mark.parametrize('model', list(NoiseModel))
def test_independent_of_azimuthal_truncation(channel, model):
    req = TruncationRequest(channel, model, 2, axis='phi', param_start=0.2, param_stop=0.8,
                            param_steps=3)
    curves = epsilons(run_truncation(req)).reshape(12, 3)
    assert np.allclose(curves, curves[-1], rtol=0, atol=1e-8)


def test_after_model_flip_regions_are_spherical_and_identical():
    sets = [accept_set(run_region(RegionRequest(kind, NoiseModel.AFTER, 2, 0.3))) for kind in FLIPS]
    assert sets[0] == sets[1] == sets[2]
    assert sets[0]
    for point in sets[0]:
        assert all(image in sets[0] for image in symmetric_images(point))


def test_depolarising_region_is_spherical():
    accepted = accept_set(run_region(RegionRequest(ChannelKind.DEPOLARISING, NoiseModel.BEFORE, 2, 0.7)))
    for point in accepted:
        assert all(image in accepted for image in symmetric_images(point))


def test_zero_noise_region_accepts_everything():
    rows = run_region(RegionRequest(ChannelKind.AMPLITUDE_DAMPING, NoiseModel.BEFORE, 3, 0.0, n=8))
    assert rows
    assert all(accepted for _, _, accepted in rows)


def test_strict_region_rejects_infeasible_points():
    rows = run_region(RegionRequest(ChannelKind.BIT_FLIP, NoiseModel.BEFORE, 2, 0.3, n=3,
                                    mode=EpsilonMode.strict()))
    # pure states off the flip axis
    pure = [(point, result, accepted) for point, result, accepted in rows
            if math.isclose(np.linalg.norm(point), 1.0) and abs(point.x) < 0.5]
    assert len(pure) == 4
    assert all(not accepted and math.isinf(result.epsilon) for _, result, accepted in pure)


def test_find_turning_point_prefers_smallest_parameter():
    rows = [(0.0, EpsilonResult(0.0, True)), (0.3, EpsilonResult(2.0, True)),
            (0.6, EpsilonResult(2.0, True)), (0.9, EpsilonResult(math.inf, False))]
    assert find_turning_point(rows) == 0.3
    with pytest.raises(InvalidParameter):
        find_turning_point([(0.5, EpsilonResult(math.inf, False))])


def test_ttable_at_turning_point():
    grid = BlochGridSpec(0.95, n_r=5, n_theta=5, n_phi=3)
    req = TTableRequest(ChannelKind.AMPLITUDE_DAMPING, NoiseModel.BEFORE, grid=grid,
                        turning_point=True, param_steps=5)
    param, rows = run_ttable(req)
    assert param in (0.0, 0.25, 0.5, 0.75, 1.0)
    assert [t for t, _ in rows] == [1, 2, 3, 4, 5]
    assert ('param', param) in req.metadata(param)
