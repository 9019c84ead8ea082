"""Experiment runners behind the CLI commands and the JSON API.

Each request is an immutable description of one experiment; each runner
returns plain rows that the callers format as CSV or JSON.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.bloch import AZIMUTHAL_TRUNCATIONS, POLAR_TRUNCATIONS, cube_grid, densities, spherical_grid
from app.channels import make_channel
from app.designs import get_design
from app.errors import InvalidParameter
from app.models import BlochGridSpec, ChannelKind, EpsilonMode, NoiseModel
from app.quality import CHUNK_ENTRIES, epsilon_over_sample, epsilon_per_state

logger = logging.getLogger(__name__)

T_VALUES = (1, 2, 3, 4, 5)


def _check_range(start, stop, steps):
    for name, value in (('param_start', start), ('param_stop', stop)):
        if not 0.0 <= value <= 1.0:
            raise InvalidParameter(f'{name}={value!r} outside [0, 1]')
    if int(steps) != steps or steps < 2:
        raise InvalidParameter(f'param_steps must be an integer >= 2, got {steps!r}')


def parameter_values(start, stop, steps):
    _check_range(start, stop, steps)
    return [float(v) for v in np.linspace(start, stop, int(steps))]


@dataclass(frozen=True)
class SweepRequest:
    """ε versus the channel parameter over a spherical sample"""
    channel: ChannelKind
    model: NoiseModel
    t: int
    param_start: float = 0.0
    param_stop: float = 1.0
    param_steps: int = 11
    grid: BlochGridSpec = field(default_factory=BlochGridSpec)
    mode: EpsilonMode = field(default_factory=EpsilonMode.projected)
    design: str = 'icosahedral'

    def __post_init__(self):
        _check_range(self.param_start, self.param_stop, self.param_steps)

    @property
    def params(self):
        return parameter_values(self.param_start, self.param_stop, self.param_steps)

    def metadata(self):
        return [
            ('command', 'sweep'),
            ('channel', self.channel.value),
            ('model', self.model.value),
            ('t', self.t),
            ('param_start', self.param_start),
            ('param_stop', self.param_stop),
            ('param_steps', self.param_steps),
            *_grid_metadata(self.grid),
            *_mode_metadata(self.mode),
            ('design', self.design),
        ]


@dataclass(frozen=True)
class TTableRequest:
    """ε versus t at a fixed parameter, or at the turning point of the t = 2 sweep"""
    channel: ChannelKind
    model: NoiseModel
    param: Optional[float] = None
    grid: BlochGridSpec = field(default_factory=BlochGridSpec)
    mode: EpsilonMode = field(default_factory=EpsilonMode.projected)
    design: str = 'icosahedral'
    turning_point: bool = False
    param_start: float = 0.0
    param_stop: float = 1.0
    param_steps: int = 11

    def __post_init__(self):
        if self.turning_point:
            _check_range(self.param_start, self.param_stop, self.param_steps)
        elif self.param is None or not 0.0 <= self.param <= 1.0:
            raise InvalidParameter(f'param={self.param!r} must lie in [0, 1]')

    def metadata(self, param):
        rows = [
            ('command', 'ttable'),
            ('channel', self.channel.value),
            ('model', self.model.value),
            ('param', param),
        ]
        if self.turning_point:
            rows += [('turning_point', 1), ('param_start', self.param_start),
                     ('param_stop', self.param_stop), ('param_steps', self.param_steps)]
        return rows + [*_grid_metadata(self.grid), *_mode_metadata(self.mode), ('design', self.design)]


@dataclass(frozen=True)
class RegionRequest:
    """Per-point ε over the cube lattice inside the Bloch ball"""
    channel: ChannelKind
    model: NoiseModel
    t: int
    param: float
    threshold: float = 0.5
    n: int = 20
    mode: EpsilonMode = field(default_factory=EpsilonMode.projected)
    design: str = 'icosahedral'

    def __post_init__(self):
        if not 0.0 <= self.param <= 1.0:
            raise InvalidParameter(f'param={self.param!r} outside [0, 1]')
        if self.threshold < 0:
            raise InvalidParameter(f'threshold={self.threshold!r} must be non-negative')

    def metadata(self):
        return [
            ('command', 'region'),
            ('channel', self.channel.value),
            ('model', self.model.value),
            ('t', self.t),
            ('param', self.param),
            ('threshold', self.threshold),
            ('grid_n', self.n),
            *_mode_metadata(self.mode),
            ('design', self.design),
        ]


@dataclass(frozen=True)
class TruncationRequest:
    """Sweeps repeated over the listed polar or azimuthal truncations"""
    channel: ChannelKind
    model: NoiseModel
    t: int
    axis: str = 'theta'
    param_start: float = 0.0
    param_stop: float = 1.0
    param_steps: int = 11
    r_t: float = 0.95
    n: int = 11
    mode: EpsilonMode = field(default_factory=EpsilonMode.projected)
    design: str = 'icosahedral'

    def __post_init__(self):
        if self.axis not in ('theta', 'phi'):
            raise InvalidParameter(f'axis must be theta or phi, got {self.axis!r}')
        _check_range(self.param_start, self.param_stop, self.param_steps)

    @property
    def truncations(self):
        return POLAR_TRUNCATIONS if self.axis == 'theta' else AZIMUTHAL_TRUNCATIONS

    def grid_for(self, truncation):
        if self.axis == 'theta':
            return BlochGridSpec(self.r_t, truncation, 2 * math.pi, self.n, self.n, self.n)
        return BlochGridSpec(self.r_t, math.pi, truncation, self.n, self.n, self.n)

    def metadata(self):
        return [
            ('command', 'truncation'),
            ('channel', self.channel.value),
            ('model', self.model.value),
            ('t', self.t),
            ('axis', self.axis),
            ('param_start', self.param_start),
            ('param_stop', self.param_stop),
            ('param_steps', self.param_steps),
            ('rt', self.r_t),
            ('grid_n', self.n),
            *_mode_metadata(self.mode),
            ('design', self.design),
        ]


def _grid_metadata(grid):
    return [('rt', grid.r_t), ('thetat', grid.theta_t), ('phit', grid.phi_t),
            ('n_r', grid.n_r), ('n_theta', grid.n_theta), ('n_phi', grid.n_phi)]


def _mode_metadata(mode):
    return [('mode', mode.kind.value), ('rank_cutoff', mode.rank_cutoff),
            ('kernel_residual_tol', mode.kernel_residual_tol)]


def sweep_over(states, channel, model, t, params, mode, design, chunk_entries=CHUNK_ENTRIES):
    """(param, EpsilonResult) for each parameter value on a fixed sample"""
    ens = get_design(design)
    rows = []
    for param in params:
        result = epsilon_over_sample(states, t, ens, make_channel(channel, param), model, mode,
                                     chunk_entries)
        logger.debug('%s %s t=%d param=%.6g epsilon=%s', channel.value, model.value, t, param,
                     result.epsilon)
        rows.append((param, result))
    return rows


def run_sweep(req, chunk_entries=CHUNK_ENTRIES):
    logger.info('Sweep %s/%s t=%d over %d parameters, %d states', req.channel.value,
                req.model.value, req.t, req.param_steps, req.grid.size)
    states = densities(spherical_grid(req.grid))
    return sweep_over(states, req.channel, req.model, req.t, req.params, req.mode, req.design,
                      chunk_entries)


def find_turning_point(rows):
    """Parameter of the largest finite ε in a sweep; ties resolve to the smallest parameter"""
    finite = [(param, result.epsilon) for param, result in rows if math.isfinite(result.epsilon)]
    if not finite:
        raise InvalidParameter('sweep has no finite epsilon to locate a turning point')
    best = max(eps for _, eps in finite)
    return min(param for param, eps in finite if eps == best)


def run_ttable(req, chunk_entries=CHUNK_ENTRIES):
    """Returns ``(param, rows)`` with one (t, EpsilonResult) row per t"""
    states = densities(spherical_grid(req.grid))
    param = req.param
    if req.turning_point:
        probe = sweep_over(states, req.channel, req.model, 2,
                           parameter_values(req.param_start, req.param_stop, req.param_steps),
                           req.mode, req.design, chunk_entries)
        param = find_turning_point(probe)
        logger.info('Turning point of the t=2 sweep for %s: %.6g', req.channel.value, param)
    ens = get_design(req.design)
    channel = make_channel(req.channel, param)
    rows = [(t, epsilon_over_sample(states, t, ens, channel, req.model, req.mode, chunk_entries))
            for t in T_VALUES]
    return param, rows


def run_region(req, chunk_entries=CHUNK_ENTRIES):
    """(point, EpsilonResult, accepted) for every in-ball lattice point"""
    points = cube_grid(req.n)
    logger.info('Region scan %s/%s t=%d param=%.6g over %d points', req.channel.value,
                req.model.value, req.t, req.param, len(points))
    results = epsilon_per_state(densities(points), req.t, get_design(req.design),
                                make_channel(req.channel, req.param), req.model, req.mode,
                                chunk_entries)
    return [(point, result, result.feasible and result.epsilon <= req.threshold)
            for point, result in zip(points, results)]


def run_truncation(req, chunk_entries=CHUNK_ENTRIES):
    """(truncation, param, EpsilonResult) rows, truncation-major"""
    params = parameter_values(req.param_start, req.param_stop, req.param_steps)
    rows = []
    for truncation in req.truncations:
        states = densities(spherical_grid(req.grid_for(truncation)))
        for param, result in sweep_over(states, req.channel, req.model, req.t, params, req.mode,
                                        req.design, chunk_entries):
            rows.append((truncation, param, result))
    return rows


def any_infeasible(results):
    return any(not result.feasible for result in results)
