"""Self-verification suite run by ``flask verify``.

Every check produces a named CheckResult; the command prints them as a
pass/fail table and exits non-zero when any fails.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from flask import current_app
from scipy.stats import unitary_group

from app.bloch import densities, density_from_point, spherical_grid
from app.channels import apply_channel, is_unital, make_channel
from app.designs import (DESIGN_TOL, MAX_ORACLE_ORDER, design_deviation, get_design, load_ensemble,
                         verify_design_order)
from app.errors import OracleUnavailable, TDesignError
from app.linalg import I2, frobenius
from app.models import COMPLETENESS_TOL, ChannelKind, EpsilonMode, NoiseModel
from app.quality import epsilon_for_state, epsilon_over_sample, noisy_moments

logger = logging.getLogger(__name__)

EXPECTED_ORDERS = {'pauli': 1, 'clifford': 3, 'icosahedral': 5}
BEYOND_ORDER_GAP = 1e-3
ONE_DESIGN_TOL = 1e-10
MODEL_EQUIVALENCE_TOL = 1e-12
OBSTRUCTION_RESIDUAL = 1e-3
CPTP_PARAMS = np.linspace(0.0, 1.0, 11)
DEPOLARISING_PARAMS = (0.1, 0.5, 0.9)
EQUIVALENCE_CHUNK = 10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ''


def _require_oracle():
    if not current_app.config['HAAR_ORACLE_ENABLED']:
        raise OracleUnavailable('Haar oracle disabled by HAAR_ORACLE_ENABLED')


def random_states(count, seed):
    """Mixed states U diag(q, 1 − q) U† with Haar-random U"""
    rng = np.random.default_rng(seed)
    populations = rng.uniform(0.0, 1.0, size=count)
    unitaries = unitary_group.rvs(2, size=count, random_state=rng).reshape(count, 2, 2)
    diagonal = np.zeros((count, 2, 2), dtype=complex)
    diagonal[:, 0, 0] = populations
    diagonal[:, 1, 1] = 1.0 - populations
    states = unitaries @ diagonal @ np.conj(np.swapaxes(unitaries, -1, -2))
    return 0.5 * (states + np.conj(np.swapaxes(states, -1, -2)))


def check_design(ens, expected, n_matrices, seed):
    name = f'design order: {ens.label}'
    try:
        _require_oracle()
        t_max = min(expected + 1, MAX_ORACLE_ORDER)
        certified = verify_design_order(ens, t_max, n_matrices, seed)
        if certified != expected:
            return CheckResult(name, False, f'certified to t={certified}, expected {expected}')
        if t_max > expected:
            gap = design_deviation(ens, t_max, n_matrices, seed)
            if gap <= BEYOND_ORDER_GAP:
                return CheckResult(name, False, f'deviation at t={t_max} only {gap:.3e}')
            return CheckResult(name, True, f't={expected}; deviation at t={t_max} {gap:.3e}')
        return CheckResult(name, True, f't={expected}')
    except TDesignError as e:
        return CheckResult(name, False, str(e))


def check_ensemble_file(path, n_matrices, seed):
    name = f'ensemble file: {path}'
    try:
        with open(path, encoding='utf-8') as fh:
            ens = load_ensemble(fh.read(), label=path)
    except (OSError, TDesignError) as e:
        return CheckResult(name, False, f'load failed: {e}')
    if ens.order is None or ens.order < 1:
        return CheckResult(name, False, 'no declared order header')
    try:
        _require_oracle()
        target = min(ens.order, MAX_ORACLE_ORDER)
        certified = verify_design_order(ens, target, n_matrices, seed)
    except TDesignError as e:
        return CheckResult(name, False, str(e))
    if certified < target:
        return CheckResult(name, False, f'declared order {ens.order}, certified to t={certified}')
    return CheckResult(name, True, f'{len(ens)} elements, order {ens.order}')


def check_cptp(kind, seed):
    name = f'CPTP: {kind.value}'
    probes = random_states(4, seed)
    for param in CPTP_PARAMS:
        try:
            ch = make_channel(kind, param)
        except TDesignError as e:
            return CheckResult(name, False, f'{kind.param_name}={param:.1f}: {e}')
        completeness = np.einsum('kji,kjl->il', ch.kraus.conj(), ch.kraus)
        defect = frobenius(completeness - I2)
        if defect > COMPLETENESS_TOL:
            return CheckResult(name, False, f'{kind.param_name}={param:.1f}: completeness defect {defect:.3e}')
        images = np.einsum('kab,sbc,kdc->sad', ch.kraus, probes, ch.kraus.conj())
        if np.linalg.eigvalsh(images).min() < -COMPLETENESS_TOL:
            return CheckResult(name, False, f'{kind.param_name}={param:.1f}: output not positive')
    return CheckResult(name, True, f'{len(CPTP_PARAMS)} parameter values')


def _after_model_first_moment_epsilon(ch):
    """ε of ch(I/2) against I/2; zero exactly for unital channels"""
    image = apply_channel(ch, I2 / 2)
    return float(np.abs(2.0 * np.linalg.eigvalsh(image) - 1.0).max())


def check_one_design_invariance(mode):
    name = 'one-design invariance'
    states = densities(spherical_grid())
    ens = get_design('icosahedral')
    worst = 0.0
    for kind in ChannelKind:
        for model in NoiseModel:
            for param in CPTP_PARAMS:
                ch = make_channel(kind, param)
                result = epsilon_over_sample(states, 1, ens, ch, model, mode)
                # After the twirl a non-unital channel still moves I/2
                expected = 0.0
                if model is NoiseModel.AFTER and not is_unital(ch):
                    expected = _after_model_first_moment_epsilon(ch)
                deviation = abs(result.epsilon - expected)
                worst = max(worst, deviation)
                if deviation > ONE_DESIGN_TOL:
                    return CheckResult(name, False, f'{kind.value}/{model.value} '
                                                    f'{kind.param_name}={param:.1f}: epsilon '
                                                    f'{result.epsilon:.3e}, expected {expected:.3e}')
    return CheckResult(name, True, f'max deviation {worst:.3e} over {len(states)} states')


def check_model_equivalence(n_states, seed):
    name = 'depolarising model equivalence'
    states = random_states(n_states, seed)
    ens = get_design('icosahedral')
    worst = 0.0
    for t in range(1, 6):
        for p in DEPOLARISING_PARAMS:
            ch = make_channel(ChannelKind.DEPOLARISING, p)
            for start in range(0, n_states, EQUIVALENCE_CHUNK):
                chunk = states[start:start + EQUIVALENCE_CHUNK]
                before = noisy_moments(chunk, t, ens, ch, NoiseModel.BEFORE)
                after = noisy_moments(chunk, t, ens, ch, NoiseModel.AFTER)
                worst = max(worst, float(np.linalg.norm(before - after, axis=(1, 2)).max()))
    passed = worst <= MODEL_EQUIVALENCE_TOL
    return CheckResult(name, passed, f'max Frobenius gap {worst:.3e} over {n_states} states')


def check_strict_obstruction(mode):
    """Pure |0⟩ under bit flip p = 0.3 at t = 2: Strict infeasible, projection finite"""
    name = 'strict-mode obstruction'
    rho = density_from_point((0.0, 0.0, 1.0))
    ens = get_design('icosahedral')
    ch = make_channel(ChannelKind.BIT_FLIP, 0.3)
    strict = epsilon_for_state(rho, 2, ens, ch, NoiseModel.BEFORE,
                               EpsilonMode.strict(rank_cutoff=mode.rank_cutoff,
                                                  kernel_residual_tol=mode.kernel_residual_tol))
    projected = epsilon_for_state(rho, 2, ens, ch, NoiseModel.BEFORE,
                                  EpsilonMode.projected(rank_cutoff=mode.rank_cutoff,
                                                        kernel_residual_tol=mode.kernel_residual_tol))
    detail = (f'strict epsilon={strict.epsilon} residual={strict.kernel_residual:.3e}; '
              f'projected epsilon={projected.epsilon:.6g}')
    passed = (not strict.feasible and strict.kernel_residual > OBSTRUCTION_RESIDUAL
              and np.isfinite(projected.epsilon))
    return CheckResult(name, passed, detail)


def run_verification(ensemble_file=None):
    """All checks in a fixed order"""
    cfg = current_app.config
    seed = cfg['VERIFY_SEED']
    n_matrices = cfg['VERIFY_MATRICES']
    mode = EpsilonMode.projected(rank_cutoff=cfg['RANK_CUTOFF'],
                                 kernel_residual_tol=cfg['KERNEL_RESIDUAL_TOL'])

    results = [check_design(get_design(label), order, n_matrices, seed)
               for label, order in EXPECTED_ORDERS.items()]
    if ensemble_file:
        results.append(check_ensemble_file(ensemble_file, n_matrices, seed))
    results += [check_cptp(kind, seed) for kind in ChannelKind]
    results.append(check_one_design_invariance(mode))
    results.append(check_model_equivalence(cfg['VERIFY_STATES'], seed))
    results.append(check_strict_obstruction(mode))

    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.warning('Verification failed: %s', ', '.join(failed))
    else:
        logger.info('Verification passed (%d checks, tolerance %.0e)', len(results), DESIGN_TOL)
    return results
