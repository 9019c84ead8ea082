"""Exact and noisy moment operators and the minimal ε of the design inequality

    (1 − ε) E(ρ^{⊗t}) ⪯ Ẽ(ρ) ⪯ (1 + ε) E(ρ^{⊗t})

where E is the design (equivalently Haar) moment of ρ^{⊗t} and Ẽ the moment
of the noisy design. Samples are evaluated on stacked arrays in chunks whose
size is bounded by ``chunk_entries`` complex numbers.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from app.bloch import bloch_vector, bloch_vectors
from app.channels import apply_kraus, check_density_matrix
from app.designs import conjugate_orbit, orbit_moment, weighted_power_sum
from app.errors import (DimensionMismatch, EmptySample, InsufficientDesignOrder, InvalidParameter,
                        NotHermitian, TraceMismatch)
from app.linalg import as_matrix, dagger, hermitian_eig_stack, is_hermitian, support_mask
from app.models import BlochPoint, EpsilonMode, EpsilonResult, NoiseModel

logger = logging.getLogger(__name__)

TRACE_TOL = 1e-10
ONE_DESIGN_ZERO = 1e-12
CHUNK_ENTRIES = 2 ** 21


def noise_model(name):
    if isinstance(name, NoiseModel):
        return name
    try:
        return NoiseModel(str(name).strip().lower())
    except ValueError:
        raise InvalidParameter(f'Unknown noise model {name!r}; choose before or after') from None


def _check_order(ens, t):
    if int(t) != t or t < 1:
        raise InvalidParameter(f'moment order must be a positive integer, got {t!r}')
    if ens.order is None or t > ens.order:
        raise InsufficientDesignOrder(
            f'ensemble {ens.label!r} is certified to order {ens.order}, t={t} requested')
    return int(t)


def _as_state_stack(states):
    stack = [check_density_matrix(rho) for rho in states]
    if not stack:
        raise EmptySample('state sample is empty')
    return np.array(stack)


def _noisy_moment_stack(states, t, ens, ch, model):
    if model is NoiseModel.BEFORE:
        return orbit_moment(ens, apply_kraus(ch, states), t)
    orbit = conjugate_orbit(ens, states)
    count, size = orbit.shape[:2]
    noisy = apply_kraus(ch, orbit.reshape(count * size, 2, 2)).reshape(orbit.shape)
    return weighted_power_sum(ens.weights, noisy, t)


def exact_moment(rho, t, ens):
    """E^t(ρ^{⊗t}) computed with the design ensemble"""
    t = _check_order(ens, t)
    rho = check_density_matrix(rho)
    return orbit_moment(ens, rho[None], t)[0]


def noisy_moment(rho, t, ens, ch, model):
    """Moment of the noisy design with noise before or after the unitaries"""
    t = _check_order(ens, t)
    rho = check_density_matrix(rho)
    return _noisy_moment_stack(rho[None], t, ens, ch, noise_model(model))[0]


def noisy_moments(states, t, ens, ch, model):
    """noisy_moment for every state of a sample, shape (s, 2^t, 2^t)"""
    t = _check_order(ens, t)
    return _noisy_moment_stack(_as_state_stack(states), t, ens, ch, noise_model(model))


def _min_epsilon_stack(A, B, mode):
    """Vectorised min_epsilon over (s, d, d) stacks.

    Works in the eigenbasis of A: the support projector is diagonal there, so the
    kernel residual and the support-restricted, A-weighted difference are masks
    and scalings of D = B − A. Excluded directions become zero rows and columns,
    which leaves the spectral radius of the restricted block unchanged.
    """
    traces = np.abs(np.trace(A, axis1=-2, axis2=-1) - np.trace(B, axis1=-2, axis2=-1))
    if np.any(traces > TRACE_TOL):
        raise TraceMismatch(f'moment traces differ by {traces.max():.3e}')
    eigenvalues, eigenvectors = hermitian_eig_stack(A)
    mask = support_mask(eigenvalues, mode.rank_cutoff)
    D = B - A
    D = 0.5 * (D + dagger(D))
    rotated = dagger(eigenvectors) @ D @ eigenvectors
    outside = ~mask
    kernel_block = rotated * (outside[:, :, None] & outside[:, None, :])
    cross_block = rotated * (outside[:, :, None] & mask[:, None, :])
    residual = np.linalg.norm(kernel_block, axis=(1, 2)) + np.linalg.norm(cross_block, axis=(1, 2))
    safe = np.where(mask, eigenvalues, 1.0)
    scale = np.where(mask, 1.0 / np.sqrt(safe), 0.0)
    weighted = scale[:, :, None] * rotated * scale[:, None, :]
    epsilon = np.max(np.abs(np.linalg.eigvalsh(weighted)), axis=1)
    feasible = mask.any(axis=1)
    if mode.is_strict:
        feasible &= residual <= mode.kernel_residual_tol
    epsilon = np.where(feasible, epsilon, np.inf)
    return epsilon, feasible, residual


def min_epsilon(A, B, mode=None):
    """Smallest ε with −εA ⪯ B − A ⪯ εA, on the support of A.

    Strict mode declares the pair infeasible when B − A reaches into the kernel
    of A by more than ``kernel_residual_tol``; SupportProjected always returns
    the restricted ε. The kernel residual is reported in both modes.
    """
    mode = mode or EpsilonMode()
    A = as_matrix(A, 'A')
    B = as_matrix(B, 'B')
    if A.shape != B.shape:
        raise DimensionMismatch(f'A has shape {A.shape}, B has shape {B.shape}')
    for name, M in (('A', A), ('B', B)):
        if not is_hermitian(M):
            raise NotHermitian(f'{name} is not Hermitian')
    epsilon, feasible, residual = _min_epsilon_stack(A[None], B[None], mode)
    return EpsilonResult(float(epsilon[0]), bool(feasible[0]), float(residual[0]))


def _chunk_size(ens, t, chunk_entries):
    per_state = len(ens) * 4 ** t
    return max(1, chunk_entries // per_state)


def _evaluate(states, t, ens, ch, model, mode, chunk_entries):
    epsilon = np.empty(len(states))
    feasible = np.empty(len(states), dtype=bool)
    residual = np.empty(len(states))
    step = _chunk_size(ens, t, chunk_entries)
    for start in range(0, len(states), step):
        chunk = states[start:start + step]
        exact = orbit_moment(ens, chunk, t)
        noisy = _noisy_moment_stack(chunk, t, ens, ch, model)
        block = slice(start, start + len(chunk))
        epsilon[block], feasible[block], residual[block] = _min_epsilon_stack(exact, noisy, mode)
    if t == 1:
        epsilon[feasible & (epsilon < ONE_DESIGN_ZERO)] = 0.0
    return epsilon, feasible, residual


def epsilon_for_state(rho, t, ens, ch, model, mode=None):
    """min_epsilon(exact_moment, noisy_moment) for one state"""
    mode = mode or EpsilonMode()
    t = _check_order(ens, t)
    rho = check_density_matrix(rho)
    epsilon, feasible, residual = _evaluate(rho[None], t, ens, ch, noise_model(model), mode,
                                            CHUNK_ENTRIES)
    return EpsilonResult(float(epsilon[0]), bool(feasible[0]), float(residual[0]), bloch_vector(rho))


def epsilon_per_state(states, t, ens, ch, model, mode=None, chunk_entries=CHUNK_ENTRIES):
    """One EpsilonResult per state, in sample order"""
    mode = mode or EpsilonMode()
    t = _check_order(ens, t)
    stack = _as_state_stack(states)
    epsilon, feasible, residual = _evaluate(stack, t, ens, ch, noise_model(model), mode, chunk_entries)
    points = bloch_vectors(stack)
    return [EpsilonResult(float(e), bool(f), float(r), BlochPoint(*map(float, p)))
            for e, f, r, p in zip(epsilon, feasible, residual, points)]


def epsilon_over_sample(states, t, ens, ch, model, mode=None, chunk_entries=CHUNK_ENTRIES):
    """Largest per-state ε over a sample, with the state attaining it.

    In Strict mode any infeasible state makes the sample infeasible; the first
    such state is reported.
    """
    mode = mode or EpsilonMode()
    t = _check_order(ens, t)
    stack = _as_state_stack(states)
    epsilon, feasible, residual = _evaluate(stack, t, ens, ch, noise_model(model), mode, chunk_entries)
    if not feasible.all():
        index = int(np.argmin(feasible))
        logger.warning('%s t=%d: %d of %d states infeasible (kernel residual up to %.3e)',
                       ch, t, int((~feasible).sum()), len(stack), residual.max())
        return EpsilonResult(math.inf, False, float(residual.max()), bloch_vector(stack[index]))
    index = int(np.argmax(epsilon))
    return EpsilonResult(float(epsilon[index]), True, float(residual.max()), bloch_vector(stack[index]))
