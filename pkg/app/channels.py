"""Single-qubit noise channels in Kraus form."""
from __future__ import annotations

import math

import numpy as np

from app.errors import InvalidDensityMatrix, InvalidParameter
from app.linalg import I2, X, Y, Z, dagger, frobenius
from app.models import COMPLETENESS_TOL, ChannelKind, KrausChannel

DENSITY_TOL = 1e-10


def channel_kind(name):
    """Map a CLI string (``bitflip``, ``ampdamp``, ...) to its ChannelKind"""
    if isinstance(name, ChannelKind):
        return name
    try:
        return ChannelKind(str(name).strip().lower())
    except ValueError:
        choices = ', '.join(kind.value for kind in ChannelKind)
        raise InvalidParameter(f'Unknown channel {name!r}; choose from {choices}') from None


def _check_unit_interval(name, value):
    if not 0.0 <= value <= 1.0:
        raise InvalidParameter(f'{name}={value!r} outside [0, 1]')


def _kraus_operators(kind, param):
    keep = math.sqrt(1.0 - param)
    if kind is ChannelKind.BIT_FLIP:
        return [keep * I2, math.sqrt(param) * X]
    if kind is ChannelKind.PHASE_FLIP:
        return [keep * I2, math.sqrt(param) * Z]
    if kind is ChannelKind.BIT_PHASE_FLIP:
        return [keep * I2, math.sqrt(param) * Y]
    if kind is ChannelKind.PHASE_DAMPING:
        return [np.diag([1.0, keep]), np.diag([0.0, math.sqrt(param)])]
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        return [np.diag([1.0, keep]), np.array([[0.0, math.sqrt(param)], [0.0, 0.0]])]
    # Depolarising (p/2) I + (1 − p) ρ written as Pauli errors, each with probability p/4
    quarter = math.sqrt(param / 4.0)
    return [math.sqrt(1.0 - 0.75 * param) * I2, quarter * X, quarter * Y, quarter * Z]


def make_channel(kind, param):
    kind = channel_kind(kind)
    param = float(param)
    _check_unit_interval(kind.param_name, param)
    operators = [np.asarray(E, dtype=complex) for E in _kraus_operators(kind, param)]
    # Zero operators contribute nothing; dropping them makes p = 0 a single identity
    operators = [E for E in operators if np.any(E != 0)]
    return KrausChannel(kind, param, np.array(operators))


def channel_from_decay(kind, elapsed_time, time_constant):
    """Damping channel after ``elapsed_time`` for a T2 (phase) or T1 (amplitude) constant"""
    kind = channel_kind(kind)
    if not kind.is_damping:
        raise InvalidParameter(f'{kind.value} is not parameterised by a decay time')
    return make_channel(kind, decay_to_lambda(elapsed_time, time_constant))


def check_density_matrix(rho, tol=DENSITY_TOL):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidDensityMatrix(f'expected a 2x2 density matrix, got shape {rho.shape}')
    if np.max(np.abs(rho - dagger(rho))) > tol:
        raise InvalidDensityMatrix('density matrix is not Hermitian')
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidDensityMatrix(f'density matrix has trace {np.trace(rho).real:.12g}')
    if np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0] < -tol:
        raise InvalidDensityMatrix('density matrix is not positive semidefinite')
    return rho


def apply_kraus(ch, states):
    """ε(ρ) for every ρ in an (s, 2, 2) stack, without validation"""
    kraus = ch.kraus
    return np.einsum('kab,sbc,kdc->sad', kraus, np.asarray(states, dtype=complex), kraus.conj())


def apply_channel(ch, rho):
    """ε(ρ) = Σ_k E_k ρ E_k†"""
    rho = check_density_matrix(rho)
    return apply_kraus(ch, rho[None])[0]


def is_unital(ch):
    image = np.einsum('kab,kcb->ac', ch.kraus, ch.kraus.conj())
    return frobenius(image - I2) <= COMPLETENESS_TOL


def damping_to_flip_prob(lam):
    """Phase-flip probability equivalent to phase damping λ, on the p ≥ ½ branch"""
    _check_unit_interval('lambda', lam)
    return 0.5 * (1.0 + math.sqrt(1.0 - lam))


def flip_prob_to_damping(p):
    """Inverse of damping_to_flip_prob; p and 1 − p give the same channel"""
    _check_unit_interval('p', p)
    return 1.0 - (2.0 * p - 1.0) ** 2


def decay_to_lambda(elapsed_time, time_constant):
    """λ = 1 − exp(−t / T), the damping strength after exponential decay"""
    if time_constant <= 0:
        raise InvalidParameter(f'time constant must be positive, got {time_constant!r}')
    if elapsed_time < 0:
        raise InvalidParameter(f'elapsed time must be non-negative, got {elapsed_time!r}')
    return -math.expm1(-elapsed_time / time_constant)
