from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from app.errors import InvalidEnsemble, InvalidParameter

UNITARITY_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12
COMPLETENESS_TOL = 1e-12


class ChannelKind(enum.Enum):
    BIT_FLIP = 'bitflip'
    PHASE_FLIP = 'phaseflip'
    BIT_PHASE_FLIP = 'bitphaseflip'
    PHASE_DAMPING = 'phasedamp'
    AMPLITUDE_DAMPING = 'ampdamp'
    DEPOLARISING = 'depolarising'

    @property
    def is_flip(self):
        return self in (ChannelKind.BIT_FLIP, ChannelKind.PHASE_FLIP, ChannelKind.BIT_PHASE_FLIP)

    @property
    def is_damping(self):
        return self in (ChannelKind.PHASE_DAMPING, ChannelKind.AMPLITUDE_DAMPING)

    @property
    def param_name(self):
        return 'lambda' if self.is_damping else 'p'


class NoiseModel(enum.Enum):
    BEFORE = 'before'
    AFTER = 'after'


class EpsilonModeKind(enum.Enum):
    STRICT = 'strict'
    SUPPORT_PROJECTED = 'projected'


def _frozen_array(values, dtype=complex):
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'eigenvalues', _frozen_array(self.eigenvalues, float))
        object.__setattr__(self, 'eigenvectors', _frozen_array(self.eigenvectors))

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ vecs.conj().T


@dataclass(frozen=True, eq=False)
class UnitaryEnsemble:
    """Weighted finite set of single-qubit unitaries {p_i, U_i}

    ``order`` is the declared design order; built-in ensembles carry the order
    certified against the Haar oracle.
    """
    label: str
    weights: np.ndarray
    unitaries: np.ndarray
    order: Optional[int] = None

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        unitaries = np.asarray(self.unitaries, dtype=complex)
        if unitaries.ndim != 3 or unitaries.shape[1:] != (2, 2):
            raise InvalidEnsemble(f'Ensemble {self.label!r} must hold 2x2 unitaries')
        if unitaries.shape[0] != weights.shape[0] or weights.shape[0] == 0:
            raise InvalidEnsemble(f'Ensemble {self.label!r} has {weights.shape[0]} weights '
                                  f'for {unitaries.shape[0]} unitaries')
        if np.any(weights <= 0):
            raise InvalidEnsemble(f'Ensemble {self.label!r} has non-positive weights')
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidEnsemble(f'Ensemble {self.label!r} weights sum to {weights.sum()!r}')
        gram = np.einsum('nji,njk->nik', unitaries.conj(), unitaries)
        defects = np.linalg.norm(gram - np.eye(2), axis=(1, 2))
        if np.any(defects > UNITARITY_TOL):
            index = int(np.argmax(defects))
            raise InvalidEnsemble(f'Ensemble {self.label!r} element {index} is not unitary '
                                  f'(defect {defects[index]:.3e})')
        if self.order is not None and self.order < 0:
            raise InvalidEnsemble(f'Ensemble {self.label!r} has negative order')
        object.__setattr__(self, 'weights', _frozen_array(weights, float))
        object.__setattr__(self, 'unitaries', _frozen_array(unitaries))

    def __len__(self):
        return self.weights.shape[0]

    @property
    def elements(self):
        return list(zip(self.weights, self.unitaries))

    def __repr__(self):
        return f'<UnitaryEnsemble {self.label} ({len(self)} elements, order {self.order})>'


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Single-qubit channel in operator-sum form"""
    kind: ChannelKind
    param: float
    kraus: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.param <= 1.0:
            raise InvalidParameter(f'{self.kind.value} parameter {self.param!r} outside [0, 1]')
        kraus = np.asarray(self.kraus, dtype=complex)
        if kraus.ndim != 3 or kraus.shape[1:] != (2, 2) or kraus.shape[0] == 0:
            raise InvalidParameter(f'{self.kind.value} needs a non-empty stack of 2x2 Kraus operators')
        completeness = np.einsum('kji,kjl->il', kraus.conj(), kraus)
        if np.linalg.norm(completeness - np.eye(2)) > COMPLETENESS_TOL:
            raise InvalidParameter(f'{self.kind.value} Kraus operators are not trace preserving')
        object.__setattr__(self, 'kraus', _frozen_array(kraus))

    def __repr__(self):
        return f'<KrausChannel {self.kind.value} {self.kind.param_name}={self.param}>'


class BlochPoint(NamedTuple):
    x: float
    y: float
    z: float

    @classmethod
    def from_spherical(cls, r, theta, phi):
        return cls(r * math.sin(theta) * math.cos(phi),
                   r * math.sin(theta) * math.sin(phi),
                   r * math.cos(theta))

    @property
    def radius(self):
        return math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)


# Slack for truncation values computed from pi
_ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class BlochGridSpec:
    """Truncated spherical sampling region"""
    r_t: float = 1.0
    theta_t: float = math.pi
    phi_t: float = 2 * math.pi
    n_r: int = 11
    n_theta: int = 11
    n_phi: int = 11

    def __post_init__(self):
        if not 0.0 <= self.r_t <= 1.0:
            raise InvalidParameter(f'r_t={self.r_t!r} outside [0, 1]')
        if not 0.0 <= self.theta_t <= math.pi + _ANGLE_SLACK:
            raise InvalidParameter(f'theta_t={self.theta_t!r} outside [0, pi]')
        if not 0.0 <= self.phi_t <= 2 * math.pi + _ANGLE_SLACK:
            raise InvalidParameter(f'phi_t={self.phi_t!r} outside [0, 2pi]')
        for name in ('n_r', 'n_theta', 'n_phi'):
            if int(getattr(self, name)) < 2:
                raise InvalidParameter(f'{name} must be at least 2')

    @property
    def size(self):
        return self.n_r * self.n_theta * self.n_phi


@dataclass(frozen=True)
class EpsilonMode:
    """How min_epsilon treats the kernel of the exact moment"""
    kind: EpsilonModeKind = EpsilonModeKind.STRICT
    rank_cutoff: float = 1e-10
    kernel_residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ('rank_cutoff', 'kernel_residual_tol'):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise InvalidParameter(f'{name}={value!r} outside (0, 1)')

    @classmethod
    def strict(cls, **kwargs):
        return cls(EpsilonModeKind.STRICT, **kwargs)

    @classmethod
    def projected(cls, **kwargs):
        return cls(EpsilonModeKind.SUPPORT_PROJECTED, **kwargs)

    @property
    def is_strict(self):
        return self.kind is EpsilonModeKind.STRICT


@dataclass(frozen=True)
class EpsilonResult:
    """Minimal epsilon of the two-sided design inequality"""
    epsilon: float
    feasible: bool
    kernel_residual: float = 0.0
    argmax_state: Optional[BlochPoint] = field(default=None)

    def __post_init__(self):
        if not self.feasible and not math.isinf(self.epsilon):
            object.__setattr__(self, 'epsilon', math.inf)
