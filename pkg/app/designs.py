"""Exact single-qubit unitary t-designs and their moment maps.

Three ensembles are built in: the Pauli group (1-design), the projective
Clifford group (3-design) and the binary icosahedral group (5-design). Design
order is certified against ``haar_moment_oracle``, an Euler-angle quadrature
that never touches a design ensemble.
"""
from __future__ import annotations

import logging
import math
import os
from functools import lru_cache

import numpy as np

from app.errors import DimensionMismatch, InvalidEnsemble, InvalidParameter, UnsupportedOrder
from app.linalg import I2, X, Y, Z, as_matrix, dagger, frobenius, tensor_power_stack
from app.models import UnitaryEnsemble

logger = logging.getLogger(__name__)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PHASE = np.array([[1, 0], [0, 1j]], dtype=complex)

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2

MAX_ORACLE_ORDER = 6
DESIGN_TOL = 1e-10
VERIFY_MATRICES = 50
VERIFY_SEED = 20240521

_SAME_ELEMENT_TOL = 1e-8
_PHASE_ENTRY_TOL = 1e-9


def _uniform(label, unitaries, order):
    unitaries = np.array(unitaries, dtype=complex)
    weights = np.full(unitaries.shape[0], 1.0 / unitaries.shape[0])
    return UnitaryEnsemble(label, weights, unitaries, order)


def _canonical_phase(U):
    """Fix the global phase: first non-zero entry in row-major order real positive"""
    flat = U.reshape(-1)
    lead = flat[np.argmax(np.abs(flat) > _PHASE_ENTRY_TOL)]
    return U * (np.conj(lead) / abs(lead))


def _unit_determinant(U):
    return U / np.sqrt(np.linalg.det(U))


def _close_group(generators, canonicalize, expected):
    """Breadth-first closure of the generators under right multiplication.

    Elements are kept in discovery order so the resulting ensemble is identical
    on every run.
    """
    elements = [I2.copy()]
    frontier = [I2.copy()]
    while frontier:
        discovered = []
        for g in frontier:
            for h in generators:
                candidate = canonicalize(g @ h)
                distances = np.linalg.norm(np.array(elements) - candidate, axis=(1, 2))
                if distances.min() < _SAME_ELEMENT_TOL:
                    continue
                elements.append(candidate)
                discovered.append(candidate)
                if len(elements) > expected:
                    raise AssertionError(f'group closure exceeded {expected} elements')
        frontier = discovered
    if len(elements) != expected:
        raise AssertionError(f'group closure reached {len(elements)} elements, expected {expected}')
    return elements


def _quaternion(w, x, y, z):
    """SU(2) image of the unit quaternion w + xi + yj + zk"""
    return np.array([[w + 1j * x, y + 1j * z],
                     [-y + 1j * z, w - 1j * x]], dtype=complex)


@lru_cache(maxsize=None)
def pauli_design():
    return _uniform('pauli', [I2, X, Y, Z], order=1)


@lru_cache(maxsize=None)
def clifford_design():
    elements = _close_group([HADAMARD, PHASE], _canonical_phase, expected=24)
    return _uniform('clifford', elements, order=3)


@lru_cache(maxsize=None)
def icosahedral_design():
    # Lifts of an order-3 and an order-5 icosahedral rotation generate all of 2I.
    order_three = _quaternion(0.5, 0.5, 0.5, 0.5)
    order_five = _quaternion(GOLDEN_RATIO / 2, 1 / (2 * GOLDEN_RATIO), 0.5, 0.0)
    elements = _close_group([order_three, order_five], _unit_determinant, expected=120)
    return _uniform('icosahedral', elements, order=5)


DESIGNS = {
    'pauli': pauli_design,
    'clifford': clifford_design,
    'icosahedral': icosahedral_design,
}


def get_design(label):
    try:
        return DESIGNS[label]()
    except KeyError:
        raise InvalidParameter(f'Unknown design {label!r}; choose from {", ".join(DESIGNS)}') from None


@lru_cache(maxsize=32)
def lifted_unitaries(ens, t):
    """Stack of U_i^{⊗t} for an ensemble (cached per ensemble object and order)"""
    lifted = tensor_power_stack(ens.unitaries, t)
    lifted.setflags(write=False)
    return lifted


def _check_moment_input(M, t):
    M = as_matrix(M)
    if int(t) != t or t < 1:
        raise InvalidParameter(f'moment order must be a positive integer, got {t!r}')
    if M.shape[0] != 2 ** int(t):
        raise DimensionMismatch(f'M has dim {M.shape[0]}, expected 2^{t} = {2 ** int(t)}')
    return M


def design_moment(ens, M, t):
    """Σ_i p_i U_i^{⊗t} M (U_i^{⊗t})†"""
    M = _check_moment_input(M, t)
    lifted = lifted_unitaries(ens, int(t))
    return np.tensordot(ens.weights, lifted @ M @ dagger(lifted), axes=1)


def conjugate_orbit(ens, states):
    """U_i ρ U_i† for every ρ in an (s, 2, 2) stack, shape (s, n, 2, 2)"""
    states = np.asarray(states, dtype=complex)
    return ens.unitaries[None] @ states[:, None] @ dagger(ens.unitaries)[None]


def weighted_power_sum(weights, orbit, t):
    """Σ_i w_i σ_i^{⊗t} per row of an (s, n, 2, 2) stack of single-qubit operators"""
    count, size = orbit.shape[:2]
    powers = tensor_power_stack(orbit.reshape(count * size, 2, 2), t)
    dim = powers.shape[-1]
    return np.einsum('n,snab->sab', weights, powers.reshape(count, size, dim, dim))


def orbit_moment(ens, states, t):
    """Σ_i p_i (U_i ρ U_i†)^{⊗t} for every ρ in an (s, 2, 2) stack.

    Equal to ``design_moment(ens, ρ^{⊗t}, t)`` but built from 2x2 conjugations,
    which keeps sample evaluation cheap.
    """
    return weighted_power_sum(ens.weights, conjugate_orbit(ens, states), t)


def _popcount(index):
    return bin(index).count('1')


@lru_cache(maxsize=None)
def _azimuthal_kernel(t, nodes):
    """Trapezoidal average of Rz(α)^{⊗t} · Rz(α)^{⊗t}† phases as an entrywise kernel"""
    excitations = np.array([_popcount(index) for index in range(2 ** t)])
    spins = t - 2 * excitations
    alphas = 2 * math.pi * np.arange(nodes) / nodes
    phases = np.exp(-0.5j * np.outer(alphas, spins))
    kernel = np.einsum('ja,jb->ab', phases, phases.conj()) / nodes
    kernel.setflags(write=False)
    return kernel


@lru_cache(maxsize=None)
def _polar_rule(t, nodes):
    """Gauss-Legendre nodes in cos β with the normalised sin β / 2 weight, lifted to Ry(β)^{⊗t}"""
    cosines, weights = np.polynomial.legendre.leggauss(nodes)
    half = np.arccos(cosines) / 2
    rotations = np.empty((nodes, 2, 2), dtype=complex)
    rotations[:, 0, 0] = np.cos(half)
    rotations[:, 0, 1] = -np.sin(half)
    rotations[:, 1, 0] = np.sin(half)
    rotations[:, 1, 1] = np.cos(half)
    lifted = tensor_power_stack(rotations, t)
    lifted.setflags(write=False)
    return weights / 2, lifted


def haar_moment_oracle(M, t):
    """∫ U^{⊗t} M (U^{⊗t})† dU over SU(2) by product quadrature.

    U = Rz(α) Ry(β) Rz(γ) with α, γ uniform and β weighted by sin β / 2. Both
    azimuthal integrands are trigonometric polynomials of degree ≤ t, so the
    trapezoidal sums are exact and reduce to entrywise products with a phase
    kernel. After them the polar integrand is a polynomial of degree ≤ t in
    cos β, integrated exactly by Gauss-Legendre.
    """
    if int(t) != t or not 1 <= t <= MAX_ORACLE_ORDER:
        raise UnsupportedOrder(f'Haar oracle supports 1 <= t <= {MAX_ORACLE_ORDER}, got {t!r}')
    t = int(t)
    M = _check_moment_input(M, t)
    nodes = 2 * (t + 1)
    kernel = _azimuthal_kernel(t, nodes)
    weights, lifted = _polar_rule(t, nodes)
    inner = kernel * M
    polar = np.tensordot(weights, lifted @ inner @ dagger(lifted), axes=1)
    return kernel * polar


def random_hermitian_matrices(t, count, seed):
    """Fixed-seed Hermitian test matrices of dim 2^t"""
    dim = 2 ** t
    rng = np.random.default_rng([seed, t])
    raw = rng.normal(size=(count, dim, dim)) + 1j * rng.normal(size=(count, dim, dim))
    return 0.5 * (raw + dagger(raw))


def design_deviation(ens, t, n_matrices=VERIFY_MATRICES, seed=VERIFY_SEED):
    """Largest ‖design_moment − oracle‖_F / ‖M‖_F over the test matrices"""
    worst = 0.0
    for M in random_hermitian_matrices(t, n_matrices, seed):
        gap = frobenius(design_moment(ens, M, t) - haar_moment_oracle(M, t))
        worst = max(worst, gap / frobenius(M))
    return worst


def verify_design_order(ens, t_max, n_matrices=VERIFY_MATRICES, seed=VERIFY_SEED):
    """Largest t ≤ t_max up to which the ensemble reproduces the Haar moments"""
    if int(t_max) != t_max or not 1 <= t_max <= MAX_ORACLE_ORDER:
        raise UnsupportedOrder(f't_max must lie in 1..{MAX_ORACLE_ORDER}, got {t_max!r}')
    for t in range(1, int(t_max) + 1):
        deviation = design_deviation(ens, t, n_matrices, seed)
        logger.debug('%s: t=%d relative deviation %.3e', ens.label, t, deviation)
        if deviation > DESIGN_TOL:
            return t - 1
    return int(t_max)


def dump_ensemble(ens):
    """Text form: comment headers, then one ``weight,re,im,...`` line per element"""
    lines = [f'# label={ens.label}']
    if ens.order is not None:
        lines.append(f'# order={ens.order}')
    for weight, U in ens.elements:
        entries = []
        for value in U.reshape(-1):
            entries.extend((value.real, value.imag))
        lines.append(','.join(format(float(v), '.17g') for v in (weight, *entries)))
    return '\n'.join(lines) + '\n'


def load_ensemble(text, label='loaded'):
    headers = {}
    weights, unitaries = [], []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith('#'):
            key, sep, value = line[1:].partition('=')
            if sep:
                headers[key.strip()] = value.strip()
            continue
        try:
            values = [float(item) for item in line.split(',')]
        except ValueError:
            raise InvalidEnsemble(f'line {number}: non-numeric entry') from None
        if len(values) != 9:
            raise InvalidEnsemble(f'line {number}: expected 9 values, found {len(values)}')
        entries = np.array(values[1::2]) + 1j * np.array(values[2::2])
        weights.append(values[0])
        unitaries.append(entries.reshape(2, 2))
    if not weights:
        raise InvalidEnsemble('ensemble text holds no elements')
    order = headers.get('order')
    try:
        order = int(order) if order is not None else None
    except ValueError:
        raise InvalidEnsemble(f'order header {order!r} is not an integer') from None
    return UnitaryEnsemble(headers.get('label', label), np.array(weights), np.array(unitaries), order)


def export_designs(folder):
    """Write every built-in ensemble to ``<folder>/<label>.txt``; returns the paths"""
    os.makedirs(folder, exist_ok=True)
    paths = []
    for label in DESIGNS:
        path = os.path.join(folder, f'{label}.txt')
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(dump_ensemble(get_design(label)))
        logger.info('Wrote %s ensemble to %s', label, path)
        paths.append(path)
    return paths
