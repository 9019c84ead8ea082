"""Dense complex matrix kernel sized for tensor powers of single-qubit operators.

Matrices are plain ``numpy`` complex arrays. Tensor products follow the
row-major Kronecker convention of ``numpy.kron``:
(M ⊗ N)[i*dimN + k, j*dimN + l] = M[i, j] * N[k, l].
"""
from __future__ import annotations

import numpy as np

from app.errors import DimensionMismatch, InvalidParameter, NotHermitian, ResourceLimitExceeded
from app.models import Spectrum

MAX_DIM = 4096
HERMITIAN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(M, name='matrix'):
    """Coerce to a square complex array"""
    array = np.asarray(M, dtype=complex)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise DimensionMismatch(f'{name} must be a non-empty square matrix, got shape {array.shape}')
    return array


def dagger(M):
    return np.conj(np.swapaxes(M, -1, -2))


def frobenius(M):
    return float(np.linalg.norm(M))


def hermiticity_defect(M):
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M - dagger(M))))


def is_hermitian(M, tol=HERMITIAN_TOL):
    return hermiticity_defect(M) <= tol


def _check_power(dim, t):
    if int(t) != t or t < 1:
        raise InvalidParameter(f'tensor power must be a positive integer, got {t!r}')
    if dim ** int(t) > MAX_DIM:
        raise ResourceLimitExceeded(f'{dim}^{t} exceeds the dimension guard of {MAX_DIM}')


def tensor_power(M, t):
    """M^{⊗t}"""
    M = as_matrix(M)
    _check_power(M.shape[0], t)
    result = M
    for _ in range(int(t) - 1):
        result = np.kron(result, M)
    return result


def tensor_power_stack(Ms, t):
    """Tensor powers of every matrix in an (n, d, d) stack"""
    Ms = np.asarray(Ms, dtype=complex)
    if Ms.ndim != 3 or Ms.shape[1] != Ms.shape[2]:
        raise DimensionMismatch(f'expected an (n, d, d) stack, got shape {Ms.shape}')
    n, d, _ = Ms.shape
    _check_power(d, t)
    result = Ms
    for _ in range(int(t) - 1):
        size = result.shape[1]
        result = np.einsum('nij,nkl->nikjl', result, Ms).reshape(n, size * d, size * d)
    return result


def conjugate_tensor_power(M, U, t):
    """U^{⊗t} M (U^{⊗t})†"""
    M = as_matrix(M)
    U = as_matrix(U, 'U')
    if U.shape != (2, 2):
        raise DimensionMismatch(f'U must be 2x2, got {U.shape}')
    if M.shape[0] != 2 ** int(t):
        raise DimensionMismatch(f'M has dim {M.shape[0]}, expected 2^{t}')
    lifted = tensor_power(U, t)
    return lifted @ M @ dagger(lifted)


def hermitian_eig_stack(Ms, tol=HERMITIAN_TOL):
    """Eigen-decomposition of a stack of Hermitian matrices.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending along the
    last axis. The input is symmetrised before LAPACK sees it so the result only
    depends on the Hermitian part.
    """
    Ms = np.asarray(Ms, dtype=complex)
    if Ms.ndim < 2 or Ms.shape[-1] != Ms.shape[-2]:
        raise DimensionMismatch(f'expected square matrices, got shape {Ms.shape}')
    defect = hermiticity_defect(Ms)
    if defect > tol:
        raise NotHermitian(f'matrix deviates from Hermitian by {defect:.3e}')
    return np.linalg.eigh(0.5 * (Ms + dagger(Ms)))


def hermitian_eig(M, tol=HERMITIAN_TOL):
    M = as_matrix(M)
    eigenvalues, eigenvectors = hermitian_eig_stack(M, tol)
    return Spectrum(eigenvalues, eigenvectors)


def support_mask(eigenvalues, rel_cutoff):
    """Boolean mask of eigenvalues above rel_cutoff times the largest one"""
    eigenvalues = np.asarray(eigenvalues)
    top = eigenvalues[..., -1:]
    return (eigenvalues > rel_cutoff * top) & (top > 0)


def support_projector(M, rel_cutoff=1e-10):
    """Projector onto the span of the non-negligible eigenvectors of a PSD matrix.

    Returns ``(P, rank)``; a matrix without positive eigenvalues has rank 0 and
    a zero projector.
    """
    if not 0.0 < rel_cutoff < 1.0:
        raise InvalidParameter(f'rel_cutoff={rel_cutoff!r} outside (0, 1)')
    spectrum = hermitian_eig(M)
    mask = support_mask(spectrum.eigenvalues, rel_cutoff)
    kept = spectrum.eigenvectors[:, mask]
    return kept @ dagger(kept), int(mask.sum())
