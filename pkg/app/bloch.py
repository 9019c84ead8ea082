"""Bloch-ball sampling and the point <-> density matrix conversion."""
from __future__ import annotations

import itertools
import math

import numpy as np

from app.errors import InvalidBlochPoint, InvalidParameter
from app.linalg import X, Y, Z
from app.models import BlochGridSpec, BlochPoint

BALL_TOL = 1e-12

POLAR_TRUNCATIONS = tuple(k * math.pi / 6 for k in range(1, 7))
AZIMUTHAL_TRUNCATIONS = tuple(k * math.pi / 6 for k in range(1, 13))


def density_from_point(point):
    """ρ = ½ [[1 + z, x − iy], [x + iy, 1 − z]]"""
    x, y, z = (float(c) for c in point)
    radius = math.sqrt(x * x + y * y + z * z)
    if radius > 1.0 + BALL_TOL:
        raise InvalidBlochPoint(f'({x}, {y}, {z}) lies outside the Bloch ball (r = {radius:.15g})')
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)


def densities(points):
    return np.array([density_from_point(p) for p in points]).reshape(-1, 2, 2)


def bloch_vector(rho):
    rho = np.asarray(rho, dtype=complex)
    return BlochPoint(*(float(np.trace(rho @ pauli).real) for pauli in (X, Y, Z)))


def bloch_vectors(states):
    states = np.asarray(states, dtype=complex)
    x = 2 * states[:, 1, 0].real
    y = 2 * states[:, 1, 0].imag
    z = (states[:, 0, 0] - states[:, 1, 1]).real
    return np.stack([x, y, z], axis=1)


def spherical_grid(spec=None):
    """Evenly spaced (r, θ, φ) with endpoints, r outermost and φ innermost.

    Degenerate duplicates (r = 0, the poles, φ = 0 and 2π) are kept.
    """
    spec = spec or BlochGridSpec()
    radii = np.linspace(0.0, spec.r_t, spec.n_r)
    polars = np.linspace(0.0, spec.theta_t, spec.n_theta)
    azimuths = np.linspace(0.0, spec.phi_t, spec.n_phi)
    return [BlochPoint.from_spherical(float(r), float(theta), float(phi))
            for r, theta, phi in itertools.product(radii, polars, azimuths)]


def cube_grid(n=20):
    """Lattice points of [−1, 1]^3 with n values per axis that lie in the Bloch ball"""
    if int(n) != n or n < 2:
        raise InvalidParameter(f'cube grid needs at least 2 points per axis, got {n!r}')
    axis = np.linspace(-1.0, 1.0, int(n))
    return [BlochPoint(float(x), float(y), float(z))
            for x, y, z in itertools.product(axis, axis, axis)
            if x * x + y * y + z * z <= 1.0 + BALL_TOL]
