"""Finite Blaschke products with a positive value at the origin.

B(z) = eta * prod_j (z - z_j) / (1 - conj(z_j) z) with |z_j| < 1 and the
unimodular constant eta chosen so that B(0) > 0.  These carry the prescribed
interior critical points of the solved maps: |B| = 1 on the circle, B vanishes
exactly at the z_j.
"""

import numpy as np

from .errors import DegenerateBoundaryError
from .spectral import grid_points

DENOM_GUARD = 1e-14


class BlaschkeProduct:
    __slots__ = ("zeros", "eta")

    def __init__(self, zeros, eta):
        self.zeros = np.asarray(zeros, dtype=np.complex128)
        self.eta = complex(eta)

    @property
    def value_at_origin(self):
        """B(0) = eta * prod(-z_j), real and positive by construction."""
        return float(np.real(self.eta * np.prod(-self.zeros))) if self.zeros.size else 1.0

    def __call__(self, z):
        return evaluate(self, z)


def construct(zeros):
    """Build the product for the given interior zeros (empty list -> B == 1)."""
    zeros = np.atleast_1d(np.asarray(zeros, dtype=np.complex128)) if len(zeros) else np.zeros(0, np.complex128)
    mags = np.abs(zeros)
    if zeros.size and (mags.min() <= 0.0 or mags.max() >= 1.0):
        raise ValueError("Blaschke zeros must satisfy 0 < |z_j| < 1")
    if zeros.size == 0:
        return BlaschkeProduct(zeros, 1.0)
    u = np.prod(-zeros)
    eta = np.conj(u) / abs(u)
    return BlaschkeProduct(zeros, eta)


def evaluate(b, z):
    """B(z), vectorized over z; guards the unit-circle denominators."""
    z = np.asarray(z, dtype=np.complex128)
    if b.zeros.size == 0:
        return np.full(z.shape, b.eta)
    zz = z[..., None]
    denom = 1.0 - np.conj(b.zeros) * zz
    if np.abs(denom).min() < DENOM_GUARD:
        raise DegenerateBoundaryError("evaluation point collides with a reflected Blaschke pole")
    return b.eta * np.prod((zz - b.zeros) / denom, axis=-1)


def boundary_trace(b, n):
    """Nodal values of B on the standard n-point circle grid."""
    return evaluate(b, grid_points(n))


def log_derivative(b, z):
    """B'(z)/B(z) = sum_j [1/(z - z_j) + conj(z_j)/(1 - conj(z_j) z)].

    Valid away from the zeros themselves; on the unit circle the zeros are
    strictly inside, so boundary traces are safe.
    """
    z = np.asarray(z, dtype=np.complex128)
    if b.zeros.size == 0:
        return np.zeros(z.shape, dtype=np.complex128)
    zz = z[..., None]
    first = 1.0 / (zz - b.zeros)
    second = np.conj(b.zeros) / (1.0 - np.conj(b.zeros) * zz)
    return (first + second).sum(axis=-1)


def derivative_trace(b, n):
    """Nodal values of B' on the n-point circle grid."""
    pts = grid_points(n)
    return evaluate(b, pts) * log_derivative(b, pts)
