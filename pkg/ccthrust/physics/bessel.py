"""Spherical Bessel functions of order 0 and 1 for the dipole Mie solution."""

from __future__ import annotations

import cmath
import logging
from typing import Tuple

from ..errors import NumericFailureError

logger = logging.getLogger(__name__)

# beyond this |z| the downward recurrence becomes too long to be worth running
MAX_ARGUMENT = 1.0e5
_RESCALE = 1.0e250
_CHECK_TOL = 1.0e-8


def start_order(z: complex) -> int:
    """Starting order of the downward recurrence."""
    az = abs(z)
    return int(max(az + 4.0 * az ** (1.0 / 3.0) + 2.0, az)) + 16


def spherical_j01(z: complex) -> Tuple[complex, complex]:
    """
    (j0(z), j1(z)) by Miller's downward recurrence normalised to the closed form.

    Raises NumericFailureError when the normalisation disagrees with the
    closed forms or the argument is out of range.
    """
    z = complex(z)
    if z == 0:
        return 1.0 + 0j, 0j
    az = abs(z)
    if not az < MAX_ARGUMENT:
        raise NumericFailureError(f"spherical Bessel argument too large: {z}", argument=z)

    n_start = start_order(z)
    upper, current = 0j, 1.0e-30 + 0j
    for n in range(n_start, 0, -1):
        lower = (2 * n + 1) / z * current - upper
        upper, current = current, lower
        if abs(current) > _RESCALE:
            upper /= _RESCALE
            current /= _RESCALE
    j0_rec, j1_rec = current, upper

    try:
        sin_z, cos_z = cmath.sin(z), cmath.cos(z)
    except OverflowError:
        raise NumericFailureError(f"spherical Bessel normalisation overflowed at {z}", argument=z) from None
    j0_exact = sin_z / z
    j1_exact = (sin_z / z - cos_z) / z

    if az < 1.0 or abs(j0_exact) >= abs(j1_exact):
        if j0_rec == 0:
            raise NumericFailureError(f"spherical Bessel recurrence vanished at {z}", argument=z)
        scale = j0_exact / j0_rec
    else:
        if j1_rec == 0:
            raise NumericFailureError(f"spherical Bessel recurrence vanished at {z}", argument=z)
        scale = j1_exact / j1_rec
    j0, j1 = j0_rec * scale, j1_rec * scale

    if not (cmath.isfinite(j0) and cmath.isfinite(j1)):
        raise NumericFailureError(f"non-finite spherical Bessel value at {z}", argument=z)
    if az >= 1.0:
        magnitude = max(abs(j0_exact), abs(j1_exact))
        mismatch = max(abs(j0 - j0_exact), abs(j1 - j1_exact))
        if mismatch > _CHECK_TOL * magnitude:
            raise NumericFailureError(
                f"spherical Bessel recurrence did not converge at {z} (mismatch {mismatch:.3e})",
                argument=z,
            )
    return j0, j1


def spherical_y01(x: float) -> Tuple[float, float]:
    """(y0(x), y1(x)) for real x > 0, upward from y0."""
    x = float(x)
    if not x > 0.0:
        raise NumericFailureError(f"spherical Neumann functions need x > 0, got {x}", argument=x)
    s, c = cmath.sin(x).real, cmath.cos(x).real
    y0 = -c / x
    y1 = y0 / x - s / x
    return y0, y1


def spherical_h01(x: float) -> Tuple[complex, complex]:
    """Outgoing spherical Hankel functions h0(x), h1(x) of the first kind."""
    j0, j1 = spherical_j01(x)
    y0, y1 = spherical_y01(x)
    return complex(j0.real, y0), complex(j1.real, y1)


def radial_derivative(f0: complex, f1: complex, z: complex) -> complex:
    """[z f1(z)]' / z = f0(z) - f1(z)/z for any order-1 spherical function."""
    if z == 0:
        return 2.0 / 3.0 + 0j
    return f0 - f1 / z
