"""
Dipolar response of a chiral sphere.

Three models share one unit convention (see PolarizabilitySet):

- quasi_static: small-sphere closed forms, Clausius-Mossotti generalised to
  the 2x2 electric/magnetic constitutive matrix.
- quasi_static_rc: the same matrix dressed with the dipole radiation reaction.
- mie_dipole: the n = 1 partial wave of the exact boundary-value solution.

Internally everything is carried as volumes: Ve = alpha_e/eps0,
Vm = alpha_m/mu0 and X = c*chi, forming A = [[Ve, iX], [-iX, Vm]].
"""

from __future__ import annotations

import cmath
import logging
import math
from typing import Callable, Tuple

import numpy as np

from ..errors import DomainError, MatrixSingularityError, NumericFailureError, PoleError
from ..schemas import (
    MieDipoleCoefficients,
    ParticleSpec,
    PhysicalConstants,
    PolarizabilityModel,
    PolarizabilitySet,
)
from ..utils import ridders_derivative
from .bessel import radial_derivative, spherical_h01, spherical_j01
from .materials import CODATA_2018, eval_dispersion, eval_dispersion_derivatives

logger = logging.getLogger(__name__)

Volumes = Tuple[complex, complex, complex]

# relative size of |Delta| treated as an exact quasi-static pole
_POLE_TOL = 1e-14


# ==============================================================================
# Quasi-static
# ==============================================================================

def _static_volumes(radius: float, eps: complex, mu: complex, kappa: complex) -> Volumes:
    delta = (eps + 2.0) * (mu + 2.0) - kappa * kappa
    scale = abs(eps + 2.0) * abs(mu + 2.0) + abs(kappa) ** 2
    if abs(delta) <= _POLE_TOL * scale:
        raise PoleError(f"quasi-static resonance pole: eps={eps}, mu={mu}, kappa={kappa}")
    r3 = radius ** 3
    volume_e = 4.0 * math.pi * r3 * ((eps - 1.0) * (mu + 2.0) - kappa * kappa) / delta
    volume_m = 4.0 * math.pi * r3 * ((mu - 1.0) * (eps + 2.0) - kappa * kappa) / delta
    chi_volume = 12.0 * math.pi * r3 * kappa / delta
    return volume_e, volume_m, chi_volume


def _static_volume_derivatives(spec: ParticleSpec, omega: float) -> Volumes:
    sample = eval_dispersion(spec.material, omega)
    d_eps, d_mu, d_kappa = eval_dispersion_derivatives(spec.material, omega)
    eps, mu, kappa = sample.eps, sample.mu, sample.kappa

    delta = (eps + 2.0) * (mu + 2.0) - kappa * kappa
    d_delta = d_eps * (mu + 2.0) + (eps + 2.0) * d_mu - 2.0 * kappa * d_kappa
    num_e = (eps - 1.0) * (mu + 2.0) - kappa * kappa
    num_m = (mu - 1.0) * (eps + 2.0) - kappa * kappa
    d_num_e = d_eps * (mu + 2.0) + (eps - 1.0) * d_mu - 2.0 * kappa * d_kappa
    d_num_m = d_mu * (eps + 2.0) + (mu - 1.0) * d_eps - 2.0 * kappa * d_kappa

    r3 = spec.radius ** 3
    delta2 = delta * delta
    return (
        4.0 * math.pi * r3 * (d_num_e * delta - num_e * d_delta) / delta2,
        4.0 * math.pi * r3 * (d_num_m * delta - num_m * d_delta) / delta2,
        12.0 * math.pi * r3 * (d_kappa * delta - kappa * d_delta) / delta2,
    )


def quasi_static_polarizabilities(
    spec: ParticleSpec, omega: float, constants: PhysicalConstants = CODATA_2018
) -> PolarizabilitySet:
    sample = eval_dispersion(spec.material, omega)
    volumes = _static_volumes(spec.radius, sample.eps, sample.mu, sample.kappa)
    return PolarizabilitySet.from_volumes(*volumes, float(omega), PolarizabilityModel.QUASI_STATIC, constants)


# ==============================================================================
# Radiation reaction
# ==============================================================================

def _dressed_volumes(volumes: Volumes, s: float) -> Tuple[Volumes, complex]:
    """
    (I - i s A0)^-1 A0 written out for A0 = [[a, iX], [-iX, b]].

    Returns the dressed volumes and the determinant of I - i s A0.
    """
    a, b, x = volumes
    det = (1.0 - 1j * s * a) * (1.0 - 1j * s * b) + s * s * x * x
    if det == 0 or not cmath.isfinite(det):
        raise MatrixSingularityError(f"radiative-correction matrix is singular (det={det})")
    dressed_e = (a * (1.0 - 1j * s * b) + 1j * s * x * x) / det
    dressed_m = (b * (1.0 - 1j * s * a) + 1j * s * x * x) / det
    return (dressed_e, dressed_m, x / det), det


def _radiation_strength(omega: float, constants: PhysicalConstants) -> Tuple[float, float]:
    """s = k^3/6pi and ds/domega."""
    k = omega / constants.c
    return k ** 3 / (6.0 * math.pi), k * k / (2.0 * math.pi * constants.c)


def radiative_correction(
    p0: PolarizabilitySet, omega: float, constants: PhysicalConstants = CODATA_2018
) -> PolarizabilitySet:
    if not omega > 0.0:
        raise DomainError(f"radiative correction needs omega > 0, got {omega}")
    if p0.model_tag is not PolarizabilityModel.QUASI_STATIC:
        raise DomainError(f"radiative correction applies to quasi-static input, got {p0.model_tag.value}")
    s, _ = _radiation_strength(omega, constants)
    volumes = (p0.volume_e, p0.volume_m, p0.chi_volume)
    dressed, _ = _dressed_volumes(volumes, s)
    return PolarizabilitySet.from_volumes(*dressed, float(omega), PolarizabilityModel.QUASI_STATIC_RC, constants)


def _dressed_volume_derivatives(
    volumes: Volumes, d_volumes: Volumes, s: float, ds: float
) -> Volumes:
    a, b, x = volumes
    da, db, dx = d_volumes
    (_, _, _), det = _dressed_volumes(volumes, s)
    u = a * (1.0 - 1j * s * b) + 1j * s * x * x
    w = b * (1.0 - 1j * s * a) + 1j * s * x * x

    d_sa = ds * a + s * da
    d_sb = ds * b + s * db
    d_sx2 = ds * x * x + 2.0 * s * x * dx
    d_det = -1j * d_sa * (1.0 - 1j * s * b) - 1j * (1.0 - 1j * s * a) * d_sb + s * d_sx2 + ds * s * x * x
    du = da * (1.0 - 1j * s * b) - 1j * a * d_sb + 1j * d_sx2
    dw = db * (1.0 - 1j * s * a) - 1j * b * d_sa + 1j * d_sx2

    det2 = det * det
    return (
        (du * det - u * d_det) / det2,
        (dw * det - w * d_det) / det2,
        (dx * det - x * d_det) / det2,
    )


# ==============================================================================
# Chiral Mie, n = 1
# ==============================================================================

def mie_dipole_coefficients(
    spec: ParticleSpec, omega: float, constants: PhysicalConstants = CODATA_2018
) -> MieDipoleCoefficients:
    """
    a1, b1, c1 of a homogeneous chiral sphere in vacuum.

    Inside, the field is a superposition of the two Beltrami eigenwaves
    with wavenumbers k(n_avg +/- kappa); each is M + N or M - N with the
    magnetic field -i/(Z0 eta) or +i/(Z0 eta) times the electric one. The
    tangential E and H at r = R give a 4x4 system in (A+, A-, s, t), solved
    once for a pure TE (M) and once for a pure TM (N) incident wave.
    """
    if not omega > 0.0:
        raise DomainError(f"Mie coefficients need omega > 0, got {omega}")
    k = omega / constants.c
    x = k * spec.radius
    sample = eval_dispersion(spec.material, omega)

    sqrt_eps, sqrt_mu = cmath.sqrt(sample.eps), cmath.sqrt(sample.mu)
    n_avg = sqrt_eps * sqrt_mu
    eta = sqrt_mu / sqrt_eps
    x_plus = (n_avg + sample.kappa) * x
    x_minus = (n_avg - sample.kappa) * x

    jp0, jp1 = spherical_j01(x_plus)
    jm0, jm1 = spherical_j01(x_minus)
    j0, j1 = spherical_j01(x)
    h0, h1 = spherical_h01(x)
    djp = radial_derivative(jp0, jp1, x_plus)
    djm = radial_derivative(jm0, jm1, x_minus)
    dj = radial_derivative(j0, j1, x)
    dh = radial_derivative(h0, h1, x)

    # unknowns (A+, A-, s*dh, t*dh) keep every column O(1) for small x
    ratio = h1 / dh
    system = np.array(
        [
            [jp1, jm1, -ratio, 0.0],
            [djp, -djm, 0.0, -1.0],
            [jp1 / eta, -jm1 / eta, 0.0, -ratio],
            [djp / eta, djm / eta, -1.0, 0.0],
        ],
        dtype=complex,
    )
    rhs = np.array(
        [
            [j1, 0.0],
            [0.0, dj],
            [0.0, j1],
            [dj, 0.0],
        ],
        dtype=complex,
    )
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError(f"Mie boundary system is singular at kR={x}", argument=x) from exc
    if not np.all(np.isfinite(solution)):
        raise NumericFailureError(f"Mie boundary system produced non-finite values at kR={x}", argument=x)

    s_te, t_te = solution[2, 0] / dh, solution[3, 0] / dh
    s_tm, t_tm = solution[2, 1] / dh, solution[3, 1] / dh
    if sample.kappa == 0:
        # no TE-TM mixing without chirality; the solve leaves roundoff here
        t_te = s_tm = 0j
    return MieDipoleCoefficients(
        a1=complex(-t_tm),
        b1=complex(-s_te),
        c1=complex(-1j * t_te),
        size_parameter=x,
        c1_reciprocal=complex(-1j * s_tm),
    )


def _mie_volumes(spec: ParticleSpec, omega: float, constants: PhysicalConstants) -> Volumes:
    coeffs = mie_dipole_coefficients(spec, omega, constants)
    k3 = (omega / constants.c) ** 3
    factor = 6.0 * math.pi / k3
    return 1j * factor * coeffs.a1, 1j * factor * coeffs.b1, factor * coeffs.c1


def mie_dipole_polarizabilities(
    spec: ParticleSpec, omega: float, constants: PhysicalConstants = CODATA_2018
) -> PolarizabilitySet:
    volumes = _mie_volumes(spec, omega, constants)
    return PolarizabilitySet.from_volumes(*volumes, float(omega), PolarizabilityModel.MIE_DIPOLE, constants)


# ==============================================================================
# Dispatch
# ==============================================================================

def _positive_volumes(spec: ParticleSpec, omega: float, model: PolarizabilityModel, constants) -> Volumes:
    if model is PolarizabilityModel.MIE_DIPOLE:
        return _mie_volumes(spec, omega, constants)
    sample = eval_dispersion(spec.material, omega)
    volumes = _static_volumes(spec.radius, sample.eps, sample.mu, sample.kappa)
    if model is PolarizabilityModel.QUASI_STATIC_RC:
        s, _ = _radiation_strength(omega, constants)
        volumes, _ = _dressed_volumes(volumes, s)
    return volumes


def polarizability_at(
    spec: ParticleSpec,
    omega: float,
    model: PolarizabilityModel = PolarizabilityModel.MIE_DIPOLE,
    constants: PhysicalConstants = CODATA_2018,
) -> PolarizabilitySet:
    """Response at a signed frequency under the chosen model."""
    model = PolarizabilityModel(model)
    omega = float(omega)
    if not math.isfinite(omega):
        raise DomainError(f"frequency must be finite, got {omega}")
    if omega == 0.0:
        sample = eval_dispersion(spec.material, 0.0)
        volume_e, volume_m, _ = _static_volumes(spec.radius, sample.eps, sample.mu, sample.kappa)
        return PolarizabilitySet.from_volumes(volume_e, volume_m, 0j, 0.0, model, constants)
    volumes = _positive_volumes(spec, abs(omega), model, constants)
    result = PolarizabilitySet.from_volumes(*volumes, abs(omega), model, constants)
    return result.reflected() if omega < 0.0 else result


def upsilon(p: PolarizabilitySet) -> complex:
    """alpha_e/eps0 + alpha_m/mu0, a complex volume."""
    return p.volume_e + p.volume_m


def _mie_step(spec: ParticleSpec, omega: float) -> float:
    widths = [r.gamma for r in spec.material.resonances if r.gamma > 0.0]
    step = 1e-2 * omega
    if widths:
        step = min(step, 0.25 * min(widths))
    return step


def polarizability_derivative(
    spec: ParticleSpec,
    omega: float,
    model: PolarizabilityModel = PolarizabilityModel.MIE_DIPOLE,
    constants: PhysicalConstants = CODATA_2018,
) -> Volumes:
    """
    d/domega of (alpha_e, alpha_m, chi) at omega > 0, in the units of PolarizabilitySet per rad/s.
    """
    model = PolarizabilityModel(model)
    if not omega > 0.0:
        raise DomainError(f"polarizability derivative needs omega > 0, got {omega}")

    if model is PolarizabilityModel.MIE_DIPOLE:
        func: Callable[[float], np.ndarray] = lambda w: np.array(_mie_volumes(spec, w, constants))
        d_volumes, _ = ridders_derivative(func, omega, _mie_step(spec, omega))
        d_volumes = tuple(complex(v) for v in d_volumes)
    else:
        d_volumes = _static_volume_derivatives(spec, omega)
        if model is PolarizabilityModel.QUASI_STATIC_RC:
            sample = eval_dispersion(spec.material, omega)
            volumes = _static_volumes(spec.radius, sample.eps, sample.mu, sample.kappa)
            s, ds = _radiation_strength(omega, constants)
            d_volumes = _dressed_volume_derivatives(volumes, d_volumes, s, ds)

    d_e, d_m, d_x = d_volumes
    return constants.eps0 * d_e, constants.mu0 * d_m, d_x / constants.c


def resonance_linewidth(
    spec: ParticleSpec,
    model: PolarizabilityModel,
    omega_lo: float,
    omega_hi: float,
    points: int = 801,
    constants: PhysicalConstants = CODATA_2018,
) -> Tuple[float, float]:
    """
    Peak frequency and full width at half maximum of Im(alpha_e) on [omega_lo, omega_hi].

    Half-maximum crossings are located by linear interpolation on the grid.
    """
    if not 0.0 < omega_lo < omega_hi:
        raise DomainError("need 0 < omega_lo < omega_hi")
    grid = np.linspace(omega_lo, omega_hi, points)
    values = np.array([polarizability_at(spec, w, model, constants).volume_e.imag for w in grid])
    i_peak = int(np.argmax(values))
    half = 0.5 * values[i_peak]

    def crossing(indices) -> float:
        previous = i_peak
        for i in indices:
            if values[i] <= half:
                frac = (values[previous] - half) / (values[previous] - values[i])
                return grid[previous] + frac * (grid[i] - grid[previous])
            previous = i
        raise DomainError("half maximum not reached inside the window; widen it")

    left = crossing(range(i_peak - 1, -1, -1))
    right = crossing(range(i_peak + 1, points))
    return float(grid[i_peak]), float(right - left)
