"""
Dispersive response of the chiral metamaterial.

eps and mu follow Lorentz oscillators, kappa the Condon form. Negative
frequencies are served from the reality conditions
eps(-w) = conj(eps(w)), mu(-w) = conj(mu(w)), kappa(-w) = -conj(kappa(w)).
"""

from __future__ import annotations

import math
from typing import Tuple

from ..errors import DomainError
from ..schemas import (
    DampingConvention,
    DispersionSample,
    LorentzResonance,
    MaterialModel,
    PhysicalConstants,
)

CODATA_2018 = PhysicalConstants()

# Omega-particle defaults
BASE_OMEGA0 = 1.8713e12
BASE_GAMMA_REL = 0.05463
BASE_EPS_B = 3.1736
BASE_MU_B = 0.9798
BASE_STRENGTH_E = 0.1560
BASE_STRENGTH_M = 0.0625
BASE_STRENGTH_KAPPA = 0.0993


def base_material(
    omega0: float = BASE_OMEGA0,
    damping_convention: DampingConvention = DampingConvention.GAMMA_OMEGA,
) -> MaterialModel:
    """Single-resonance Omega-particle medium."""
    resonance = LorentzResonance.from_relative_damping(
        omega0, BASE_GAMMA_REL, BASE_STRENGTH_E, BASE_STRENGTH_M, BASE_STRENGTH_KAPPA
    )
    return MaterialModel(BASE_EPS_B, BASE_MU_B, (resonance,), damping_convention)


def _check_frequency(omega: float) -> float:
    omega = float(omega)
    if not math.isfinite(omega):
        raise DomainError(f"frequency must be finite, got {omega}")
    return omega


def _denominator(res: LorentzResonance, omega: float, convention: DampingConvention) -> complex:
    damping = res.omega0 if convention is DampingConvention.GAMMA_OMEGA0 else omega
    return complex(res.omega0 * res.omega0 - omega * omega, -res.gamma * damping)


def _denominator_slope(res: LorentzResonance, omega: float, convention: DampingConvention) -> complex:
    if convention is DampingConvention.GAMMA_OMEGA0:
        return complex(-2.0 * omega, 0.0)
    return complex(-2.0 * omega, -res.gamma)


def _positive_branch(material: MaterialModel, omega: float) -> Tuple[complex, complex, complex]:
    eps = complex(material.eps_b)
    mu = complex(material.mu_b)
    kappa = 0j
    for res in material.resonances:
        inv = 1.0 / _denominator(res, omega, material.damping_convention)
        w0sq = res.omega0 * res.omega0
        eps += res.strength_e * w0sq * inv
        mu += res.strength_m * w0sq * inv
        kappa += res.strength_kappa * res.omega0 * omega * inv
    return eps, mu, kappa


def eval_dispersion(material: MaterialModel, omega: float) -> DispersionSample:
    """eps, mu and kappa at one signed frequency."""
    omega = _check_frequency(omega)
    eps, mu, kappa = _positive_branch(material, abs(omega))
    if omega < 0.0:
        eps, mu, kappa = eps.conjugate(), mu.conjugate(), -kappa.conjugate()
    return DispersionSample(omega=omega, eps=eps, mu=mu, kappa=kappa)


def eval_epsilon(material: MaterialModel, omega: float) -> complex:
    return eval_dispersion(material, omega).eps


def eval_mu(material: MaterialModel, omega: float) -> complex:
    return eval_dispersion(material, omega).mu


def eval_kappa(material: MaterialModel, omega: float) -> complex:
    return eval_dispersion(material, omega).kappa


def eval_dispersion_derivatives(material: MaterialModel, omega: float) -> Tuple[complex, complex, complex]:
    """
    Analytic d/domega of (eps, mu, kappa).

    Defined for omega >= 0; negative frequencies follow by differentiating
    the reality conditions.
    """
    omega = _check_frequency(omega)
    w = abs(omega)
    d_eps = d_mu = d_kappa = 0j
    for res in material.resonances:
        den = _denominator(res, w, material.damping_convention)
        slope = _denominator_slope(res, w, material.damping_convention)
        inv = 1.0 / den
        inv_slope = -slope * inv * inv
        w0sq = res.omega0 * res.omega0
        d_eps += res.strength_e * w0sq * inv_slope
        d_mu += res.strength_m * w0sq * inv_slope
        d_kappa += res.strength_kappa * res.omega0 * (inv + w * inv_slope)
    if omega < 0.0:
        # f(-w) = conj f(w) gives f'(-w) = -conj f'(w); kappa carries one more sign
        return -d_eps.conjugate(), -d_mu.conjugate(), d_kappa.conjugate()
    return d_eps, d_mu, d_kappa
