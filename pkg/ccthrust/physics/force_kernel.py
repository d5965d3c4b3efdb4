"""
Spectral densities of the thrust force on a rotating chiral particle.

The rotation splits each frequency into w+ = w + Omega and w- = w - Omega.
Three contributions are integrated along the rotation axis:

    dip+pmfl   (hbar w^4 / 3 pi^2 c^3)  Im[chi(w+)(2N1(w+) + N0(w)) - chi(w-)(2N1(w-) + N0(w))]
    pfl+mfl   -(hbar w^7 / 18 pi^3 c^6) [ImY Imchi N1](w+) - [ImY Imchi N1](w-)
    Efl+Hfl    (hbar w^7 / 18 pi^3 c^6) N0(w) Re[Y chi*(w+) - Y chi*(w-)]

with N1 at the particle temperature and N0 at the field temperature.
Brackets are either differenced exactly (with an exact floating-point
expansion) or replaced by 2*Omega times the derivative of the kernel.
"""

from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from ..errors import CcthrustError, DomainError, PoleError
from ..schemas import (
    DiffMode,
    ForceBreakdown,
    LorentzResonance,
    Occupation,
    ParticleSpec,
    PhysicalConstants,
    PolarizabilityModel,
    RunContext,
    SpectralSample,
)
from ..utils import compensated_sum
from .materials import CODATA_2018
from .polarizability import polarizability_at, polarizability_derivative, resonance_linewidth, upsilon
from .quadrature import auto_breakpoints, integrate_interval

logger = logging.getLogger(__name__)

# exponents above this give a vanishing Bose factor
_EXP_CUTOFF = 700.0
# exact differencing cannot resolve brackets below this many ulps of the kernel
_EXACT_NOISE_ULPS = 16.0
# grid points for the linewidth that sizes the integration window
_LINEWIDTH_POINTS = 801


# ==============================================================================
# Occupation numbers
# ==============================================================================

def _reduced_energy(omega: float, T: float, constants: PhysicalConstants) -> float:
    return constants.hbar * abs(omega) / (constants.k_B * T)


def photon_number(omega: float, T: float, constants: PhysicalConstants = CODATA_2018) -> float:
    """N_T(w) = 1/2 coth(hbar w / 2 k_B T), odd in w."""
    omega = float(omega)
    if T < 0.0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    if omega == 0.0:
        if T > 0.0:
            raise PoleError("photon number diverges at omega = 0 for T > 0")
        return 0.0
    sign = math.copysign(1.0, omega)
    if T == 0.0:
        return 0.5 * sign
    x = _reduced_energy(omega, T, constants)
    if x > _EXP_CUTOFF:
        return 0.5 * sign
    return 0.5 * sign / math.tanh(0.5 * x)


def thermal_occupation(omega: float, T: float, constants: PhysicalConstants = CODATA_2018) -> float:
    """Bose part sgn(w)/(exp(hbar|w|/k_B T) - 1); zero for T = 0."""
    omega = float(omega)
    if T < 0.0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    if omega == 0.0:
        if T > 0.0:
            raise PoleError("thermal occupation diverges at omega = 0 for T > 0")
        return 0.0
    if T == 0.0:
        return 0.0
    x = _reduced_energy(omega, T, constants)
    if x > _EXP_CUTOFF:
        return 0.0
    return math.copysign(1.0, omega) / math.expm1(x)


def occupation(
    omega: float, T: float, part: Occupation = Occupation.FULL, constants: PhysicalConstants = CODATA_2018
) -> float:
    if part is Occupation.THERMAL:
        return thermal_occupation(omega, T, constants)
    if part is Occupation.VACUUM:
        return 0.0 if omega == 0.0 else math.copysign(0.5, omega)
    return photon_number(omega, T, constants)


def occupation_derivative(
    omega: float, T: float, part: Occupation = Occupation.FULL, constants: PhysicalConstants = CODATA_2018
) -> float:
    """d/dw of the selected occupation; the zero-point step contributes nothing away from 0."""
    if omega == 0.0:
        raise PoleError("occupation derivative is singular at omega = 0")
    if part is Occupation.VACUUM or T == 0.0:
        return 0.0
    x = _reduced_energy(omega, T, constants)
    if x > _EXP_CUTOFF:
        return 0.0
    s = math.sinh(0.5 * x)
    return -(constants.hbar / (constants.k_B * T)) / (4.0 * s * s)


def split_frequencies(omega: float, Omega: float) -> Tuple[float, float]:
    return omega + Omega, omega - Omega


# ==============================================================================
# Prefactors
# ==============================================================================

def _dipole_prefactor(omega: float, k: PhysicalConstants) -> float:
    return k.hbar * omega ** 4 / (3.0 * math.pi ** 2 * k.c ** 3)


def _interaction_prefactor(omega: float, k: PhysicalConstants) -> float:
    return k.hbar * omega ** 7 / (18.0 * math.pi ** 3 * k.c ** 6)


# ==============================================================================
# Exact brackets
# ==============================================================================

def _side(ctx: RunContext, w: float, part: Occupation):
    """(chi, Y, N1) at one split frequency; the w = 0 point contributes nothing."""
    if w == 0.0:
        return 0j, 0j, 0.0
    p = polarizability_at(ctx.particle, w, ctx.pol_model, ctx.constants)
    return p.chi, upsilon(p), occupation(w, ctx.T_particle, part, ctx.constants)


def _thermally_negligible(ctx: RunContext, omega: float, part: Occupation) -> bool:
    if part is not Occupation.THERMAL:
        return False
    if ctx.T_max == 0.0:
        return True
    lowest = max(omega - abs(ctx.Omega), 0.0)
    return lowest > 0.0 and _reduced_energy(lowest, ctx.T_max, ctx.constants) > _EXP_CUTOFF


def _exact_sample(ctx: RunContext, omega: float, part: Occupation) -> SpectralSample:
    w_plus, w_minus = split_frequencies(omega, ctx.Omega)
    chi_p, ups_p, n1_p = _side(ctx, w_plus, part)
    chi_m, ups_m, n1_m = _side(ctx, w_minus, part)
    n0 = occupation(omega, ctx.T_env, part, ctx.constants)

    dip = compensated_sum((
        chi_p.imag * (2.0 * n1_p),
        chi_p.imag * n0,
        -(chi_m.imag * (2.0 * n1_m)),
        -(chi_m.imag * n0),
    ))
    pfl = compensated_sum((
        ups_p.imag * chi_p.imag * n1_p,
        -(ups_m.imag * chi_m.imag * n1_m),
    ))
    efl = compensated_sum((
        ups_p.real * chi_p.real,
        ups_p.imag * chi_p.imag,
        -(ups_m.real * chi_m.real),
        -(ups_m.imag * chi_m.imag),
    ))
    k = ctx.constants
    return SpectralSample.from_components(
        omega,
        _dipole_prefactor(omega, k) * dip,
        -_interaction_prefactor(omega, k) * pfl,
        _interaction_prefactor(omega, k) * (n0 * efl),
    )


# ==============================================================================
# Linearized brackets
# ==============================================================================

def _linear_sample(ctx: RunContext, omega: float, part: Occupation) -> SpectralSample:
    k = ctx.constants
    p = polarizability_at(ctx.particle, omega, ctx.pol_model, k)
    d_alpha_e, d_alpha_m, d_chi = polarizability_derivative(ctx.particle, omega, ctx.pol_model, k)
    chi, ups = p.chi, upsilon(p)
    d_ups = d_alpha_e / k.eps0 + d_alpha_m / k.mu0

    n1 = occupation(omega, ctx.T_particle, part, k)
    dn1 = occupation_derivative(omega, ctx.T_particle, part, k)
    n0 = occupation(omega, ctx.T_env, part, k)

    d_dip = d_chi.imag * (2.0 * n1 + n0) + chi.imag * (2.0 * dn1)
    d_pfl = (d_ups.imag * chi.imag + ups.imag * d_chi.imag) * n1 + ups.imag * chi.imag * dn1
    d_efl = n0 * (d_ups * chi.conjugate() + ups * d_chi.conjugate()).real

    two_omega = 2.0 * ctx.Omega
    return SpectralSample.from_components(
        omega,
        _dipole_prefactor(omega, k) * (two_omega * d_dip),
        -_interaction_prefactor(omega, k) * (two_omega * d_pfl),
        _interaction_prefactor(omega, k) * (two_omega * d_efl),
    )


# ==============================================================================
# Public integrands
# ==============================================================================

def _check_omega(omega: float) -> float:
    omega = float(omega)
    if not (math.isfinite(omega) and omega > 0.0):
        raise DomainError(f"integrands are defined for omega > 0, got {omega}")
    return omega


def spectral_sample(
    ctx: RunContext, omega: float, part: Occupation = Occupation.FULL, mode: Optional[DiffMode] = None
) -> SpectralSample:
    """All three densities at omega with the requested differencing mode (ctx mode by default)."""
    omega = _check_omega(omega)
    if ctx.Omega == 0.0 or _thermally_negligible(ctx, omega, part):
        return SpectralSample.zero(omega)
    mode = ctx.resolved_diff_mode() if mode in (None, DiffMode.AUTO) else mode
    if mode is DiffMode.LINEARIZED:
        return _linear_sample(ctx, omega, part)
    return _exact_sample(ctx, omega, part)


def integrand_dip_pmfl(ctx: RunContext, omega: float, part: Occupation = Occupation.FULL) -> float:
    return spectral_sample(ctx, omega, part).d_dip_pmfl


def integrand_pfl_mfl(ctx: RunContext, omega: float, part: Occupation = Occupation.FULL) -> float:
    return spectral_sample(ctx, omega, part).d_pfl_mfl


def integrand_Efl_Hfl(ctx: RunContext, omega: float, part: Occupation = Occupation.FULL) -> float:
    return spectral_sample(ctx, omega, part).d_Efl_Hfl


def integrand_total(ctx: RunContext, omega: float, part: Occupation = Occupation.FULL) -> SpectralSample:
    return spectral_sample(ctx, omega, part)


def linearized_integrands(ctx: RunContext, omega: float, part: Occupation = Occupation.FULL) -> SpectralSample:
    return spectral_sample(ctx, omega, part, DiffMode.LINEARIZED)


# ==============================================================================
# Diagnostics
# ==============================================================================

def spin_force_coefficients(
    spec: ParticleSpec,
    omega: float,
    model: PolarizabilityModel = PolarizabilityModel.MIE_DIPOLE,
    constants: PhysicalConstants = CODATA_2018,
) -> Tuple[float, float]:
    """(gamma_e, gamma_m): electric and magnetic spin-force coefficients."""
    omega = _check_omega(omega)
    p = polarizability_at(spec, omega, model, constants)
    radiative = omega ** 4 / (3.0 * constants.c ** 3)
    spin = -2.0 * omega * p.chi.imag
    gamma_e = spin + radiative / constants.eps0 * (p.alpha_e * p.chi.conjugate()).real
    gamma_m = spin + radiative / constants.mu0 * (p.alpha_m * p.chi.conjugate()).real
    return gamma_e, gamma_m


def eq1_terms(ctx: RunContext, omega: float) -> Tuple[float, float]:
    """Spin term and interaction term of the single-frequency thrust estimate."""
    omega = _check_omega(omega)
    k = ctx.constants
    p = polarizability_at(ctx.particle, omega, ctx.pol_model, k)
    n0 = photon_number(omega, ctx.T_env, k)
    spin = k.hbar * omega ** 4 / (math.pi ** 2 * k.c ** 3) * p.chi.imag * n0
    interaction = -k.hbar * omega ** 7 / (6.0 * math.pi ** 2 * k.c ** 6) * (upsilon(p) * p.chi.conjugate()).real * n0
    return spin, interaction


def estimate_integrand_eq1(ctx: RunContext, omega: float) -> float:
    spin, interaction = eq1_terms(ctx, omega)
    return spin + interaction


# ==============================================================================
# Integrated force
# ==============================================================================

def _exact_mode_settings(ctx: RunContext):
    settings = ctx.quadrature
    floor = _EXACT_NOISE_ULPS * np.finfo(float).eps * ctx.particle.material.max_omega0 / abs(ctx.Omega)
    if floor > settings.rel_tol:
        logger.warning(
            "exact differencing cannot reach rel_tol=%.1e at Omega=%.3e rad/s; using %.1e",
            settings.rel_tol, ctx.Omega, floor,
        )
        settings = replace(settings, rel_tol=floor)
    return settings


def effective_linewidth(ctx: RunContext, res: LorentzResonance) -> float:
    """FWHM of Im(alpha_e) around one resonance under the context's model; gamma if it cannot be measured."""
    if not res.gamma > 0.0:
        return 1e-3 * res.omega0
    try:
        _, width = resonance_linewidth(
            ctx.particle, ctx.pol_model, 0.5 * res.omega0, 1.5 * res.omega0, _LINEWIDTH_POINTS, ctx.constants
        )
    except CcthrustError as e:
        logger.debug("linewidth of the %.4e rad/s resonance not measurable (%s); using gamma", res.omega0, e)
        return res.gamma
    return width if width > 0.0 else res.gamma


def resonance_window(ctx: RunContext) -> Tuple[float, float]:
    """
    Frequency window the force is integrated over.

    Each resonance contributes [w0 - D, w0 + D] with D = min(window_linewidths * FWHM, w0);
    the window is the hull of these intervals.
    """
    lo, hi = math.inf, 0.0
    for res in ctx.particle.material.resonances:
        half = min(ctx.quadrature.window_linewidths * effective_linewidth(ctx, res), res.omega0)
        lo, hi = min(lo, res.omega0 - half), max(hi, res.omega0 + half)
    return lo, hi


def compute_force(ctx: RunContext) -> ForceBreakdown:
    """
    Integrate the three densities over the resonance window.

    Thermal and zero-point occupation share the window, so both parts are
    integrated in one pass with the full N.
    """
    mode = ctx.resolved_diff_mode()
    if ctx.Omega == 0.0 or not ctx.particle.material.is_chiral:
        return ForceBreakdown.zero(mode)

    settings = _exact_mode_settings(ctx) if mode is DiffMode.EXACT else ctx.quadrature
    lo, hi = resonance_window(ctx)
    edges = [lo] + [b for b in auto_breakpoints(ctx, settings) if lo < b < hi] + [hi]
    logger.debug("integration window [%.6e, %.6e] rad/s with %d panels", lo, hi, len(edges) - 1)

    result = integrate_interval(
        lambda w: spectral_sample(ctx, w, Occupation.FULL, mode).as_array(), edges, settings
    )
    dip, pfl, efl = (float(v) for v in result.value)
    breakdown = ForceBreakdown(
        f_dip_pmfl=dip,
        f_int_pfl_mfl=pfl,
        f_int_Efl_Hfl=efl,
        f_tot=dip + pfl + efl,
        est_abs_error=float(np.sum(result.abs_error_estimate)),
        mode_used=mode,
        evaluations=result.evaluations,
        subdivisions=result.subdivisions,
    )
    logger.debug(
        "force: dip=%.6e pfl=%.6e efl=%.6e tot=%.6e err=%.2e (%s, %d evaluations)",
        dip, pfl, efl, breakdown.f_tot, breakdown.est_abs_error, mode.value, result.evaluations,
    )
    return breakdown
