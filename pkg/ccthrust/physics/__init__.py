"""Numerical core: material dispersion, dipole response, force densities and quadrature."""

from .force_kernel import (
    compute_force,
    estimate_integrand_eq1,
    integrand_dip_pmfl,
    integrand_Efl_Hfl,
    integrand_pfl_mfl,
    integrand_total,
    linearized_integrands,
    photon_number,
    resonance_window,
    spin_force_coefficients,
    split_frequencies,
)
from .materials import CODATA_2018, base_material, eval_dispersion, eval_dispersion_derivatives
from .polarizability import (
    mie_dipole_coefficients,
    mie_dipole_polarizabilities,
    polarizability_at,
    polarizability_derivative,
    quasi_static_polarizabilities,
    radiative_correction,
    upsilon,
)
from .quadrature import auto_breakpoints, integrate_half_line, integrate_interval

# Exported interface
__all__ = [
    "CODATA_2018",
    "base_material",
    "eval_dispersion",
    "eval_dispersion_derivatives",
    "quasi_static_polarizabilities",
    "radiative_correction",
    "mie_dipole_coefficients",
    "mie_dipole_polarizabilities",
    "polarizability_at",
    "polarizability_derivative",
    "upsilon",
    "photon_number",
    "split_frequencies",
    "integrand_dip_pmfl",
    "integrand_pfl_mfl",
    "integrand_Efl_Hfl",
    "integrand_total",
    "linearized_integrands",
    "spin_force_coefficients",
    "estimate_integrand_eq1",
    "compute_force",
    "resonance_window",
    "auto_breakpoints",
    "integrate_half_line",
    "integrate_interval",
]
