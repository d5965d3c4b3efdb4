"""
Force service module.
Builds run contexts from merged settings and runs single-point forces and spectra.
"""

import logging
import math
from dataclasses import replace
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from ccthrust.config import BaseConfig, as_bool, optional_float, require_float
from ccthrust.errors import ConfigurationError, DomainError
from ccthrust.physics.force_kernel import compute_force, integrand_total
from ccthrust.physics.polarizability import polarizability_at, upsilon
from ccthrust.repositories.material_repository import MaterialRepository
from ccthrust.schemas import (
    DampingConvention,
    DiffMode,
    ForceBreakdown,
    MaterialModel,
    ParticleSpec,
    PolarizabilityModel,
    QuadratureSettings,
    RunContext,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def _exclusive(settings: Mapping[str, Any], hz_key: str, rad_key: str) -> Optional[float]:
    """Angular frequency from either an ordinary (Hz) or an angular (rad/s) setting, not both."""
    hz = optional_float(settings, hz_key)
    rad = optional_float(settings, rad_key)
    if hz is not None and rad is not None:
        raise ConfigurationError(f"give only one of '{hz_key}' and '{rad_key}'", key=hz_key)
    if hz is not None:
        return TWO_PI * hz
    return rad


class ForceService:
    """
    Service for single-point force evaluations and spectra.
    Turns loosely typed settings into a validated RunContext.
    """

    def __init__(self, material_repository: MaterialRepository, config_class=BaseConfig):
        """
        Initialize the ForceService.

        Args:
            material_repository: reads material files (or supplies the default medium)
            config_class: config class providing run defaults
        """
        self.material_repository = material_repository
        self.config = config_class

    # ==========================================================================
    # 🧱 Context building
    # ==========================================================================

    def build_material(self, settings: Mapping[str, Any]) -> MaterialModel:
        """Material from file or default, with the primary-resonance overrides applied."""
        material = self.material_repository.load(settings.get("material"))

        convention = settings.get("damping_convention")
        if convention is not None:
            try:
                material = replace(material, damping_convention=DampingConvention(str(convention).strip().lower()))
            except ValueError:
                raise ConfigurationError(
                    f"unknown damping convention '{convention}'", key="damping_convention"
                ) from None

        try:
            omega0 = _exclusive(settings, "omega0_hz", "omega0_rad_s")
            if omega0 is not None:
                keep_relative = not as_bool(settings.get("freeze_gamma", False))
                material = material.with_primary(material.primary.rescaled(omega0, keep_relative))
            kappa = optional_float(settings, "kappa_strength")
            if kappa is not None:
                material = material.with_kappa_strength(kappa)
        except DomainError as e:
            raise ConfigurationError(str(e), key="omega0_hz") from e
        return material

    def build_quadrature(self, settings: Mapping[str, Any]) -> QuadratureSettings:
        rel_tol = require_float(settings, "rel_tol", self.config.REL_TOL)
        window = require_float(settings, "window_linewidths", QuadratureSettings.window_linewidths)
        if not window > 0.0:
            raise ConfigurationError(f"window_linewidths must be positive, got {window}", key="window_linewidths")
        try:
            return QuadratureSettings(rel_tol=rel_tol, window_linewidths=window)
        except DomainError as e:
            raise ConfigurationError(str(e), key="rel_tol") from e

    def build_context(self, settings: Mapping[str, Any]) -> RunContext:
        """
        Validated RunContext from merged settings.

        Raises:
            ConfigurationError: missing radius, malformed values or conflicting units
        """
        radius = require_float(settings, "radius_m")
        if not (math.isfinite(radius) and radius > 0.0):
            raise ConfigurationError(f"radius_m must be positive, got {radius}", key="radius_m")

        Omega = _exclusive(settings, "rot_freq_hz", "rot_omega_rad_s")
        if Omega is None:
            Omega = TWO_PI * self.config.ROT_FREQ_HZ
        if not math.isfinite(Omega):
            raise ConfigurationError("rotation frequency must be finite", key="rot_freq_hz")

        T_env = require_float(settings, "t_env_k", self.config.T_ENV_K)
        T_particle = require_float(settings, "t_particle_k", self.config.T_PARTICLE_K)
        for key, value in (("t_env_k", T_env), ("t_particle_k", T_particle)):
            if not (math.isfinite(value) and value >= 0.0):
                raise ConfigurationError(f"{key} must be a finite temperature >= 0, got {value}", key=key)

        pol_model = PolarizabilityModel.from_cli(str(settings.get("pol_mode", self.config.POL_MODE)))
        diff_mode = DiffMode.from_cli(str(settings.get("diff_mode", self.config.DIFF_MODE)))

        particle = ParticleSpec(radius=radius, material=self.build_material(settings))
        return RunContext(
            particle=particle,
            Omega=Omega,
            T_env=T_env,
            T_particle=T_particle,
            pol_model=pol_model,
            diff_mode=diff_mode,
            quadrature=self.build_quadrature(settings),
        )

    # ==========================================================================
    # 🚀 Runs
    # ==========================================================================

    def run_force(self, ctx: RunContext) -> ForceBreakdown:
        """Integrated thrust force with its components."""
        breakdown = compute_force(ctx)
        logger.info(
            "Force at R=%.3e m, Omega=%.4e rad/s, T=(%.1f, %.1f) K: tot=%.6e N "
            "(dip+pmfl %.6e, pfl+mfl %.6e, Efl+Hfl %.6e, err %.1e, %s, %d evaluations)",
            ctx.particle.radius, ctx.Omega, ctx.T_env, ctx.T_particle, breakdown.f_tot,
            breakdown.f_dip_pmfl, breakdown.f_int_pfl_mfl, breakdown.f_int_Efl_Hfl,
            breakdown.est_abs_error, breakdown.mode_used.value, breakdown.evaluations,
        )
        return breakdown

    def frequency_grid(self, ctx: RunContext, settings: Mapping[str, Any]) -> np.ndarray:
        """Grid from omega_min_rad_s / omega_max_rad_s / points / log, defaulting around the primary resonance."""
        omega0 = ctx.particle.material.primary.omega0
        lo = require_float(settings, "omega_min_rad_s", 0.5 * omega0)
        hi = require_float(settings, "omega_max_rad_s", 1.5 * omega0)
        points = int(require_float(settings, "points", 201))
        if not 0.0 < lo < hi:
            raise ConfigurationError(f"need 0 < omega_min < omega_max, got [{lo}, {hi}]", key="omega_min_rad_s")
        if points < 2:
            raise ConfigurationError("a spectrum needs at least 2 points", key="points")
        if as_bool(settings.get("log", False)):
            return np.geomspace(lo, hi, points)
        return np.linspace(lo, hi, points)

    def polarizability_spectrum(self, ctx: RunContext, grid: np.ndarray) -> List[Dict[str, float]]:
        rows = []
        for omega in grid:
            p = polarizability_at(ctx.particle, float(omega), ctx.pol_model, ctx.constants)
            ups = upsilon(p)
            rows.append({
                "omega_rad_s": float(omega),
                "alpha_e_re_m3": p.volume_e.real,
                "alpha_e_im_m3": p.volume_e.imag,
                "alpha_m_re_m3": p.volume_m.real,
                "alpha_m_im_m3": p.volume_m.imag,
                "chi_re_m2_s": p.chi.real,
                "chi_im_m2_s": p.chi.imag,
                "upsilon_re_m3": ups.real,
                "upsilon_im_m3": ups.imag,
            })
        logger.info("Polarizability spectrum: %d points, model %s", len(rows), ctx.pol_model.value)
        return rows

    def force_spectrum(self, ctx: RunContext, grid: np.ndarray) -> List[Dict[str, float]]:
        rows = [integrand_total(ctx, float(omega)).to_row() for omega in grid]
        logger.info("Force spectrum: %d points, mode %s", len(rows), ctx.resolved_diff_mode().value)
        return rows

    def run_spectrum(self, ctx: RunContext, grid: np.ndarray, kind: str = "spectrum") -> List[Dict[str, float]]:
        """Rows of a force spectrum, or of the dipolar response when kind is "polarizability"."""
        if kind == "polarizability":
            return self.polarizability_spectrum(ctx, grid)
        if kind != "spectrum":
            raise ConfigurationError(f"unknown spectrum kind '{kind}'", key="command")
        return self.force_spectrum(ctx, grid)

    def describe(self, ctx: RunContext) -> Dict[str, Any]:
        """Run parameters for table metadata."""
        primary = ctx.particle.material.primary
        return {
            "radius_m": ctx.particle.radius,
            "omega_rad_s": ctx.Omega,
            "t_env_k": ctx.T_env,
            "t_particle_k": ctx.T_particle,
            "pol_mode": ctx.pol_model.value,
            "diff_mode": ctx.resolved_diff_mode().value,
            "rel_tol": ctx.quadrature.rel_tol,
            "window_linewidths": ctx.quadrature.window_linewidths,
            "omega0_rad_s": primary.omega0,
            "gamma_rad_s": primary.gamma,
            "kappa_strength": primary.strength_kappa,
            "damping_convention": ctx.particle.material.damping_convention.value,
        }


# ==============================================================================
# 🎯 Service Factory Function
# ==============================================================================

def create_force_service(services: Dict[str, Any], config_class=BaseConfig) -> ForceService:
    """
    Factory function to create a ForceService from the services registry.

    Raises:
        RuntimeError: if the material repository has not been registered
    """
    repository = services.get("material_repository")
    if repository is None:
        raise RuntimeError(
            "MaterialRepository not found in services. "
            "Make sure it's initialized in create_services()."
        )
    return ForceService(material_repository=repository, config_class=config_class)
