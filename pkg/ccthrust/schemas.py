"""
Shared data model for ccthrust.

Plain dataclasses and string enums used by the physics kernels, the
services and the output layer. Physics values are frozen; result
containers that get assembled row by row are not.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigurationError, DomainError


# ==============================================================================
# 🏷️ Enumerations
# ==============================================================================

class DampingConvention(str, Enum):
    """Which frequency multiplies gamma in the Lorentz denominator."""

    GAMMA_OMEGA = "gamma_omega"
    GAMMA_OMEGA0 = "gamma_omega0"


class PolarizabilityModel(str, Enum):
    QUASI_STATIC = "quasi_static"
    QUASI_STATIC_RC = "quasi_static_rc"
    MIE_DIPOLE = "mie_dipole"

    @classmethod
    def from_cli(cls, name: str) -> "PolarizabilityModel":
        aliases = {
            "mie": cls.MIE_DIPOLE,
            "quasistatic": cls.QUASI_STATIC,
            "quasistatic-rc": cls.QUASI_STATIC_RC,
        }
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(f"unknown polarizability model '{name}'", key="pol_mode") from None


class DiffMode(str, Enum):
    EXACT = "exact"
    LINEARIZED = "linearized"
    AUTO = "auto"

    @classmethod
    def from_cli(cls, name: str) -> "DiffMode":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigurationError(f"unknown differencing mode '{name}'", key="diff_mode") from None


class Occupation(str, Enum):
    """Which part of N_T an integrand is weighted with."""

    FULL = "full"
    THERMAL = "thermal"
    VACUUM = "vacuum"


class SweepVariable(str, Enum):
    ROTATION = "rotation"
    TEMPERATURE = "temperature"
    OMEGA0 = "omega0"
    KAPPA_STRENGTH = "kappa_strength"
    RADIUS = "radius"

    @classmethod
    def from_cli(cls, name: str) -> "SweepVariable":
        aliases = {
            "rot": cls.ROTATION,
            "temp": cls.TEMPERATURE,
            "omega0": cls.OMEGA0,
            "kappa": cls.KAPPA_STRENGTH,
            "radius": cls.RADIUS,
        }
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(f"unknown sweep variable '{name}'", key="var") from None

    @property
    def column(self) -> str:
        return {
            SweepVariable.ROTATION: "rot_freq_hz",
            SweepVariable.TEMPERATURE: "temperature_k",
            SweepVariable.OMEGA0: "omega0_hz",
            SweepVariable.KAPPA_STRENGTH: "kappa_strength",
            SweepVariable.RADIUS: "radius_m",
        }[self]


class Spacing(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class TemperatureTarget(str, Enum):
    BOTH = "both"
    ENV = "env"
    PARTICLE = "particle"


# ==============================================================================
# 📦 Material and particle models
# ==============================================================================

@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 exact and recommended values (SI)."""

    hbar: float = 1.054571817e-34
    k_B: float = 1.380649e-23
    c: float = 299792458.0
    eps0: float = 8.8541878128e-12
    mu0: float = 1.25663706212e-6


@dataclass(frozen=True)
class LorentzResonance:
    """One Lorentz/Condon oscillator term of the material response."""

    omega0: float
    gamma: float
    strength_e: float
    strength_m: float
    strength_kappa: float

    def __post_init__(self):
        values = (self.omega0, self.gamma, self.strength_e, self.strength_m, self.strength_kappa)
        if not all(math.isfinite(v) for v in values):
            raise DomainError(f"resonance parameters must be finite: {values}")
        if self.omega0 <= 0.0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")
        if self.gamma < 0.0:
            raise DomainError(f"gamma must be non-negative, got {self.gamma}")

    @classmethod
    def from_relative_damping(
        cls,
        omega0: float,
        gamma_rel: float,
        strength_e: float,
        strength_m: float,
        strength_kappa: float,
    ) -> "LorentzResonance":
        return cls(omega0, gamma_rel * omega0, strength_e, strength_m, strength_kappa)

    @property
    def gamma_rel(self) -> float:
        return self.gamma / self.omega0

    def rescaled(self, omega0: float, keep_relative_damping: bool = True) -> "LorentzResonance":
        gamma = self.gamma_rel * omega0 if keep_relative_damping else self.gamma
        return replace(self, omega0=omega0, gamma=gamma)


@dataclass(frozen=True)
class MaterialModel:
    """Background constants plus a sum of resonance terms."""

    eps_b: float
    mu_b: float
    resonances: Tuple[LorentzResonance, ...]
    damping_convention: DampingConvention = DampingConvention.GAMMA_OMEGA

    def __post_init__(self):
        if not (math.isfinite(self.eps_b) and math.isfinite(self.mu_b)):
            raise DomainError("eps_b and mu_b must be finite")
        if len(self.resonances) < 1:
            raise DomainError("a material needs at least one resonance term")
        object.__setattr__(self, "resonances", tuple(self.resonances))

    @property
    def primary(self) -> LorentzResonance:
        return self.resonances[0]

    @property
    def min_omega0(self) -> float:
        return min(r.omega0 for r in self.resonances)

    @property
    def max_omega0(self) -> float:
        return max(r.omega0 for r in self.resonances)

    @property
    def is_chiral(self) -> bool:
        return any(r.strength_kappa != 0.0 for r in self.resonances)

    def with_primary(self, resonance: LorentzResonance) -> "MaterialModel":
        return replace(self, resonances=(resonance,) + self.resonances[1:])

    def with_kappa_strength(self, strength_kappa: float) -> "MaterialModel":
        return self.with_primary(replace(self.primary, strength_kappa=strength_kappa))

    def mirrored(self) -> "MaterialModel":
        """Same material with every chirality strength negated."""
        flipped = tuple(replace(r, strength_kappa=-r.strength_kappa) for r in self.resonances)
        return replace(self, resonances=flipped)


@dataclass(frozen=True)
class DispersionSample:
    omega: float
    eps: complex
    mu: complex
    kappa: complex


@dataclass(frozen=True)
class ParticleSpec:
    radius: float
    material: MaterialModel

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise DomainError(f"radius must be positive and finite, got {self.radius}")


@dataclass(frozen=True)
class PolarizabilitySet:
    """
    Dipolar response at one signed frequency.

    alpha_e is in units of eps0*m^3, alpha_m in mu0*m^3 and chi in m^2*s,
    so alpha_e/eps0, alpha_m/mu0 and c*chi are complex volumes.
    """

    alpha_e: complex
    alpha_m: complex
    chi: complex
    omega: float
    model_tag: PolarizabilityModel
    constants: PhysicalConstants = field(default_factory=PhysicalConstants, repr=False)

    @classmethod
    def from_volumes(
        cls,
        volume_e: complex,
        volume_m: complex,
        chi_volume: complex,
        omega: float,
        model_tag: PolarizabilityModel,
        constants: PhysicalConstants,
    ) -> "PolarizabilitySet":
        return cls(
            alpha_e=constants.eps0 * volume_e,
            alpha_m=constants.mu0 * volume_m,
            chi=chi_volume / constants.c,
            omega=omega,
            model_tag=model_tag,
            constants=constants,
        )

    @property
    def volume_e(self) -> complex:
        return self.alpha_e / self.constants.eps0

    @property
    def volume_m(self) -> complex:
        return self.alpha_m / self.constants.mu0

    @property
    def chi_volume(self) -> complex:
        return self.chi * self.constants.c

    def reflected(self) -> "PolarizabilitySet":
        """Response at -omega from the reality conditions."""
        return replace(
            self,
            alpha_e=self.alpha_e.conjugate(),
            alpha_m=self.alpha_m.conjugate(),
            chi=-self.chi.conjugate(),
            omega=-self.omega,
        )


@dataclass(frozen=True)
class MieDipoleCoefficients:
    a1: complex
    b1: complex
    c1: complex
    size_parameter: float
    c1_reciprocal: complex = 0j


# ==============================================================================
# ⚙️ Run configuration
# ==============================================================================

@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    abs_tol_floor: float = 1e-40
    max_subdivisions: int = 2000
    tail_cut_multiplier: float = 40.0
    resonance_halfwidths: float = 8.0
    window_linewidths: float = 10.0

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_subdivisions < 8:
            raise DomainError("max_subdivisions must be at least 8")
        if not self.window_linewidths > 0.0:
            raise DomainError("window_linewidths must be positive")
        if not (self.tail_cut_multiplier > 0.0 and self.resonance_halfwidths > 0.0):
            raise DomainError("tail_cut_multiplier and resonance_halfwidths must be positive")


@dataclass(frozen=True)
class RunContext:
    particle: ParticleSpec
    Omega: float
    T_env: float
    T_particle: float
    pol_model: PolarizabilityModel = PolarizabilityModel.MIE_DIPOLE
    diff_mode: DiffMode = DiffMode.AUTO
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)

    # auto switches to the Taylor form below this fraction of the lowest omega0
    AUTO_LINEARIZE_RATIO = 1e-4

    def __post_init__(self):
        if not math.isfinite(self.Omega):
            raise DomainError("Omega must be finite")
        if not (self.T_env >= 0.0 and self.T_particle >= 0.0):
            raise DomainError(f"temperatures must be >= 0, got {self.T_env}, {self.T_particle}")

    def resolved_diff_mode(self) -> DiffMode:
        if self.diff_mode is not DiffMode.AUTO:
            return self.diff_mode
        threshold = self.AUTO_LINEARIZE_RATIO * self.particle.material.min_omega0
        return DiffMode.LINEARIZED if abs(self.Omega) < threshold else DiffMode.EXACT

    @property
    def T_max(self) -> float:
        return max(self.T_env, self.T_particle)

    def with_particle(self, particle: ParticleSpec) -> "RunContext":
        return replace(self, particle=particle)

    def with_material(self, material: MaterialModel) -> "RunContext":
        return replace(self, particle=replace(self.particle, material=material))


# ==============================================================================
# 📊 Results
# ==============================================================================

@dataclass(frozen=True)
class SpectralSample:
    omega: float
    d_dip_pmfl: float
    d_pfl_mfl: float
    d_Efl_Hfl: float
    d_tot: float

    @classmethod
    def from_components(cls, omega: float, d_dip_pmfl: float, d_pfl_mfl: float, d_Efl_Hfl: float) -> "SpectralSample":
        return cls(omega, d_dip_pmfl, d_pfl_mfl, d_Efl_Hfl, d_dip_pmfl + d_pfl_mfl + d_Efl_Hfl)

    @classmethod
    def zero(cls, omega: float) -> "SpectralSample":
        return cls(omega, 0.0, 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.d_dip_pmfl, self.d_pfl_mfl, self.d_Efl_Hfl])

    def to_row(self) -> Dict[str, float]:
        return {
            "omega_rad_s": self.omega,
            "dF_dip_pmfl_N_s": self.d_dip_pmfl,
            "dF_pfl_mfl_N_s": self.d_pfl_mfl,
            "dF_Efl_Hfl_N_s": self.d_Efl_Hfl,
            "dF_tot_N_s": self.d_tot,
        }


@dataclass(frozen=True)
class QuadratureResult:
    value: Any
    abs_error_estimate: Any
    evaluations: int
    subdivisions: int


@dataclass(frozen=True)
class ForceBreakdown:
    f_dip_pmfl: float
    f_int_pfl_mfl: float
    f_int_Efl_Hfl: float
    f_tot: float
    est_abs_error: float
    mode_used: DiffMode
    evaluations: int = 0
    subdivisions: int = 0

    @classmethod
    def zero(cls, mode_used: DiffMode) -> "ForceBreakdown":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, mode_used)

    def to_row(self) -> Dict[str, Any]:
        return {
            "f_dip_pmfl_N": self.f_dip_pmfl,
            "f_pfl_mfl_N": self.f_int_pfl_mfl,
            "f_Efl_Hfl_N": self.f_int_Efl_Hfl,
            "f_tot_N": self.f_tot,
            "abs_err_N": self.est_abs_error,
            "mode_used": self.mode_used.value,
            "evaluations": self.evaluations,
            "subdivisions": self.subdivisions,
        }


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    value_from: float
    value_to: float
    points: int
    spacing: Spacing
    base: RunContext
    freeze_gamma: bool = False
    temperature_target: TemperatureTarget = TemperatureTarget.BOTH

    def __post_init__(self):
        if self.points < 2:
            raise ConfigurationError("a sweep needs at least 2 points", key="points")
        if self.spacing is Spacing.LINEAR and not self.value_from < self.value_to:
            raise ConfigurationError("linear sweeps need from < to", key="from")
        if self.spacing is Spacing.LOG and not (0.0 < self.value_from and 0.0 < self.value_to):
            raise ConfigurationError("log sweeps need positive bounds", key="from")
        if self.spacing is Spacing.LOG and not self.value_from < self.value_to:
            raise ConfigurationError("log sweeps need from < to", key="from")

    def grid(self) -> np.ndarray:
        if self.spacing is Spacing.LOG:
            return np.geomspace(self.value_from, self.value_to, self.points)
        return np.linspace(self.value_from, self.value_to, self.points)


@dataclass
class SweepRow:
    value: float
    breakdown: Optional[ForceBreakdown] = None
    error: Optional[str] = None

    @property
    def converged(self) -> bool:
        return self.breakdown is not None

    def to_row(self, variable: SweepVariable) -> Dict[str, Any]:
        nan = float("nan")
        b = self.breakdown
        return {
            variable.column: self.value,
            "f_dip_pmfl_N": b.f_dip_pmfl if b else nan,
            "f_pfl_mfl_N": b.f_int_pfl_mfl if b else nan,
            "f_Efl_Hfl_N": b.f_int_Efl_Hfl if b else nan,
            "f_tot_N": b.f_tot if b else nan,
            "abs_err_N": b.est_abs_error if b else nan,
            "converged": self.converged,
            "error": self.error or "",
        }


@dataclass
class SweepMarkers:
    linear_fit: Optional[Dict[str, float]] = None
    zero_crossings: List[Dict[str, float]] = field(default_factory=list)
    extremum: Optional[Dict[str, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v not in (None, [])}


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: List[SweepRow]
    markers: SweepMarkers

    @property
    def all_failed(self) -> bool:
        return not any(r.converged for r in self.rows)


@dataclass
class TableEnvelope:
    """Machine-readable table: a kind, free-form metadata and ordered rows."""

    kind: str
    rows: List[Dict[str, Any]]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "metadata": self.metadata, "rows": self.rows}


__all__ = [
    "DampingConvention",
    "PolarizabilityModel",
    "DiffMode",
    "Occupation",
    "SweepVariable",
    "Spacing",
    "TemperatureTarget",
    "PhysicalConstants",
    "LorentzResonance",
    "MaterialModel",
    "DispersionSample",
    "ParticleSpec",
    "PolarizabilitySet",
    "MieDipoleCoefficients",
    "QuadratureSettings",
    "RunContext",
    "SpectralSample",
    "QuadratureResult",
    "ForceBreakdown",
    "SweepSpec",
    "SweepRow",
    "SweepMarkers",
    "SweepResult",
    "TableEnvelope",
]
