import math

import pytest

from ccthrust.physics.materials import base_material
from ccthrust.schemas import (
    DiffMode,
    ParticleSpec,
    PolarizabilityModel,
    QuadratureSettings,
    RunContext,
)

OMEGA0 = 1.8713e12
ROT_10KHZ = 2.0 * math.pi * 1.0e4


@pytest.fixture
def material():
    return base_material()


@pytest.fixture
def particle(material):
    return ParticleSpec(radius=50e-6, material=material)


@pytest.fixture
def fast_quadrature():
    return QuadratureSettings(rel_tol=1e-7)


@pytest.fixture
def base_ctx(particle, fast_quadrature):
    """R = 50 um, 10 kHz, 300 K, radiation-corrected quasi-static response."""
    return RunContext(
        particle=particle,
        Omega=ROT_10KHZ,
        T_env=300.0,
        T_particle=300.0,
        pol_model=PolarizabilityModel.QUASI_STATIC_RC,
        diff_mode=DiffMode.AUTO,
        quadrature=fast_quadrature,
    )


@pytest.fixture
def mie_ctx(base_ctx):
    return RunContext(
        particle=base_ctx.particle,
        Omega=base_ctx.Omega,
        T_env=300.0,
        T_particle=300.0,
        pol_model=PolarizabilityModel.MIE_DIPOLE,
        quadrature=QuadratureSettings(rel_tol=1e-6),
    )
