import math

import numpy as np
import pytest

import ccthrust.services.sweep_service as sweep_module
from ccthrust.errors import ConfigurationError, ConvergenceFailure
from ccthrust.repositories.material_repository import MaterialRepository
from ccthrust.schemas import (
    DiffMode,
    ForceBreakdown,
    Spacing,
    SweepSpec,
    SweepVariable,
    TemperatureTarget,
)
from ccthrust.services.force_service import ForceService
from ccthrust.services.sweep_service import SweepService, context_for

from .conftest import OMEGA0


@pytest.fixture
def service():
    return SweepService(ForceService(MaterialRepository()), workers=1)


def _breakdown(f_tot):
    return ForceBreakdown(f_tot, 0.0, 0.0, f_tot, 0.0, DiffMode.LINEARIZED)


def _spec(base_ctx, variable, lo, hi, points, **kwargs):
    return SweepSpec(
        variable=variable, value_from=lo, value_to=hi, points=points,
        spacing=kwargs.pop("spacing", Spacing.LINEAR), base=base_ctx, **kwargs,
    )


# ==============================================================================
# context_for
# ==============================================================================

def test_rotation_in_hz(base_ctx):
    spec = _spec(base_ctx, SweepVariable.ROTATION, 1e3, 1e4, 2)
    assert context_for(spec, 5e3).Omega == pytest.approx(2 * math.pi * 5e3)


@pytest.mark.parametrize(
    "target, expected",
    [(TemperatureTarget.BOTH, (40.0, 40.0)), (TemperatureTarget.ENV, (40.0, 300.0)), (TemperatureTarget.PARTICLE, (300.0, 40.0))],
)
def test_temperature_target(base_ctx, target, expected):
    spec = _spec(base_ctx, SweepVariable.TEMPERATURE, 0.0, 300.0, 2, temperature_target=target)
    ctx = context_for(spec, 40.0)
    assert (ctx.T_env, ctx.T_particle) == expected


def test_omega0_keeps_relative_damping(base_ctx):
    spec = _spec(base_ctx, SweepVariable.OMEGA0, 1e14, 2e14, 2)
    primary = context_for(spec, 2e14).particle.material.primary
    assert primary.omega0 == pytest.approx(2 * math.pi * 2e14)
    assert primary.gamma_rel == pytest.approx(base_ctx.particle.material.primary.gamma_rel)


def test_omega0_with_frozen_gamma(base_ctx):
    spec = _spec(base_ctx, SweepVariable.OMEGA0, 1e14, 2e14, 2, freeze_gamma=True)
    primary = context_for(spec, 2e14).particle.material.primary
    assert primary.gamma == base_ctx.particle.material.primary.gamma


def test_kappa_and_radius(base_ctx):
    kappa = _spec(base_ctx, SweepVariable.KAPPA_STRENGTH, -0.1, 0.1, 2)
    assert context_for(kappa, -0.05).particle.material.primary.strength_kappa == -0.05
    radius = _spec(base_ctx, SweepVariable.RADIUS, 1e-7, 1e-6, 2)
    assert context_for(radius, 3e-7).particle.radius == 3e-7


# ==============================================================================
# Markers, on a stand-in force
# ==============================================================================

def test_linear_fit_over_rotation(service, base_ctx, monkeypatch):
    monkeypatch.setattr(sweep_module, "compute_force", lambda ctx: _breakdown(-2e-33 * ctx.Omega))
    result = service.run_sweep(_spec(base_ctx, SweepVariable.ROTATION, 1e3, 1e5, 5))
    fit = result.markers.linear_fit
    assert fit["slope"] == pytest.approx(-2e-33 * 2 * math.pi)
    assert fit["r_squared"] == pytest.approx(1.0)
    assert abs(fit["intercept"]) < 1e-40
    assert [row.value for row in result.rows] == pytest.approx([1e3, 25750.0, 50500.0, 75250.0, 1e5])


def test_constant_data_fit(service):
    fit = service.linear_fit(np.array([1.0, 2.0, 3.0]), np.zeros(3))
    assert fit == {"slope": 0.0, "intercept": 0.0, "r_squared": 1.0}


def test_zero_crossing_over_radius(service, base_ctx, monkeypatch):
    root = 3.3e-7
    monkeypatch.setattr(sweep_module, "compute_force", lambda ctx: _breakdown(ctx.particle.radius - root))
    result = service.run_sweep(_spec(base_ctx, SweepVariable.RADIUS, 1e-7, 1e-6, 10))
    (crossing,) = result.markers.zero_crossings
    assert crossing["value"] == pytest.approx(root, rel=2e-4)
    assert crossing["lo"] < root < crossing["hi"]
    assert crossing["wavelength_m"] == pytest.approx(2 * math.pi * 299792458.0 / OMEGA0)
    assert result.markers.linear_fit is None


def test_zero_crossing_over_omega0_reports_wavelength(service, base_ctx, monkeypatch):
    monkeypatch.setattr(
        sweep_module, "compute_force",
        lambda ctx: _breakdown(ctx.particle.material.primary.omega0 / (2 * math.pi) - 7.7e14),
    )
    result = service.run_sweep(_spec(base_ctx, SweepVariable.OMEGA0, 5e14, 1e15, 6))
    (crossing,) = result.markers.zero_crossings
    assert crossing["value"] == pytest.approx(7.7e14, rel=2e-4)
    assert crossing["wavelength_m"] == pytest.approx(299792458.0 / crossing["value"])


def test_interior_extremum_is_refined(service, base_ctx, monkeypatch):
    peak = 0.031
    monkeypatch.setattr(
        sweep_module, "compute_force",
        lambda ctx: _breakdown(1.0 - (ctx.particle.material.primary.strength_kappa - peak) ** 2),
    )
    result = service.run_sweep(_spec(base_ctx, SweepVariable.KAPPA_STRENGTH, 0.0, 0.1, 11))
    extremum = result.markers.extremum
    assert extremum["refined"] is True
    assert extremum["value"] == pytest.approx(peak, abs=1e-3)
    assert extremum["f_tot_N"] == pytest.approx(1.0, abs=1e-6)


def test_failed_points_are_kept(service, base_ctx, monkeypatch):
    def flaky(ctx):
        if ctx.T_env > 250.0:
            raise ConvergenceFailure("subdivision budget exhausted")
        return _breakdown(1e-30 * ctx.T_env)

    monkeypatch.setattr(sweep_module, "compute_force", flaky)
    result = service.run_sweep(_spec(base_ctx, SweepVariable.TEMPERATURE, 0.0, 300.0, 4))
    assert [row.converged for row in result.rows] == [True, True, True, False]
    assert result.rows[-1].error.startswith("ConvergenceFailure")
    assert not result.all_failed
    assert result.markers.linear_fit["slope"] == pytest.approx(1e-30)

    table_row = result.rows[-1].to_row(SweepVariable.TEMPERATURE)
    assert math.isnan(table_row["f_tot_N"])
    assert table_row["converged"] is False


def test_all_points_failing(service, base_ctx, monkeypatch):
    def broken(ctx):
        raise ConvergenceFailure("no")

    monkeypatch.setattr(sweep_module, "compute_force", broken)
    result = service.run_sweep(_spec(base_ctx, SweepVariable.ROTATION, 1e3, 1e4, 3))
    assert result.all_failed
    assert result.markers.to_dict() == {}


# ==============================================================================
# Validation and the real force
# ==============================================================================

def test_out_of_domain_ranges(service, base_ctx):
    with pytest.raises(ConfigurationError):
        service.validate_value_range(_spec(base_ctx, SweepVariable.RADIUS, -1e-6, 1e-6, 3))
    with pytest.raises(ConfigurationError):
        service.validate_value_range(_spec(base_ctx, SweepVariable.TEMPERATURE, -5.0, 300.0, 3))
    with pytest.raises(ConfigurationError):
        _spec(base_ctx, SweepVariable.ROTATION, 1e4, 1e3, 3)
    with pytest.raises(ConfigurationError):
        _spec(base_ctx, SweepVariable.ROTATION, 1e3, 1e4, 1)


def test_kappa_sweep_is_odd_and_parallel_matches_serial(service, base_ctx):
    kappa = base_ctx.particle.material.primary.strength_kappa
    spec = _spec(base_ctx, SweepVariable.KAPPA_STRENGTH, -kappa, kappa, 3)

    serial = service.run_sweep(spec, workers=1)
    parallel = service.run_sweep(spec, workers=2)

    f = [row.breakdown.f_tot for row in serial.rows]
    assert f[1] == 0.0
    assert f[0] == pytest.approx(-f[2], rel=1e-6)
    assert [row.breakdown for row in parallel.rows] == [row.breakdown for row in serial.rows]
    assert serial.markers.linear_fit["r_squared"] == pytest.approx(1.0, abs=1e-9)
