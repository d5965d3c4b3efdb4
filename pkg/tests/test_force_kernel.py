import logging
import math
from dataclasses import replace

import numpy as np
import pytest

from ccthrust.errors import DomainError, PoleError
from ccthrust.physics.force_kernel import (
    compute_force,
    effective_linewidth,
    eq1_terms,
    estimate_integrand_eq1,
    integrand_dip_pmfl,
    integrand_Efl_Hfl,
    integrand_pfl_mfl,
    integrand_total,
    linearized_integrands,
    occupation,
    occupation_derivative,
    photon_number,
    resonance_window,
    spectral_sample,
    spin_force_coefficients,
    split_frequencies,
    thermal_occupation,
)
from ccthrust.schemas import (
    DiffMode,
    LorentzResonance,
    Occupation,
    ParticleSpec,
    PolarizabilityModel,
)

from . import oracles
from .conftest import OMEGA0


def _flip_kappa(ctx):
    return ctx.with_material(ctx.particle.material.mirrored())


# ==============================================================================
# Occupation numbers
# ==============================================================================

def test_photon_number_zero_temperature():
    assert photon_number(OMEGA0, 0.0) == 0.5
    assert photon_number(-OMEGA0, 0.0) == -0.5


def test_photon_number_at_room_temperature():
    assert photon_number(OMEGA0, 300.0) == pytest.approx(20.995, rel=1e-3)
    assert photon_number(OMEGA0, 300.0) == pytest.approx(float(oracles.photon_number(OMEGA0, 300.0)), rel=1e-13)


def test_photon_number_is_odd():
    for w in (1e9, OMEGA0, 1e15):
        assert photon_number(-w, 300.0) == -photon_number(w, 300.0)


def test_photon_number_overflow_branch():
    assert photon_number(1e18, 1.0) == 0.5


def test_photon_number_pole():
    with pytest.raises(PoleError):
        photon_number(0.0, 300.0)
    assert photon_number(0.0, 0.0) == 0.0


def test_negative_temperature_rejected():
    with pytest.raises(DomainError):
        photon_number(OMEGA0, -1.0)


@pytest.mark.parametrize("w", [1e10, OMEGA0, 5e13, -OMEGA0])
def test_occupation_parts_add_up(w):
    full = occupation(w, 300.0, Occupation.FULL)
    thermal = occupation(w, 300.0, Occupation.THERMAL)
    vacuum = occupation(w, 300.0, Occupation.VACUUM)
    assert thermal + vacuum == pytest.approx(full, rel=1e-13)
    assert thermal == thermal_occupation(w, 300.0)


def test_occupation_derivative_matches_differences():
    w, h = OMEGA0, 1e-4 * OMEGA0
    numeric = (photon_number(w + h, 300.0) - photon_number(w - h, 300.0)) / (2 * h)
    assert occupation_derivative(w, 300.0) == pytest.approx(numeric, rel=1e-6)
    assert occupation_derivative(w, 300.0, Occupation.VACUUM) == 0.0
    assert occupation_derivative(w, 0.0) == 0.0
    assert occupation_derivative(-w, 300.0) == occupation_derivative(w, 300.0)


def test_split_frequencies():
    assert split_frequencies(5.0, 1.0) == (6.0, 4.0)
    assert split_frequencies(2.0, 0.0) == (2.0, 2.0)
    assert split_frequencies(0.5, 1.0) == (1.5, -0.5)


# ==============================================================================
# Spectral densities
# ==============================================================================

def test_no_rotation_gives_zero(base_ctx):
    ctx = replace(base_ctx, Omega=0.0)
    sample = integrand_total(ctx, OMEGA0)
    assert (sample.d_dip_pmfl, sample.d_pfl_mfl, sample.d_Efl_Hfl, sample.d_tot) == (0.0, 0.0, 0.0, 0.0)
    assert linearized_integrands(ctx, OMEGA0).d_tot == 0.0


def test_total_is_sum_of_components(base_ctx):
    sample = integrand_total(base_ctx, 1.02 * OMEGA0)
    assert sample.d_tot == sample.d_dip_pmfl + sample.d_pfl_mfl + sample.d_Efl_Hfl
    assert sample.d_dip_pmfl == integrand_dip_pmfl(base_ctx, 1.02 * OMEGA0)
    assert sample.d_pfl_mfl == integrand_pfl_mfl(base_ctx, 1.02 * OMEGA0)
    assert sample.d_Efl_Hfl == integrand_Efl_Hfl(base_ctx, 1.02 * OMEGA0)


def test_integrands_need_positive_frequency(base_ctx):
    with pytest.raises(DomainError):
        integrand_total(base_ctx, 0.0)
    with pytest.raises(DomainError):
        integrand_total(base_ctx, -OMEGA0)


@pytest.mark.parametrize("mode", [DiffMode.EXACT, DiffMode.LINEARIZED])
def test_rotation_reversal_negates_densities(base_ctx, mode):
    ctx = replace(base_ctx, diff_mode=mode)
    reverse = replace(ctx, Omega=-ctx.Omega)
    for ratio in (0.7, 1.0, 1.4):
        a, b = integrand_total(ctx, ratio * OMEGA0), integrand_total(reverse, ratio * OMEGA0)
        for x, y in zip(a.as_array(), b.as_array()):
            if mode is DiffMode.LINEARIZED:
                assert y == -x
            else:
                assert y == pytest.approx(-x, rel=1e-10)


def test_chirality_reversal_negates_densities(base_ctx):
    mirrored = _flip_kappa(base_ctx)
    for ratio in (0.8, 1.0, 1.3):
        a, b = integrand_total(base_ctx, ratio * OMEGA0), integrand_total(mirrored, ratio * OMEGA0)
        assert b.d_Efl_Hfl == pytest.approx(-a.d_Efl_Hfl, rel=1e-15)
        assert b.d_dip_pmfl == pytest.approx(-a.d_dip_pmfl, rel=1e-15)
        assert b.d_pfl_mfl == pytest.approx(-a.d_pfl_mfl, rel=1e-15)


def test_zero_point_term_survives_at_zero_temperature(base_ctx):
    cold = replace(base_ctx, T_env=0.0, T_particle=0.0)
    assert integrand_pfl_mfl(cold, OMEGA0) != 0.0


def test_thermal_part_vanishes_at_zero_temperature(base_ctx):
    cold = replace(base_ctx, T_env=0.0, T_particle=0.0)
    assert spectral_sample(cold, OMEGA0, Occupation.THERMAL).d_tot == 0.0


def test_parts_add_up_to_full_occupation(base_ctx):
    ctx = replace(base_ctx, diff_mode=DiffMode.LINEARIZED)
    w = 0.97 * OMEGA0
    full = spectral_sample(ctx, w, Occupation.FULL).as_array()
    parts = spectral_sample(ctx, w, Occupation.THERMAL).as_array() + spectral_sample(ctx, w, Occupation.VACUUM).as_array()
    np.testing.assert_allclose(parts, full, rtol=1e-9)


def test_linearized_is_exactly_linear_in_rotation(base_ctx):
    ctx = replace(base_ctx, diff_mode=DiffMode.LINEARIZED)
    double = replace(ctx, Omega=2.0 * ctx.Omega)
    a = linearized_integrands(ctx, 1.1 * OMEGA0)
    b = linearized_integrands(double, 1.1 * OMEGA0)
    assert b.d_dip_pmfl == 2.0 * a.d_dip_pmfl
    assert b.d_pfl_mfl == 2.0 * a.d_pfl_mfl
    assert b.d_Efl_Hfl == 2.0 * a.d_Efl_Hfl


def test_linearized_agrees_with_exact(base_ctx):
    exact = replace(base_ctx, diff_mode=DiffMode.EXACT)
    ratios = (0.5, 0.8, 0.95, 1.0, 1.05, 1.2, 1.6, 2.0)
    exact_rows = np.array([integrand_total(exact, r * OMEGA0).as_array() for r in ratios])
    linear_rows = np.array([linearized_integrands(base_ctx, r * OMEGA0).as_array() for r in ratios])
    scale = np.abs(linear_rows).max(axis=0)
    assert np.all(np.abs(exact_rows - linear_rows) <= 1e-3 * np.maximum(np.abs(linear_rows), 1e-3 * scale))


@pytest.mark.parametrize("ratio", np.linspace(0.3, 3.0, 12))
def test_exact_brackets_match_extended_precision(base_ctx, ratio):
    ctx = replace(base_ctx, diff_mode=DiffMode.EXACT)
    w = float(ratio * OMEGA0)
    got = integrand_total(ctx, w).as_array()
    expected, magnitude = oracles.brackets(ctx, w)
    for g, e, m in zip(got, expected, magnitude):
        # rounding in the inputs limits the difference to eps * magnitude
        assert abs(g - e) <= 1e-6 * max(abs(e), 1e-6 * m)


def test_auto_mode_selects_linearized_at_slow_rotation(base_ctx):
    assert base_ctx.resolved_diff_mode() is DiffMode.LINEARIZED
    fast = replace(base_ctx, Omega=1e-3 * OMEGA0)
    assert fast.resolved_diff_mode() is DiffMode.EXACT


def test_dipole_term_dominates_near_resonance(base_ctx):
    sample = integrand_total(base_ctx, OMEGA0)
    assert abs(sample.d_dip_pmfl) > 10 * abs(sample.d_pfl_mfl)
    assert abs(sample.d_dip_pmfl) > 10 * abs(sample.d_Efl_Hfl)


# ==============================================================================
# Diagnostics
# ==============================================================================

def test_spin_force_coefficients_vanish_without_chirality(material):
    achiral = ParticleSpec(50e-6, material.with_kappa_strength(0.0))
    assert spin_force_coefficients(achiral, OMEGA0, PolarizabilityModel.QUASI_STATIC_RC) == (0.0, 0.0)


def test_spin_force_coefficients_flip_with_chirality(particle):
    mirrored = ParticleSpec(particle.radius, particle.material.mirrored())
    ge, gm = spin_force_coefficients(particle, OMEGA0, PolarizabilityModel.QUASI_STATIC_RC)
    ge2, gm2 = spin_force_coefficients(mirrored, OMEGA0, PolarizabilityModel.QUASI_STATIC_RC)
    assert (ge2, gm2) == (-ge, -gm)
    assert math.isfinite(ge) and ge != 0.0


def test_structural_estimate_is_odd_in_chirality(base_ctx):
    a = estimate_integrand_eq1(base_ctx, OMEGA0)
    b = estimate_integrand_eq1(_flip_kappa(base_ctx), OMEGA0)
    assert b == -a
    assert a == sum(eq1_terms(base_ctx, OMEGA0))


def test_structural_spin_term_matches_linearized_dipole_density(base_ctx):
    """At T = 0 the linearized dip+pmfl density is 2*Omega*(g' - 4g/w) for the spin term g."""
    cold = replace(base_ctx, T_env=0.0, T_particle=0.0, diff_mode=DiffMode.LINEARIZED)
    w = 0.9 * OMEGA0
    h = 2e-5 * w
    g = eq1_terms(cold, w)[0]
    dg = (eq1_terms(cold, w + h)[0] - eq1_terms(cold, w - h)[0]) / (2 * h)
    expected = 2.0 * cold.Omega * (dg - 4.0 * g / w)
    assert integrand_dip_pmfl(cold, w) == pytest.approx(expected, rel=1e-5)


# ==============================================================================
# Integrated force
# ==============================================================================

def test_force_without_rotation_is_zero(base_ctx):
    result = compute_force(replace(base_ctx, Omega=0.0))
    assert (result.f_dip_pmfl, result.f_int_pfl_mfl, result.f_int_Efl_Hfl, result.f_tot) == (0.0, 0.0, 0.0, 0.0)
    assert result.est_abs_error == 0.0


def test_force_total_and_parity(base_ctx):
    forward = compute_force(base_ctx)
    backward = compute_force(replace(base_ctx, Omega=-base_ctx.Omega))
    assert forward.mode_used is DiffMode.LINEARIZED
    assert forward.f_tot == pytest.approx(forward.f_dip_pmfl + forward.f_int_pfl_mfl + forward.f_int_Efl_Hfl, rel=1e-14)
    assert forward.f_tot != 0.0
    assert forward.evaluations > 0
    for a, b in ((forward.f_dip_pmfl, backward.f_dip_pmfl), (forward.f_tot, backward.f_tot)):
        assert b == pytest.approx(-a, rel=1e-12)


def test_force_is_linear_in_rotation(base_ctx):
    one = compute_force(base_ctx)
    two = compute_force(replace(base_ctx, Omega=2.0 * base_ctx.Omega))
    assert two.f_tot == pytest.approx(2.0 * one.f_tot, rel=1e-12)


def test_force_is_odd_in_chirality(base_ctx):
    a = compute_force(base_ctx)
    b = compute_force(_flip_kappa(base_ctx))
    assert b.f_tot == pytest.approx(-a.f_tot, rel=1e-12)


def test_dipole_component_dominates(base_ctx):
    result = compute_force(base_ctx)
    assert abs(result.f_dip_pmfl) > max(abs(result.f_int_pfl_mfl), abs(result.f_int_Efl_Hfl))


def test_exact_mode_raises_tolerance_floor_and_agrees(base_ctx, caplog):
    exact = replace(base_ctx, diff_mode=DiffMode.EXACT)
    with caplog.at_level(logging.WARNING, logger="ccthrust"):
        result = compute_force(exact)
    assert result.mode_used is DiffMode.EXACT
    assert any("exact differencing" in r.getMessage() for r in caplog.records)
    linear = compute_force(base_ctx)
    assert result.f_tot == pytest.approx(linear.f_tot, rel=1e-4)


def test_force_is_reproducible(base_ctx):
    assert compute_force(base_ctx) == compute_force(base_ctx)


def test_zero_temperature_force_is_finite(base_ctx):
    cold = compute_force(replace(base_ctx, T_env=0.0, T_particle=0.0))
    assert math.isfinite(cold.f_tot) and cold.f_tot != 0.0
    assert cold.est_abs_error < abs(cold.f_tot)


def test_achiral_mie_particle_feels_no_force(base_ctx):
    ctx = replace(base_ctx, pol_model=PolarizabilityModel.MIE_DIPOLE)
    achiral = ctx.with_material(ctx.particle.material.with_kappa_strength(0.0))
    for w in (0.5 * OMEGA0, OMEGA0, 1.3 * OMEGA0):
        assert not spectral_sample(achiral, w).as_array().any()
    result = compute_force(achiral)
    assert (result.f_dip_pmfl, result.f_int_pfl_mfl, result.f_int_Efl_Hfl, result.f_tot) == (0.0, 0.0, 0.0, 0.0)


# ==============================================================================
# Integration window
# ==============================================================================

def test_window_is_centred_on_the_resonance(base_ctx):
    gamma = base_ctx.particle.material.primary.gamma
    width = effective_linewidth(base_ctx, base_ctx.particle.material.primary)
    assert 0.9 * gamma < width < 1.5 * gamma

    lo, hi = resonance_window(base_ctx)
    assert 0.5 * (lo + hi) == pytest.approx(OMEGA0, rel=1e-12)
    assert hi - lo == pytest.approx(2.0 * base_ctx.quadrature.window_linewidths * width, rel=1e-12)


def test_window_scales_with_linewidths(base_ctx):
    lo, hi = resonance_window(base_ctx)
    narrow = replace(base_ctx, quadrature=replace(base_ctx.quadrature, window_linewidths=5.0))
    n_lo, n_hi = resonance_window(narrow)
    assert n_hi - n_lo == pytest.approx(0.5 * (hi - lo), rel=1e-12)


def test_window_never_reaches_negative_frequency(base_ctx):
    wide = replace(base_ctx, quadrature=replace(base_ctx.quadrature, window_linewidths=1e3))
    assert resonance_window(wide) == (0.0, 2.0 * OMEGA0)


def test_window_spans_every_resonance(base_ctx, material):
    upper = LorentzResonance.from_relative_damping(3.0 * OMEGA0, 0.05, 0.1, 0.05, 0.05)
    ctx = base_ctx.with_material(replace(material, resonances=material.resonances + (upper,)))
    lo, hi = resonance_window(ctx)
    assert lo < OMEGA0 < 3.0 * OMEGA0 < hi


def test_lossless_resonance_gets_a_nominal_linewidth(base_ctx, material):
    lossless = base_ctx.with_material(material.with_primary(LorentzResonance(OMEGA0, 0.0, 0.156, 0.0625, 0.0993)))
    assert effective_linewidth(lossless, lossless.particle.material.primary) == pytest.approx(1e-3 * OMEGA0)


# ==============================================================================
# Numerical robustness
# ==============================================================================

def _with_quadrature(ctx, **changes):
    return replace(ctx, quadrature=replace(ctx.quadrature, **changes))


def test_force_is_stable_under_tighter_tolerance(base_ctx):
    reference = compute_force(base_ctx).f_tot
    tighter = compute_force(_with_quadrature(base_ctx, rel_tol=0.5 * base_ctx.quadrature.rel_tol)).f_tot
    assert tighter == pytest.approx(reference, rel=1e-6)


def test_force_is_stable_under_wider_breakpoint_spans(base_ctx):
    reference = compute_force(base_ctx).f_tot
    spans = 2.0 * base_ctx.quadrature.resonance_halfwidths
    assert compute_force(_with_quadrature(base_ctx, resonance_halfwidths=spans)).f_tot == pytest.approx(reference, rel=1e-6)


def test_force_is_stable_under_longer_thermal_tail(base_ctx):
    reference = compute_force(base_ctx).f_tot
    longer = compute_force(_with_quadrature(base_ctx, tail_cut_multiplier=80.0)).f_tot
    assert longer == pytest.approx(reference, rel=1e-8)
