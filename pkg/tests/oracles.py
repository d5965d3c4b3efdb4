"""
Arbitrary-precision reference evaluations (mpmath, 50 digits).

These rebuild the quasi-static chain from the 2x2 constitutive matrix with
mpmath matrix inversion instead of the closed forms used by the package.
"""

import mpmath as mp

from ccthrust.schemas import DampingConvention, PhysicalConstants

mp.mp.dps = 50

K = PhysicalConstants()
HBAR = mp.mpf(K.hbar)
KB = mp.mpf(K.k_B)
C = mp.mpf(K.c)


def photon_number(omega, T):
    omega = mp.mpf(omega)
    if T == 0:
        return mp.sign(omega) / 2
    return mp.coth(HBAR * omega / (2 * KB * mp.mpf(T))) / 2


def dispersion(material, omega):
    """eps, mu, kappa at a signed frequency, straight from the oscillator sums."""
    w = mp.mpf(omega)
    eps = mp.mpc(material.eps_b)
    mu = mp.mpc(material.mu_b)
    kappa = mp.mpc(0)
    for r in material.resonances:
        w0, g = mp.mpf(r.omega0), mp.mpf(r.gamma)
        damping = w0 if material.damping_convention is DampingConvention.GAMMA_OMEGA0 else w
        if material.damping_convention is DampingConvention.GAMMA_OMEGA0 and w < 0:
            damping = -w0
        den = w0 ** 2 - w ** 2 - 1j * g * damping
        eps += mp.mpf(r.strength_e) * w0 ** 2 / den
        mu += mp.mpf(r.strength_m) * w0 ** 2 / den
        kappa += mp.mpf(r.strength_kappa) * w0 * w / den
    return eps, mu, kappa


def volume_matrix(radius, material, omega, radiative=True):
    """A = [[Ve, iX], [-iX, Vm]] at omega > 0."""
    eps, mu, kappa = dispersion(material, omega)
    M = mp.matrix([[eps, 1j * kappa], [-1j * kappa, mu]])
    I = mp.eye(2)
    A = 4 * mp.pi * mp.mpf(radius) ** 3 * (M - I) * mp.inverse(M + 2 * I)
    if radiative:
        s = (mp.mpf(omega) / C) ** 3 / (6 * mp.pi)
        A = mp.inverse(I - 1j * s * A) * A
    return A


def chi_and_upsilon(radius, material, omega, radiative=True):
    """(chi in m^2 s, upsilon in m^3) with the reality conditions for omega < 0."""
    A = volume_matrix(radius, material, abs(omega), radiative)
    chi = (A[0, 1] / 1j) / C
    ups = A[0, 0] + A[1, 1]
    if omega < 0:
        chi, ups = -mp.conj(chi), mp.conj(ups)
    return chi, ups


def brackets(ctx, omega, radiative=True):
    """
    The three spectral densities with the exact difference at w +/- Omega.

    Returns (values, magnitudes): magnitudes are the same expressions with
    every term taken in absolute value, the scale of the rounding error.
    """
    w = mp.mpf(omega)
    wp, wm = w + mp.mpf(ctx.Omega), w - mp.mpf(ctx.Omega)
    R, mat = ctx.particle.radius, ctx.particle.material
    chi_p, ups_p = chi_and_upsilon(R, mat, wp, radiative)
    chi_m, ups_m = chi_and_upsilon(R, mat, wm, radiative)
    n1p, n1m = photon_number(wp, ctx.T_particle), photon_number(wm, ctx.T_particle)
    n0 = photon_number(w, ctx.T_env)

    pre6 = HBAR * w ** 4 / (3 * mp.pi ** 2 * C ** 3)
    pre7 = HBAR * w ** 7 / (18 * mp.pi ** 3 * C ** 6)

    dip = pre6 * (mp.im(chi_p) * (2 * n1p + n0) - mp.im(chi_m) * (2 * n1m + n0))
    pfl = -pre7 * (mp.im(ups_p) * mp.im(chi_p) * n1p - mp.im(ups_m) * mp.im(chi_m) * n1m)
    efl = pre7 * n0 * mp.re(ups_p * mp.conj(chi_p) - ups_m * mp.conj(chi_m))

    mag_dip = pre6 * (abs(mp.im(chi_p)) * abs(2 * n1p + n0) + abs(mp.im(chi_m)) * abs(2 * n1m + n0))
    mag_pfl = pre7 * (abs(mp.im(ups_p) * mp.im(chi_p) * n1p) + abs(mp.im(ups_m) * mp.im(chi_m) * n1m))
    mag_efl = pre7 * abs(n0) * (abs(ups_p * chi_p) + abs(ups_m * chi_m))
    return (
        (float(dip), float(pfl), float(efl)),
        (float(mag_dip), float(mag_pfl), float(mag_efl)),
    )
