"""Second-order photon-photon correlation for a single emitter.

For an infinitesimally weak resonant coherent drive the normalized
correlation of the transmitted light is

    g2(tau) = |psi2(r = tau)|^2 / t^4,       t = (gamma' - gamma) / gamma_tot,

where psi2 is the relative-coordinate part of the two-photon output state.
Its closed form combines the independent-scattering piece with an
exponential piece generated by the hard-core emitter nonlinearity:

    psi2(r) = (gamma'-gamma)^2/(pi gamma_tot^2)
              - 4 gamma^2/(pi gamma_tot^2) * exp(-gamma_tot |r|),

times exp(2 i omega_eg R) in the center-of-mass coordinate.  When t = 0 the
exponential piece survives, so g2 diverges at every delay: perfect photon
bunching exactly at the transmission zero.

``psi2_numeric`` rebuilds psi2 independently from the two-photon S-matrix:
the delta-function (independent scattering) terms are taken analytically
and the T-matrix term is Fourier-transformed by adaptive quadrature.  It is
the oracle against which the closed form is tested.

Normalization: applying the definition of g2 verbatim to the closed form
gives g2 -> 1/pi^2 at large delay (a Fourier-convention artifact), not the
physical uncorrelated limit 1.  The default ``asymptotic_unit`` mode
rescales so that g2(inf) = 1, leaving the divergence structure and every
ratio intact; ``raw`` keeps the literal value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import NegativeRate, PoleHit, QuadratureFailure

RAW = "raw"
ASYMPTOTIC_UNIT = "asymptotic_unit"

DIVERGENCE_RTOL = 1e-12  # |gamma' - gamma| below this (x gamma_tot) means t = 0
_DENOM_FLOOR = 1e-14     # T-matrix denominator magnitude that counts as a pole
_QUAD_EPSABS = 1e-9


def _rates(gamma: float, gamma_prime: float) -> float:
    if gamma < 0 or gamma_prime < 0:
        raise NegativeRate("decay rates must be non-negative")
    gamma_tot = gamma + gamma_prime
    if gamma_tot <= 0:
        raise ValueError("gamma + gamma_prime must be positive")
    return gamma_tot


def resonant_transmission(gamma: float, gamma_prime: float) -> float:
    """Single-emitter transmission on resonance, (gamma' - gamma) / gamma_tot."""
    gamma_tot = _rates(gamma, gamma_prime)
    return (gamma_prime - gamma) / gamma_tot


def t_matrix(e_out, q_out, e_in, q_in, gamma, gamma_prime, omega_eg=0.0) -> complex:
    """Two-photon T-matrix element of the single emitter.

    Center-of-mass variables: total energies ``e_in``/``e_out`` and relative
    momenta ``q_in``/``q_out`` of the photon pair.

        T = -(16 gamma^2 / pi^2) * D / ((4 q_in^2 - D^2)(4 q_out^2 - D^2)),
        D = e_in - 2 omega_eg + 2 i gamma_tot.

    Raises ``PoleHit`` when a denominator factor falls below 1e-14 in
    magnitude (possible only for gamma_tot -> 0).
    """
    gamma_tot = _rates(gamma, gamma_prime)
    d = e_in - 2.0 * omega_eg + 2j * gamma_tot
    den_in = 4.0 * q_in**2 - d * d
    den_out = 4.0 * q_out**2 - d * d
    if min(abs(den_in), abs(den_out)) < _DENOM_FLOOR:
        raise PoleHit("T-matrix denominator is numerically zero")
    return -(16.0 * gamma**2 / np.pi**2) * d / (den_in * den_out)


def psi2_closed(r, gamma, gamma_prime, omega_eg=0.0, center_of_mass=0.0):
    """Closed-form two-photon output wavefunction at relative coordinate r.

    Accepts scalar or array r.  The Theta(0) = 1/2 convention makes the
    exponential piece exactly exp(-gamma_tot |r|) including r = 0.
    """
    gamma_tot = _rates(gamma, gamma_prime)
    r = np.asarray(r, dtype=float)
    flat = (gamma_prime - gamma) ** 2 / (np.pi * gamma_tot**2)
    bunching = (4.0 * gamma**2 / (np.pi * gamma_tot**2)) * np.exp(-gamma_tot * np.abs(r))
    out = (flat - bunching) * np.exp(2j * omega_eg * center_of_mass)
    return complex(out) if out.ndim == 0 else out


def psi2_numeric(r, gamma, gamma_prime, omega_eg=0.0, epsabs=_QUAD_EPSABS) -> complex:
    """Two-photon wavefunction rebuilt from the S-matrix (oracle path).

    The independent-scattering delta terms contribute 2 t^2 analytically;
    the T-matrix term is the Fourier transform over the outgoing relative
    momentum, done with adaptive quadrature (Fourier-weighted on the
    semi-infinite axis; the integrand is even).  Raises
    ``QuadratureFailure`` if the estimated error exceeds the tolerance.
    """
    r = float(r)
    e_res = 2.0 * omega_eg
    t_res = resonant_transmission(gamma, gamma_prime)

    def f_re(q):
        return t_matrix(e_res, q, e_res, 0.0, gamma, gamma_prime, omega_eg).real

    def f_im(q):
        return t_matrix(e_res, q, e_res, 0.0, gamma, gamma_prime, omega_eg).imag

    parts = []
    for f in (f_re, f_im):
        if r == 0.0:
            val, err = quad(f, 0.0, np.inf, epsabs=epsabs, limit=200)
        else:
            val, err = quad(f, 0.0, np.inf, weight="cos", wvar=abs(r), epsabs=epsabs, limit=200)
        if err > 100.0 * epsabs:
            raise QuadratureFailure(
                f"T-term quadrature error estimate {err:.2e} exceeds budget"
            )
        parts.append(val)
    integral = 2.0 * (parts[0] + 1j * parts[1])  # full-line e^{iq r} transform
    return (2.0 * t_res**2 - 4j * np.pi * integral) / (2.0 * np.pi)


@dataclass(frozen=True)
class TwoPhotonCorrelation:
    """g2 on a delay grid with the underlying two-photon amplitude.

    ``g2_values`` carries the +inf sentinel on the divergent ridge
    (gamma' = gamma): there the transmission vanishes while psi2 stays
    finite, so ``psi2_values`` remains usable as the numerator channel.
    ``psi2_values`` is scaled consistently with the chosen normalization
    (x pi under ``asymptotic_unit``) so |psi2|^2 / t^4 always reproduces
    ``g2_values`` away from the ridge.
    """

    tau_grid: np.ndarray
    g2_values: np.ndarray
    psi2_values: np.ndarray
    normalization: str
    gamma: float
    gamma_prime: float
    omega_eg: float
    divergent: bool


def g2(tau_grid, gamma, gamma_prime, omega_eg=0.0, normalization=ASYMPTOTIC_UNIT) -> TwoPhotonCorrelation:
    """Second-order correlation of the transmitted light versus delay.

    ``normalization="asymptotic_unit"`` (default) rescales so that
    g2 -> 1 at large delay, the physical uncorrelated limit;
    ``normalization="raw"`` applies the definition literally (asymptote
    1/pi^2, kept for reproducing the unscaled closed form).

    At gamma' = gamma (within 1e-12 relative) the transmission is zero and
    g2 is the +inf sentinel at every delay.
    """
    if normalization not in (RAW, ASYMPTOTIC_UNIT):
        raise ValueError(f"unknown normalization {normalization!r}")
    gamma_tot = _rates(gamma, gamma_prime)
    tau = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    if not np.all(np.isfinite(tau)):
        raise ValueError("delay grid must be finite")
    psi2 = np.atleast_1d(psi2_closed(tau, gamma, gamma_prime, omega_eg))
    if normalization == ASYMPTOTIC_UNIT:
        psi2 = np.pi * psi2
    t_res = resonant_transmission(gamma, gamma_prime)
    divergent = abs(gamma_prime - gamma) < DIVERGENCE_RTOL * gamma_tot
    if divergent:
        g2_values = np.full(tau.shape, np.inf)
    else:
        g2_values = np.abs(psi2) ** 2 / t_res**4
    return TwoPhotonCorrelation(
        tau_grid=tau,
        g2_values=g2_values,
        psi2_values=psi2,
        normalization=normalization,
        gamma=float(gamma),
        gamma_prime=float(gamma_prime),
        omega_eg=float(omega_eg),
        divergent=divergent,
    )
