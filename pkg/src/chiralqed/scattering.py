"""Transmission coefficient, wavefunctions and winding-number diagnostics.

The transmission coefficient of the chiral channel is computed three ways:

* determinant ratio   t_k = det(k 1 - h_bound) / det(k 1 - h_eff), either
  with the fixed Markov matrices or with both matrices rebuilt at every k
  (the frequency-dependent, beyond-Markov form);
* eigenvalue product  t_k = prod_a (k - e_a) / (k - p_a), available when
  both matrices are diagonalizable;
* linear solve        (k 1 - h_eff(k)) e_k = v_k followed by the trace form
  t_k = 1 - i sum_j e_{j,k} V_j* exp(-i k z_j).

The three routes agree to rounding; the linear solve serves as the
independent oracle for the determinant path in the test suite.

The winding of t_k around the origin as k runs over the real line equals
N - N_B, the number of emitters minus the number of dissipative bound
states (BIC candidates included).  The finite sampling window is unwrapped
adaptively; the tails beyond it are summed analytically from the product
form, which avoids quadrature over an unbounded, conditionally convergent
integrand.

Per-k evaluations are pure and vectorized; adaptive refinement produces the
same final grid regardless of evaluation order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    Defective,
    GridCoverageWarning,
    GridRefinementError,
    NotABoundState,
    OnRealAxis,
    PoleOnGridWarning,
    SingularSystem,
    ZeroOnContour,
)
from .spectral import (
    BOUND,
    BoundStateSet,
    SpectralDecomposition,
    TRANSMISSION_ZERO,
    classify_model,
)
from .spinmodel import SpinModel, _step

MARKOV = "markov"
EXACT = "exact"

RETARDED = "retarded"
ADVANCED = "advanced"

SCATTERING = "scattering"
BOUND_RIGHT = "bound_right"
BOUND_LEFT = "bound_left"

INITIAL_POINTS = 2048
MAX_POINTS = 2**20
MAX_PHASE_STEP = np.pi / 4.0
POLE_TOL = 1e-12           # k-distance to a real pole that trips the sentinel
WINDING_RESIDUAL_LIMIT = 0.01
EDGE_DECAY_RATIO = 1e-6    # bound wavefunction must fall below this at the grid edge


def photon_propagator(omega: complex, z: float, branch: Optional[str] = None):
    """Coordinate-space propagator of the chiral free photon field.

    G_w(z) = -eta * i * Theta(eta z) * exp(i w z) where eta is the sign of
    Im(w); Theta(0) = 1/2.  On the real axis the limit from above or below
    must be requested explicitly with ``branch="retarded"`` (w + i0) or
    ``branch="advanced"`` (w - i0); a signed zero in Im(w) is deliberately
    not honored.  Raises ``OnRealAxis`` when Im(w) = 0 and no branch is
    given.
    """
    omega = complex(omega)
    if omega.imag > 0:
        eta = 1.0
    elif omega.imag < 0:
        eta = -1.0
    elif branch == RETARDED:
        eta = 1.0
    elif branch == ADVANCED:
        eta = -1.0
    elif branch is None:
        raise OnRealAxis(
            "frequency lies on the real axis; pass branch='retarded' or 'advanced'"
        )
    else:
        raise ValueError(f"unknown branch {branch!r}")
    z = np.asarray(z, dtype=float)
    step = _step(eta * z)
    # mask before exponentiating so the vanishing side cannot overflow
    expo = np.where(step > 0, 1j * omega * z, 0.0)
    result = -eta * 1j * step * np.exp(expo)
    return complex(result) if result.ndim == 0 else result


def _mode_check(mode: str) -> str:
    if mode not in (MARKOV, EXACT):
        raise ValueError(f"mode must be '{MARKOV}' or '{EXACT}', got {mode!r}")
    return mode


def _stacked_h(model: SpinModel, ks: np.ndarray, mode: str):
    """(h_bound(k), h_eff(k)) stacks of shape (nk, N, N)."""
    n = model.n_emitters
    if mode == MARKOV:
        hb = np.broadcast_to(model.h_bound, (ks.size, n, n))
        he = np.broadcast_to(model.h_eff, (ks.size, n, n))
        return hb, he
    cfg = model.config
    dz = cfg.positions[:, None] - cfg.positions[None, :]
    amp = -1j * np.outer(cfg.couplings, cfg.couplings.conj()) * _step(dz)
    coupling = amp[None, :, :] * np.exp(1j * ks[:, None, None] * dz)
    base = cfg.omega_eg * np.eye(n, dtype=complex) + model.reservoir.matrix
    he = base[None, :, :] + coupling
    hb = base[None, :, :] + coupling.conj().swapaxes(1, 2)
    return hb, he


def _real_pole_distances(model: SpinModel, ks: np.ndarray) -> np.ndarray:
    """Boolean mask: k sits within POLE_TOL of a real eigenvalue of h_eff."""
    eigs = np.linalg.eigvals(model.h_eff)
    scale = max(1.0, float(np.abs(eigs).max())) if eigs.size else 1.0
    ptol = POLE_TOL * scale
    real_poles = eigs.real[np.abs(eigs.imag) <= ptol]
    mask = np.zeros(ks.shape, dtype=bool)
    for p in real_poles:
        mask |= np.abs(ks - p) <= ptol
    return mask


def transmission_det(model: SpinModel, k, mode: str = MARKOV):
    """Transmission coefficient from the determinant ratio.

    Parameters
    ----------
    model : SpinModel
    k : float or array_like
        Real frequencies.
    mode : {"markov", "exact"}
        "markov" uses the fixed matrices carried by the model; "exact"
        rebuilds both matrices at every k (frequency-dependent coupling
        phases, valid beyond the Markov approximation).

    A k that lands on a real eigenvalue of h_eff (a perfectly dark,
    reservoir-free mode) is a physical pole of t_k: the value is set to the
    complex-infinity sentinel and ``PoleOnGridWarning`` is emitted.
    """
    mode = _mode_check(mode)
    scalar = np.ndim(k) == 0
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    hb, he = _stacked_h(model, ks, mode)
    eye = np.eye(model.n_emitters)
    num = np.linalg.det(ks[:, None, None] * eye - hb)
    den = np.linalg.det(ks[:, None, None] * eye - he)
    pole = _real_pole_distances(model, ks) | (den == 0)
    t = np.empty(ks.shape, dtype=complex)
    ok = ~pole
    t[ok] = num[ok] / den[ok]
    if pole.any():
        warnings.warn(
            f"{int(pole.sum())} k-point(s) sit on a real eigenvalue of h_eff "
            "(dark pole); transmission set to the infinity sentinel",
            PoleOnGridWarning,
            stacklevel=2,
        )
        t[pole] = complex(np.inf, 0.0)
    return complex(t[0]) if scalar else t


def transmission_product(
    bound_dec: SpectralDecomposition, eff_dec: SpectralDecomposition, k
):
    """Transmission coefficient from the eigenvalue product form.

    t_k = prod_a (k - e_a) / (k - p_a) over the h_bound eigenvalues e_a and
    h_eff eigenvalues p_a.  Raises ``Defective`` when either decomposition
    is flagged non-diagonalizable (the determinant path stays valid there).
    """
    if not bound_dec.diagonalizable or not eff_dec.diagonalizable:
        raise Defective(
            "eigenvalue product form requires diagonalizable matrices; "
            "use the determinant ratio instead"
        )
    scalar = np.ndim(k) == 0
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    num = np.prod(ks[:, None] - bound_dec.eigenvalues[None, :], axis=1)
    den = np.prod(ks[:, None] - eff_dec.eigenvalues[None, :], axis=1)
    t = num / den
    return complex(t[0]) if scalar else t


def scattering_solve(model: SpinModel, k, mode: str = EXACT):
    """Emitter amplitudes and transmission from the driven linear system.

    Solves (k 1 - h_eff(k)) e_k = v_k with the drive v_{j,k} = V_j e^{i k z_j}
    and returns ``(amplitudes, t)`` with t = 1 - i sum_j e_{j,k} V_j* e^{-i k z_j}.
    In "markov" mode the fixed h_eff and the omega_eg drive phases are used
    instead, which reproduces the Markov determinant ratio identically.

    Raises ``SingularSystem`` when k coincides (within 1e-12 x scale) with a
    real eigenvalue of h_eff.
    """
    mode = _mode_check(mode)
    scalar = np.ndim(k) == 0
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    if _real_pole_distances(model, ks).any():
        raise SingularSystem(
            "k coincides with a real eigenvalue of h_eff; the scattering "
            "system is singular there"
        )
    _, he = _stacked_h(model, ks, mode)
    eye = np.eye(model.n_emitters)
    a = ks[:, None, None] * eye - he
    cfg = model.config
    if mode == EXACT:
        drive = cfg.couplings[None, :] * np.exp(1j * ks[:, None] * cfg.positions[None, :])
    else:
        drive = np.broadcast_to(cfg.phase_vector(), (ks.size, model.n_emitters))
    try:
        amps = np.linalg.solve(a, drive[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"scattering system is singular: {exc}") from exc
    t = 1.0 - 1j * np.sum(amps * drive.conj(), axis=1)
    if scalar:
        return amps[0], complex(t[0])
    return amps, t


@dataclass(frozen=True)
class WavefunctionSample:
    """A hybrid light-matter wavefunction sampled on a position grid."""

    z_grid: np.ndarray
    photon_amplitude: np.ndarray
    atomic_amplitudes: np.ndarray
    energy: complex
    kind: str  # "scattering", "bound_right" or "bound_left"


def scattering_wavefunction(model: SpinModel, k: float, z_grid) -> WavefunctionSample:
    """Photon wavefunction of the scattering state at real frequency k.

    phi_k(z) = e^{ikz} - i sum_{j: z_j <= z} e_{j,k} V_j* e^{ik(z - z_j)},
    the retarded structure restricting the sum to emitters upstream of z.
    Far left of the ensemble phi_k(z) = e^{ikz} exactly; far right
    phi_k(z) = t_k e^{ikz}.
    """
    k = float(k)
    amps, _ = scattering_solve(model, k, mode=EXACT)
    z = np.atleast_1d(np.asarray(z_grid, dtype=float))
    dz = z[:, None] - model.config.positions[None, :]
    scattered = (
        (amps * model.config.couplings.conj())[None, :]
        * (-1j)
        * _step(dz)
        * np.exp(1j * k * dz)
    )
    phi = np.exp(1j * k * z) + scattered.sum(axis=1)
    return WavefunctionSample(
        z_grid=z, photon_amplitude=phi, atomic_amplitudes=amps,
        energy=complex(k), kind=SCATTERING,
    )


def bound_wavefunction(model: SpinModel, entry, side: str = "right", z_grid=None) -> WavefunctionSample:
    """Photon wavefunction of a dissipative bound state.

    The right state uses phi(z) = sum_j e_j V_j* G_E(z - z_j) with the
    bound-state energy E below the real axis, so each emitter radiates a
    piece localized to its left with spatial width 1 / |Im E|.  The left
    state uses the left amplitudes and the conjugated energy, localized to
    the right.  Raises ``NotABoundState`` for entries not labeled BOUND.

    Warns with ``GridCoverageWarning`` when the supplied grid is too narrow
    for the amplitude to decay below 1e-6 of its peak at the grid edge.
    """
    if entry.label != BOUND:
        raise NotABoundState(f"entry at E = {entry.energy:.6g} is {entry.label}, not BOUND")
    z = np.atleast_1d(np.asarray(z_grid, dtype=float))
    dz = z[:, None] - model.config.positions[None, :]
    if side == "right":
        amps = entry.right_amplitudes
        energy = complex(entry.energy)  # Im < 0: eta = -1, support at z < z_j
        step = _step(-dz)
        sign = +1j
        kind = BOUND_RIGHT
        report_energy = energy
    elif side == "left":
        amps = entry.left_amplitudes
        energy = np.conj(complex(entry.energy))  # Im > 0: eta = +1, support at z > z_j
        step = _step(dz)
        sign = -1j
        kind = BOUND_LEFT
        report_energy = energy
    else:
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    expo = np.where(step > 0, 1j * energy * dz, 0.0)
    phi = ((amps * model.config.couplings.conj())[None, :] * sign * step * np.exp(expo)).sum(axis=1)
    peak = float(np.abs(phi).max())
    if peak > 0:
        edge = max(abs(phi[0]), abs(phi[-1]))
        if edge > EDGE_DECAY_RATIO * peak:
            warnings.warn(
                f"bound-state amplitude is {edge / peak:.2e} of its peak at the "
                f"grid edge; extend the grid (width ~ {1.0 / abs(energy.imag):.3g})",
                GridCoverageWarning,
                stacklevel=2,
            )
    return WavefunctionSample(
        z_grid=z, photon_amplitude=phi, atomic_amplitudes=np.asarray(amps, dtype=complex),
        energy=report_energy, kind=kind,
    )


def find_transmission_zeros(bound_set: BoundStateSet) -> np.ndarray:
    """Real frequencies at which the transmission coefficient vanishes."""
    zeros = [e.energy.real for e in bound_set.entries if e.label == TRANSMISSION_ZERO]
    return np.sort(np.asarray(zeros, dtype=float))


# ---------------------------------------------------------------------------
# winding-number machinery


@dataclass(frozen=True)
class TransmissionTrace:
    """Sampled t_k with a continuously unwrapped phase and its winding.

    ``unwrapped_phase`` is seeded with the analytic phase accumulated from
    k = -inf up to the first grid point (``tail_phase_left``), so the stored
    values are the physical continuous branch; ``tail_phase_right`` is the
    analytic remainder from the last grid point to +inf.  ``winding`` is the
    rounded total (phase change across the full real line) / 2 pi and
    ``winding_residual`` its distance from the integer.
    """

    k_grid: np.ndarray
    t_values: np.ndarray
    unwrapped_phase: np.ndarray
    winding: int
    winding_residual: float
    tail_phase_left: float
    tail_phase_right: float
    mode: str


def _endpoint_phase(k: float, zero_eigs: np.ndarray, pole_eigs: np.ndarray) -> float:
    """Continuous arg t(k) relative to the branch fixed at -inf, via atan2.

    Valid because every eigenvalue passed in lies strictly off the real
    axis, so each factor's principal argument is already continuous in k.
    """
    num = float(np.sum(np.arctan2(-zero_eigs.imag, k - zero_eigs.real))) if zero_eigs.size else 0.0
    den = float(np.sum(np.arctan2(-pole_eigs.imag, k - pole_eigs.real))) if pole_eigs.size else 0.0
    return num - den


def _minus_inf_phase(zero_eigs: np.ndarray, pole_eigs: np.ndarray) -> float:
    num = float(np.sum(np.sign(-zero_eigs.imag))) if zero_eigs.size else 0.0
    den = float(np.sum(np.sign(-pole_eigs.imag))) if pole_eigs.size else 0.0
    return np.pi * (num - den)


def _tail_eigenvalues(model: SpinModel, bound_set: BoundStateSet):
    """Eigenvalue sets entering the analytic tails, with exact BIC pairs removed.

    Raises ``ZeroOnContour`` when a transmission zero sits on the real axis,
    when a BIC candidate is not an exact zero/pole cancellation, or when a
    real pole of t_k survives unmatched.
    """
    zero_eigs = np.linalg.eigvals(model.h_bound)
    pole_eigs = np.linalg.eigvals(model.h_eff)
    scale = max(1.0, float(np.abs(zero_eigs).max()), float(np.abs(pole_eigs).max()))
    cancel_tol = 1e-12 * scale
    if bound_set.num_zero:
        zeros = [e.energy.real for e in bound_set.entries if e.label == TRANSMISSION_ZERO]
        raise ZeroOnContour(
            f"transmission zero(s) at k = {zeros} lie on the real axis; the "
            "winding number is undefined — perturb the parameters"
        )
    tr = bound_set.tol_real
    keep_zero = []
    pole_list = list(pole_eigs)
    for e in zero_eigs:
        if abs(e.imag) > tr:
            keep_zero.append(e)
            continue
        dists = [abs(e - p) for p in pole_list]
        j = int(np.argmin(dists)) if dists else -1
        if j >= 0 and dists[j] <= cancel_tol:
            pole_list.pop(j)  # exact zero/pole cancellation (true BIC): drop the pair
        else:
            raise ZeroOnContour(
                f"near-real eigenvalue at {e:.6g} is a BIC candidate without an "
                "exact pole cancellation; the winding number is ill-defined"
            )
    keep_pole = []
    for p in pole_list:
        if abs(p.imag) <= tr:
            raise ZeroOnContour(
                f"uncancelled real pole of t_k at k = {p.real:.6g} (dark mode); "
                "the winding number is undefined"
            )
        keep_pole.append(p)
    return np.asarray(keep_zero, dtype=complex), np.asarray(keep_pole, dtype=complex)


def _required_span(model: SpinModel) -> tuple[float, float]:
    eigs = np.concatenate([np.linalg.eigvals(model.h_bound), np.linalg.eigvals(model.h_eff)])
    im_max = float(np.abs(eigs.imag).max())
    margin = 100.0 * im_max if im_max > 0 else 1.0
    return float(eigs.real.min() - margin), float(eigs.real.max() + margin)


def _resolve_span(model: SpinModel, k_span) -> tuple[float, float]:
    need = _required_span(model)
    if k_span is None:
        return need
    lo, hi = float(k_span[0]), float(k_span[1])
    if lo > need[0] or hi < need[1]:
        raise ValueError(
            f"k_span {(lo, hi)} does not cover every eigenvalue with the required "
            f"margin of 100 x max|Im|; need at least {need}"
        )
    return lo, hi


# per-eigenvalue seed offsets in units of |Im E|: a zero or pole with a tiny
# imaginary part winds the phase by a full turn inside a window of that width,
# which interval bisection alone cannot detect (the wrapped step aliases to
# ~0); seeding inside every window makes the loop visible to the pi/4 rule
_CLUSTER_OFFSETS = np.array(
    [-32.0, -16.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
)


def _seed_grid(model: SpinModel, span, initial_points: int) -> np.ndarray:
    ks = np.linspace(span[0], span[1], int(initial_points))
    eigs = np.concatenate([np.linalg.eigvals(model.h_bound), np.linalg.eigvals(model.h_eff)])
    extra = [
        e.real + abs(e.imag) * _CLUSTER_OFFSETS for e in eigs if abs(e.imag) > 0
    ]
    if extra:
        ks = np.unique(np.concatenate([ks, *extra]))
        ks = ks[(ks >= span[0]) & (ks <= span[1])]
    # an offset-0 seed can land exactly on an (exactly cancelled) real pole;
    # t_k is finite in the limit there but 0/0 on the nose, so drop the point
    return ks[~_real_pole_distances(model, ks)]


def _adaptive_trace(model: SpinModel, span, initial_points: int, mode: str):
    """Sample t_k, bisecting every interval whose phase step exceeds pi/4."""
    if initial_points < 2:
        raise ValueError("initial grid needs at least 2 points")
    ks = _seed_grid(model, span, initial_points)
    t = transmission_det(model, ks, mode)
    eps = np.finfo(float).eps
    while True:
        if not np.all(np.isfinite(t)) or np.any(t == 0):
            raise ZeroOnContour(
                "transmission vanished or diverged on the sampling grid; a zero "
                "or pole of t_k sits on the real axis"
            )
        dphi = np.angle(t[1:] / t[:-1])
        bad = np.flatnonzero(np.abs(dphi) > MAX_PHASE_STEP)
        if bad.size == 0:
            return ks, t
        widths = ks[bad + 1] - ks[bad]
        floor = 64.0 * eps * np.maximum(1.0, np.abs(ks[bad]))
        if np.any(widths <= floor):
            raise GridRefinementError(
                "phase step > pi/4 persists down to float resolution; a zero or "
                "pole of t_k touches the contour"
            )
        if ks.size + bad.size > MAX_POINTS:
            raise GridRefinementError(
                f"adaptive refinement exceeded {MAX_POINTS} points without "
                "resolving all phase steps"
            )
        mids = 0.5 * (ks[bad] + ks[bad + 1])
        t_mid = transmission_det(model, mids, mode)
        ks = np.insert(ks, bad + 1, mids)
        t = np.insert(t, bad + 1, t_mid)


def _assemble_trace(model, ks, t, zero_eigs, pole_eigs, mode) -> TransmissionTrace:
    a_minus = _minus_inf_phase(zero_eigs, pole_eigs)
    left = _endpoint_phase(ks[0], zero_eigs, pole_eigs) - a_minus
    steps = np.angle(t[1:] / t[:-1])
    phases = left + np.concatenate([[0.0], np.cumsum(steps)])
    right = -_endpoint_phase(ks[-1], zero_eigs, pole_eigs)
    total = phases[-1] + right
    w_float = total / (2.0 * np.pi)
    winding = int(np.round(w_float))
    return TransmissionTrace(
        k_grid=ks,
        t_values=t,
        unwrapped_phase=phases,
        winding=winding,
        winding_residual=float(abs(w_float - winding)),
        tail_phase_left=float(left),
        tail_phase_right=float(right),
        mode=mode,
    )


def winding_number(
    model: SpinModel,
    k_span=None,
    initial_points: int = INITIAL_POINTS,
    tol_real: Optional[float] = None,
    tol_match: Optional[float] = None,
) -> TransmissionTrace:
    """Winding of t_k around the origin over the full real line.

    The span (auto-chosen unless given) must cover every eigenvalue's real
    part with a margin of 100 x max|Im|; the grid is refined until adjacent
    phase steps stay below pi/4, and the contribution beyond the span is
    added analytically from the product form.  Raises ``ZeroOnContour``
    when a transmission zero (or an uncancelled real pole) lies on the real
    axis, and ``GridRefinementError`` if the point cap is exhausted or the
    final winding misses an integer by more than 1%.
    """
    bound_set = classify_model(model, tol_real=tol_real, tol_match=tol_match)
    zero_eigs, pole_eigs = _tail_eigenvalues(model, bound_set)
    span = _resolve_span(model, k_span)
    ks, t = _adaptive_trace(model, span, initial_points, MARKOV)
    trace = _assemble_trace(model, ks, t, zero_eigs, pole_eigs, MARKOV)
    if trace.winding_residual >= WINDING_RESIDUAL_LIMIT:
        raise GridRefinementError(
            f"winding misses an integer by {trace.winding_residual:.3g} "
            "after refinement"
        )
    return trace


def sample_transmission(
    model: SpinModel,
    k_span=None,
    points: int = INITIAL_POINTS,
    mode: str = MARKOV,
) -> TransmissionTrace:
    """Adaptively refined transmission trace for emission and plotting.

    Like ``winding_number`` but without the zero-on-contour pre-checks and
    without enforcing winding integrality (the residual is reported on the
    trace).  In "exact" mode the tails use the eigenvalues of the
    frequency-dependent matrices frozen at the span endpoints, so the
    winding there is approximate.
    """
    mode = _mode_check(mode)
    span = _resolve_span(model, k_span)
    ks, t = _adaptive_trace(model, span, points, mode)
    if mode == MARKOV:
        zero_eigs = np.linalg.eigvals(model.h_bound)
        pole_eigs = np.linalg.eigvals(model.h_eff)
    else:
        hb_lo, he_lo = _stacked_h(model, np.array([span[0]]), EXACT)
        hb_hi, he_hi = _stacked_h(model, np.array([span[1]]), EXACT)
        # endpoint-frozen eigenvalues; adequate because the tails only need
        # the O(1/k) asymptotics of the factors
        zero_eigs = np.linalg.eigvals(0.5 * (hb_lo[0] + hb_hi[0]))
        pole_eigs = np.linalg.eigvals(0.5 * (he_lo[0] + he_hi[0]))
    return _assemble_trace(model, ks, t, zero_eigs, pole_eigs, mode)


class LevinsonCheck(NamedTuple):
    winding: int
    num_emitters: int
    num_bound: int  # BOUND plus BIC candidates
    consistent: bool


def verify_levinson(
    model: SpinModel,
    k_span=None,
    initial_points: int = INITIAL_POINTS,
    tol_real: Optional[float] = None,
    tol_match: Optional[float] = None,
) -> LevinsonCheck:
    """Check winding == N - N_B for the model (N_B counts BOUND + BIC).

    Propagates ``ZeroOnContour`` from the winding computation; callers doing
    random sweeps should catch it and report the case as flagged rather
    than failed.
    """
    bound_set = classify_model(model, tol_real=tol_real, tol_match=tol_match, count_bic=True)
    trace = winding_number(
        model, k_span=k_span, initial_points=initial_points,
        tol_real=tol_real, tol_match=tol_match,
    )
    n = model.n_emitters
    n_b = bound_set.bound_state_count
    return LevinsonCheck(
        winding=trace.winding,
        num_emitters=n,
        num_bound=n_b,
        consistent=trace.winding == n - n_b,
    )
