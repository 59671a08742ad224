"""Biorthogonal eigen-analysis and bound-state classification.

The spin matrices are non-Hermitian, so left and right eigenvectors differ.
Right eigenvectors e_a solve  h e_a = E_a e_a; left eigenvectors ebar_a solve
h^dag ebar_a = E_a* ebar_a.  Here the left set is taken as the conjugated
rows of the inverse right-eigenvector matrix, which makes biorthonormality
<ebar_a|e_b> = delta_ab and the atomic-subspace completeness
sum_a e_a ebar_a^dag = 1 structural identities; their numerical quality is
then audited through the condition number of the eigenvector matrix.

Eigenvalues of h_bound split into three classes:

* BOUND              Im E < -tol_real: a dissipative bound state,
* TRANSMISSION_ZERO  real E that is not an eigenvalue of h_eff: the
                     transmission coefficient vanishes at k = E,
* BIC_CANDIDATE      real E that h_eff shares: a fine-tuned bound state
                     degenerate with the scattering continuum.

Whether BIC candidates count toward the bound-state total is a convention
flag (`count_bic`, default True, the convention under which the winding
relation holds).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import ConvergenceFailure, NoBracket
from .spinmodel import SpinModel

BOUND = "BOUND"
TRANSMISSION_ZERO = "TRANSMISSION_ZERO"
BIC_CANDIDATE = "BIC_CANDIDATE"

# Right-eigenvector matrix condition number beyond which the matrix is
# reported as numerically non-diagonalizable.
DIAGONALIZABLE_COND_LIMIT = 1e8

TOL_REAL_SCALE = 1e-9   # default tol_real = 1e-9 * matrix scale
TOL_MATCH_SCALE = 1e-7  # default tol_match = 1e-7 * matrix scale


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues with biorthonormalized right/left eigenvector pairs.

    ``right_vectors[:, a]`` and ``left_vectors[:, a]`` belong to
    ``eigenvalues[a]``.  When ``diagonalizable`` is False the eigenvector
    matrix condition exceeded the limit and the left vectors come from a
    pseudo-inverse; ``defect_measure`` is the smallest-to-largest singular
    value ratio of the right-eigenvector matrix (1 for a normal matrix,
    0 for a Jordan block).
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    diagonalizable: bool
    defect_measure: float

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def biorthogonality_residual(self) -> float:
        """max |<ebar_a|e_b> - delta_ab|."""
        gram = self.left_vectors.conj().T @ self.right_vectors
        return float(np.abs(gram - np.eye(self.n)).max())

    def completeness_residual(self) -> float:
        """max |sum_a e_a ebar_a^dag - 1| on the atomic subspace."""
        resolution = self.right_vectors @ self.left_vectors.conj().T
        return float(np.abs(resolution - np.eye(self.n)).max())


def eigendecompose(matrix) -> SpectralDecomposition:
    """Full biorthogonal eigendecomposition of a square complex matrix.

    Left eigenvectors are the conjugated rows of inv(right_vectors), so the
    pairing is exact by construction whenever the inversion is well posed.
    Raises ``ConvergenceFailure`` if the underlying QR iteration fails.
    """
    a = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    try:
        eigenvalues, right = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigensolver did not converge: {exc}") from exc
    svals = np.linalg.svd(right, compute_uv=False)
    defect = float(svals[-1] / svals[0]) if svals[0] > 0 else 0.0
    diagonalizable = defect > 1.0 / DIAGONALIZABLE_COND_LIMIT
    if diagonalizable:
        left = np.linalg.inv(right).conj().T
    else:
        # Defective (or near-defective) input: best-effort left vectors; the
        # flag tells callers the biorthogonal structure is unreliable.
        left = np.linalg.pinv(right).conj().T
    return SpectralDecomposition(
        eigenvalues=eigenvalues,
        right_vectors=right,
        left_vectors=left,
        diagonalizable=diagonalizable,
        defect_measure=defect,
    )


@dataclass(frozen=True)
class BoundStateEntry:
    """One classified eigenvalue of h_bound with its eigenvector pair."""

    energy: complex
    right_amplitudes: np.ndarray
    left_amplitudes: np.ndarray
    label: str  # BOUND, TRANSMISSION_ZERO or BIC_CANDIDATE
    matched_pole: Optional[complex] = None  # nearest h_eff eigenvalue, BIC only


@dataclass(frozen=True)
class BoundStateSet:
    """Classification of the h_bound spectrum against the h_eff spectrum.

    ``num_bound`` counts strictly-below-axis eigenvalues (an exact integer
    identity, no tolerance beyond tol_real itself); ``bound_state_count``
    adds BIC candidates when the set was built with ``count_bic=True``.
    Eigenvalues above the real axis are not physical states and appear only
    in ``num_above_axis``.
    """

    entries: tuple[BoundStateEntry, ...]
    num_bound: int
    num_zero: int
    num_bic: int
    num_above_axis: int
    count_bic: bool
    tol_real: float
    tol_match: float
    defective_input: bool

    @property
    def bound_state_count(self) -> int:
        return self.num_bound + (self.num_bic if self.count_bic else 0)

    def by_label(self, label: str) -> tuple[BoundStateEntry, ...]:
        return tuple(e for e in self.entries if e.label == label)


def _eig_scale(*decs: SpectralDecomposition) -> float:
    mags = [np.abs(d.eigenvalues).max() for d in decs if d.n]
    return float(max(mags)) if mags else 1.0


def classify(
    bound_dec: SpectralDecomposition,
    eff_dec: SpectralDecomposition,
    tol_real: Optional[float] = None,
    tol_match: Optional[float] = None,
    count_bic: bool = True,
) -> BoundStateSet:
    """Sort the h_bound spectrum into bound states, zeros and BIC candidates.

    Parameters
    ----------
    bound_dec, eff_dec : SpectralDecomposition
        Decompositions of h_bound and h_eff, same dimension.
    tol_real : float, optional
        Half-width of the band around the real axis; defaults to
        1e-9 x max|eigenvalue| (eigenvalue perturbation scales with the
        matrix norm).
    tol_match : float, optional
        Distance below which a real h_bound eigenvalue is considered shared
        with h_eff (BIC candidate); defaults to 1e-7 x max|eigenvalue|.
    count_bic : bool
        Include BIC candidates in ``bound_state_count`` (the convention the
        winding relation uses).

    Degenerate or defective inputs do not raise; ``defective_input`` flags
    them and classification proceeds on the best-effort eigendata.
    """
    if bound_dec.n != eff_dec.n:
        raise ValueError("decompositions must have matching dimension")
    scale = _eig_scale(bound_dec, eff_dec)
    tr = TOL_REAL_SCALE * scale if tol_real is None else float(tol_real)
    tm = TOL_MATCH_SCALE * scale if tol_match is None else float(tol_match)

    entries = []
    n_bound = n_zero = n_bic = n_above = 0
    eff_eigs = eff_dec.eigenvalues
    for idx, energy in enumerate(bound_dec.eigenvalues):
        im = energy.imag
        if im < -tr:
            label, matched = BOUND, None
            n_bound += 1
        elif im <= tr:
            dist = np.abs(eff_eigs - energy)
            j = int(np.argmin(dist)) if dist.size else -1
            if j >= 0 and dist[j] <= tm:
                label, matched = BIC_CANDIDATE, complex(eff_eigs[j])
                n_bic += 1
            else:
                label, matched = TRANSMISSION_ZERO, None
                n_zero += 1
        else:
            n_above += 1
            continue
        entries.append(
            BoundStateEntry(
                energy=complex(energy),
                right_amplitudes=bound_dec.right_vectors[:, idx].copy(),
                left_amplitudes=bound_dec.left_vectors[:, idx].copy(),
                label=label,
                matched_pole=matched,
            )
        )
    return BoundStateSet(
        entries=tuple(entries),
        num_bound=n_bound,
        num_zero=n_zero,
        num_bic=n_bic,
        num_above_axis=n_above,
        count_bic=count_bic,
        tol_real=tr,
        tol_match=tm,
        defective_input=not (bound_dec.diagonalizable and eff_dec.diagonalizable),
    )


def classify_model(model: SpinModel, tol_real=None, tol_match=None, count_bic=True) -> BoundStateSet:
    """Classify a spin model directly (decomposes h_bound and h_eff)."""
    return classify(
        eigendecompose(model.h_bound),
        eigendecompose(model.h_eff),
        tol_real=tol_real,
        tol_match=tol_match,
        count_bic=count_bic,
    )


def _below_axis_count(model: SpinModel, tol_real: Optional[float]) -> tuple[int, np.ndarray]:
    # strict below-axis count by default: the threshold is defined by the
    # crossing of the real axis itself, and a norm-scaled band would bias
    # the bisected location by ~tol/slope
    eigs = np.linalg.eigvals(model.h_bound)
    tr = 0.0 if tol_real is None else tol_real
    return int(np.sum(eigs.imag < -tr)), eigs


class ThresholdResult(NamedTuple):
    value: float            # parameter value at the crossing
    crossing_energy: complex  # the eigenvalue sitting on the real axis there
    bracket: tuple[float, float]


def bound_state_threshold(
    family: Callable[[float], SpinModel],
    lower: float,
    upper: float,
    xtol: float = 1e-9,
    tol_real: Optional[float] = None,
) -> ThresholdResult:
    """Bisect a one-parameter family for a bound-state count change.

    ``family`` maps a scalar parameter (for the presets, the ratio
    gamma / gamma_tot) to a SpinModel.  The endpoints must have different
    below-axis eigenvalue counts, else ``NoBracket`` is raised.  Bisection
    narrows the crossing to ``xtol``; the returned ``crossing_energy`` is
    the eigenvalue closest to the real axis at the refined parameter.
    """
    lo, hi = float(lower), float(upper)
    if not lo < hi:
        raise ValueError("bracket must satisfy lower < upper")
    n_lo, _ = _below_axis_count(family(lo), tol_real)
    n_hi, _ = _below_axis_count(family(hi), tol_real)
    if n_lo == n_hi:
        raise NoBracket(
            f"bound-state count is {n_lo} at both bracket endpoints "
            f"({lo:g}, {hi:g}); nothing to bisect"
        )
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        n_mid, _ = _below_axis_count(family(mid), tol_real)
        if n_mid == n_lo:
            lo = mid
        else:
            hi = mid
    value = 0.5 * (lo + hi)
    _, eigs = _below_axis_count(family(value), tol_real)
    crossing = complex(eigs[np.argmin(np.abs(eigs.imag))])
    return ThresholdResult(value=value, crossing_energy=crossing, bracket=(lo, hi))
