"""Effective spin description of emitters chirally coupled to a 1D photon channel.

N two-level emitters with transition frequency omega_eg sit at positions z_i
along a channel that carries only right-propagating photons with linear
dispersion (natural units, c = 1).  Emitter i couples to the channel with a
complex amplitude V_i, giving a per-emitter channel decay rate
Gamma_i = |V_i|^2 / 2.  Every other electromagnetic mode is folded into a
reservoir coupling matrix K', which must be dissipative: the Hermitian matrix
-i(K' - K'^dag) may have no positive eigenvalue.

The channel itself mediates a retarded coupling

    K_ij(k) = -i V_i V_j* exp(i k (z_i - z_j)) Theta(z_i - z_j),

evaluated at k = omega_eg under the Markov approximation.  The Heaviside
convention Theta(0) = 1/2 is a hard invariant of this library: it reproduces
the single-emitter rate K = -i |V|^2 / 2 and makes

    K - K^dag = -i v v^dag,     v_i = V_i exp(i k z_i)

hold exactly, which every downstream identity relies on.

Two matrices drive everything downstream:

    h_eff   = omega_eg 1 + K' + K        traced-out effective Hamiltonian;
                                         its eigenvalues are the poles of the
                                         transmission coefficient and never
                                         lie above the real axis,
    h_bound = omega_eg 1 + K' + K^dag    advanced-coupling counterpart; its
                                         lower-half-plane eigenvalues are the
                                         dissipative bound states and its real
                                         eigenvalues the transmission zeros.

All construction here is pure: functions return new immutable objects and
never touch shared state, so concurrent use is safe.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    MarkovValidityWarning,
    NegativeRate,
    NonDissipativeReservoir,
)

# Default transition frequency for the bundled presets, in units of the total
# decay rate.  Large enough that the two-emitter spacing 2*pi/omega_eg keeps
# the Markov figure of merit Gamma * L well below 0.1.
DEFAULT_OMEGA_EG = 100.0

# Markov figure of merit max(Gamma_i) * (z_max - z_min) at or above this
# value triggers MarkovValidityWarning.
MARKOV_WARN_THRESHOLD = 0.1

_IDENTITY_RTOL = 1e-12  # rank-one identity h_bound - h_eff = i v v^dag
_UPPER_HALF_TOL = 1e-8  # ceiling on Im eigenvalues of h_eff


def _step(x):
    """Heaviside step with the library-wide convention Theta(0) = 1/2."""
    x = np.asarray(x)
    return np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5))


@dataclass(frozen=True)
class EnsembleConfig:
    """Physical scene: emitter positions and complex channel couplings.

    Parameters
    ----------
    omega_eg : float
        Transition frequency of the two-level emitters (c = 1 units).
    positions : array_like of float, shape (N,)
        Emitter coordinates z_i along the channel, in user order.
    couplings : array_like of complex, shape (N,)
        Channel coupling amplitudes V_i.  The per-emitter channel decay
        rate is |V_i|^2 / 2.

    Raises ``ValueError`` for an empty or non-finite scene and warns with
    ``MarkovValidityWarning`` when max(Gamma_i) * (z_max - z_min) >= 0.1.
    """

    omega_eg: float
    positions: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        pos = np.atleast_1d(np.asarray(self.positions, dtype=float))
        coup = np.atleast_1d(np.asarray(self.couplings, dtype=complex))
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "couplings", coup)
        if pos.size == 0:
            raise ValueError("ensemble must contain at least one emitter")
        if pos.shape != coup.shape:
            raise ValueError("positions and couplings must have matching length")
        if not (np.isfinite(self.omega_eg) and np.all(np.isfinite(pos)) and np.all(np.isfinite(coup))):
            raise ValueError("positions, couplings and omega_eg must be finite")
        pos.setflags(write=False)
        coup.setflags(write=False)
        fom = self.markov_figure_of_merit
        if fom >= MARKOV_WARN_THRESHOLD:
            warnings.warn(
                f"ensemble length x peak channel rate = {fom:.3g} >= {MARKOV_WARN_THRESHOLD}; "
                "the Markov construction of the coupling matrices is strained",
                MarkovValidityWarning,
                stacklevel=3,
            )

    @property
    def n_emitters(self) -> int:
        return self.positions.size

    @property
    def channel_rates(self) -> np.ndarray:
        """Per-emitter channel decay rates Gamma_i = |V_i|^2 / 2."""
        return 0.5 * np.abs(self.couplings) ** 2

    @property
    def markov_figure_of_merit(self) -> float:
        """max(Gamma_i) times the ensemble length; small means Markov-valid."""
        length = float(self.positions.max() - self.positions.min())
        return float(self.channel_rates.max()) * length

    def phase_vector(self, k: Optional[float] = None) -> np.ndarray:
        """Drive vector v_i = V_i exp(i k z_i); k defaults to omega_eg."""
        kk = self.omega_eg if k is None else float(k)
        return self.couplings * np.exp(1j * kk * self.positions)


@dataclass(frozen=True)
class ReservoirCoupling:
    """Reservoir-induced coupling matrix K' with its dissipativity certificate.

    The constructor diagonalizes the Hermitian matrix -i(K' - K'^dag) and
    rejects the input with ``NonDissipativeReservoir`` if any eigenvalue
    exceeds +1e-10 times the matrix norm (a hard zero would reject valid
    inputs through eigenvalue roundoff alone).  The sorted eigenvalues are
    kept on the instance as the certificate.
    """

    matrix: np.ndarray
    flux_eigenvalues: np.ndarray = field(init=False)
    dissipativity_tol: float = field(init=False)

    def __post_init__(self):
        mat = np.atleast_2d(np.asarray(self.matrix, dtype=complex))
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("reservoir coupling must be a square matrix")
        if not np.all(np.isfinite(mat)):
            raise ValueError("reservoir coupling must be finite")
        object.__setattr__(self, "matrix", mat)
        mat.setflags(write=False)
        flux = -1j * (mat - mat.conj().T)  # Hermitian by construction
        eigs = np.linalg.eigvalsh(flux)
        tol = 1e-10 * np.linalg.norm(mat, 2)
        object.__setattr__(self, "flux_eigenvalues", eigs)
        object.__setattr__(self, "dissipativity_tol", float(tol))
        eigs.setflags(write=False)
        worst = float(eigs.max()) if eigs.size else 0.0
        if worst > tol:
            raise NonDissipativeReservoir(
                f"reservoir coupling is not dissipative: -i(K'-K'^dag) has "
                f"eigenvalue {worst:+.6g} > tolerance {tol:.3g}",
                offending_eigenvalue=worst,
            )

    @property
    def n_emitters(self) -> int:
        return self.matrix.shape[0]


def channel_coupling(config: EnsembleConfig, k: Optional[float] = None) -> np.ndarray:
    """Retarded channel-induced coupling matrix at frequency k.

    K_ij(k) = -i V_i V_j* exp(i k (z_i - z_j)) Theta(z_i - z_j) with
    Theta(0) = 1/2.  ``k=None`` evaluates at omega_eg, the Markov limit;
    ``channel_coupling(config)`` and ``channel_coupling(config, config.omega_eg)``
    are identical.
    """
    kk = config.omega_eg if k is None else float(k)
    dz = config.positions[:, None] - config.positions[None, :]
    amp = -1j * np.outer(config.couplings, config.couplings.conj())
    return amp * np.exp(1j * kk * dz) * _step(dz)


@dataclass(frozen=True)
class SpinModel:
    """The derived matrices of the effective spin description.

    ``coupling`` is the channel matrix K evaluated at ``k_eval`` (omega_eg
    when ``k_eval`` is None, i.e. the Markov model), ``h_eff`` the traced-out
    effective Hamiltonian omega_eg*1 + K' + K, and ``h_bound`` its
    advanced-coupling counterpart omega_eg*1 + K' + K^dag.

    Construction verifies two structural invariants:

    * h_bound - h_eff = +i v v^dag with v_i = V_i exp(i k z_i), to 1e-12
      relative norm (the Theta(0) = 1/2 convention makes this exact);
    * no eigenvalue of h_eff sits above the real axis beyond 1e-8 x norm.
    """

    config: EnsembleConfig
    reservoir: ReservoirCoupling
    k_eval: Optional[float]
    coupling: np.ndarray
    h_bound: np.ndarray
    h_eff: np.ndarray

    def __post_init__(self):
        for name in ("coupling", "h_bound", "h_eff"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            object.__setattr__(self, name, arr)
            arr.setflags(write=False)
        v = self.config.phase_vector(self.k_eval)
        rank_one = 1j * np.outer(v, v.conj())
        diff = self.h_bound - self.h_eff
        scale = max(np.linalg.norm(rank_one), 1.0)
        if np.linalg.norm(diff - rank_one) > _IDENTITY_RTOL * scale:
            raise ValueError(
                "spin-model matrices violate h_bound - h_eff = i v v^dag; "
                "they were not built from a consistent configuration"
            )
        eigs = np.linalg.eigvals(self.h_eff)
        ceiling = _UPPER_HALF_TOL * max(1.0, np.linalg.norm(self.h_eff, 2))
        if eigs.size and float(eigs.imag.max()) > ceiling:
            raise ValueError(
                f"h_eff has an eigenvalue {eigs[np.argmax(eigs.imag)]:.6g} above "
                "the real axis; the reservoir certificate should have prevented this"
            )

    @property
    def n_emitters(self) -> int:
        return self.config.n_emitters

    @property
    def omega_eg(self) -> float:
        return self.config.omega_eg


def build_spin_model(
    config: EnsembleConfig,
    reservoir: Optional[ReservoirCoupling] = None,
    k: Optional[float] = None,
) -> SpinModel:
    """Assemble the spin-model matrices for an ensemble and reservoir.

    Parameters
    ----------
    config : EnsembleConfig
    reservoir : ReservoirCoupling, optional
        Defaults to K' = 0 (no reservoir, lossless chiral channel).
    k : float, optional
        When given, the channel coupling is evaluated at frequency k instead
        of omega_eg, yielding the frequency-dependent (beyond-Markov) model.

    Raises
    ------
    DimensionMismatch
        Reservoir size differs from the emitter count.
    NonDissipativeReservoir
        Raised by ``ReservoirCoupling`` itself; a reservoir instance that
        exists has already passed the certificate.
    """
    n = config.n_emitters
    if reservoir is None:
        reservoir = ReservoirCoupling(np.zeros((n, n), dtype=complex))
    if reservoir.n_emitters != n:
        raise DimensionMismatch(
            f"reservoir is {reservoir.n_emitters}x{reservoir.n_emitters} "
            f"but the ensemble has {n} emitters"
        )
    coupling = channel_coupling(config, k)
    base = config.omega_eg * np.eye(n, dtype=complex) + reservoir.matrix
    return SpinModel(
        config=config,
        reservoir=reservoir,
        k_eval=None if k is None else float(k),
        coupling=coupling,
        h_bound=base + coupling.conj().T,
        h_eff=base + coupling,
    )


def preset_single_atom(
    gamma: float,
    gamma_prime: float,
    omega_eg: float = DEFAULT_OMEGA_EG,
) -> tuple[EnsembleConfig, ReservoirCoupling]:
    """Single emitter at z = 0 with channel rate gamma and reservoir rate gamma_prime.

    V = sqrt(2 gamma) so that the channel coupling matrix is [-i gamma];
    the reservoir is K' = [-i gamma_prime].
    """
    if gamma < 0 or gamma_prime < 0:
        raise NegativeRate("decay rates must be non-negative")
    config = EnsembleConfig(
        omega_eg=omega_eg, positions=np.array([0.0]), couplings=np.array([np.sqrt(2.0 * gamma)])
    )
    reservoir = ReservoirCoupling(np.array([[-1j * gamma_prime]]))
    return config, reservoir


def preset_two_atom(
    gamma: float,
    gamma_prime: float,
    omega_eg: float = DEFAULT_OMEGA_EG,
) -> tuple[EnsembleConfig, ReservoirCoupling]:
    """Two identical emitters spaced by 2*pi/omega_eg with a symmetric reservoir.

    Both emitters couple with V = sqrt(2 gamma); each decays to the reservoir
    at rate gamma_prime and they interact coherently with strength
    -gamma_prime, i.e. K' = gamma_prime * [[-i, -1], [-1, -i]].

    The downstream emitter (larger z) is stored first so that the channel
    coupling matrix comes out upper-triangular:

        K = gamma * [[-i, -2i], [0, -i]].
    """
    if gamma < 0 or gamma_prime < 0:
        raise NegativeRate("decay rates must be non-negative")
    if not omega_eg > 0:
        raise ValueError("omega_eg must be positive to set the 2*pi/omega_eg spacing")
    spacing = 2.0 * np.pi / omega_eg
    v = np.sqrt(2.0 * gamma)
    config = EnsembleConfig(
        omega_eg=omega_eg,
        positions=np.array([0.0, -spacing]),
        couplings=np.array([v, v], dtype=complex),
    )
    reservoir = ReservoirCoupling(gamma_prime * np.array([[-1j, -1.0], [-1.0, -1j]]))
    return config, reservoir


PRESETS: dict[str, Callable[..., tuple[EnsembleConfig, ReservoirCoupling]]] = {
    "single_atom": preset_single_atom,
    "two_atom": preset_two_atom,
}


def preset_family(
    kind: str,
    gamma_tot: float = 1.0,
    omega_eg: float = DEFAULT_OMEGA_EG,
) -> Callable[[float], SpinModel]:
    """One-parameter family ratio -> SpinModel at fixed total rate.

    ``family(ratio)`` builds the named preset with gamma = ratio * gamma_tot
    and gamma_prime = (1 - ratio) * gamma_tot.  Used by threshold bisection
    and parameter sweeps.
    """
    try:
        build = PRESETS[kind]
    except KeyError:
        raise ValueError(f"unknown preset {kind!r}; choose from {sorted(PRESETS)}") from None

    def family(ratio: float) -> SpinModel:
        g = ratio * gamma_tot
        return build_spin_model(*build(g, gamma_tot - g, omega_eg=omega_eg))

    return family
