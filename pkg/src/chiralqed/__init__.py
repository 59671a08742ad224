"""Single-photon bound states and photon transport for chirally coupled emitters.

Numerical toolkit for N two-level emitters coupled to a 1D channel of
right-propagating photons, with arbitrary dissipative reservoir coupling:

* construction and validation of the effective spin matrices (`spinmodel`),
* biorthogonal eigen-analysis and bound-state classification (`spectral`),
* transmission spectra by three cross-checking routes, scattering and
  bound-state wavefunctions, and the winding-number relation
  winding(t_k) = N - N_B (`scattering`),
* second-order photon correlation g2 for the single emitter (`twophoton`),
* JSON-driven task runner and command-line interface (`runspec`, `runner`,
  `cli`).
"""

from .errors import (
    ChiralQEDError,
    ConvergenceFailure,
    Defective,
    DimensionMismatch,
    GridCoverageWarning,
    GridRefinementError,
    MarkovValidityWarning,
    NegativeRate,
    NoBracket,
    NonDissipativeReservoir,
    NotABoundState,
    OnRealAxis,
    ParseError,
    PoleHit,
    PoleOnGridWarning,
    QuadratureFailure,
    SingularSystem,
    ValidationError,
    ZeroOnContour,
)
from .spinmodel import (
    DEFAULT_OMEGA_EG,
    EnsembleConfig,
    ReservoirCoupling,
    SpinModel,
    build_spin_model,
    channel_coupling,
    preset_family,
    preset_single_atom,
    preset_two_atom,
)
from .spectral import (
    BIC_CANDIDATE,
    BOUND,
    BoundStateEntry,
    BoundStateSet,
    SpectralDecomposition,
    ThresholdResult,
    TRANSMISSION_ZERO,
    bound_state_threshold,
    classify,
    classify_model,
    eigendecompose,
)
from .scattering import (
    ADVANCED,
    EXACT,
    LevinsonCheck,
    MARKOV,
    RETARDED,
    TransmissionTrace,
    WavefunctionSample,
    bound_wavefunction,
    find_transmission_zeros,
    photon_propagator,
    sample_transmission,
    scattering_solve,
    scattering_wavefunction,
    transmission_det,
    transmission_product,
    verify_levinson,
    winding_number,
)
from .twophoton import (
    ASYMPTOTIC_UNIT,
    RAW,
    TwoPhotonCorrelation,
    g2,
    psi2_closed,
    psi2_numeric,
    resonant_transmission,
    t_matrix,
)
from .emit import matrix_csv_text
from .runspec import RunSpec, load_runspec
from .runner import SweepResult, reproduce, run, sweep
from .version import __version__
