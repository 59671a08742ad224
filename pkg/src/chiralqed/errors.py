"""Exception and warning types shared across the library."""


class ChiralQEDError(Exception):
    """Base class for all errors raised by this library."""


class DimensionMismatch(ChiralQEDError):
    """Reservoir matrix dimension does not match the number of emitters."""


class NonDissipativeReservoir(ChiralQEDError):
    """-i(K' - K'^dag) has an eigenvalue above the dissipativity tolerance."""

    def __init__(self, message, offending_eigenvalue=None):
        super().__init__(message)
        self.offending_eigenvalue = offending_eigenvalue


class NegativeRate(ChiralQEDError):
    """A decay rate that must be non-negative was negative."""


class ConvergenceFailure(ChiralQEDError):
    """The eigensolver iteration cap was exceeded."""


class NoBracket(ChiralQEDError):
    """Bisection bracket endpoints carry the same bound-state count."""


class OnRealAxis(ChiralQEDError):
    """Propagator frequency lies on the real axis and no branch flag was given."""


class Defective(ChiralQEDError):
    """Operation requires a diagonalizable matrix."""


class SingularSystem(ChiralQEDError):
    """Scattering linear system is singular: k coincides with an eigenvalue
    of the traced-out effective Hamiltonian."""


class NotABoundState(ChiralQEDError):
    """Wavefunction requested for a spectral entry that is not classified BOUND."""


class ZeroOnContour(ChiralQEDError):
    """A zero (or uncancelled real pole) of t_k lies on the real axis; the
    winding number is undefined and parameters must be perturbed."""


class GridRefinementError(ChiralQEDError):
    """Adaptive phase refinement exceeded the point cap without resolving
    all phase steps."""


class QuadratureFailure(ChiralQEDError):
    """Adaptive quadrature did not reach the requested absolute tolerance."""


class PoleHit(ChiralQEDError):
    """A T-matrix denominator is numerically zero."""


class ParseError(ChiralQEDError):
    """Run configuration document is not valid JSON."""


class ValidationError(ChiralQEDError):
    """Run configuration document violates the schema.

    Carries the full list of violations so a single round trip reports
    every problem, not just the first.
    """

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("invalid run configuration:\n  - " + "\n  - ".join(self.violations))


class MarkovValidityWarning(UserWarning):
    """Ensemble length times the peak channel decay rate is large enough
    (>= 0.1 in units c = 1) to strain the Markov approximation."""


class PoleOnGridWarning(UserWarning):
    """A requested frequency coincides with a real eigenvalue of the
    traced-out effective Hamiltonian (a perfectly dark mode); the
    transmission value is reported as the infinity sentinel."""


class GridCoverageWarning(UserWarning):
    """The sampling grid does not extend far enough for the bound-state
    wavefunction to decay below the edge threshold."""
