"""quasibohm: 1D pilot-wave trajectories for eigenstate superpositions.

Computes particle paths two independent ways (guidance-ODE integration and
exact CDF transport), estimates the Lyapunov exponent three ways, and checks
quasiperiodicity spectrally.
"""

__version__ = "0.1.0"

from .eigenbasis import (
    EigenBasis,
    Harmonic,
    InfiniteWell,
    PiecewiseBox,
    build_harmonic,
    build_infinite_well,
    build_numeric,
)
from .ensemble import (
    EnsembleRun,
    equilibrium_distance,
    equilibrium_quantiles,
    evolve_ensemble,
    stratified_uniform,
)
from .errors import (
    CapabilityError,
    DomainError,
    InvalidParameterError,
    NodeProximityError,
    NumericError,
    QuasibohmError,
    TrajectorySingularityError,
)
from .lyapunov import (
    LyapunovEstimate,
    lyapunov_ratio,
    lyapunov_two_trajectory,
    lyapunov_variational,
)
from .spectrum import (
    Peak,
    SpectrumReport,
    analyze_trajectory,
    match_combinations,
    power_spectrum,
)
from .state import PhaseVector, SuperpositionState
from .trajectory import (
    Trajectory,
    evolve_cdf,
    evolve_ode,
    evolve_ode_with_tangent,
    quasiperiodic_F,
)
