"""Efficiency, matching and circuit models for N-stage bosonic transducer chains."""

from .chain import ModeParams, TransducerChain, cooperativity
from .circuit import CircuitElement, CircuitNetwork, power_transmission, synthesize
from .ensemble import EnsembleSpec, collective_chain, discretized_ensemble_efficiency
from .errors import (
    ConfigError,
    DegenerateChain,
    DegenerateNetwork,
    InvalidChain,
    InvalidRates,
    SingularSystem,
    TransducerError,
    ZeroLinewidth,
)
from .matching import MatchingSolution, matching_determinant, solve_0stage
from .optimizer import OptimizationProblem, optimal_1stage, optimal_2stage, optimal_frequencies, optimize_general
from .phase import PhaseDiagramCell, phase_diagram
from .scattering import (
    CoupledModeNetwork,
    added_noise,
    efficiency_closed_form,
    network_scattering,
    scattering_matrix,
)

__version__ = "0.1.0"
