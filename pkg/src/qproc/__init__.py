"""Intrinsic computation of quantum finite-state generators under projective measurement."""

from .classical import ClassicalGenerator, classical_equivalent, classical_word_probability, verify_equivalence
from .errors import (
    NumericalError,
    QprocError,
    ResourceLimitError,
    ShapeError,
    UnknownSymbolError,
    UnsupportedError,
    ValidationError,
)
from .generator import (
    PROTOCOL_I,
    PROTOCOL_II,
    MeasurementProtocol,
    QuantumGenerator,
    build_generator,
    effective_generator,
    is_deterministic,
    stationary_density,
    transition_matrix,
)
from .infotheory import (
    EntropyCurve,
    InfoReport,
    analyze,
    block_entropy,
    density_matrix_rate,
    entropy_rate_closed_form,
    entropy_rate_curve,
    excess_entropy,
    forbidden_words,
    transient_information,
    von_neumann_entropy,
)
from .process import (
    Trajectory,
    WordDistribution,
    empirical_distribution,
    enumerate_distribution,
    iter_distributions,
    sample_trajectory,
    word_operator,
    word_probability,
    word_probability_protocol,
)
from .systems import builtin_systems, get_system

__version__ = "0.1.0"
