"""Numerical moment-map flow and retraction for representation varieties."""
from .config import DEFAULT, ToleranceConfig, load_config
from .errors import (
    BallTooLarge,
    ConsistencyWarning,
    DimensionMismatch,
    FlowNotConverged,
    InvalidRepresentation,
    KnflowError,
    NonSemisimple,
    NotHermitian,
    NotInKempfNessSet,
    NotNormal,
    NumericalBreakdown,
    Singular,
    UnknownPresentation,
)
from .groups import Presentation, Representation, Word, builtin_presentation, relation_residual, word_ball, word_evaluate
from .invariants import InvariantVector, Verdict, quotient_compare, trace_invariants, unitary_orbit_distance
from .kempfness import (
    Diagnostic,
    FlowTrace,
    MembershipReport,
    flow,
    kn_function,
    kn_membership,
    moment_map,
    polystable_diagnostic,
)
from .matcore import GroupSpec, eigendecompose, normality_residual, polar_decompose, spectral_decompose
from .scaling import full_retract, homomorphism_defect, scale_matrix, scale_rep, stage_one

__version__ = "0.1.0"
