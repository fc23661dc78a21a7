"""scplab: convolution dynamics of probability measures on concrete groups,
with exact spectral criteria for point-wise distality and a cross-checking
experiment engine."""

from .dynamics import EngineParams, FiberedMeasure, Trajectory
from .engine import (
    Dissipating,
    Inconclusive,
    ShiftedHaar,
    Violation,
    classify_measure,
    construct_counterexample,
    cross_check_dichotomy,
    orbit_collapse_demo,
    predict_point_wise_distal,
)
from .groups import (
    FiniteGroup,
    FiniteSubgroup,
    IntAutomorphism,
    LatticeGroup,
    ProfileSubgroup,
    SemidirectGroup,
    ShiftGroup,
    Torus,
    TorusSubgroup,
    dual_automorphism,
    semidirect_multiply,
    shift_apply,
    smith_annihilator,
)
from .harmonic import harmonic_space, is_choquet_deny
from .measures import (
    AtomicMeasure,
    HaarMeasure,
    ProductProfileMeasure,
    SpectralMeasure,
    convolve,
    dirac,
    distance,
    haar_of,
    is_idempotent,
    pushforward_automorphism,
    pushforward_quotient,
    pushforward_shift,
    reflect,
    uniform_on,
)
from .spectral import (
    ContractionSplit,
    Distal,
    NonDistal,
    char_poly,
    contraction_split,
    cyclotomic,
    distality_verdict_poly,
    ergodicity_verdict_poly,
    has_root_of_unity_factor,
    integrality_trichotomy,
    kronecker_all_roots_unit_modulus,
    newton_polygon,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
