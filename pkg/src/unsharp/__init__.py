"""Finite-dimensional toolkit for unsharp quantum observables.

Effects and POMs, Lüders updates, joint measurability of qubit observables,
the ray-space classical representation of states, and phase-space
measurements in a truncated Fock space.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .channels import (
    MeasurementOutcomeRecord,
    epr_robustness_probe,
    luders_general,
    luders_sharp,
    measure_and_update,
    repeatability_score,
)
from .classical import (
    ClassicalEffectFn,
    ClassicalMeasure,
    RayPoint,
    classical_effect_eval,
    mb_consistency_mc,
    mb_reduce,
    ray_overlap_geometry,
    sample_haar_ray,
)
from .errors import NumericalError, UnsharpError, ValidationError, ZeroProbability
from .linalg import hermitian_eig, operator_norm, operator_sqrt, trace_norm_distance
from .observables import (
    DiscretePOM,
    GridPositionMeasure,
    construct_joint_qubit,
    marginals,
    smear_discrete,
    smear_position,
)
from .states import (
    Effect,
    Projection,
    Reality,
    State,
    classify_property,
    complement,
    degree_of_reality,
    is_eigenstate,
    is_regular,
    qubit_nonorthogonal_decomposition,
    sharpness_report,
    spectral_decompose_effect,
)
