"""Quantum-limited interferometric phase estimation toolkit.

Builds optimal fixed-photon-number two-mode input states, evaluates
exact canonical phase-measurement statistics, and simulates realizable
photon-counting measurements with adaptive feedback.
"""

from .circular import (
    TWO_PI,
    EnsembleEstimate,
    TrigPolynomial,
    ensemble_holevo_variance,
    holevo_variance,
    holevo_variance_mod_pi,
    mean_phase,
    moment,
    quadratic_variance,
    reduce_phase,
    sharpness,
)
from .errors import NumericalDegeneracyError
from .states import (
    JY,
    JZ,
    TwoModeState,
    equal_split_state,
    one_port_state,
    optimal_state,
    state_from_dict,
    state_to_dict,
    yurke_state,
)
from .su2 import (
    RotationColumn,
    SpinQuantum,
    basis_change_matrix,
    jacobi_at_zero,
    matrix_element,
    rotation_column,
    rotation_matrix,
    y_to_z,
    z_to_y,
)
from .canonical import (
    STATE_KINDS,
    canonical_distribution,
    canonical_moment,
    canonical_sweep,
    make_state,
    min_holevo_variance,
)
from .trajectory import (
    ConditionedState,
    EnumerationResult,
    FeedbackPolicy,
    MeasurementRecord,
    VarianceReport,
    adaptive_phase,
    apply_detection,
    amplitudes_at,
    detection_probability,
    exact_variance_enumeration,
    final_estimate,
    initial_state,
    maximand_coefficients,
    monte_carlo_variance,
    nonadaptive_phase,
    posterior,
    record_distribution,
    simulate_trajectory,
)

__version__ = "0.1.0"
