"""Hyperdisks, masking machines and the structure of maskable sets."""

from .classify import (
    TargetStructure,
    appendix_b_injectivity_probe,
    appendix_collinearity_check,
    classify_qubit_maskable_set,
    classify_qutrit_target_set,
    projection_residual,
)
from .hyperdisk import (
    Hyperdisk,
    SchmidtHyperdisk,
    classify_2d_regular_subset,
    common_parent_obstruction,
    contains,
    gramian,
    hyperdisk_through_pair,
    is_schmidt_hyperdisk,
    is_subhyperdisk,
)
from .linalg import DEFAULT_TOL, PureState, Tolerance, partial_trace, schmidt_decompose
from .masking import (
    LegalSetSpec,
    MarginalSpec,
    MaskableSet,
    MaskingMachine,
    degeneracy_class,
    dimension_bound,
    legal_state,
    mask,
    schmidt_hyperdisk_criterion,
    verify_condition1,
    verify_condition2,
)

__version__ = "0.1.0"
