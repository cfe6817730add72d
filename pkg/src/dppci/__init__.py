"""Independence structure of determinantal point processes.

Validated kernels, event probabilities, zero-block conditional-independence
tests, graph separation certificates, and an exhaustive oracle for checking
all of it on small ground sets.
"""

from .errors import (
    AsymmetricMatrixError,
    ConditioningEventNegligibleError,
    DppError,
    EmptyQuerySetError,
    GroundSetTooLargeError,
    IndexOutOfRangeError,
    KernelValidationError,
    NonFiniteError,
    NumericalFailureError,
    OverlappingSetsError,
    ParseError,
    SingularConditioningBlockError,
    SpectrumOutOfRangeError,
)
from .graphs import (
    GraphVerdict,
    InducedGraph,
    SchurZeroReport,
    graph_certified_ci,
    graph_certified_multiway_ci,
    induced_graph,
    separates,
    separation_zero_block_report,
)
from .independence import (
    CiQuery,
    CiVerdict,
    CounterexampleReport,
    check_ci_given_exclusion,
    check_ci_given_inclusion,
    check_conditional_independence,
    check_marginal_independence,
    check_pairwise_given_rest_excluded,
    check_pairwise_given_rest_included,
    counterexample_demo,
)
from .kernels import (
    DEFAULT_EPS_SPEC,
    DEFAULT_SYM_TOL,
    DEFAULT_ZERO_TOL,
    EMPTY_SET,
    EnsembleKernel,
    Event,
    IndexSet,
    MarginalKernel,
    SymMatrix,
    as_index_set,
    block,
    complement_marginal,
    dual_ensemble,
    k_from_l,
    l_from_k,
    schur_complement,
    submatrix,
    validate_ensemble,
    validate_marginal,
)
from .oracle import (
    JointTable,
    OracleVerdict,
    build_table,
    event_independence,
    event_prob,
    multiway_independence,
    process_independence,
    sample,
    sample_many,
)
from .probability import (
    ConditionalKernel,
    DppModel,
    conditional_kernel,
    conditional_kernel_given_excluded,
    conditional_kernel_given_included,
    exact_prob,
    inclusion_prob,
    mixed_prob,
)

__version__ = "0.1.0"

__all__ = [
    "AsymmetricMatrixError",
    "CiQuery",
    "CiVerdict",
    "ConditionalKernel",
    "ConditioningEventNegligibleError",
    "CounterexampleReport",
    "DEFAULT_EPS_SPEC",
    "DEFAULT_SYM_TOL",
    "DEFAULT_ZERO_TOL",
    "DppError",
    "DppModel",
    "EMPTY_SET",
    "EmptyQuerySetError",
    "EnsembleKernel",
    "Event",
    "GraphVerdict",
    "GroundSetTooLargeError",
    "IndexOutOfRangeError",
    "IndexSet",
    "InducedGraph",
    "JointTable",
    "KernelValidationError",
    "MarginalKernel",
    "NonFiniteError",
    "NumericalFailureError",
    "OracleVerdict",
    "OverlappingSetsError",
    "ParseError",
    "SchurZeroReport",
    "SingularConditioningBlockError",
    "SpectrumOutOfRangeError",
    "SymMatrix",
    "as_index_set",
    "block",
    "build_table",
    "check_ci_given_exclusion",
    "check_ci_given_inclusion",
    "check_conditional_independence",
    "check_marginal_independence",
    "check_pairwise_given_rest_excluded",
    "check_pairwise_given_rest_included",
    "complement_marginal",
    "conditional_kernel",
    "conditional_kernel_given_excluded",
    "conditional_kernel_given_included",
    "counterexample_demo",
    "dual_ensemble",
    "event_independence",
    "event_prob",
    "exact_prob",
    "graph_certified_ci",
    "graph_certified_multiway_ci",
    "inclusion_prob",
    "induced_graph",
    "k_from_l",
    "l_from_k",
    "mixed_prob",
    "multiway_independence",
    "process_independence",
    "sample",
    "sample_many",
    "schur_complement",
    "separates",
    "separation_zero_block_report",
    "submatrix",
    "validate_ensemble",
    "validate_marginal",
]
