"""dynrel: hidden deterministic relations in rational stochastic models.

Given a continuous-time stationary model (A, B, C) whose output spectral
density may be rank deficient, this package extracts the exact rational
map F(s) linking sub-processes, classifies its stability and the
Granger-causality / feedback structure of the network, and performs
exact sampling and its inverse, including recovery of rank deficiencies
that sampling hides.
"""

from .errors import (
    AlgebraicLoopSingular,
    BColumnDeficient,
    ConditionError,
    DimensionMismatch,
    DNotInvertible,
    DynrelError,
    ExistenceFailure,
    InadmissibleSelection,
    InputError,
    LogFailure,
    NoAdmissibleSelection,
    NonPositiveH,
    NotObservable,
    NotPSD,
    NotReachable,
    NotSemidefinite,
    NotStable,
    ParseError,
    PhiUSingular,
    PoleHit,
    QdSingular,
    RankCBDeficient,
    RankInconsistent,
    SchemaVersionUnsupported,
    SelectionLimitExceeded,
    SingularInput,
    SpectrumConflict,
)
from .kernels import (
    COND_LIMIT,
    DEFAULT_TOL,
    Tolerances,
    is_invertible,
    matrix_exp,
    matrix_log_principal,
    nonzero_spectrum,
    numerical_rank,
    psd_factor,
    solve_lyap_continuous,
    solve_lyap_discrete,
)
from .lti import (
    CtModel,
    StateSpace,
    evaluation_gap,
    is_strictly_stable,
    mcmillan_degree,
    minimal_realization,
    poles,
    probe_points,
    ss_inverse,
    tf_eval,
    validate_ct_model,
)
from .spectral import (
    PartitionSpec,
    SpectrumSample,
    default_grid,
    f_from_spectrum_eval,
    spectral_density_eval,
    spectral_rank_profile,
)
from .relation import (
    SELECTION_CAP,
    RelationReport,
    RowSelection,
    classify_selection,
    compute_F,
    compute_F_raw,
    compute_gamma,
    enumerate_selections,
    has_full_eigenbasis,
    stable_selection_exists,
)
from .feedback import (
    ClosedLoop,
    FeedbackFreeVerdict,
    FeedbackModel,
    closed_loop_T,
    feedback_free,
    granger_causes,
    internal_stability,
    verify_interchange_identities,
)
from .sampling import (
    DesampleDiagnostics,
    HiddenRankReport,
    SampledModel,
    desample,
    dual_lyapunov_check,
    hidden_rank_report,
    sample,
)

__version__ = "0.1.0"
