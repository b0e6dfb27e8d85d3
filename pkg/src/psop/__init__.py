"""Convolution, dual convolution, and Toeplitz operators on power series
spaces: truncated computation with certified tails, verification of the
continuity/power inequalities, and three-valued operator classification."""

__version__ = "0.1.0"

from .spaces import (  # noqa: F401
    AlphaKind,
    explicit_alpha,
    linear_alpha,
    log_alpha,
    root_alpha,
    DualCertificate,
    ExponentSequence,
    ExponentialEnvelope,
    FinitelySupported,
    GeometricEnvelope,
    NuclearityCert,
    SpaceSpec,
    SpaceType,
    StabilityCert,
    TailUnbounded,
    TailedValue,
    dual_certificate_check,
    finite_type_space,
    infinite_type_space,
    nuclearity_check,
    seminorm,
    stability_constant,
    weight,
)
from .symbols import (  # noqa: F401
    ConvPowerTable,
    MembershipReport,
    OutOfSampledRange,
    SeriesSum,
    Symbol,
    coeff,
    conv_power,
    convolve,
    delta_symbol,
    ell1_norm,
    finite_symbol,
    geometric_symbol,
    membership_check,
    parse_symbol,
    sampled_symbol,
    zero_symbol,
)
from .operators import (  # noqa: F401
    Element,
    OperatorContractError,
    OperatorKind,
    OperatorSpec,
    OrbitRecord,
    basis_element,
    cesaro_mean,
    check_apply,
    check_column,
    compose_check,
    compose_hat,
    compute_orbit,
    element_from_symbol,
    hat_apply,
    hat_column,
    make_check_operator,
    make_hat_operator,
    make_toeplitz_operator,
    power_apply,
    toeplitz_apply,
    toeplitz_matrix,
)
from .classify import (  # noqa: F401
    Certificate,
    GridParams,
    Status,
    UnsupportedSpace,
    Verdict,
    classify_check_all,
    classify_check_finite,
    classify_check_infinite,
    classify_hat_m_top,
    classify_hat_power_bounded_finite,
    classify_hat_power_bounded_infinite,
    classify_hat_topologizable,
    classify_toeplitz,
    mean_ergodic_probe,
    strongly_tame_probe,
)
from .laurent import (  # noqa: F401
    AliasRisk,
    CertificateFitFailed,
    HoloSymbol,
    LaurentCoeffs,
    PoleOnContour,
    blackbox_symbol,
    laurent_coeffs,
    rational_symbol,
    symbol_split,
    toeplitz_from_function,
)
from .oracle import (  # noqa: F401
    DenseTrunc,
    NonReplayable,
    dense_apply,
    dense_cesaro,
    dense_check,
    dense_hat,
    dense_power,
    dense_toeplitz,
    replay_verdict,
)
