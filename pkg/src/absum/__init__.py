"""Exact summatory arithmetic functions, step-function Abel decomposition,
and empirical verification of asymptotic growth claims."""

from .asymptotics import (
    BIG_O,
    CONSISTENT,
    INCONCLUSIVE,
    LITTLE_O,
    VIOLATED,
    AsymptoticModel,
    AsymptoticTerm,
    ClaimReport,
    ErrorEnvelope,
    check_envelope,
    decade_medians,
    eval_model,
    fit_leading,
    report_to_json,
    reports_to_json,
    residual_series,
)
from .claims import (
    MOBIUS_BOUND_CONSTANT,
    ClaimSpec,
    TableProvider,
    default_grid,
    get_claim,
    list_claims,
    run_all,
    run_claim,
)
from .errors import (
    DomainError,
    RangeError,
    ShapeError,
    SizingError,
    UnknownClaimError,
    UsageError,
)
from .sieves import (
    INTEGER_VALUED,
    REAL_VALUED,
    FunctionTable,
    build_named_table,
    load_table,
    save_table,
    sieve_mobius,
    sieve_prime_indicator,
    sieve_sigma,
    sieve_tau,
    table_mangoldt,
    table_pointwise,
    table_theta_terms,
)
from .summation import (
    AbelDecomposition,
    CheckpointGrid,
    CompensatedSum,
    SummatorySeries,
    abel_decompose,
    masked_by_primes,
    partial_sums,
    prime_restricted_sums,
    series_to_csv,
    weighted_sums,
)

__version__ = "0.1.0"
