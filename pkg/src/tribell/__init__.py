"""Mermin-inequality bounds, local filtering and violation oracles for 3-qubit states."""

from .correlation import (
    PairBound,
    SingularTriple,
    correlation_tensor,
    fold,
    mermin_bound,
    pair_bound,
    singular_triple,
    unfold,
)
from .filtering import (
    FilterAnnihilatesError,
    FilterSearchResult,
    FilterTriple,
    FilteredBoundReport,
    LocalFilter,
    ZeroFilterError,
    apply_filters,
    filter_normal_form,
    filtered_bound,
    filtered_correlation,
    optimize_filters,
)
from .oracle import (
    MeasurementSettings,
    OracleResult,
    maximize_mermin,
    maximize_svetlichny,
    mermin_expectation,
    mermin_operator,
    svetlichny_expectation,
    svetlichny_operator,
)
from .qalg import (
    NotHermitianError,
    NotPSDError,
    NotUnitTraceError,
    bloch_observable,
    eig_hermitian,
    expectation,
    kron3,
    pauli,
    validate_density,
)
from .states import (
    StateFamily,
    ad_apply,
    ad_ghz,
    build_state,
    ghz,
    load_state,
    noisy_ghz,
    psi_pi8_state,
    save_state,
)
from .thresholds import (
    NonMonotoneIndicatorError,
    NoViolationAnywhereError,
    SweepRow,
    ThresholdResult,
    bisect_threshold,
    critical_param,
    sweep,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ad_apply",
    "ad_ghz",
    "apply_filters",
    "bisect_threshold",
    "bloch_observable",
    "build_state",
    "correlation_tensor",
    "critical_param",
    "eig_hermitian",
    "expectation",
    "filter_normal_form",
    "filtered_bound",
    "filtered_correlation",
    "fold",
    "ghz",
    "kron3",
    "load_state",
    "maximize_mermin",
    "maximize_svetlichny",
    "mermin_bound",
    "mermin_expectation",
    "mermin_operator",
    "noisy_ghz",
    "optimize_filters",
    "pair_bound",
    "pauli",
    "psi_pi8_state",
    "save_state",
    "singular_triple",
    "svetlichny_expectation",
    "svetlichny_operator",
    "sweep",
    "unfold",
    "validate_density",
    "write_csv",
    "FilterAnnihilatesError",
    "FilterSearchResult",
    "FilterTriple",
    "FilteredBoundReport",
    "LocalFilter",
    "MeasurementSettings",
    "NonMonotoneIndicatorError",
    "NotHermitianError",
    "NotPSDError",
    "NotUnitTraceError",
    "NoViolationAnywhereError",
    "OracleResult",
    "PairBound",
    "SingularTriple",
    "StateFamily",
    "SweepRow",
    "ThresholdResult",
    "ZeroFilterError",
]
