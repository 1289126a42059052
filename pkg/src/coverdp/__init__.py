"""Differentially private estimation of black-box statistics.

The pipeline: pick a covering design over the input positions, evaluate the
black box once per design set (on that set's complement), and privately
invert the resulting monotone envelope so the output lands between the
smallest and largest observed value.  The design side trades oracle calls
against the amount of data each call sees; the mechanism side offers a pure
DP flavor (exponential mechanism) and a concentrated DP flavor (noisy binary
search), with approximate DP served through the concentrated one.
"""

from .data import (
    NULL,
    Dataset,
    IndexSet,
    is_subset,
    load_dataset,
    remove,
    restrict,
    save_dataset,
    size,
    symmetric_distance,
)
from .designs import (
    CoveringDesign,
    EnumerationBudgetError,
    erdos_spencer_upper_bound,
    exact_covering_number,
    generate_chunked,
    generate_complete,
    generate_partition,
    generate_random,
    generate_single,
    load_design,
    save_design,
    schonheim_lower_bound,
    verify,
)
from .estimator import (
    EstimatePlan,
    EstimateReport,
    InfeasiblePlanError,
    PlanChoice,
    estimate,
    plan_tradeoff,
    removal_tolerance,
)
from .losses import (
    OracleCache,
    OracleCounter,
    OutputGrid,
    brute_force_loss_tables,
    brute_force_removal_loss,
    brute_force_strict_removal_loss,
    build_cache,
    definition_envelope,
    infeasible_loss,
    loss_tables,
    monotone_envelope,
    removal_loss,
    shifted_loss,
    shifted_loss_table,
    strict_removal_loss,
)
from .mechanisms import (
    NoiseSource,
    PrivacyAccountingError,
    PrivacyBudget,
    SearchCalibration,
    approx_dp_to_zcdp,
    calibrate_noisy_search,
    exponential_mechanism,
    exponential_mechanism_distribution,
    gaussian_query,
    group_privacy_bound,
    noisy_binary_search,
    zcdp_to_approx_dp,
)
from .shifted_inverse import (
    ShiftedInverseResult,
    pure_output_distribution,
    pure_shift,
    shifted_inverse_pure,
    shifted_inverse_zcdp,
)

__all__ = [name for name in dir() if not name.startswith("_")]
