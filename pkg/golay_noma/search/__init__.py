from golay_noma.search.permutation_search import (
    CoherenceDistribution,
    InfeasibleTargetError,
    SearchOutcome,
    empirical_coherence_distribution,
    permutation_set_for,
    search_permutation_set,
)
from golay_noma.search.probability import (
    coherence_probability,
    default_target_rank,
    min_trials,
    optimum_rank,
    suboptimum_rank,
    trial_budget,
)
from golay_noma.search.rank_pmf import InvalidRankError, RankPmf, estimate_rank_pmf, exhaustive_rank_pmf
from golay_noma.search.reference_tables import (
    REFERENCE_PERMUTATION_SETS,
    REFERENCE_RANK_PMF,
    ReferencePermutationSet,
    reference_set_for,
)
