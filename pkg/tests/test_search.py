import math

import pytest

from golay_noma.analysis import coherence_by_rank
from golay_noma.gf2 import Permutation
from golay_noma.search import (
    REFERENCE_PERMUTATION_SETS,
    REFERENCE_RANK_PMF,
    InfeasibleTargetError,
    InvalidRankError,
    RankPmf,
    coherence_probability,
    default_target_rank,
    empirical_coherence_distribution,
    estimate_rank_pmf,
    exhaustive_rank_pmf,
    min_trials,
    optimum_rank,
    permutation_set_for,
    search_permutation_set,
    suboptimum_rank,
    trial_budget,
)
from golay_noma.search.reference_tables import REFERENCE_PMF_TRIALS, reference_set_for


def reference_pmf(m: int) -> RankPmf:
    return RankPmf(m=m, trials=REFERENCE_PMF_TRIALS, p=REFERENCE_RANK_PMF[m])


class TestRankPmf:
    def test_rejects_odd_rank(self):
        with pytest.raises(InvalidRankError):
            RankPmf(m=5, trials=1, p={3: 1.0})

    def test_rejects_rank_above_dimension(self):
        with pytest.raises(InvalidRankError):
            RankPmf(m=5, trials=1, p={6: 1.0})

    def test_tail_and_mode(self):
        pmf = reference_pmf(6)
        assert pmf.max_rank == 6
        assert pmf.most_probable_rank() == 4
        assert pmf.tail(4) == pytest.approx(5.848499e-1 + 3.565819e-1)
        assert pmf.probability(8) == 0.0

    def test_exhaustive_three_variables(self):
        pmf = exhaustive_rank_pmf(3)
        assert pmf.trials == 3
        assert pmf.p == {2: 1.0}

    def test_exhaustive_sums_to_one(self):
        pmf = exhaustive_rank_pmf(5)
        assert pmf.trials == 60 * 59 // 2
        assert sum(pmf.p.values()) == pytest.approx(1.0, abs=1e-12)
        assert pmf.zero_rank_count == 0

    def test_two_variables_have_no_pair(self):
        with pytest.raises(InvalidRankError):
            estimate_rank_pmf(2, 10, seed=0)

    def test_same_seed_same_estimate(self):
        assert estimate_rank_pmf(6, 500, seed=42) == estimate_rank_pmf(6, 500, seed=42)

    def test_worker_count_does_not_change_estimate(self):
        single = estimate_rank_pmf(5, 600, seed=8, workers=1, chunk_size=64)
        pooled = estimate_rank_pmf(5, 600, seed=8, workers=2, chunk_size=64)
        assert single == pooled

    def test_small_run_is_close_to_reference(self):
        pmf = estimate_rank_pmf(5, 4000, seed=1)
        assert abs(pmf.probability(4) - 7.456074e-1) < 0.05
        assert pmf.zero_rank_count == 0

    @pytest.mark.slow
    @pytest.mark.parametrize("m", [5, 6, 7, 8])
    def test_matches_reference_distribution(self, m: int):
        pmf = estimate_rank_pmf(m, 10**5, seed=2024)
        for rank, expected in REFERENCE_RANK_PMF[m].items():
            assert abs(pmf.probability(rank) - expected) < 0.01
        assert abs(sum(pmf.p.values()) - 1.0) < 1e-12

    def test_independent_seeds_agree(self):
        trials = 4000
        first = estimate_rank_pmf(6, trials, seed=1)
        second = estimate_rank_pmf(6, trials, seed=2)
        assert first != second
        for rank in (2, 4, 6):
            assert abs(first.probability(rank) - second.probability(rank)) < 3 / math.sqrt(trials)

    @pytest.mark.parametrize("m, mode", [(5, 4), (6, 4), (7, 6), (8, 6)])
    def test_reference_mode_sits_below_full_rank(self, m: int, mode: int):
        # odd m peaks at m - 1, even m at m - 2
        assert reference_pmf(m).most_probable_rank() == mode == (m - 1 if m % 2 else m - 2)

    @pytest.mark.parametrize("m, dominant", [(9, 8), (10, 8)])
    def test_reference_large_dimensions(self, m: int, dominant: int):
        pmf = reference_pmf(m)
        assert sum(pmf.p.values()) == pytest.approx(1.0, abs=1e-6)
        assert pmf.most_probable_rank() == dominant
        assert pmf.max_rank == (10 if m == 10 else 8)
        values = list(pmf.p.values())
        assert values[:-1] == sorted(values[:-1])

    @pytest.mark.slow
    @pytest.mark.parametrize("m", [5, 6, 7, 8])
    def test_estimated_mode(self, m: int):
        assert estimate_rank_pmf(m, 20000, seed=31).most_probable_rank() == (m - 1 if m % 2 else m - 2)

    @pytest.mark.slow
    @pytest.mark.parametrize("m", [9, 10])
    def test_large_dimensions_match_reference(self, m: int):
        trials = 20000
        pmf = estimate_rank_pmf(m, trials, seed=5)
        assert pmf.most_probable_rank() == 8
        for rank, expected in REFERENCE_RANK_PMF[m].items():
            assert abs(pmf.probability(rank) - expected) < 3 / math.sqrt(trials)


class TestProbability:
    def test_single_pair_equals_pair_probability(self):
        assert coherence_probability(reference_pmf(5), 2, 4) == pytest.approx(0.7456074, abs=1e-12)

    def test_eight_blocks(self):
        assert coherence_probability(reference_pmf(5), 8, 4) == pytest.approx(0.7456074**28, rel=1e-9)
        assert coherence_probability(reference_pmf(5), 8, 4) == pytest.approx(2.7e-4, rel=0.05)

    @pytest.mark.parametrize("m", sorted(REFERENCE_RANK_PMF))
    def test_probabilities_telescope_to_one(self, m: int):
        pmf = reference_pmf(m)
        for L in range(2, 9):
            total = sum(coherence_probability(pmf, L, r) for r in range(2, pmf.max_rank + 1, 2))
            assert abs(total - 1.0) < 1e-12

    @pytest.mark.parametrize("r", [3, 0, 6])
    def test_invalid_rank(self, r: int):
        with pytest.raises(InvalidRankError):
            coherence_probability(reference_pmf(5), 2, r)

    def test_invalid_set_size(self):
        with pytest.raises(ValueError, match="INVALID SET SIZE"):
            coherence_probability(reference_pmf(5), 1, 4)

    @pytest.mark.parametrize(
        "probability, eps, expected",
        [(0.7456074, 0.01, 4), (0.5, 0.5, 1), (1.0, 0.01, 0), (0.0, 0.01, None)],
    )
    def test_min_trials(self, probability: float, eps: float, expected):
        assert min_trials(probability, eps) == expected

    def test_min_trials_guarantees_confidence(self):
        trials = min_trials(0.01, 0.05)
        assert trials is not None
        assert (1 - 0.01) ** trials <= 0.05 < (1 - 0.01) ** (trials - 1)

    def test_seven_variable_optimum_budget(self):
        budget = trial_budget(reference_pmf(7), 8, optimum_rank(7), 0.01)
        assert budget is not None and budget <= 10**6

    def test_ranks(self):
        assert (optimum_rank(7), suboptimum_rank(7)) == (6, 4)
        assert (optimum_rank(8), suboptimum_rank(8)) == (8, 6)
        assert default_target_rank(7, 8) == 6
        assert default_target_rank(6, 5) == 6
        assert default_target_rank(6, 6) == 4


class TestPermutationSearch:
    def test_reaches_target(self):
        outcome = search_permutation_set(5, 4, 4, max_trials=10**4, seed=5)
        assert outcome.achieved
        assert outcome.achieved_r_min >= 4
        assert coherence_by_rank(outcome.gamma).r_min == outcome.achieved_r_min
        assert len({permutation.canonical() for permutation in outcome.gamma}) == 4
        assert all(permutation.is_canonical for permutation in outcome.gamma)
        assert 1 <= outcome.trials_used <= 10**4
        assert outcome.mu == 0.25

    def test_exhausted_budget_returns_best_set(self):
        outcome = search_permutation_set(6, 8, 6, max_trials=5, seed=0, chunk_size=2)
        assert not outcome.achieved
        assert outcome.trials_used == 5
        assert coherence_by_rank(outcome.gamma).r_min == outcome.achieved_r_min

    def test_worker_count_does_not_change_outcome(self):
        single = search_permutation_set(6, 5, 6, max_trials=4000, seed=13, workers=1, chunk_size=32)
        pooled = search_permutation_set(6, 5, 6, max_trials=4000, seed=13, workers=3, chunk_size=32)
        assert single == pooled

    def test_target_above_ceiling(self):
        with pytest.raises(InfeasibleTargetError):
            search_permutation_set(5, 2, 6, max_trials=10, seed=0)

    def test_odd_target(self):
        with pytest.raises(InvalidRankError):
            search_permutation_set(5, 2, 3, max_trials=10, seed=0)

    def test_more_blocks_than_quadratic_forms(self):
        with pytest.raises(InfeasibleTargetError):
            search_permutation_set(3, 4, 2, max_trials=10, seed=0)

    def test_coherence_distribution_is_a_distribution(self):
        distribution = empirical_coherence_distribution(5, 3, trials=300, seed=3)
        assert sum(distribution.p.values()) == pytest.approx(1.0)
        assert set(distribution.coherence_values()) <= {0.5, 0.25}

    def test_success_frequency_follows_trial_budget(self):
        # with T trials a search succeeds with probability 1 - (1 - P)^T
        searches, budget = 200, 2
        probability = coherence_probability(reference_pmf(5), 3, 4)
        expected = 1 - (1 - probability) ** budget
        successes = sum(
            search_permutation_set(5, 3, 4, max_trials=budget, seed=seed).achieved for seed in range(searches)
        )
        assert abs(successes / searches - expected) < 3 * math.sqrt(expected * (1 - expected) / searches)


class TestPermutationSetFor:
    def test_uses_reference_set(self):
        reference = reference_set_for(6, 7)
        assert reference is not None and reference.coherence == 0.25
        assert permutation_set_for(6, 7, seed=0, max_trials=1) == reference.permutations[:7]

    def test_single_block_is_identity(self):
        assert permutation_set_for(11, 1, seed=0, max_trials=1) == [Permutation(entries=tuple(range(1, 12)))]

    def test_falls_back_to_search(self):
        assert reference_set_for(4, 3) is None
        gamma = permutation_set_for(4, 3, seed=1, max_trials=10**4)
        assert len(gamma) == 3
        assert coherence_by_rank(gamma).r_min == default_target_rank(4, 3)

    def test_reference_sets_cover_every_listed_size(self):
        for reference in REFERENCE_PERMUTATION_SETS:
            assert len(reference.permutations) == reference.max_L
            for L in range(reference.min_L, reference.max_L + 1):
                assert reference_set_for(reference.m, L) is reference
        assert math.isclose(REFERENCE_PERMUTATION_SETS[-1].coherence, 0.0625)
