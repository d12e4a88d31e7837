from typing import Optional

from loguru import logger
from pydantic import BaseModel

from golay_noma.core.entities.component import Component
from golay_noma.search.permutation_search import (
    CoherenceDistribution,
    SearchOutcome,
    empirical_coherence_distribution,
    search_permutation_set,
)
from golay_noma.search.probability import (
    coherence_probability,
    default_target_rank,
    optimum_rank,
    suboptimum_rank,
    trial_budget,
)
from golay_noma.search.rank_pmf import RankPmf, estimate_rank_pmf
from golay_noma.services.properties import SearchProperties


class TrialBudgetRow(BaseModel):
    m: int
    L: int
    r: int
    probability: float
    eps: float
    trials: Optional[int] = None


class SearchService(Component):
    search_properties: SearchProperties

    def rank_pmf(self, m: int, seed: int, trials: Optional[int] = None, workers: int = 1) -> RankPmf:
        return estimate_rank_pmf(
            m,
            trials or self.search_properties.pmf_trials,
            seed,
            workers,
            self.search_properties.trial_chunk,
        )

    def search(
        self,
        m: int,
        L: int,
        seed: int,
        target_r: Optional[int] = None,
        max_trials: Optional[int] = None,
        workers: int = 1,
    ) -> SearchOutcome:
        return search_permutation_set(
            m,
            L,
            default_target_rank(m, L) if target_r is None else target_r,
            max_trials or self.search_properties.max_trials,
            seed,
            workers,
            self.search_properties.trial_chunk,
        )

    def coherence_distribution(
        self, m: int, L: int, seed: int, trials: Optional[int] = None, workers: int = 1
    ) -> CoherenceDistribution:
        return empirical_coherence_distribution(
            m, L, trials or self.search_properties.pmf_trials, seed, workers, self.search_properties.trial_chunk
        )

    def trial_budgets(self, pmf: RankPmf, L: int, eps: Optional[float] = None) -> list[TrialBudgetRow]:
        """Trials needed for the optimum and the sub-optimum minimum rank at confidence 1 - eps."""
        eps = eps or self.search_properties.eps
        rows: list[TrialBudgetRow] = []
        for r in (optimum_rank(pmf.m), suboptimum_rank(pmf.m)):
            if r < 2:
                continue
            rows.append(
                TrialBudgetRow(
                    m=pmf.m,
                    L=L,
                    r=r,
                    probability=coherence_probability(pmf, L, r),
                    eps=eps,
                    trials=trial_budget(pmf, L, r, eps),
                )
            )
        logger.debug(f"[TRIAL BUDGET] m={pmf.m}, L={L}: {[(row.r, row.trials) for row in rows]}")
        return rows
