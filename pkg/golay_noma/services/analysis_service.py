from typing import Callable, Optional, Sequence

from golay_noma.analysis.bounds import RecoveryBounds, recovery_bounds
from golay_noma.analysis.characterize import CharacterizationRow, TrialSelection, best_of_trials, characterize
from golay_noma.analysis.coherence import CoherenceReport, coherence_by_rank, coherence_exact
from golay_noma.analysis.papr import PaprReport, max_papr
from golay_noma.core.entities.component import Component
from golay_noma.gf2.permutation import Permutation
from golay_noma.sequences.spreading_matrix import SpreadingMatrix
from golay_noma.services.properties import AnalysisProperties


class AnalysisService(Component):
    analysis_properties: AnalysisProperties

    def coherence(self, matrix: SpreadingMatrix, workers: int = 1) -> CoherenceReport:
        return coherence_exact(
            matrix,
            column_chunk=self.analysis_properties.column_chunk,
            tie_tolerance=self.analysis_properties.tie_tolerance,
            workers=workers,
        )

    def coherence_by_rank(self, permutations: Sequence[Permutation]) -> CoherenceReport:
        return coherence_by_rank(permutations)

    def papr(self, matrix: SpreadingMatrix, oversample: Optional[int] = None) -> PaprReport:
        return max_papr(matrix, oversample or self.analysis_properties.oversample)

    def characterize(
        self, matrix: SpreadingMatrix, oversample: Optional[int] = None, workers: int = 1
    ) -> CharacterizationRow:
        return characterize(
            matrix,
            oversample or self.analysis_properties.oversample,
            workers,
            self.analysis_properties.column_chunk,
        )

    def baseline(
        self,
        build: Callable[[int], SpreadingMatrix],
        seed: int,
        trials: Optional[int] = None,
        selection: Optional[TrialSelection] = None,
        oversample: Optional[int] = None,
        workers: int = 1,
    ) -> CharacterizationRow:
        """Best coherence and PAPR among seeded draws of a randomized family."""
        return best_of_trials(
            build,
            seed,
            trials or self.analysis_properties.baseline_trials,
            selection or self.analysis_properties.baseline_selection,
            oversample or self.analysis_properties.oversample,
            workers,
        )

    def recovery_bounds(self, mu: float, rank_x: int = 1, M: Optional[int] = None) -> RecoveryBounds:
        return recovery_bounds(mu, rank_x, M)
