from golay_noma.analysis.bounds import RecoveryBounds, recovery_bounds
from golay_noma.analysis.characterize import CharacterizationRow, TrialSelection, best_of_trials, characterize
from golay_noma.analysis.coherence import CoherenceReport, coherence_by_rank, coherence_exact, optimum_coherence
from golay_noma.analysis.papr import PaprReport, column_papr, max_papr, papr
