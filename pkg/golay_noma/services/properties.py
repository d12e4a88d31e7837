from pydantic import Field

from golay_noma.analysis.characterize import TrialSelection
from golay_noma.core.entities.properties.properties import Properties
from golay_noma.noma.recovery import StoppingRule


class AnalysisProperties(Properties):
    __key__ = "analysis"

    oversample: int = Field(default=4, ge=1)
    tie_tolerance: float = Field(default=1e-12, ge=0.0)
    column_chunk: int = Field(default=1024, ge=1)
    baseline_trials: int = Field(default=100, ge=1)
    baseline_selection: TrialSelection = TrialSelection.Min


class SearchProperties(Properties):
    __key__ = "search"

    eps: float = Field(default=0.01, gt=0.0, lt=1.0)
    max_trials: int = Field(default=10**6, ge=1)
    trial_chunk: int = Field(default=256, ge=1)
    pmf_trials: int = Field(default=10**5, ge=1)


class SimulationProperties(Properties):
    __key__ = "simulation"

    stopping_rule: StoppingRule = StoppingRule.RowMax
    degeneracy_tolerance: float = Field(default=1e-10, gt=0.0)
    residual_floor: float = Field(default=1e-10, ge=0.0)
    frame_chunk: int = Field(default=25, ge=1)
