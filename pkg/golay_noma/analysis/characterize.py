from enum import Enum
from typing import Callable, ClassVar, Optional

from loguru import logger
from pydantic import BaseModel

from golay_noma.analysis.coherence import coherence_exact
from golay_noma.analysis.papr import DEFAULT_OVERSAMPLE, max_papr
from golay_noma.commons.rng import BASELINE_TRIAL_STREAM, derive_seed
from golay_noma.sequences.spreading_matrix import SpreadingMatrix


class TrialSelection(str, Enum):
    """
    How the representative value of a random family is chosen among seeded trials:
    `min` takes the smallest coherence and the smallest peak PAPR independently,
    `joint` reports both metrics of the single trial with the smallest coherence.
    """

    Min = "min"
    Joint = "joint"


class CharacterizationRow(BaseModel):
    family: str
    M: int
    N: int
    L: int
    mu: float
    r_min: Optional[int] = None
    max_papr_db: float

    CSV_HEADER: ClassVar[tuple[str, ...]] = ("family", "M", "N", "L", "mu", "r_min", "max_papr_db")

    def to_csv_row(self) -> list[str]:
        return [
            self.family,
            str(self.M),
            str(self.N),
            str(self.L),
            f"{self.mu:.12g}",
            "" if self.r_min is None else str(self.r_min),
            f"{self.max_papr_db:.6f}",
        ]


def characterize(
    matrix: SpreadingMatrix,
    oversample: int = DEFAULT_OVERSAMPLE,
    workers: int = 1,
    column_chunk: int = 1024,
) -> CharacterizationRow:
    coherence = coherence_exact(matrix, column_chunk=column_chunk, workers=workers)
    peak = max_papr(matrix, oversample)
    return CharacterizationRow(
        family=matrix.family.value,
        M=matrix.M,
        N=matrix.N,
        L=matrix.L,
        mu=coherence.mu,
        r_min=coherence.r_min,
        max_papr_db=peak.papr_db,
    )


def best_of_trials(
    build: Callable[[int], SpreadingMatrix],
    seed: int,
    trials: int,
    selection: TrialSelection = TrialSelection.Min,
    oversample: int = DEFAULT_OVERSAMPLE,
    workers: int = 1,
) -> CharacterizationRow:
    """Characterizes `trials` seeded draws of a random family and keeps the smallest values."""
    if trials < 1:
        raise ValueError(f"[INVALID TRIALS] At least one trial is required, got {trials}")
    rows = [
        characterize(build(derive_seed(seed, BASELINE_TRIAL_STREAM, trial)), oversample, workers)
        for trial in range(trials)
    ]
    best_coherence = min(rows, key=lambda row: row.mu)
    match selection:
        case TrialSelection.Joint:
            chosen = best_coherence
        case TrialSelection.Min:
            chosen = best_coherence.model_copy(
                update={"max_papr_db": min(row.max_papr_db for row in rows)}
            )
    logger.info(
        f"[BASELINE TRIALS] {chosen.family} M={chosen.M} L={chosen.L}: mu={chosen.mu:.6f}, max PAPR={chosen.max_papr_db:.3f} dB over {trials} trials"
    )
    return chosen
