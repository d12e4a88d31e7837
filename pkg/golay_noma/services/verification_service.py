import math
from typing import Any, Optional

from loguru import logger
from pydantic import BaseModel

from golay_noma.core.entities.component import Component
from golay_noma.search.reference_tables import (
    EXAMPLE_LINEAR_INDEX,
    EXAMPLE_PERMUTATION,
    EXAMPLE_QUADRATIC_COLUMN,
    EXAMPLE_SEQUENCE,
    REFERENCE_PERMUTATION_SETS,
    REFERENCE_RANK_PMF,
)
from golay_noma.sequences.golay import golay_sequence, spreading_matrix
from golay_noma.services.analysis_service import AnalysisService
from golay_noma.services.search_service import SearchService


class VerificationMismatch(BaseModel):
    table: int
    item: str
    expected: Any
    actual: Any

    def to_diff_line(self) -> str:
        return f"table {self.table} | {self.item} | expected {self.expected} | got {self.actual}"


class VerificationReport(BaseModel):
    table: int
    checked: int
    mismatches: list[VerificationMismatch]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def pmf_tolerance(trials: int) -> float:
    """Absolute tolerance for comparing a Monte-Carlo estimate with the published value."""
    return max(0.01, 3.0 / math.sqrt(trials))


class VerificationService(Component):
    """Recomputes the published example sequence, rank distribution and permutation-set coherences."""

    analysis_service: AnalysisService
    search_service: SearchService

    def verify_example_sequence(self) -> VerificationReport:
        mismatches: list[VerificationMismatch] = []
        quadratic = golay_sequence(EXAMPLE_PERMUTATION, 0).to_tuple()
        if quadratic != EXAMPLE_QUADRATIC_COLUMN:
            mismatches.append(
                VerificationMismatch(table=1, item="quadratic column", expected=EXAMPLE_QUADRATIC_COLUMN, actual=quadratic)
            )
        sequence = golay_sequence(EXAMPLE_PERMUTATION, EXAMPLE_LINEAR_INDEX).to_tuple()
        if sequence != EXAMPLE_SEQUENCE:
            mismatches.append(VerificationMismatch(table=1, item="sequence", expected=EXAMPLE_SEQUENCE, actual=sequence))
        return VerificationReport(table=1, checked=2, mismatches=mismatches)

    def verify_rank_pmf(
        self, seed: int, trials: Optional[int] = None, m_values: Optional[list[int]] = None, workers: int = 1
    ) -> VerificationReport:
        mismatches: list[VerificationMismatch] = []
        checked = 0
        for m in m_values or sorted(REFERENCE_RANK_PMF):
            pmf = self.search_service.rank_pmf(m, seed, trials, workers)
            tolerance = pmf_tolerance(pmf.trials)
            for rank, expected in REFERENCE_RANK_PMF[m].items():
                checked += 1
                actual = pmf.probability(rank)
                if abs(actual - expected) > tolerance:
                    mismatches.append(
                        VerificationMismatch(table=2, item=f"m={m} r={rank} (tol {tolerance:.4f})", expected=expected, actual=actual)
                    )
            if abs(sum(pmf.p.values()) - 1.0) > 1e-12:
                mismatches.append(VerificationMismatch(table=2, item=f"m={m} sum", expected=1.0, actual=sum(pmf.p.values())))
        return VerificationReport(table=2, checked=checked, mismatches=mismatches)

    def verify_permutation_sets(self, exact_up_to_m: int = 7, workers: int = 1) -> VerificationReport:
        """Rank-based coherence for every published set; exhaustive column scan for m <= `exact_up_to_m`."""
        mismatches: list[VerificationMismatch] = []
        checked = 0
        for reference in REFERENCE_PERMUTATION_SETS:
            label = f"m={reference.m} L={reference.min_L}..{reference.max_L}"
            by_rank = self.analysis_service.coherence_by_rank(reference.permutations)
            checked += 1
            if by_rank.mu != reference.coherence:
                mismatches.append(
                    VerificationMismatch(table=3, item=f"{label} rank", expected=reference.coherence, actual=by_rank.mu)
                )
            if reference.m > exact_up_to_m:
                continue
            exact = self.analysis_service.coherence(spreading_matrix(reference.permutations), workers)
            checked += 1
            if exact.mu != reference.coherence:
                mismatches.append(
                    VerificationMismatch(table=3, item=f"{label} exact", expected=reference.coherence, actual=exact.mu)
                )
        return VerificationReport(table=3, checked=checked, mismatches=mismatches)

    def verify(
        self, tables: list[int], seed: int, trials: Optional[int] = None, workers: int = 1
    ) -> list[VerificationReport]:
        reports: list[VerificationReport] = []
        for table in tables:
            match table:
                case 1:
                    reports.append(self.verify_example_sequence())
                case 2:
                    reports.append(self.verify_rank_pmf(seed, trials, workers=workers))
                case 3:
                    reports.append(self.verify_permutation_sets(workers=workers))
                case _:
                    raise ValueError(f"[UNKNOWN TABLE] Table {table} is not verifiable, choose from 1, 2, 3")
        for report in reports:
            if report.ok:
                logger.success(f"[VERIFY TABLE {report.table}] {report.checked} checks match")
            else:
                logger.error(f"[VERIFY TABLE {report.table}] {len(report.mismatches)} of {report.checked} checks differ")
        return reports
