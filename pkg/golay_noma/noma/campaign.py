import csv
import io
from functools import partial
from pathlib import Path
from typing import ClassVar, Optional, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator

from golay_noma.commons.errors import GolayNomaError
from golay_noma.commons.parallel import OrderedWorkerPool
from golay_noma.commons.rng import draw_master_seed
from golay_noma.gf2.permutation import Permutation
from golay_noma.noma.metrics import FrameMetrics, MetricsRecord, aggregate_metrics, evaluate_metrics
from golay_noma.noma.recovery import RankDeficiencyError, StoppingRule, oracle_ls, somp_recover
from golay_noma.noma.scenario import ScenarioConfig, generate_frame, parse_permutation, scenario_matrix
from golay_noma.sequences.baselines import nearest_prime
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix


class SimulationSettings(BaseModel):
    """Numerical knobs of the simulator that are not part of a scenario."""

    degeneracy_tolerance: float = 1e-10
    residual_floor: float = 1e-10
    frame_chunk: int = Field(default=25, ge=1)
    max_trials: int = Field(default=10**6, ge=1)


class FrameOutcome(BaseModel):
    somp: FrameMetrics
    oracle: Optional[FrameMetrics] = None  # None when the true support is not identifiable


class GridPoint(BaseModel):
    index: int
    family: SequenceFamily
    L: int
    p_a: float
    snr_db: float


class CampaignConfig(BaseModel):
    """
    A sweep over scenarios: `family`, `L`, `p_a` and `snr_db` take a single value or a list.
    Grid points are ordered family, L, p_a, snr_db with the last varying fastest.
    """

    model_config = ConfigDict(extra="forbid")

    M: int
    L: Union[int, list[int]]
    J: int = 7
    p_a: Union[float, list[float]]
    snr_db: Union[float, list[float]]
    frames: int
    family: Union[SequenceFamily, list[SequenceFamily]] = SequenceFamily.Golay
    seed: Optional[int] = None
    max_iter: Optional[int] = None
    stopping_rule: StoppingRule = StoppingRule.RowMax
    permutations: Optional[list[Permutation]] = None
    zc_roots: Optional[list[int]] = None
    allow_empty_frames: bool = False

    @field_validator("permutations", mode="before")
    @classmethod
    def _parse_permutations(cls, value: object) -> object:
        if value is None:
            return None
        return [parse_permutation(item) for item in value]  # type: ignore[attr-defined]

    @staticmethod
    def _as_list(value: object) -> list:
        return list(value) if isinstance(value, list) else [value]

    def points(self) -> list[GridPoint]:
        points: list[GridPoint] = []
        for family in self._as_list(self.family):
            for L in self._as_list(self.L):
                for p_a in self._as_list(self.p_a):
                    for snr_db in self._as_list(self.snr_db):
                        points.append(GridPoint(index=len(points), family=family, L=L, p_a=p_a, snr_db=snr_db))
        return points

    def scenario_for(self, point: GridPoint) -> ScenarioConfig:
        shared = self.model_dump(exclude={"family", "L", "p_a", "snr_db"}, exclude_none=True)
        return ScenarioConfig.model_validate(
            {**shared, "family": point.family, "L": point.L, "p_a": point.p_a, "snr_db": point.snr_db}
        )


def _device_count(family: SequenceFamily, M: int, L: int) -> int:
    """N of the matrix a grid point would use; ZC blocks have the nearest prime length."""
    return (nearest_prime(M) if family == SequenceFamily.Zc else M) * L


def _number(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.10g}"


class CampaignRow(BaseModel):
    family: SequenceFamily
    M: int
    N: int
    L: int
    J: int
    p_a: float
    snr_db: float
    frames: int
    seed: int
    somp: Optional[MetricsRecord] = None
    oracle: Optional[MetricsRecord] = None
    error: Optional[str] = None

    CSV_HEADER: ClassVar[tuple[str, ...]] = (
        "family", "M", "N", "L", "J", "p_a", "snr_db", "frames", "seed",
        "aer", "nmse_db", "ser", "oracle_nmse_db", "oracle_ser",
        "aer_sem", "nmse_sem", "ser_sem", "error",
    )

    def to_csv_row(self) -> list[str]:
        somp = self.somp
        oracle = self.oracle
        return [
            self.family.value,
            str(self.M),
            str(self.N),
            str(self.L),
            str(self.J),
            _number(self.p_a),
            _number(self.snr_db),
            str(self.frames),
            str(self.seed),
            _number(somp.aer if somp else None),
            _number(somp.nmse_db if somp else None),
            _number(somp.ser if somp else None),
            _number(oracle.nmse_db if oracle else None),
            _number(oracle.ser if oracle else None),
            _number(somp.aer_sem if somp else None),
            _number(somp.nmse_sem if somp else None),
            _number(somp.ser_sem if somp else None),
            self.error or "",
        ]


def _simulate_batch(
    cfg: ScenarioConfig,
    matrix: SpreadingMatrix,
    grid_point: int,
    settings: SimulationSettings,
    frame_range: tuple[int, int],
) -> list[FrameOutcome]:
    outcomes: list[FrameOutcome] = []
    for frame_index in range(*frame_range):
        frame = generate_frame(cfg, matrix, frame_index, grid_point)
        recovered = somp_recover(
            matrix,
            frame.Y,
            frame.sigma_n2,
            J=cfg.J,
            max_iter=cfg.max_iter,
            stopping_rule=cfg.stopping_rule,
            degeneracy_tolerance=settings.degeneracy_tolerance,
            residual_floor=settings.residual_floor,
        )
        outcome = FrameOutcome(somp=evaluate_metrics(frame, recovered))
        try:
            outcome.oracle = evaluate_metrics(frame, oracle_ls(matrix, frame.Y, frame.active_set))
        except RankDeficiencyError as error:
            logger.debug(f"[ORACLE EXCLUDED] Frame {frame_index} of point {grid_point}: {error}")
        outcomes.append(outcome)
    return outcomes


def run_scenario(
    cfg: ScenarioConfig,
    matrix: Optional[SpreadingMatrix] = None,
    grid_point: int = 0,
    settings: Optional[SimulationSettings] = None,
    pool: Optional[OrderedWorkerPool] = None,
) -> CampaignRow:
    """Simulates every frame of one scenario and averages SOMP and oracle metrics."""
    settings = settings or SimulationSettings()
    if matrix is None:
        matrix = scenario_matrix(cfg, settings.max_trials)
    ranges = [
        (start, min(start + settings.frame_chunk, cfg.frames))
        for start in range(0, cfg.frames, settings.frame_chunk)
    ]
    batch = partial(_simulate_batch, cfg, matrix, grid_point, settings)
    batches = pool.map(batch, ranges) if pool is not None else [batch(frame_range) for frame_range in ranges]
    outcomes = [outcome for outcome_batch in batches for outcome in outcome_batch]
    oracle_frames = [outcome.oracle for outcome in outcomes if outcome.oracle is not None]
    if len(oracle_frames) < len(outcomes):
        logger.warning(
            f"[ORACLE EXCLUDED] {len(outcomes) - len(oracle_frames)} of {len(outcomes)} frames have a rank-deficient true support"
        )
    row = CampaignRow(
        family=cfg.family,
        M=cfg.M,
        N=matrix.N,
        L=cfg.L,
        J=cfg.J,
        p_a=cfg.p_a,
        snr_db=cfg.snr_db,
        frames=cfg.frames,
        seed=cfg.required_seed(),
        somp=aggregate_metrics([outcome.somp for outcome in outcomes]),
        oracle=aggregate_metrics(oracle_frames) if oracle_frames else None,
    )
    assert row.somp is not None
    logger.info(
        f"[SCENARIO DONE] {cfg.family.value} L={cfg.L} p_a={cfg.p_a} SNR={cfg.snr_db} dB: AER={row.somp.aer:.4g}, NMSE={row.somp.nmse_db} dB, SER={row.somp.ser}"
    )
    return row


def run_campaign(
    campaign: CampaignConfig,
    workers: int = 1,
    settings: Optional[SimulationSettings] = None,
) -> list[CampaignRow]:
    """
    Runs every grid point in order. A point that fails is logged and reported in the `error`
    column; the remaining points still run. Frames of a point are spread over the workers in
    fixed batches, so the rows do not depend on the worker count.
    """
    settings = settings or SimulationSettings()
    if campaign.seed is None:
        campaign = campaign.model_copy(update={"seed": draw_master_seed()})
        logger.info(f"[CAMPAIGN SEED] No seed given, drew {campaign.seed}")
    assert campaign.seed is not None

    matrices: dict[tuple[SequenceFamily, int], SpreadingMatrix] = {}
    rows: list[CampaignRow] = []
    with OrderedWorkerPool(workers) as pool:
        for point in campaign.points():
            try:
                cfg = campaign.scenario_for(point)
                key = (point.family, point.L)
                if key not in matrices:
                    matrices[key] = scenario_matrix(cfg, settings.max_trials, workers)
                rows.append(run_scenario(cfg, matrices[key], point.index, settings, pool))
            except (GolayNomaError, ValueError) as error:
                logger.error(f"[CAMPAIGN POINT FAILED] Point {point.index} ({point.family.value}, L={point.L}): {error}")
                rows.append(
                    CampaignRow(
                        family=point.family,
                        M=campaign.M,
                        N=_device_count(point.family, campaign.M, point.L),
                        L=point.L,
                        J=campaign.J,
                        p_a=point.p_a,
                        snr_db=point.snr_db,
                        frames=campaign.frames,
                        seed=campaign.seed,
                        error=str(error).replace("\n", " "),
                    )
                )
    logger.success(f"[CAMPAIGN DONE] {len(rows)} grid points, {sum(row.error is None for row in rows)} succeeded")
    return rows


def format_campaign_csv(rows: list[CampaignRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CampaignRow.CSV_HEADER)
    writer.writerows(row.to_csv_row() for row in rows)
    return buffer.getvalue()


def write_campaign_csv(rows: list[CampaignRow], path: Union[str, Path]) -> None:
    Path(path).write_text(format_campaign_csv(rows))
