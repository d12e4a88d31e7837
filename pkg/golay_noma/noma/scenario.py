import math
from typing import Optional

import numpy as np
import numpy.typing as npt
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from golay_noma.commons.errors import DimensionMismatchError, GolayNomaError
from golay_noma.commons.permutation_io import parse_permutation_line
from golay_noma.commons.rng import FRAME_STREAM, MATRIX_STREAM, derive_seed, substream
from golay_noma.gf2.permutation import Permutation
from golay_noma.noma.recovery import StoppingRule
from golay_noma.search.permutation_search import permutation_set_for
from golay_noma.sequences.baselines import ZcConfig, nearest_prime, random_matrix, zc_matrix
from golay_noma.sequences.golay import spreading_matrix
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix

MAX_EMPTY_FRAME_REDRAWS = 1000


class EmptyFrameError(GolayNomaError): ...


def parse_permutation(value: object) -> Permutation:
    """Accepts a Permutation, a sequence of entries or a comma separated string such as "5,4,3,2,1"."""
    if isinstance(value, Permutation):
        return value
    if isinstance(value, str):
        return parse_permutation_line(value)
    if isinstance(value, dict):
        return Permutation.model_validate(value)
    return Permutation(entries=tuple(int(entry) for entry in value))  # type: ignore[attr-defined]


class ScenarioConfig(BaseModel):
    """One simulated operating point. N = M * L devices (M_zc * L for Zadoff-Chu)."""

    model_config = ConfigDict(extra="forbid")

    M: int = Field(ge=2)
    L: int = Field(ge=1)
    J: int = Field(default=7, ge=2)
    p_a: float = Field(ge=0.0, le=1.0)
    snr_db: float
    frames: int = Field(ge=1)
    family: SequenceFamily = SequenceFamily.Golay
    seed: Optional[int] = None
    max_iter: Optional[int] = Field(default=None, ge=1)
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

    @model_validator(mode="after")
    def _validate_family_parameters(self) -> "ScenarioConfig":
        if self.family == SequenceFamily.Golay and self.M & (self.M - 1):
            raise DimensionMismatchError(f"[INVALID SCENARIO] Golay sequences need a power-of-two M, got {self.M}")
        if self.permutations is not None and len(self.permutations) != self.L:
            raise DimensionMismatchError(
                f"[INVALID SCENARIO] {len(self.permutations)} permutations given for L={self.L}"
            )
        if self.zc_roots is not None and len(self.zc_roots) != self.L:
            raise DimensionMismatchError(f"[INVALID SCENARIO] {len(self.zc_roots)} ZC roots given for L={self.L}")
        return self

    @property
    def m(self) -> int:
        return int(math.log2(self.M))

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def required_seed(self) -> int:
        if self.seed is None:
            raise ValueError("[MISSING SEED] The scenario seed must be resolved before simulating")
        return self.seed


class FrameScenario(BaseModel):
    """
    One frame: Y = S diag(h) U + W. U is N x J with the pilot 1 in slot 0 and QPSK data in the
    remaining slots, nonzero only on the active set.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    frame_index: int
    subdraw: int = 0
    active_set: npt.NDArray[np.int64]
    h: npt.NDArray[np.complex128]
    U: npt.NDArray[np.complex128]
    Y: npt.NDArray[np.complex128]
    sigma_n2: float

    @property
    def K(self) -> int:
        return int(self.active_set.size)

    @property
    def N(self) -> int:
        return int(self.h.size)

    @property
    def J(self) -> int:
        return int(self.U.shape[1])

    @property
    def X(self) -> npt.NDArray[np.complex128]:
        return self.h[:, None] * self.U


def qpsk_symbols(bits: npt.NDArray[np.integer]) -> npt.NDArray[np.complex128]:
    """Gray mapping of bit pairs (last axis) to (+-1 +- j)/sqrt(2)."""
    return ((1.0 - 2.0 * bits[..., 0]) + 1j * (1.0 - 2.0 * bits[..., 1])) / np.sqrt(2.0)


def scenario_matrix(cfg: ScenarioConfig, max_trials: int = 10**6, workers: int = 1) -> SpreadingMatrix:
    """
    Spreading matrix of a scenario. The matrix depends on the family and L only, so every SNR
    and activity point of a sweep sees the same matrix.
    """
    seed = derive_seed(cfg.required_seed(), MATRIX_STREAM, cfg.family.tag, cfg.L)
    match cfg.family:
        case SequenceFamily.Golay:
            permutations = cfg.permutations or permutation_set_for(cfg.m, cfg.L, seed, max_trials, workers)
            matrix = spreading_matrix(permutations)
        case SequenceFamily.Zc:
            if cfg.zc_roots is not None:
                matrix = zc_matrix(ZcConfig(M_zc=nearest_prime(cfg.M), roots=tuple(cfg.zc_roots), seed=seed))
            else:
                matrix = zc_matrix(ZcConfig.random(cfg.M, cfg.L, seed))
        case SequenceFamily.Bipolar | SequenceFamily.Gaussian:
            matrix = random_matrix(cfg.family, cfg.M, cfg.M * cfg.L, seed)
    logger.debug(f"[SCENARIO MATRIX] {cfg.family.value} M={matrix.M} N={matrix.N}")
    return matrix


def generate_frame(
    cfg: ScenarioConfig, matrix: SpreadingMatrix, frame_index: int, grid_point: int = 0
) -> FrameScenario:
    """
    Draws activity, channels, symbols and noise for one frame from its own substream.
    The noise variance meets the per-device SNR with respect to the noiseless received energy.
    Frames without active devices are redrawn unless `allow_empty_frames` is set.
    """
    seed = cfg.required_seed()
    N, M, J = matrix.N, matrix.M, cfg.J
    if cfg.p_a == 0.0 and not cfg.allow_empty_frames:
        raise EmptyFrameError("[EMPTY FRAME] p_a = 0 never activates a device; set allow_empty_frames")

    for subdraw in range(MAX_EMPTY_FRAME_REDRAWS):
        rng = substream(seed, FRAME_STREAM, grid_point, frame_index, subdraw)
        active = rng.random(N) < cfg.p_a
        if active.any() or cfg.allow_empty_frames:
            break
        logger.warning(f"[EMPTY FRAME] Frame {frame_index} drew no active device, redrawing (subdraw {subdraw + 1})")
    else:
        raise EmptyFrameError(
            f"[EMPTY FRAME] Frame {frame_index} stayed empty after {MAX_EMPTY_FRAME_REDRAWS} redraws at p_a={cfg.p_a}"
        )

    h = (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2.0)
    data = qpsk_symbols(rng.integers(0, 2, size=(N, J - 1, 2)))
    noise = (rng.standard_normal((M, J)) + 1j * rng.standard_normal((M, J))) / np.sqrt(2.0)

    U = np.zeros((N, J), dtype=np.complex128)
    U[active, 0] = 1.0
    U[active, 1:] = data[active]
    clean = matrix.entries @ (h[:, None] * U)

    K = int(active.sum())
    if K > 0:
        sigma_n2 = float(np.sum(np.abs(clean) ** 2)) / (J * M * K * cfg.snr_linear)
    else:
        sigma_n2 = 1.0 / (M * cfg.snr_linear)
    return FrameScenario(
        frame_index=frame_index,
        subdraw=subdraw,
        active_set=np.flatnonzero(active).astype(np.int64),
        h=h,
        U=U,
        Y=clean + np.sqrt(sigma_n2) * noise,
        sigma_n2=sigma_n2,
    )
