import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt
from loguru import logger
from pydantic import BaseModel, Field

from golay_noma.commons.errors import DimensionMismatchError
from golay_noma.gf2.matrix import symplectic_rank
from golay_noma.gf2.permutation import Permutation
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix


class CoherenceReport(BaseModel):
    """
    Maximum normalized inner-product magnitude over distinct column pairs.

    `r_min` is only present for Golay matrices (minimum pairwise symplectic rank), in which
    case `mu == 2 ** (-r_min / 2)`. `argmax` is the lexicographically first maximizing column
    pair; the rank path reports the minimizing block pair in `block_pair` instead.
    """

    mu: float = Field(ge=0.0, le=1.0 + 1e-12)
    r_min: Optional[int] = None
    argmax: Optional[tuple[int, int]] = None
    block_pair: Optional[tuple[int, int]] = None

    @classmethod
    def from_rank(cls, r_min: int, block_pair: Optional[tuple[int, int]] = None) -> "CoherenceReport":
        return cls(mu=2.0 ** (-r_min / 2), r_min=r_min, block_pair=block_pair)


_Candidate = tuple[float, int, int]


def _scan_rows(
    normalized: npt.NDArray, start: int, stop: int, tolerance: float
) -> Optional[_Candidate]:
    """Best (value, j1, j2) with j1 in [start, stop) and j2 > j1."""
    gram = np.abs(normalized[:, start:stop].conj().T @ normalized)
    rows = np.arange(start, stop)[:, None]
    cols = np.arange(normalized.shape[1])[None, :]
    gram = np.where(cols > rows, gram, -1.0)
    peak = float(gram.max())
    if peak < 0:
        return None
    # first entry in row-major order within tolerance of the peak = lexicographic tie-break
    flat = int(np.flatnonzero(gram.ravel() >= peak - tolerance)[0])
    row, col = divmod(flat, gram.shape[1])
    return peak, start + row, col


def _reduce(candidates: Sequence[Optional[_Candidate]], tolerance: float) -> Optional[_Candidate]:
    best: Optional[_Candidate] = None
    for candidate in candidates:
        if candidate is None:
            continue
        if best is None or candidate[0] > best[0] + tolerance:
            best = candidate
    return best


def coherence_exact(
    matrix: SpreadingMatrix,
    column_chunk: int = 1024,
    tie_tolerance: float = 1e-12,
    workers: int = 1,
) -> CoherenceReport:
    """
    Exhaustive maximum of |<phi_j1, phi_j2>| / (|phi_j1| |phi_j2|) over all column pairs.

    For +-1 families the columns are unscaled to integers first: every inner product is then an
    integer of magnitude <= M, which float64 arithmetic represents exactly, and ties are exact.
    Other families are normalized in floating point and ties use `tie_tolerance`.
    Row ranges are scanned in parallel and reduced in range order, so the result does not
    depend on `workers`.
    """
    N = matrix.N
    if N < 2:
        raise DimensionMismatchError(f"[COHERENCE] At least two columns are required, got N={N}")

    if matrix.family.is_binary:
        unscaled = np.rint(matrix.entries.real * np.sqrt(matrix.M))
        normalized: npt.NDArray = unscaled
        scale = float(matrix.M)
        tolerance = 0.0
    else:
        normalized = matrix.entries / np.linalg.norm(matrix.entries, axis=0)[None, :]
        scale = 1.0
        tolerance = tie_tolerance

    ranges = [(start, min(start + column_chunk, N - 1)) for start in range(0, N - 1, column_chunk)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        candidates = list(
            executor.map(lambda bounds: _scan_rows(normalized, bounds[0], bounds[1], tolerance), ranges)
        )
    best = _reduce(candidates, tolerance)
    assert best is not None
    peak, j1, j2 = best
    mu = min(1.0, peak / scale)

    r_min: Optional[int] = None
    if matrix.family == SequenceFamily.Golay and mu > 0:
        r_min = int(round(-2.0 * math.log2(mu)))
    logger.debug(f"[COHERENCE EXACT] family={matrix.family.value}, N={N}, mu={mu}, argmax=({j1}, {j2})")
    return CoherenceReport(mu=mu, r_min=r_min, argmax=(j1, j2))


def coherence_by_rank(permutations: Sequence[Permutation]) -> CoherenceReport:
    """
    Coherence of the Golay spreading matrix of a permutation set from the minimum pairwise
    symplectic rank, without building the matrix. A single block is orthogonal (mu = 0);
    a repeated quadratic form gives rank 0 and mu = 1.
    """
    if len(permutations) < 2:
        return CoherenceReport(mu=0.0)
    m = permutations[0].m
    if any(permutation.m != m for permutation in permutations):
        raise DimensionMismatchError(f"[PERMUTATION DIMENSION MISMATCH] All permutations must share m={m}")

    best_rank: Optional[int] = None
    best_pair: Optional[tuple[int, int]] = None
    for k1, k2 in itertools.combinations(range(len(permutations)), 2):
        rank = symplectic_rank(permutations[k1], permutations[k2])
        if best_rank is None or rank < best_rank:
            best_rank, best_pair = rank, (k1, k2)
    assert best_rank is not None
    return CoherenceReport.from_rank(best_rank, best_pair)


def optimum_coherence(m: int) -> float:
    """Smallest coherence any Golay permutation set of dimension m can reach."""
    return math.sqrt(2.0 / (1 << m)) if m % 2 else math.sqrt(1.0 / (1 << m))
