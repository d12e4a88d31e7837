import itertools
from collections import Counter
from functools import partial
from typing import Optional

from loguru import logger
from pydantic import BaseModel, Field, model_validator

from golay_noma.commons.errors import GolayNomaError
from golay_noma.commons.parallel import ordered_map
from golay_noma.commons.rng import PAIR_TRIAL_STREAM, substream
from golay_noma.gf2.matrix import gf2_rank
from golay_noma.gf2.permutation import (
    adjacency_masks_of,
    canonical_permutations,
    random_canonical_entries,
)

DEFAULT_TRIAL_CHUNK = 256


class InvalidRankError(GolayNomaError): ...


class RankPmf(BaseModel):
    """
    Estimated probability of each symplectic rank for a uniformly drawn pair of distinct
    canonical permutations. `zero_rank_count` records pairs whose quadratic forms coincide,
    which distinct canonical permutations should never produce.
    """

    m: int = Field(ge=2)
    trials: int = Field(ge=1)
    p: dict[int, float]
    seed: Optional[int] = None
    zero_rank_count: int = 0

    @model_validator(mode="after")
    def _validate_ranks(self) -> "RankPmf":
        for rank, probability in self.p.items():
            if rank % 2 or not 0 <= rank <= 2 * (self.m // 2):
                raise InvalidRankError(f"[INVALID RANK] Rank {rank} is not an even value in 0..{2 * (self.m // 2)}")
            if probability < 0:
                raise ValueError(f"[INVALID PROBABILITY] p[{rank}]={probability} is negative")
        return self

    @property
    def max_rank(self) -> int:
        return 2 * (self.m // 2)

    def probability(self, rank: int) -> float:
        return self.p.get(rank, 0.0)

    def most_probable_rank(self) -> int:
        return max(sorted(self.p), key=lambda rank: self.p[rank])

    def tail(self, rank: int) -> float:
        """P(symplectic rank >= rank) for a single pair."""
        return sum(probability for r, probability in self.p.items() if r >= rank)

    @classmethod
    def from_counts(cls, m: int, counts: Counter[int], seed: Optional[int] = None) -> "RankPmf":
        trials = sum(counts.values())
        return cls(
            m=m,
            trials=trials,
            p={rank: counts[rank] / trials for rank in sorted(counts)},
            seed=seed,
            zero_rank_count=counts.get(0, 0),
        )


def _pair_rank(first: tuple[int, ...], second: tuple[int, ...]) -> int:
    masks = [a ^ b for a, b in zip(adjacency_masks_of(first), adjacency_masks_of(second))]
    return gf2_rank(masks, len(first))


def _tally_chunk(m: int, seed: int, chunk: tuple[int, int]) -> Counter[int]:
    chunk_index, trials = chunk
    rng = substream(seed, PAIR_TRIAL_STREAM, chunk_index)
    counts: Counter[int] = Counter()
    for _ in range(trials):
        first = random_canonical_entries(m, rng)
        second = random_canonical_entries(m, rng)
        while second == first:
            second = random_canonical_entries(m, rng)
        counts[_pair_rank(first, second)] += 1
    return counts


def chunk_plan(trials: int, chunk_size: int) -> list[tuple[int, int]]:
    """(chunk index, trials in chunk) pairs covering `trials` in fixed-size chunks."""
    if chunk_size < 1:
        raise ValueError(f"[INVALID CHUNK] Chunk size must be positive, got {chunk_size}")
    return [
        (index, min(chunk_size, trials - start))
        for index, start in enumerate(range(0, trials, chunk_size))
    ]


def estimate_rank_pmf(
    m: int,
    trials: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_TRIAL_CHUNK,
) -> RankPmf:
    """
    Monte-Carlo estimate of the symplectic-rank distribution. Trials are split into fixed-size
    chunks, each with its own seeded substream, so the tally is the same for any worker count.
    """
    if m < 2:
        raise InvalidRankError(f"[INVALID DIMENSION] m must be at least 2, got {m}")
    if m < 3:
        raise InvalidRankError("[INVALID DIMENSION] m=2 has a single canonical permutation, no distinct pair exists")
    if trials < 1:
        raise ValueError(f"[INVALID TRIALS] At least one trial is required, got {trials}")

    logger.info(f"[RANK PMF] Estimating rank distribution for m={m} over {trials} trials (seed={seed})")
    tallies = ordered_map(partial(_tally_chunk, m, seed), chunk_plan(trials, chunk_size), workers)
    counts: Counter[int] = Counter()
    for tally in tallies:
        counts.update(tally)
    pmf = RankPmf.from_counts(m, counts, seed)
    if pmf.zero_rank_count:
        logger.warning(f"[RANK PMF] {pmf.zero_rank_count} distinct pairs produced rank 0 at m={m}")
    return pmf


def exhaustive_rank_pmf(m: int) -> RankPmf:
    """Exact distribution over all unordered pairs of distinct canonical permutations."""
    if m < 3:
        raise InvalidRankError(f"[INVALID DIMENSION] Exhaustive enumeration needs m >= 3, got {m}")
    entries = [permutation.entries for permutation in canonical_permutations(m)]
    counts: Counter[int] = Counter(
        _pair_rank(first, second) for first, second in itertools.combinations(entries, 2)
    )
    logger.debug(f"[RANK PMF] Enumerated {sum(counts.values())} pairs at m={m}")
    return RankPmf.from_counts(m, counts)
