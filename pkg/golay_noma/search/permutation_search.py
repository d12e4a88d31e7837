import math
from collections import Counter
from functools import partial
from typing import Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from golay_noma.commons.errors import GolayNomaError
from golay_noma.commons.parallel import OrderedWorkerPool
from golay_noma.commons.rng import SEARCH_TRIAL_STREAM, substream
from golay_noma.gf2.matrix import gf2_rank
from golay_noma.gf2.permutation import Permutation, adjacency_masks_of, random_canonical_entries
from golay_noma.search.probability import default_target_rank, optimum_rank
from golay_noma.search.rank_pmf import DEFAULT_TRIAL_CHUNK, InvalidRankError, chunk_plan
from golay_noma.search.reference_tables import reference_set_for


class InfeasibleTargetError(GolayNomaError): ...


_Entries = tuple[int, ...]


class SearchOutcome(BaseModel):
    """
    Result of a randomized permutation-set search. When the trial budget runs out before the
    target is met, `gamma` is the best set found and `achieved` is False.
    """

    m: int
    L: int
    gamma: list[Permutation]
    target_r: int
    achieved_r_min: int
    achieved: bool
    trials_used: int
    seed: int

    @property
    def mu(self) -> float:
        return 2.0 ** (-self.achieved_r_min / 2)


class CoherenceDistribution(BaseModel):
    """Observed frequency of each minimum pairwise rank over random permutation sets."""

    m: int
    L: int
    trials: int = Field(ge=1)
    seed: int
    p: dict[int, float]

    def entries(self) -> list[tuple[int, float, float]]:
        """(rank, coherence 2^(-rank/2), probability) in increasing rank."""
        return [(rank, 2.0 ** (-rank / 2), self.p[rank]) for rank in sorted(self.p)]

    def coherence_values(self) -> dict[float, float]:
        return {mu: probability for _, mu, probability in self.entries()}


class _ChunkBest(BaseModel):
    r_min: int
    trial: int
    entries: list[_Entries]
    achieved: bool


def _draw_set(m: int, L: int, rng: np.random.Generator) -> list[_Entries]:
    chosen: list[_Entries] = []
    while len(chosen) < L:
        entries = random_canonical_entries(m, rng)
        if entries not in chosen:
            chosen.append(entries)
    return chosen


def _min_pair_rank(m: int, gamma: list[_Entries], stop_at_or_below: int = -1) -> int:
    masks = [adjacency_masks_of(entries) for entries in gamma]
    best = m + 1
    for k1 in range(len(masks)):
        for k2 in range(k1 + 1, len(masks)):
            rank = gf2_rank([a ^ b for a, b in zip(masks[k1], masks[k2])], m)
            best = min(best, rank)
            if best <= stop_at_or_below:
                return best
    return best


def _search_chunk(m: int, L: int, target_r: int, seed: int, chunk_size: int, chunk: tuple[int, int]) -> _ChunkBest:
    chunk_index, trials = chunk
    rng = substream(seed, SEARCH_TRIAL_STREAM, chunk_index)
    best: Optional[_ChunkBest] = None
    for offset in range(trials):
        gamma = _draw_set(m, L, rng)
        # a set that cannot beat the chunk's best is abandoned at its first weak pair
        r_min = _min_pair_rank(m, gamma, -1 if best is None else best.r_min)
        if best is None or r_min > best.r_min:
            best = _ChunkBest(
                r_min=r_min,
                trial=chunk_index * chunk_size + offset,
                entries=gamma,
                achieved=r_min >= target_r,
            )
            if best.achieved:
                break
    assert best is not None
    return best


def _check_target(m: int, L: int, target_r: int) -> None:
    if target_r % 2 or target_r < 2:
        raise InvalidRankError(f"[INVALID RANK] Target rank {target_r} must be a positive even integer")
    ceiling = optimum_rank(m)
    if target_r > ceiling:
        raise InfeasibleTargetError(
            f"[INFEASIBLE TARGET] No permutation pair at m={m} reaches rank {target_r}; the ceiling is {ceiling}"
        )
    if L < 2:
        raise ValueError(f"[INVALID SET SIZE] L must be at least 2, got {L}")
    if L > math.factorial(m) // 2:
        raise InfeasibleTargetError(
            f"[INFEASIBLE TARGET] m={m} has only {math.factorial(m) // 2} canonical permutations, L={L} requested"
        )


def search_permutation_set(
    m: int,
    L: int,
    target_r: int,
    max_trials: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_TRIAL_CHUNK,
) -> SearchOutcome:
    """
    Draws whole sets of L distinct canonical permutations until one has minimum pairwise
    symplectic rank >= target_r. Chunks of trials are evaluated in waves; the accepted set is
    always the one with the lowest trial index, so the outcome does not depend on `workers`.
    """
    _check_target(m, L, target_r)
    if max_trials < 1:
        raise ValueError(f"[INVALID TRIALS] max_trials must be positive, got {max_trials}")

    logger.info(f"[PERMUTATION SEARCH] m={m}, L={L}, target rank {target_r}, up to {max_trials} trials (seed={seed})")
    plan = chunk_plan(max_trials, chunk_size)
    wave = max(1, workers)
    best: Optional[_ChunkBest] = None
    search = partial(_search_chunk, m, L, target_r, seed, chunk_size)
    with OrderedWorkerPool(workers) as pool:
        for start in range(0, len(plan), wave):
            for result in pool.map(search, plan[start : start + wave]):
                if best is None or result.r_min > best.r_min:
                    best = result
                if best.achieved:
                    break
            if best is not None and best.achieved:
                break
    assert best is not None

    outcome = SearchOutcome(
        m=m,
        L=L,
        gamma=[Permutation(entries=entries) for entries in best.entries],
        target_r=target_r,
        achieved_r_min=best.r_min,
        achieved=best.achieved,
        trials_used=best.trial + 1 if best.achieved else max_trials,
        seed=seed,
    )
    if outcome.achieved:
        logger.success(
            f"[PERMUTATION SEARCH] Reached rank {outcome.achieved_r_min} (mu={outcome.mu:g}) after {outcome.trials_used} trials"
        )
    else:
        logger.warning(
            f"[PERMUTATION SEARCH] Target rank {target_r} not reached in {max_trials} trials; best rank {outcome.achieved_r_min}"
        )
    return outcome


def _distribution_chunk(m: int, L: int, seed: int, chunk: tuple[int, int]) -> Counter[int]:
    chunk_index, trials = chunk
    rng = substream(seed, SEARCH_TRIAL_STREAM, chunk_index)
    return Counter(_min_pair_rank(m, _draw_set(m, L, rng)) for _ in range(trials))


def empirical_coherence_distribution(
    m: int,
    L: int,
    trials: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_TRIAL_CHUNK,
) -> CoherenceDistribution:
    """Frequency of each minimum pairwise rank over `trials` random sets of L permutations."""
    _check_target(m, L, 2)
    if trials < 1:
        raise ValueError(f"[INVALID TRIALS] At least one trial is required, got {trials}")
    with OrderedWorkerPool(workers) as pool:
        tallies = pool.map(partial(_distribution_chunk, m, L, seed), chunk_plan(trials, chunk_size))
    counts: Counter[int] = Counter()
    for tally in tallies:
        counts.update(tally)
    logger.debug(f"[COHERENCE DISTRIBUTION] m={m}, L={L}: {dict(sorted(counts.items()))}")
    return CoherenceDistribution(
        m=m,
        L=L,
        trials=trials,
        seed=seed,
        p={rank: counts[rank] / trials for rank in sorted(counts)},
    )


def permutation_set_for(m: int, L: int, seed: int, max_trials: int, workers: int = 1) -> list[Permutation]:
    """
    A permutation set of size L for dimension m: the first L permutations of the published set
    covering (m, L) when there is one, otherwise the outcome of a seeded search at the default
    target rank.
    """
    reference = reference_set_for(m, L)
    if reference is not None:
        logger.debug(f"[PERMUTATION SET] Using the reference set for m={m}, L={L} (mu={reference.coherence})")
        return reference.permutations[:L]
    if L == 1:
        return [Permutation(entries=tuple(range(1, m + 1)))]
    return search_permutation_set(m, L, default_target_rank(m, L), max_trials, seed, workers).gamma
