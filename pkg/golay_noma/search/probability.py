import math
from typing import Optional

from golay_noma.search.rank_pmf import InvalidRankError, RankPmf


def _check_rank(m: int, r: int) -> None:
    if r % 2 or not 2 <= r <= 2 * (m // 2):
        raise InvalidRankError(f"[INVALID RANK] r={r} must be even and within 2..{2 * (m // 2)} for m={m}")


def coherence_probability(pmf: RankPmf, L: int, r: int) -> float:
    """
    Probability that a uniformly drawn set of L canonical permutations has minimum pairwise
    symplectic rank exactly r, treating the L(L-1)/2 pairs as independent.
    """
    _check_rank(pmf.m, r)
    if L < 2:
        raise ValueError(f"[INVALID SET SIZE] L must be at least 2, got {L}")
    pairs = L * (L - 1) // 2
    at_least = sum(pmf.probability(2 * h) for h in range(r // 2, pmf.m // 2 + 1))
    above = sum(pmf.probability(2 * h) for h in range(r // 2 + 1, pmf.m // 2 + 1))
    return at_least**pairs - above**pairs


def min_trials(probability: float, eps: float) -> Optional[int]:
    """
    Smallest T with (1 - P)^T <= eps. P = 1 needs no trials; P = 0 is infeasible and gives None.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"[INVALID EPSILON] eps={eps} must lie in (0, 1)")
    if not 0.0 <= probability <= 1.0:
        raise ValueError(f"[INVALID PROBABILITY] P={probability} must lie in [0, 1]")
    if probability == 1.0:
        return 0
    if probability == 0.0:
        return None
    ratio = math.log(eps) / math.log1p(-probability)
    # absorbs rounding when the ratio is an exact integer
    return max(1, math.ceil(ratio - 1e-12))


def trial_budget(pmf: RankPmf, L: int, r: int, eps: float) -> Optional[int]:
    """Random trials needed to hit minimum rank r with probability at least 1 - eps."""
    return min_trials(coherence_probability(pmf, L, r), eps)


def optimum_rank(m: int) -> int:
    """Largest minimum symplectic rank a permutation set can reach."""
    if m < 2:
        raise InvalidRankError(f"[INVALID DIMENSION] m must be at least 2, got {m}")
    return m - 1 if m % 2 else m


def suboptimum_rank(m: int) -> int:
    return optimum_rank(m) - 2


def default_target_rank(m: int, L: int) -> int:
    """
    Target for a search when none is given: the optimum for odd m; for even m the optimum
    while L <= 5 and one step below it for larger sets.
    """
    if m % 2:
        return m - 1
    return m if L <= 5 else m - 2
