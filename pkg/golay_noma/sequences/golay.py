from typing import Optional, Sequence

import cachetools
import numpy as np
import numpy.typing as npt
import scipy.linalg
from loguru import logger

from golay_noma.commons.errors import DimensionMismatchError, GolayNomaError
from golay_noma.gf2.boolean import BinarySequence, binary_expansion, truth_table
from golay_noma.gf2.matrix import quadratic_matrix
from golay_noma.gf2.permutation import Permutation
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix

ModulatedSequence = npt.NDArray[np.float64]


class ColumnRangeError(GolayNomaError): ...


class DuplicatePermutationError(GolayNomaError): ...


def modulate(sequence: BinarySequence) -> ModulatedSequence:
    """b_i = (-1)^{a_i}."""
    return 1.0 - 2.0 * sequence.values.astype(np.float64)


def golay_sequence(permutation: Permutation, c: int) -> BinarySequence:
    """Truth table of Q_pi(x) + L_c(x), where L_c has the binary expansion of c as coefficients."""
    m = permutation.m
    if not 0 <= c < (1 << m):
        raise ColumnRangeError(f"[COLUMN OUT OF RANGE] c={c} must lie in 0..{(1 << m) - 1}")
    return truth_table(quadratic_matrix(permutation), binary_expansion(c, m), 0)


@cachetools.cached(cache=cachetools.LRUCache(maxsize=16))
def walsh_hadamard(m: int) -> npt.NDArray[np.float64]:
    """
    2^m x 2^m +-1 matrix whose column c is the modulated truth table of L_c.
    Entry (i, c) is (-1)^{popcount(i & c)}, which is exactly the Sylvester ordering.
    """
    hadamard = scipy.linalg.hadamard(1 << m).astype(np.float64)
    hadamard.setflags(write=False)
    return hadamard


def block_matrix(permutation: Permutation) -> npt.NDArray[np.float64]:
    """diag(psi(q_pi)) . H; column c equals psi(golay_sequence(pi, c))."""
    coset_leader = modulate(golay_sequence(permutation, 0))
    return coset_leader[:, None] * walsh_hadamard(permutation.m)


def spreading_matrix(permutations: Sequence[Permutation], N: Optional[int] = None) -> SpreadingMatrix:
    """
    (1/sqrt(M)) [Phi_1, ..., Phi_L] truncated to its first N columns (all L*M columns by default).
    Permutations sharing a quadratic form (equal up to reversal) are rejected as duplicates.
    """
    if len(permutations) == 0:
        raise DimensionMismatchError("[EMPTY PERMUTATION SET] At least one permutation is required")
    m = permutations[0].m
    if any(permutation.m != m for permutation in permutations):
        raise DimensionMismatchError(
            f"[PERMUTATION DIMENSION MISMATCH] All permutations must share m={m}"
        )
    canonical_forms = [permutation.canonical() for permutation in permutations]
    if len(set(canonical_forms)) != len(canonical_forms):
        raise DuplicatePermutationError(
            f"[DUPLICATE PERMUTATIONS] Permutation set contains repeated quadratic forms: {[str(p) for p in permutations]}"
        )

    M = 1 << m
    total_columns = len(permutations) * M
    n_columns = total_columns if N is None else N
    if not 1 <= n_columns <= total_columns:
        raise ColumnRangeError(f"[COLUMN OUT OF RANGE] N={n_columns} must lie in 1..{total_columns}")

    blocks = [block_matrix(permutation) for permutation in permutations]
    entries = np.hstack(blocks)[:, :n_columns] / np.sqrt(M)
    logger.debug(f"[GOLAY MATRIX] Built M={M}, N={n_columns} from L={len(permutations)} permutations")
    return SpreadingMatrix(
        family=SequenceFamily.Golay,
        entries=entries,
        permutations=list(permutations),
    )
