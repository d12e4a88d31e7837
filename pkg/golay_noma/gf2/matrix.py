from typing import Sequence

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, model_validator

from golay_noma.commons.errors import DimensionMismatchError
from golay_noma.gf2.permutation import Permutation


class Gf2Matrix(BaseModel):
    """
    A binary matrix over GF(2), stored row-major. Addition is entry-wise XOR.

    Quadratic matrices built from permutations are strictly upper triangular; symplectic
    matrices are symmetric with a zero diagonal.
    """

    model_config = ConfigDict(frozen=True)

    rows: int
    cols: int
    bits: tuple[int, ...]

    @model_validator(mode="after")
    def _validate_shape(self) -> "Gf2Matrix":
        if len(self.bits) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"[GF2 SHAPE MISMATCH] Expected {self.rows * self.cols} entries for a {self.rows}x{self.cols} matrix, got {len(self.bits)}"
            )
        if any(bit not in (0, 1) for bit in self.bits):
            raise ValueError("[GF2 INVALID ENTRY] Every entry must be 0 or 1")
        return self

    @classmethod
    def from_array(cls, array: npt.ArrayLike) -> "Gf2Matrix":
        matrix = np.asarray(array, dtype=np.int64) % 2
        if matrix.ndim != 2:
            raise DimensionMismatchError(f"[GF2 SHAPE MISMATCH] Expected a 2-D array, got {matrix.ndim}-D")
        return cls(
            rows=matrix.shape[0],
            cols=matrix.shape[1],
            bits=tuple(int(bit) for bit in matrix.ravel()),
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(rows=rows, cols=cols, bits=(0,) * (rows * cols))

    def to_array(self) -> npt.NDArray[np.uint8]:
        return np.array(self.bits, dtype=np.uint8).reshape(self.rows, self.cols)

    def entry(self, row: int, col: int) -> int:
        return self.bits[row * self.cols + col]

    def row_masks(self) -> list[int]:
        """Rows as integers, bit j holding column j."""
        masks: list[int] = []
        for row in range(self.rows):
            mask = 0
            for col in range(self.cols):
                if self.entry(row, col):
                    mask |= 1 << col
            masks.append(mask)
        return masks

    def transpose(self) -> "Gf2Matrix":
        return Gf2Matrix.from_array(self.to_array().T)

    def __add__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError(
                f"[GF2 SHAPE MISMATCH] Cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}"
            )
        return Gf2Matrix(
            rows=self.rows,
            cols=self.cols,
            bits=tuple(a ^ b for a, b in zip(self.bits, other.bits)),
        )

    def count_ones(self) -> int:
        return sum(self.bits)

    def is_strictly_upper_triangular(self) -> bool:
        return all(
            self.entry(row, col) == 0
            for row in range(self.rows)
            for col in range(min(row + 1, self.cols))
        )

    def is_symplectic(self) -> bool:
        if self.rows != self.cols:
            return False
        array = self.to_array()
        return bool(np.array_equal(array, array.T) and not array.diagonal().any())

    def rank(self) -> int:
        return gf2_rank(self.row_masks(), self.cols)


def gf2_rank(rows: Sequence[int], n_cols: int) -> int:
    """Rank over GF(2) of bitmask rows by Gaussian elimination on a copy."""
    work = list(rows)
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, len(work)) if (work[r] >> col) & 1), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(len(work)):
            if r != rank and (work[r] >> col) & 1:
                work[r] ^= work[rank]
        rank += 1
        if rank == len(work):
            break
    return rank


def brute_force_rank(rows: Sequence[int]) -> int:
    """
    Independent rank oracle: enumerates every GF(2) combination of the rows and measures the
    size of their span (2^rank). Exponential in the row count; meant for m <= 5 checks.
    """
    span: set[int] = set()
    for selector in range(1 << len(rows)):
        combination = 0
        for index, row in enumerate(rows):
            if (selector >> index) & 1:
                combination ^= row
        span.add(combination)
    return len(span).bit_length() - 1


def quadratic_matrix(permutation: Permutation) -> Gf2Matrix:
    """
    Strictly upper triangular m x m matrix Q with a one at (min, max) of every consecutive
    pair of the permutation, so that x Q x^T is the permutation's quadratic form.
    """
    array = np.zeros((permutation.m, permutation.m), dtype=np.uint8)
    for row, col in permutation.edges():
        array[row, col] = 1
    return Gf2Matrix.from_array(array)


def _check_same_dimension(first: Permutation, second: Permutation) -> None:
    if first.m != second.m:
        raise DimensionMismatchError(
            f"[PERMUTATION DIMENSION MISMATCH] Cannot pair m={first.m} with m={second.m}"
        )


def symplectic_matrix(first: Permutation, second: Permutation) -> Gf2Matrix:
    """B = (Q1 + Q2) + (Q1 + Q2)^T."""
    _check_same_dimension(first, second)
    combined = quadratic_matrix(first) + quadratic_matrix(second)
    return combined + combined.transpose()


def symplectic_rank(first: Permutation, second: Permutation) -> int:
    _check_same_dimension(first, second)
    masks = [a ^ b for a, b in zip(first.adjacency_masks(), second.adjacency_masks())]
    return gf2_rank(masks, first.m)
