from typing import Sequence

import cachetools
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, field_validator

from golay_noma.commons.errors import DimensionMismatchError
from golay_noma.gf2.matrix import Gf2Matrix


class BinarySequence(BaseModel):
    """
    Truth table of a Boolean function of m variables: `values[i]` is the function evaluated at
    the binary expansion of i, with x_1 as the least significant bit.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: npt.NDArray[np.uint8]

    @field_validator("values")
    @classmethod
    def _validate_values(cls, values: npt.NDArray[np.uint8]) -> npt.NDArray[np.uint8]:
        length = len(values)
        if length == 0 or length & (length - 1):
            raise DimensionMismatchError(f"[BINARY SEQUENCE] Length {length} is not a power of two")
        if np.any((values != 0) & (values != 1)):
            raise ValueError("[BINARY SEQUENCE] Entries must be 0 or 1")
        return values.astype(np.uint8)

    @property
    def length(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return self.length.bit_length() - 1

    def to_tuple(self) -> tuple[int, ...]:
        return tuple(int(value) for value in self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinarySequence):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))


@cachetools.cached(cache=cachetools.LRUCache(maxsize=32))
def input_bits(m: int) -> npt.NDArray[np.uint8]:
    """2^m x m matrix whose row i holds (x_1, ..., x_m) for index i, x_1 least significant."""
    indices = np.arange(1 << m)
    bits = ((indices[:, None] >> np.arange(m)[None, :]) & 1).astype(np.uint8)
    bits.setflags(write=False)
    return bits


def binary_expansion(value: int, m: int) -> tuple[int, ...]:
    """(v_1, ..., v_m) with value = sum v_r 2^(r-1)."""
    return tuple((value >> r) & 1 for r in range(m))


def truth_table(quadratic: Gf2Matrix, linear: Sequence[int], constant: int = 0) -> BinarySequence:
    """Evaluates x Q x^T + v . x + e over GF(2) at every x in Z_2^m."""
    m = quadratic.rows
    if quadratic.cols != m or len(linear) != m:
        raise DimensionMismatchError(
            f"[TRUTH TABLE SHAPE] Q is {quadratic.rows}x{quadratic.cols}, linear part has length {len(linear)}"
        )
    x = input_bits(m).astype(np.int64)
    q = quadratic.to_array().astype(np.int64)
    v = np.asarray(linear, dtype=np.int64)
    values = (np.einsum("ij,jk,ik->i", x, q, x) + x @ v + (constant & 1)) % 2
    return BinarySequence(values=values.astype(np.uint8))


def algebraic_degree(values: npt.ArrayLike) -> int:
    """
    Degree of the algebraic normal form of a truth table, obtained with the binary Moebius
    transform. The all-zero function has degree 0 by convention.
    """
    anf = np.array(values, dtype=np.uint8) % 2
    length = len(anf)
    step = 1
    while step < length:
        for start in range(0, length, 2 * step):
            anf[start + step : start + 2 * step] ^= anf[start : start + step]
        step *= 2
    monomials = np.flatnonzero(anf)
    if monomials.size == 0:
        return 0
    return max(int(monomial).bit_count() for monomial in monomials)
