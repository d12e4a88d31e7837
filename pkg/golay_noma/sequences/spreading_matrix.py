from enum import Enum
from typing import Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from golay_noma.gf2.permutation import Permutation


class SequenceFamily(str, Enum):
    Golay = "golay"
    Zc = "zc"
    Bipolar = "bipolar"
    Gaussian = "gaussian"

    @property
    def tag(self) -> int:
        """Numeric family tag used by the binary matrix format."""
        return list(SequenceFamily).index(self)

    @classmethod
    def from_tag(cls, tag: int) -> "SequenceFamily":
        return list(SequenceFamily)[tag]

    @property
    def is_binary(self) -> bool:
        """Entries are +-1/sqrt(M), so inner products can be evaluated exactly."""
        return self in (SequenceFamily.Golay, SequenceFamily.Bipolar)


class SpreadingMatrix(BaseModel):
    """
    An M x N matrix whose columns are the device spreading sequences, with the metadata needed
    to rebuild it: the permutation set for Golay matrices, the roots for Zadoff-Chu matrices
    and the RNG seed for random ones.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    family: SequenceFamily
    entries: npt.NDArray
    permutations: Optional[list[Permutation]] = None
    zc_roots: Optional[list[int]] = None
    seed: Optional[int] = None

    @property
    def M(self) -> int:
        return int(self.entries.shape[0])

    @property
    def N(self) -> int:
        return int(self.entries.shape[1])

    @property
    def L(self) -> int:
        """Overloading factor: number of (possibly partial) length-M blocks."""
        return -(-self.N // self.M)

    def column_norms(self) -> npt.NDArray[np.float64]:
        return np.linalg.norm(self.entries, axis=0)
