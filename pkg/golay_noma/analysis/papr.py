from typing import Optional

import numpy as np
import numpy.typing as npt
from loguru import logger
from pydantic import BaseModel, Field

from golay_noma.sequences.spreading_matrix import SpreadingMatrix

DEFAULT_OVERSAMPLE = 4


class PaprReport(BaseModel):
    papr_linear: float = Field(ge=1.0 - 1e-9)
    papr_db: float
    oversample: int = Field(ge=1)
    column: Optional[int] = None

    @classmethod
    def from_linear(cls, papr_linear: float, oversample: int, column: Optional[int] = None) -> "PaprReport":
        return cls(
            papr_linear=papr_linear,
            papr_db=10.0 * np.log10(papr_linear),
            oversample=oversample,
            column=column,
        )


def _validate_oversample(oversample: int) -> None:
    if oversample < 1:
        raise ValueError(f"[INVALID OVERSAMPLE] Oversampling factor must be >= 1, got {oversample}")
    if oversample < DEFAULT_OVERSAMPLE:
        logger.warning(
            f"[COARSE OVERSAMPLE] Oversampling factor {oversample} < {DEFAULT_OVERSAMPLE} may underestimate the peak"
        )


def column_papr(columns: npt.ArrayLike, oversample: int = DEFAULT_OVERSAMPLE) -> npt.NDArray[np.float64]:
    """
    PAPR of every column of an M x N array as the peak of the zero-padded DFT power over the
    mean subcarrier power. For unit-modulus sequences the denominator is M.
    """
    _validate_oversample(oversample)
    data = np.asarray(columns)
    if data.ndim == 1:
        data = data[:, None]
    M = data.shape[0]
    spectrum = np.fft.fft(data, n=oversample * M, axis=0)
    peak = np.max(np.abs(spectrum) ** 2, axis=0)
    energy = np.sum(np.abs(data) ** 2, axis=0)
    return peak / energy


def papr(sequence: npt.ArrayLike, oversample: int = DEFAULT_OVERSAMPLE) -> PaprReport:
    """PAPR of one modulated sequence, approximated on an oversampled DFT grid."""
    value = float(column_papr(np.asarray(sequence), oversample)[0])
    return PaprReport.from_linear(value, oversample)


def max_papr(matrix: SpreadingMatrix, oversample: int = DEFAULT_OVERSAMPLE) -> PaprReport:
    """
    Largest column PAPR of a spreading matrix. Spreading a unit-modulus data symbol only rotates
    the sequence, so this is also the peak over all transmitted spread symbols.
    """
    values = column_papr(matrix.entries, oversample)
    column = int(np.argmax(values))
    return PaprReport.from_linear(float(values[column]), oversample, column)
