"""
Spreading matrix export. The binary layout is a 16-byte little-endian header (magic "GLYM",
M, N, family tag as uint32) followed by the entries in column-major order as (re, im) pairs
of float64.
"""

import csv
import io
import struct
from pathlib import Path
from typing import Union

import numpy as np
from loguru import logger

from golay_noma.commons.errors import GolayNomaError
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix

MAGIC = b"GLYM"
HEADER = struct.Struct("<4sIII")


class MatrixFormatError(GolayNomaError): ...


def encode_matrix(matrix: SpreadingMatrix) -> bytes:
    header = HEADER.pack(MAGIC, matrix.M, matrix.N, matrix.family.tag)
    payload = np.asarray(matrix.entries, dtype="<c16").tobytes(order="F")
    return header + payload


def decode_matrix(data: bytes) -> SpreadingMatrix:
    if len(data) < HEADER.size:
        raise MatrixFormatError(f"[MATRIX FORMAT] File holds {len(data)} bytes, shorter than the header")
    magic, M, N, tag = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise MatrixFormatError(f"[MATRIX FORMAT] Bad magic {magic!r}")
    if tag >= len(SequenceFamily):
        raise MatrixFormatError(f"[MATRIX FORMAT] Unknown family tag {tag}")
    expected = HEADER.size + 16 * M * N
    if len(data) != expected:
        raise MatrixFormatError(f"[MATRIX FORMAT] Expected {expected} bytes for {M}x{N}, got {len(data)}")
    entries = np.frombuffer(data, dtype="<c16", offset=HEADER.size).reshape((M, N), order="F")
    return SpreadingMatrix(family=SequenceFamily.from_tag(tag), entries=entries.astype(np.complex128))


def write_matrix(matrix: SpreadingMatrix, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode_matrix(matrix))
    logger.debug(f"[MATRIX SAVED] {matrix.family.value} {matrix.M}x{matrix.N} to {path}")


def read_matrix(path: Union[str, Path]) -> SpreadingMatrix:
    return decode_matrix(Path(path).read_bytes())


def format_matrix_csv(matrix: SpreadingMatrix) -> str:
    """Long format, one entry per row: row, column, real, imaginary."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("row", "col", "re", "im"))
    for col in range(matrix.N):
        for row in range(matrix.M):
            value = matrix.entries[row, col]
            writer.writerow((row, col, repr(float(value.real)), repr(float(value.imag))))
    return buffer.getvalue()


def write_matrix_csv(matrix: SpreadingMatrix, path: Union[str, Path]) -> None:
    Path(path).write_text(format_matrix_csv(matrix))
