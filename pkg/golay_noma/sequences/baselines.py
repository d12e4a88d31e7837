from typing import Literal, Optional

import numpy as np
import sympy
from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator

from golay_noma.commons.errors import GolayNomaError
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix


class InvalidZcConfigError(GolayNomaError): ...


def nearest_prime(value: int) -> int:
    """Prime closest to `value`; ties go to the smaller prime."""
    if value <= 2:
        return 2
    if sympy.isprime(value):
        return value
    lower, upper = sympy.prevprime(value), sympy.nextprime(value)
    return lower if value - lower <= upper - value else upper


class ZcConfig(BaseModel):
    """Zadoff-Chu family: prime length M_zc and L distinct roots in 1..M_zc-1."""

    model_config = ConfigDict(frozen=True)

    M_zc: int
    roots: tuple[int, ...]
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _validate(self) -> "ZcConfig":
        if not sympy.isprime(self.M_zc) or self.M_zc == 2:
            raise InvalidZcConfigError(f"[INVALID ZC CONFIG] Length {self.M_zc} is not an odd prime")
        if len(set(self.roots)) != len(self.roots):
            raise InvalidZcConfigError(f"[INVALID ZC CONFIG] Duplicate roots: {self.roots}")
        if any(not 1 <= root < self.M_zc for root in self.roots):
            raise InvalidZcConfigError(f"[INVALID ZC CONFIG] Roots {self.roots} must lie in 1..{self.M_zc - 1}")
        return self

    @classmethod
    def random(cls, M: int, L: int, seed: int) -> "ZcConfig":
        """Length = nearest prime to M, L roots drawn without replacement."""
        M_zc = nearest_prime(M)
        if L > M_zc - 1:
            raise InvalidZcConfigError(f"[INVALID ZC CONFIG] Cannot draw {L} distinct roots for length {M_zc}")
        rng = np.random.default_rng(seed)
        roots = rng.choice(np.arange(1, M_zc), size=L, replace=False)
        return cls(M_zc=M_zc, roots=tuple(int(root) for root in roots), seed=seed)


def zc_base_sequence(root: int, length: int) -> np.ndarray:
    """s_q[n] = exp(-j pi q n (n + 1) / N_zc) for odd length."""
    n = np.arange(length, dtype=np.int64)
    # reduce the phase numerator before scaling to keep precision for long sequences
    phase = (root * n * (n + 1)) % (2 * length)
    return np.exp(-1j * np.pi * phase / length)


def zc_matrix(config: ZcConfig) -> SpreadingMatrix:
    """All M_zc cyclic shifts of every root sequence, unit-norm columns, N = L * M_zc."""
    columns: list[np.ndarray] = []
    for root in config.roots:
        base = zc_base_sequence(root, config.M_zc)
        shifts = np.arange(config.M_zc)
        index = (np.arange(config.M_zc)[:, None] - shifts[None, :]) % config.M_zc
        columns.append(base[index])
    entries = np.hstack(columns) / np.sqrt(config.M_zc)
    logger.debug(f"[ZC MATRIX] Built M_zc={config.M_zc}, roots={config.roots}")
    return SpreadingMatrix(
        family=SequenceFamily.Zc,
        entries=entries,
        zc_roots=list(config.roots),
        seed=config.seed,
    )


def random_matrix(kind: Literal["bipolar", "gaussian"] | SequenceFamily, M: int, N: int, seed: int) -> SpreadingMatrix:
    """
    Bipolar: i.i.d. uniform +-1/sqrt(M). Gaussian: i.i.d. N(0, 1/M) entries, columns not
    renormalized. Both draw from numpy's PCG64 generator (ziggurat normals), whose streams are
    platform independent for a given seed.
    """
    family = SequenceFamily(kind)
    if M < 1 or N < 1:
        raise ValueError(f"[INVALID MATRIX SHAPE] M={M}, N={N} must be positive")
    rng = np.random.default_rng(seed)
    match family:
        case SequenceFamily.Bipolar:
            entries = (1.0 - 2.0 * rng.integers(0, 2, size=(M, N))) / np.sqrt(M)
        case SequenceFamily.Gaussian:
            entries = rng.standard_normal((M, N)) / np.sqrt(M)
        case _:
            raise ValueError(f"[INVALID RANDOM FAMILY] {family.value} is not a random family")
    return SpreadingMatrix(family=family, entries=entries, seed=seed)
