from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
import numpy.typing as npt
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from golay_noma.commons.errors import DimensionMismatchError, GolayNomaError
from golay_noma.sequences.spreading_matrix import SpreadingMatrix

QPSK_SCALE = 1.0 / np.sqrt(2.0)


class RankDeficiencyError(GolayNomaError): ...


class StoppingRule(str, Enum):
    """
    Residual statistic compared against the noise threshold of the sparsity-blind loop.
    `row_max`: largest l2 norm of a residual row across the J slots, against sqrt(3 sigma^2 J).
    `frobenius`: Frobenius norm of the residual, against sqrt(3 sigma^2 J M).
    """

    RowMax = "row_max"
    Frobenius = "frobenius"


class RecoveryResult(BaseModel):
    """
    Support estimate in selection order, with the least-squares symbol matrix X_hat whose rows
    follow `support`. The first slot is the pilot, so it carries the channel estimate.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    support: list[int] = Field(default_factory=list)
    X_hat: npt.NDArray[np.complex128]
    iterations: int = 0
    degenerate: bool = False
    residual_history: list[float] = Field(default_factory=list)
    stop_reason: str = ""

    @property
    def h_hat(self) -> npt.NDArray[np.complex128]:
        return self.X_hat[:, 0]

    @property
    def U_hat(self) -> npt.NDArray[np.complex128]:
        """Data slots equalized by the channel estimate and sliced to the QPSK alphabet."""
        if not self.support:
            return np.zeros((0, max(0, self.X_hat.shape[1] - 1)), dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore"):
            equalized = self.X_hat[:, 1:] / self.h_hat[:, None]
        return slice_qpsk(np.nan_to_num(equalized))

    def channel_estimates(self) -> dict[int, complex]:
        return {int(device): complex(value) for device, value in zip(self.support, self.h_hat)}


def slice_qpsk(values: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    real = np.where(values.real >= 0, 1.0, -1.0)
    imag = np.where(values.imag >= 0, 1.0, -1.0)
    return (real + 1j * imag) * QPSK_SCALE


def _entries(S: Union[SpreadingMatrix, npt.NDArray]) -> npt.NDArray:
    return S.entries if isinstance(S, SpreadingMatrix) else np.asarray(S)


def _least_squares(columns: npt.NDArray, Y: npt.NDArray) -> npt.NDArray[np.complex128]:
    solution, *_ = np.linalg.lstsq(columns, Y, rcond=None)
    return solution.astype(np.complex128)


def _empty_result(J: int, **kwargs: object) -> RecoveryResult:
    return RecoveryResult(X_hat=np.zeros((0, J), dtype=np.complex128), **kwargs)  # type: ignore[arg-type]


def stopping_threshold(sigma_n2: float, J: int, M: int, rule: StoppingRule) -> float:
    match rule:
        case StoppingRule.RowMax:
            return float(np.sqrt(3.0 * sigma_n2 * J))
        case StoppingRule.Frobenius:
            return float(np.sqrt(3.0 * sigma_n2 * J * M))


def _residual_statistic(residual: npt.NDArray, rule: StoppingRule) -> float:
    match rule:
        case StoppingRule.RowMax:
            return float(np.max(np.linalg.norm(residual, axis=1)))
        case StoppingRule.Frobenius:
            return float(np.linalg.norm(residual))


def somp_recover(
    S: Union[SpreadingMatrix, npt.NDArray],
    Y: npt.ArrayLike,
    sigma_n2: float,
    J: Optional[int] = None,
    max_iter: Optional[int] = None,
    stopping_rule: StoppingRule = StoppingRule.RowMax,
    degeneracy_tolerance: float = 1e-10,
    residual_floor: float = 1e-10,
) -> RecoveryResult:
    """
    Sparsity-blind simultaneous OMP. Each iteration picks the unselected column maximizing
    sum_t |<r_t, s_j>| / |s_j| and projects the residual onto the orthogonal complement of the
    selected columns (modified Gram-Schmidt with one reorthogonalization pass). The loop stops
    once the residual statistic drops below the noise threshold, at `max_iter`, or when the next
    column is numerically dependent on the selected ones.
    """
    A = _entries(S)
    Y = np.asarray(Y, dtype=np.complex128)
    if Y.ndim == 1:
        Y = Y[:, None]
    M, N = A.shape
    if Y.shape[0] != M:
        raise DimensionMismatchError(f"[SOMP] Y has {Y.shape[0]} rows, the spreading matrix has {M}")
    if J is None:
        J = Y.shape[1]
    elif J != Y.shape[1]:
        raise DimensionMismatchError(f"[SOMP] Y has {Y.shape[1]} slots, J={J} expected")
    limit = min(M, N, M // 2 if max_iter is None else max_iter)

    # the floor lets noiseless runs terminate once the residual is numerically zero
    threshold = max(
        stopping_threshold(sigma_n2, J, M, stopping_rule),
        residual_floor * float(np.linalg.norm(Y)),
    )
    column_norms = np.linalg.norm(A, axis=0)
    basis = np.zeros((M, 0), dtype=np.complex128)
    residual = Y.copy()
    support: list[int] = []
    history = [float(np.linalg.norm(residual))]
    degenerate = False
    stop_reason = "max_iter"

    while len(support) < limit:
        statistic = _residual_statistic(residual, stopping_rule)
        if statistic == 0.0 or statistic < threshold:
            stop_reason = "threshold"
            break
        score = np.sum(np.abs(A.conj().T @ residual), axis=1) / column_norms
        score[support] = -np.inf
        j = int(np.argmax(score))

        candidate = A[:, j].astype(np.complex128)
        w = candidate.copy()
        for _ in range(2):
            w -= basis @ (basis.conj().T @ w)
        if np.linalg.norm(w) < degeneracy_tolerance * column_norms[j]:
            degenerate = True
            stop_reason = "degenerate"
            logger.debug(f"[SOMP DEGENERATE] Column {j} is dependent on the {len(support)} selected columns")
            break
        q = w / np.linalg.norm(w)
        basis = np.hstack([basis, q[:, None]])
        residual = residual - np.outer(q, q.conj() @ residual)
        support.append(j)
        history.append(float(np.linalg.norm(residual)))
    else:
        if _residual_statistic(residual, stopping_rule) < threshold:
            stop_reason = "threshold"

    logger.trace(f"[SOMP STOP] {stop_reason} after {len(support)} iterations, residual={history[-1]:.3e}")
    if not support:
        return _empty_result(J, iterations=0, residual_history=history, stop_reason=stop_reason)
    return RecoveryResult(
        support=support,
        X_hat=_least_squares(A[:, support], Y),
        iterations=len(support),
        degenerate=degenerate,
        residual_history=history,
        stop_reason=stop_reason,
    )


def oracle_ls(
    S: Union[SpreadingMatrix, npt.NDArray], Y: npt.ArrayLike, true_support: Sequence[int]
) -> RecoveryResult:
    """Least-squares fit of Y onto the known active columns."""
    A = _entries(S)
    Y = np.asarray(Y, dtype=np.complex128)
    if Y.ndim == 1:
        Y = Y[:, None]
    support = [int(device) for device in true_support]
    if not support:
        return _empty_result(Y.shape[1], stop_reason="oracle")
    if len(support) > A.shape[0]:
        raise RankDeficiencyError(f"[ORACLE LS] Support of size {len(support)} exceeds M={A.shape[0]}")
    columns = A[:, support]
    if np.linalg.matrix_rank(columns) < len(support):
        raise RankDeficiencyError(f"[ORACLE LS] The {len(support)} support columns are linearly dependent")
    return RecoveryResult(
        support=support,
        X_hat=_least_squares(columns, Y),
        iterations=len(support),
        stop_reason="oracle",
    )
