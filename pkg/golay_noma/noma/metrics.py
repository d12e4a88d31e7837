from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from golay_noma.noma.recovery import RecoveryResult
from golay_noma.noma.scenario import FrameScenario


class FrameMetrics(BaseModel):
    """
    Per-frame errors. `nmse` and `ser` are None when the frame has no active device; such
    frames contribute to the activity error rate only.
    """

    K: int
    N: int
    missed: int
    false_alarms: int
    symbol_errors: int
    aer: float = Field(ge=0.0, le=1.0)
    nmse: Optional[float] = Field(default=None, ge=0.0)
    ser: Optional[float] = Field(default=None, ge=0.0, le=1.0)


class MetricsRecord(BaseModel):
    """Frame averages with their standard errors of the mean."""

    frames: int
    aer: float
    aer_sem: float
    nmse: Optional[float] = None
    nmse_db: Optional[float] = None
    nmse_sem: Optional[float] = None
    nmse_frames: int = 0
    ser: Optional[float] = None
    ser_sem: Optional[float] = None
    missed: int = 0
    false_alarms: int = 0
    symbol_errors: int = 0


def evaluate_metrics(truth: FrameScenario, result: RecoveryResult) -> FrameMetrics:
    """
    AER counts undetected and false-alarmed devices over all N. NMSE covers the truly active
    devices, with a zero estimate for the undetected ones. SER counts every data symbol of an
    undetected device as wrong and is normalized by K (J - 1); false alarms add no symbols.

    The result describes a single frame. Campaign rows report the `MetricsRecord` that
    `aggregate_metrics` builds from the frames of a grid point.
    """
    active = {int(device) for device in truth.active_set}
    detected = {int(device) for device in result.support}
    missed = len(active - detected)
    false_alarms = len(detected - active)
    data_slots = truth.J - 1

    estimates = result.channel_estimates()
    sliced = result.U_hat
    row_of = {device: row for row, device in enumerate(result.support)}

    nmse: Optional[float] = None
    ser: Optional[float] = None
    symbol_errors = 0
    if active:
        devices = sorted(active)
        h_true = truth.h[devices]
        h_est = np.array([estimates.get(device, 0.0) for device in devices], dtype=np.complex128)
        nmse = float(np.sum(np.abs(h_true - h_est) ** 2) / np.sum(np.abs(h_true) ** 2))
        for device in devices:
            if device not in row_of:
                symbol_errors += data_slots
                continue
            wrong = ~np.isclose(sliced[row_of[device]], truth.U[device, 1:])
            symbol_errors += int(np.count_nonzero(wrong))
        ser = symbol_errors / (len(devices) * data_slots)

    return FrameMetrics(
        K=len(active),
        N=truth.N,
        missed=missed,
        false_alarms=false_alarms,
        symbol_errors=symbol_errors,
        aer=(missed + false_alarms) / truth.N,
        nmse=nmse,
        ser=ser,
    )


def _mean_and_sem(values: Sequence[float]) -> tuple[float, float]:
    data = np.asarray(values, dtype=np.float64)
    # np.mean sums pairwise, so the value does not depend on how frames were batched
    mean = float(np.mean(data))
    sem = float(np.std(data, ddof=1) / np.sqrt(data.size)) if data.size > 1 else 0.0
    return mean, sem


def aggregate_metrics(frames: Sequence[FrameMetrics]) -> MetricsRecord:
    """Averages per-frame metrics into the record reported for one grid point."""
    if not frames:
        raise ValueError("[EMPTY METRICS] At least one frame is required")
    aer, aer_sem = _mean_and_sem([frame.aer for frame in frames])
    record = MetricsRecord(
        frames=len(frames),
        aer=aer,
        aer_sem=aer_sem,
        missed=sum(frame.missed for frame in frames),
        false_alarms=sum(frame.false_alarms for frame in frames),
        symbol_errors=sum(frame.symbol_errors for frame in frames),
    )
    nmse_values = [frame.nmse for frame in frames if frame.nmse is not None]
    if nmse_values:
        nmse, nmse_sem = _mean_and_sem(nmse_values)
        record.nmse = nmse
        record.nmse_sem = nmse_sem
        record.nmse_frames = len(nmse_values)
        record.nmse_db = float(10.0 * np.log10(nmse)) if nmse > 0 else float("-inf")
    ser_values = [frame.ser for frame in frames if frame.ser is not None]
    if ser_values:
        record.ser, record.ser_sem = _mean_and_sem(ser_values)
    return record
