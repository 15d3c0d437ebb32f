"""Interference cancellation by one-step linear prediction and subtraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimation import PredictorModel
from .ppm import SampleBuffer


@dataclass
class CancellerState:
    """Running context of the canceller.

    ``history`` holds the last ``p`` centered inputs, most recent first.
    """

    model: PredictorModel
    history: np.ndarray
    dc_level: float = 0.0

    def __post_init__(self):
        self.history = np.asarray(self.history, dtype=float).copy()
        if self.history.shape != (self.model.order_p,):
            raise ValueError("history length must equal the predictor order")


def prime(model: PredictorModel, dc_level: float, warmup: SampleBuffer) -> CancellerState:
    """Seed the history with the tail of ``warmup`` (usually the acquisition capture)."""
    p = model.order_p
    if len(warmup) < p:
        raise ValueError(f"warm-up needs at least {p} samples, got {len(warmup)}")
    tail = warmup.samples[len(warmup) - p :] - dc_level
    return CancellerState(model, tail[::-1], dc_level)


def cancel(state: CancellerState, r: SampleBuffer) -> SampleBuffer:
    """Subtract the predicted interference from every sample of ``r``.

    ``z[n] = u[n] - sum_k a_k u[n-k]`` with ``u = r - dc_level``. The
    predictor runs on observed inputs, so this is an FIR prediction-error
    filter. ``state.history`` is advanced so successive calls continue the
    stream seamlessly.
    """
    p = state.model.order_p
    u = r.samples - state.dc_level
    if u.size == 0:
        return SampleBuffer(u, r.sample_rate)
    extended = np.concatenate((state.history[::-1], u))
    z = np.convolve(extended, state.model.error_filter(), mode="valid")
    state.history = extended[-p:][::-1].copy()
    return SampleBuffer(z, r.sample_rate)


def prediction_gain(before: SampleBuffer, after: SampleBuffer) -> float:
    """Power ratio ``before / after`` in dB."""
    if len(before) != len(after):
        raise ValueError("buffers must have equal length")
    p_before = before.power()
    if p_before == 0:
        raise ZeroDivisionError("prediction gain is undefined for a zero-power input")
    p_after = after.power()
    if p_after == 0:
        return float("inf")
    return float(10 * np.log10(p_before / p_after))
