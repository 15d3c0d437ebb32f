"""Mask-correlation maximum-likelihood PPM detection and SER accounting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import binomtest

from .ppm import PpmConfig, SampleBuffer, SymbolSequence, build_masks


@dataclass(frozen=True)
class DecisionRecord:
    metrics: np.ndarray
    decided_symbol: int
    true_symbol: Optional[int] = None


@dataclass(frozen=True)
class SerReport:
    n_symbols: int
    n_errors: int
    ser: float
    wilson_interval_95: tuple


def detect_frame(frame, masks: np.ndarray, true_symbol: Optional[int] = None) -> DecisionRecord:
    """Correlate one frame against every mask and keep the largest metric.

    Ties resolve to the smallest slot index.
    """
    samples = frame.samples if isinstance(frame, SampleBuffer) else np.asarray(frame, float)
    masks = np.asarray(masks)
    if samples.shape != masks.shape[1:]:
        raise ValueError(
            f"frame length {samples.size} does not match mask length {masks.shape[1]}"
        )
    metrics = masks @ samples
    return DecisionRecord(metrics, int(np.argmax(metrics)), true_symbol)


def frame_metrics(z: SampleBuffer, config: PpmConfig) -> np.ndarray:
    """Decision metrics for every frame, shape ``(n_frames, M)``."""
    n = len(z)
    if n % config.frame_samples:
        raise ValueError(
            f"stream length {n} is not a multiple of {config.frame_samples} samples"
        )
    frames = z.samples.reshape(-1, config.frame_samples)
    return frames @ build_masks(config).T


def detect_stream(z: SampleBuffer, config: PpmConfig) -> SymbolSequence:
    metrics = frame_metrics(z, config)
    return SymbolSequence(np.argmax(metrics, axis=1), config.order_M)


def wilson_interval(n_errors: int, n_symbols: int, confidence: float = 0.95) -> tuple:
    ci = binomtest(n_errors, n_symbols).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def compute_ser(decided: SymbolSequence, truth: SymbolSequence) -> SerReport:
    if len(decided) != len(truth):
        raise ValueError("decided and true sequences differ in length")
    if len(truth) == 0:
        raise ValueError("need at least one symbol")
    n = len(truth)
    errors = int(np.count_nonzero(decided.symbols != truth.symbols))
    ser = errors / n
    low, high = wilson_interval(errors, n)
    # guard the invariant low <= ser <= high against last-ulp rounding
    return SerReport(n, errors, ser, (min(low, ser), max(high, ser)))
