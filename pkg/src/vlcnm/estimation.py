"""Autocorrelation estimates and Yule-Walker predictor fitting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal
from scipy.linalg import toeplitz

from .ppm import SampleBuffer

#: relative diagonal loading applied once when the recursion becomes unstable
REGULARIZATION = 1e-8


class EstimationError(RuntimeError):
    pass


class DegenerateAcfError(EstimationError):
    """Zero-lag autocorrelation is not positive; there is nothing to predict from."""


class IllConditionedError(EstimationError):
    """Levinson recursion hit a reflection coefficient of magnitude >= 1."""


@dataclass(frozen=True)
class AcfEstimate:
    """Biased autocorrelation values at lags ``0..max_lag``.

    ``mean`` is the sample mean removed before estimation (0 when the
    estimate was taken on the raw samples). ``clamped`` is set when a
    noise-floor subtraction drove the lag-0 value below zero.
    """

    values: np.ndarray
    n_source_samples: int
    estimator: str = "biased"
    mean: float = 0.0
    clamped: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.max_lag >= self.n_source_samples:
            raise ValueError("max_lag must be smaller than the source length")

    @property
    def max_lag(self) -> int:
        return self.values.size - 1

    def toeplitz(self, size: int) -> np.ndarray:
        return toeplitz(self.values[:size])


@dataclass(frozen=True)
class PredictorModel:
    """One-step linear predictor ``x_hat[n] = sum_k a_k x[n-k]``."""

    coefficients: np.ndarray
    residual_variance: float
    reflection: np.ndarray = None
    regularized: bool = False

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=float)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("predictor needs at least one coefficient")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        if self.residual_variance < 0:
            raise ValueError("residual_variance must be nonnegative")
        a.setflags(write=False)
        object.__setattr__(self, "coefficients", a)

    @property
    def order_p(self) -> int:
        return self.coefficients.size

    @classmethod
    def zero(cls, order_p: int, residual_variance: float = 0.0) -> "PredictorModel":
        return cls(np.zeros(order_p), residual_variance, np.zeros(order_p))

    def error_filter(self) -> np.ndarray:
        """FIR taps of the prediction-error filter ``1 - sum_k a_k z^-k``."""
        return np.concatenate(([1.0], -self.coefficients))


def estimate_acf(x: SampleBuffer, max_lag: int, demean: bool = False) -> AcfEstimate:
    """Biased estimator ``R[m] = (1/N) sum_{n=m}^{N-1} x[n] x[n-m]``.

    With ``demean=True`` the sample mean is removed first and recorded on
    the result.
    """
    samples = x.samples
    n = samples.size
    if n == 0:
        raise ValueError("cannot estimate an ACF from an empty buffer")
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag={max_lag} must lie in [0, {n - 1}]")
    mean = float(samples.mean()) if demean else 0.0
    centered = samples - mean
    full = signal.correlate(centered, centered, mode="full")
    values = full[n - 1 : n + max_lag] / n
    return AcfEstimate(values, n, mean=mean)


def estimate_noise_power(obstructed: SampleBuffer) -> float:
    """Mean square of a capture taken with the photodiode covered."""
    if len(obstructed) == 0:
        raise ValueError("empty capture")
    return float(np.mean(obstructed.samples**2))


def interference_acf(acquired: AcfEstimate, noise_power: float) -> AcfEstimate:
    """Remove the white-noise floor, which lives only at lag 0."""
    values = np.array(acquired.values, dtype=float)
    values[0] -= noise_power
    clamped = bool(values[0] < 0)
    if clamped:
        values[0] = 0.0
    return AcfEstimate(
        values,
        acquired.n_source_samples,
        acquired.estimator,
        acquired.mean,
        clamped or acquired.clamped,
    )


def levinson_durbin(r: np.ndarray, order_p: int):
    """Levinson-Durbin recursion on autocorrelation values ``r[0..order_p]``.

    Returns ``(coefficients, reflection, error_power)``. Raises
    :class:`IllConditionedError` if a reflection coefficient reaches unit
    magnitude.
    """
    r = np.asarray(r, dtype=float)
    a = np.zeros(order_p)
    reflection = np.zeros(order_p)
    err = r[0]
    for m in range(order_p):
        acc = r[m + 1] - a[:m] @ r[m:0:-1]
        k = acc / err
        if not np.isfinite(k) or abs(k) >= 1.0:
            raise IllConditionedError(f"|reflection| = {abs(k):.6g} at stage {m + 1}")
        a[:m] = a[:m] - k * a[:m][::-1]
        a[m] = k
        reflection[m] = k
        err *= 1.0 - k * k
    return a, reflection, err


def solve_yule_walker(acf: AcfEstimate, order_p: int) -> PredictorModel:
    """Fit an order-``p`` predictor from autocorrelation values.

    Solves ``sum_k a_k R[|j-k|] = R[j]`` for ``j = 1..p``. If the recursion
    becomes unstable the zero-lag value is loaded by ``1e-8 * R[0]`` and the
    solve is retried once.
    """
    if order_p < 1:
        raise ValueError("order_p must be at least 1")
    if order_p > acf.max_lag:
        raise ValueError(f"order_p={order_p} exceeds the ACF's max_lag={acf.max_lag}")
    r = np.array(acf.values[: order_p + 1], dtype=float)
    if not r[0] > 0:
        raise DegenerateAcfError(f"R[0] = {r[0]:.6g} is not positive")
    try:
        a, k, err = levinson_durbin(r, order_p)
        regularized = False
    except IllConditionedError:
        r[0] += REGULARIZATION * r[0]
        try:
            a, k, err = levinson_durbin(r, order_p)
        except IllConditionedError as exc:
            raise IllConditionedError(f"{exc} after diagonal loading") from None
        regularized = True
    return PredictorModel(a, max(float(err), 0.0), k, regularized)
