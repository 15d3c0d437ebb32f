"""Synthetic received waveforms: optical channel, ambient interference and receiver noise.

The received sample stream is modelled as

    r[n] = gain * (x * h)[n - delay] + i[n] + w[n]

where ``i`` is structured ambient-light interference and ``w`` is white
Gaussian receiver noise. During an acquisition phase the transmitter is
silent and only ``i + w`` is observed; with the photodiode obstructed only
``w`` remains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import signal

from .ppm import SampleBuffer


class UnstableProcessError(ValueError):
    """Autoregressive coefficients with a pole on or outside the unit circle."""


@dataclass(frozen=True)
class RngSeed:
    """Seed plus stream identifier; distinct streams never share random draws."""

    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer")

    def generator(self, *substream: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *substream))
        return np.random.default_rng(ss)

    def child(self, stream_id: int) -> "RngSeed":
        return RngSeed(self.seed, stream_id)


# ---------------------------------------------------------------------------
# interference models


@dataclass(frozen=True)
class WhiteOnly:
    """No structured interference."""

    def power(self) -> float:
        return 0.0

    def scaled(self, factor: float) -> "WhiteOnly":
        return self


@dataclass(frozen=True)
class AutoRegressive:
    """i[n] = sum_k a_k i[n-k] + e[n], e white Gaussian with std ``driving_std``."""

    coefficients: tuple
    driving_std: float = 1.0

    def __post_init__(self):
        coefficients = tuple(float(c) for c in np.atleast_1d(self.coefficients))
        if not coefficients:
            raise ValueError("AutoRegressive needs at least one coefficient")
        object.__setattr__(self, "coefficients", coefficients)
        if self.driving_std < 0:
            raise ValueError("driving_std must be nonnegative")
        check_ar_stable(coefficients)

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def autocovariance(self, max_lag: int) -> np.ndarray:
        return ar_autocovariance(self.coefficients, self.driving_std, max_lag)

    def power(self) -> float:
        return float(self.autocovariance(0)[0])

    def scaled(self, factor: float) -> "AutoRegressive":
        return AutoRegressive(self.coefficients, self.driving_std * abs(factor))


@dataclass(frozen=True)
class HarmonicHum:
    """Mains-style flicker: sum of cosines at integer multiples of ``fundamental_hz``.

    ``phases=None`` draws an independent uniform phase per harmonic for every
    realization, which makes the process stationary across captures.
    """

    fundamental_hz: float
    harmonic_amplitudes: tuple
    phases: Optional[tuple] = None

    def __post_init__(self):
        amps = tuple(float(a) for a in np.atleast_1d(self.harmonic_amplitudes))
        object.__setattr__(self, "harmonic_amplitudes", amps)
        if self.phases is not None:
            phases = tuple(float(p) for p in np.atleast_1d(self.phases))
            if len(phases) != len(amps):
                raise ValueError("need one phase per harmonic amplitude")
            object.__setattr__(self, "phases", phases)
        if self.fundamental_hz <= 0:
            raise ValueError("fundamental_hz must be positive")

    def validate(self, sample_rate: float) -> None:
        if self.fundamental_hz >= sample_rate / 2 / max(len(self.harmonic_amplitudes), 1):
            raise ValueError("highest harmonic is at or above the Nyquist frequency")

    def power(self) -> float:
        return float(sum(a * a for a in self.harmonic_amplitudes) / 2)

    def scaled(self, factor: float) -> "HarmonicHum":
        return HarmonicHum(
            self.fundamental_hz,
            tuple(a * factor for a in self.harmonic_amplitudes),
            self.phases,
        )


@dataclass(frozen=True)
class DcAmbient:
    """Constant ambient light level."""

    level: float

    def power(self) -> float:
        return float(self.level**2)

    def scaled(self, factor: float) -> "DcAmbient":
        return DcAmbient(self.level * factor)


@dataclass(frozen=True)
class Composite:
    """Sum of independent interference components."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def power(self) -> float:
        # cross terms vanish except between DC components
        dc = sum(c.level for c in self.components if isinstance(c, DcAmbient))
        rest = sum(c.power() for c in self.components if not isinstance(c, DcAmbient))
        return float(rest + dc**2)

    def scaled(self, factor: float) -> "Composite":
        return Composite(tuple(c.scaled(factor) for c in self.components))


InterferenceSpec = Union[WhiteOnly, AutoRegressive, HarmonicHum, DcAmbient, Composite]


@dataclass(frozen=True)
class NoiseSpec:
    awgn_std: float = 0.0

    def __post_init__(self):
        if self.awgn_std < 0:
            raise ValueError("awgn_std must be nonnegative")


@dataclass(frozen=True)
class ChannelModel:
    """Line-of-sight optical channel: scalar gain, integer delay, optional taps."""

    gain: float = 1.0
    delay_samples: int = 0
    impulse_response: Optional[tuple] = None

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("gain must be positive")
        if self.delay_samples < 0:
            raise ValueError("delay_samples must be nonnegative")
        if self.impulse_response is not None:
            taps = tuple(float(t) for t in np.atleast_1d(self.impulse_response))
            if not taps or not np.all(np.isfinite(taps)):
                raise ValueError("impulse_response must be a finite, nonempty tap list")
            object.__setattr__(self, "impulse_response", taps)

    @property
    def taps(self) -> np.ndarray:
        if self.impulse_response is None:
            return np.ones(1)
        return np.asarray(self.impulse_response)


def check_ar_stable(coefficients: Sequence[float]) -> None:
    poly = np.concatenate(([1.0], -np.asarray(coefficients, dtype=float)))
    roots = np.roots(poly)
    if roots.size and np.max(np.abs(roots)) >= 1.0:
        raise UnstableProcessError(
            f"AR coefficients {tuple(coefficients)} are not stable "
            f"(largest pole magnitude {np.max(np.abs(roots)):.6g})"
        )


def ar_autocovariance(coefficients, driving_std: float, max_lag: int) -> np.ndarray:
    """Exact autocovariance of a stationary AR process at lags ``0..max_lag``.

    Solves the linear system relating the first q+1 autocovariances to the
    coefficients, then extends by the AR recursion.
    """
    a = np.asarray(coefficients, dtype=float)
    q = a.size
    A = np.zeros((q + 1, q + 1))
    for j in range(q + 1):
        A[j, j] += 1.0
        for k in range(1, q + 1):
            A[j, abs(j - k)] -= a[k - 1]
    rhs = np.zeros(q + 1)
    rhs[0] = driving_std**2
    gamma = np.linalg.solve(A, rhs)
    out = np.empty(max(max_lag, q) + 1)
    out[: q + 1] = gamma
    for m in range(q + 1, out.size):
        out[m] = sum(a[k - 1] * out[m - k] for k in range(1, q + 1))
    return out[: max_lag + 1]


def ar_warmup(order: int) -> int:
    return max(1000, 10 * order)


def _generate(spec, length: int, sample_rate: float, rng: np.random.Generator) -> np.ndarray:
    if isinstance(spec, WhiteOnly):
        return np.zeros(length)
    if isinstance(spec, DcAmbient):
        return np.full(length, float(spec.level))
    if isinstance(spec, AutoRegressive):
        warm = ar_warmup(spec.order)
        e = spec.driving_std * rng.standard_normal(warm + length)
        den = np.concatenate(([1.0], -np.asarray(spec.coefficients)))
        return signal.lfilter([1.0], den, e)[warm:]
    if isinstance(spec, HarmonicHum):
        spec.validate(sample_rate)
        n_h = len(spec.harmonic_amplitudes)
        if spec.phases is None:
            phases = rng.uniform(0.0, 2 * np.pi, size=n_h)
        else:
            phases = np.asarray(spec.phases)
        t = np.arange(length) / sample_rate
        out = np.zeros(length)
        for h, (amp, phi) in enumerate(zip(spec.harmonic_amplitudes, phases), start=1):
            if amp:
                out += amp * np.cos(2 * np.pi * h * spec.fundamental_hz * t + phi)
        return out
    if isinstance(spec, Composite):
        out = np.zeros(length)
        for k, comp in enumerate(spec.components):
            out += _generate(comp, length, sample_rate, _child_rng(rng, k))
        return out
    raise TypeError(f"unknown interference spec {spec!r}")


def _child_rng(rng: np.random.Generator, k: int) -> np.random.Generator:
    # Derived from the parent's seed sequence so component k's draws do not
    # depend on how many components precede it.
    ss = rng.bit_generator.seed_seq
    return np.random.default_rng(
        np.random.SeedSequence(ss.entropy, spawn_key=(*ss.spawn_key, 1000 + k))
    )


def generate_interference(
    spec: InterferenceSpec, length: int, sample_rate: float, seed: RngSeed
) -> SampleBuffer:
    """Draw ``length`` samples of interference; deterministic in ``(spec, length, seed)``.

    Longer draws with the same seed extend shorter ones (prefix property),
    except for autoregressive components whose warm-up is fixed per order.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    return SampleBuffer(_generate(spec, int(length), sample_rate, seed.generator(0)), sample_rate)


def white_noise(noise: NoiseSpec, length: int, rng: np.random.Generator) -> np.ndarray:
    if noise.awgn_std == 0:
        return np.zeros(length)
    return noise.awgn_std * rng.standard_normal(length)


def acquire_noise_only(
    spec: InterferenceSpec,
    noise: NoiseSpec,
    n_samples: int,
    sample_rate: float,
    seed: RngSeed,
) -> SampleBuffer:
    """Capture with the transmitter silent: interference plus receiver noise."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    i = generate_interference(spec, n_samples, sample_rate, seed).samples
    w = white_noise(noise, n_samples, seed.generator(1))
    return SampleBuffer(i + w, sample_rate)


def acquire_obstructed(
    noise: NoiseSpec, n_samples: int, sample_rate: float, seed: RngSeed
) -> SampleBuffer:
    """Capture with the photodiode covered: receiver noise only."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    return SampleBuffer(white_noise(noise, n_samples, seed.generator(1)), sample_rate)


def propagate(x: SampleBuffer, ch: ChannelModel) -> np.ndarray:
    """Noise-free channel output, length ``len(x) + delay``."""
    n_out = len(x) + ch.delay_samples
    y = ch.gain * np.convolve(x.samples, ch.taps)
    out = np.zeros(n_out)
    n_copy = min(y.size, n_out - ch.delay_samples)
    out[ch.delay_samples : ch.delay_samples + n_copy] = y[:n_copy]
    return out


def transmit_through(
    x: SampleBuffer,
    ch: ChannelModel,
    spec: InterferenceSpec,
    noise: NoiseSpec,
    seed: RngSeed,
) -> SampleBuffer:
    """Received data-phase waveform ``gain * (x * h)[n - delay] + i[n] + w[n]``."""
    if len(x) == 0:
        raise ValueError("x must be nonempty")
    clean = propagate(x, ch)
    i = generate_interference(spec, clean.size, x.sample_rate, seed).samples
    w = white_noise(noise, clean.size, seed.generator(1))
    return SampleBuffer(clean + i + w, x.sample_rate)


def distance_gain(distance_m: float, reference_gain: float = 1.0) -> float:
    """Inverse-square path gain; ``reference_gain`` is the gain at 1 m."""
    if distance_m <= 0:
        raise ValueError("distance must be positive")
    return reference_gain / distance_m**2


def lumen_to_amplitude(lumen: float, kappa: float) -> float:
    """Linear map from a reported luminous flux to an electrical interference scale."""
    return kappa * lumen
