"""M-ary pulse position modulation: bit mapping, waveforms and detection masks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SampleBuffer:
    """Real-valued samples at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    def power(self) -> float:
        """Mean square value."""
        if self.samples.size == 0:
            return 0.0
        return float(np.mean(self.samples**2))


@dataclass(frozen=True)
class SymbolSequence:
    symbols: np.ndarray
    order_M: int

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=np.int64)
        if symbols.ndim != 1:
            raise ValueError("symbols must be one-dimensional")
        if symbols.size and (symbols.min() < 0 or symbols.max() >= self.order_M):
            raise ValueError(f"symbols must lie in [0, {self.order_M - 1}]")
        symbols.setflags(write=False)
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return self.symbols.size


@dataclass(frozen=True)
class PpmConfig:
    """Frame layout of an M-PPM link.

    A frame of ``frame_duration`` seconds is split into ``order_M`` slots of
    equal width; the pulse fills its whole slot.
    """

    order_M: int = 4
    frame_duration: float = 1e-3
    sample_rate: float = 1e6
    amplitude: float = 1.0
    frame_samples: int = field(init=False)
    slot_samples: int = field(init=False)

    def __post_init__(self):
        M = self.order_M
        if M < 2 or M & (M - 1):
            raise ValueError(f"order_M must be a power of two >= 2, got {M}")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")
        frame_samples = int(round(self.frame_duration * self.sample_rate))
        if frame_samples % M:
            raise ValueError(
                f"{frame_samples} samples per frame is not divisible by M={M}"
            )
        if frame_samples // M < 1:
            raise ValueError("slots must hold at least one sample")
        object.__setattr__(self, "frame_samples", frame_samples)
        object.__setattr__(self, "slot_samples", frame_samples // M)

    @property
    def bits_per_symbol(self) -> int:
        return self.order_M.bit_length() - 1

    @property
    def slot_duration(self) -> float:
        return self.frame_duration / self.order_M

    @property
    def bit_rate(self) -> float:
        """Throughput in bit/s, one symbol of log2(M) bits per frame."""
        return self.bits_per_symbol / self.frame_duration


def bits_to_symbols(bits, config: PpmConfig) -> SymbolSequence:
    """Group bits MSB-first into PPM slot indices (natural binary order)."""
    bits = np.asarray(bits, dtype=np.int64).ravel()
    b = config.bits_per_symbol
    if bits.size % b:
        raise ValueError(f"bit count {bits.size} is not a multiple of {b}")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    weights = 1 << np.arange(b - 1, -1, -1)
    return SymbolSequence(bits.reshape(-1, b) @ weights, config.order_M)


def symbols_to_bits(symbols: SymbolSequence) -> np.ndarray:
    b = symbols.order_M.bit_length() - 1
    shifts = np.arange(b - 1, -1, -1)
    return ((symbols.symbols[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def modulate(symbols: SymbolSequence, config: PpmConfig) -> SampleBuffer:
    """Rectangular full-slot pulse per frame, placed in the slot given by the symbol."""
    if symbols.order_M != config.order_M:
        raise ValueError("symbol alphabet does not match config.order_M")
    frames = np.zeros((len(symbols), config.order_M, config.slot_samples))
    frames[np.arange(len(symbols)), symbols.symbols, :] = config.amplitude
    return SampleBuffer(frames.ravel(), config.sample_rate)


def build_masks(config: PpmConfig) -> np.ndarray:
    """Indicator masks, shape ``(M, frame_samples)``; row l covers slot l."""
    masks = np.zeros((config.order_M, config.frame_samples))
    for l in range(config.order_M):
        masks[l, l * config.slot_samples : (l + 1) * config.slot_samples] = 1.0
    masks.setflags(write=False)
    return masks


def random_symbols(n: int, config: PpmConfig, rng: np.random.Generator) -> SymbolSequence:
    return SymbolSequence(rng.integers(0, config.order_M, size=n), config.order_M)
