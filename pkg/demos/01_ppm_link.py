"""A clean 4PPM link: bits become pulses, pulses become decisions.

Run: python3 demos/01_ppm_link.py
"""

import numpy as np

from vlcnm.detection import compute_ser, detect_stream
from vlcnm.ppm import PpmConfig, bits_to_symbols, build_masks, modulate, symbols_to_bits

cfg = PpmConfig(order_M=4)
print(f"frame {cfg.frame_samples} samples, slot {cfg.slot_samples} samples, {cfg.bit_rate:.0f} bit/s")

bits = np.array([0, 0, 0, 1, 1, 0, 1, 1], dtype=np.uint8)
symbols = bits_to_symbols(bits, cfg)
print("bits", bits.tolist(), "-> symbols", symbols.symbols.tolist())

x = modulate(symbols, cfg)
frames = x.samples.reshape(-1, cfg.frame_samples)
for k, frame in enumerate(frames):
    on = np.flatnonzero(frame)
    print(f"frame {k}: pulse on samples [{on[0]}, {on[-1] + 1})")

masks = build_masks(cfg)
print("mask Gram matrix:\n", masks @ masks.T)

decided = detect_stream(x, cfg)
print("decided", decided.symbols.tolist(), "bits back", symbols_to_bits(decided).tolist())
print("SER", compute_ser(decided, symbols).ser)
