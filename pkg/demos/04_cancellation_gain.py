"""Prediction and subtraction: how much interference power is removed.

Run: python3 demos/04_cancellation_gain.py
"""

import numpy as np

from vlcnm.cancellation import cancel, prediction_gain, prime
from vlcnm.channel import AutoRegressive, HarmonicHum, RngSeed, generate_interference
from vlcnm.estimation import AcfEstimate, PredictorModel, solve_yule_walker
from vlcnm.ppm import SampleBuffer

FS = 1e6

spec = AutoRegressive((0.95,), 1.0)
x = generate_interference(spec, 100_001, FS, RngSeed(1)).samples
model = solve_yule_walker(AcfEstimate(spec.autocovariance(1), 10**9), 1)
z = cancel(prime(model, 0.0, SampleBuffer(x[:1], FS)), SampleBuffer(x[1:], FS))
print(f"AR(1) a=0.95: gain {prediction_gain(SampleBuffer(x[1:], FS), z):.2f} dB "
      f"(theory {10 * np.log10(1 / (1 - 0.95**2)):.2f} dB)")

f = 100.0
w = 2 * np.pi * f / FS
s = generate_interference(HarmonicHum(f, (1.0,), (0.0,)), 100_002, FS, RngSeed()).samples
two_tap = PredictorModel(np.array([2 * np.cos(w), -1.0]), 0.0)
resid = cancel(prime(two_tap, 0.0, SampleBuffer(s[:2], FS)), SampleBuffer(s[2:], FS))
print(f"100 Hz tone, exact two-tap predictor: residual/input power {resid.power() / np.mean(s[2:] ** 2):.1e}")
