"""Fitting a predictor: Levinson recursion against a dense solve, and
estimates converging as the acquisition grows.

Run: python3 demos/03_yule_walker.py
"""

import numpy as np
from scipy.linalg import toeplitz

from vlcnm.channel import AutoRegressive, RngSeed, generate_interference
from vlcnm.estimation import AcfEstimate, estimate_acf, solve_yule_walker
from vlcnm.ppm import SampleBuffer

spec = AutoRegressive((1.2, -0.5), 1.0)
r = spec.autocovariance(2)
model = solve_yule_walker(AcfEstimate(r, 10**9), 2)
print("exact ACF         ->", model.coefficients, "residual", round(model.residual_variance, 6))
print("dense solve       ->", np.linalg.solve(toeplitz(r[:2]), r[1:3]))

x = generate_interference(spec, 100_000, 1e6, RngSeed(3))
for n in (100, 1_000, 10_000, 100_000):
    acf = estimate_acf(SampleBuffer(x.samples[:n], 1e6), 2, demean=True)
    print(f"N={n:>6}: a = {np.round(solve_yule_walker(acf, 2).coefficients, 4)}")
