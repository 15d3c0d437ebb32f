"""What the receiver hears with the LED off, for each interference family.

Run: python3 demos/02_interference_models.py
"""

import numpy as np

from vlcnm.channel import (
    AutoRegressive,
    Composite,
    DcAmbient,
    HarmonicHum,
    NoiseSpec,
    RngSeed,
    acquire_noise_only,
)
from vlcnm.estimation import estimate_acf

FS = 1e6
models = {
    "AR(1) a=0.9": AutoRegressive((0.9,), 0.05),
    "100 Hz hum + harmonics": HarmonicHum(100.0, (1.0, 0.3, 0.1)),
    "ambient DC": DcAmbient(2.0),
    "1 Hz ambient swing + DC": Composite((DcAmbient(2.0), HarmonicHum(1.0, (1.0,)))),
}

for name, spec in models.items():
    y = acquire_noise_only(spec, NoiseSpec(0.02), 200_000, FS, RngSeed(1))
    acf = estimate_acf(y, 3, demean=True)
    rho = acf.values[1:] / acf.values[0]
    print(f"{name:26s} power {y.power():8.4f} (model {spec.power():8.4f})  "
          f"mean {acf.mean:+.3f}  rho[1..3] {np.round(rho, 4)}")

print("(a 1 Hz swing only reaches its long-run power over whole seconds; 0.2 s sees a fraction of a cycle)")
