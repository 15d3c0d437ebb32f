"""How long must the receiver listen before transmitting?

Sweeps the noise-only acquisition length in the strong-ambient scenario and
prints the median filtered SER per length. A reduced run (3 repetitions,
2000 frames) keeps this under a minute; `vlcnm table4` runs the full sweep.

Run: python3 demos/05_acquisition_length.py
"""

import numpy as np

from vlcnm.harness import run_sweep
from vlcnm.scenario import load_preset, sweep_from_dict

doc = load_preset("table4")
doc["n_frames"] = 2000
doc["sweep"]["repetitions"] = 3
report = run_sweep(sweep_from_dict(doc))

off = np.median([r.ser for r in report.rows if r.requested_filtering == "off"])
print(f"unfiltered SER {off:.4f}")
for n in sorted({r.axis_value for r in report.rows}):
    rows = [r for r in report.rows if r.axis_value == n and r.requested_filtering == "on"]
    note = " (predictor downgraded)" if any(r.filtering == "off" for r in rows) else ""
    print(f"N={n:>5}: filtered SER {np.median([r.ser for r in rows]):.4f}{note}")
