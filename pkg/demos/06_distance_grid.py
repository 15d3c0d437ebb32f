"""Ambient intensity against distance, with and without cancellation.

Reduced figure grid (2000 frames, three intensities); `vlcnm figure34` runs
the full one.

Run: python3 demos/06_distance_grid.py
"""

from vlcnm.harness import run_sweep
from vlcnm.scenario import SweepSpec, load_preset, scenario_from_dict

doc = load_preset("figure34")
doc["n_frames"] = 2000
lumens = (50, 150, 250)

for M in (4, 8):
    print(f"--- {M}PPM ---")
    for d in (2.0, 4.0, 8.0):
        point = dict(doc, modulation={**doc["modulation"], "order_M": M}, channel={"distance_m": d})
        report = run_sweep(SweepSpec(scenario_from_dict(point), "interference_lumen", lumens, 1))
        cells = []
        for lm in lumens:
            off, on = (r.ser for r in report.rows if r.axis_value == lm)
            cells.append(f"{lm:>3} lm {off:.3f}->{on:.3f}")
        print(f"d={d:.0f} m: " + "   ".join(cells))
