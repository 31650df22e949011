"""
Coincidence patterns on Bob's screen
====================================

Sweep Bob's detector across the screen for each of Alice's detector
positions and look at what his singles show.
"""

import numpy as np

from eprsignal import Geometry, SpdcState, sweep_pattern

geo = Geometry()
state = SpdcState(epsilon=0.1)
print(f"fringe period {geo.fringe_period * 1e3:.3f} mm, "
      f"{2 * geo.screen_halfwidth / geo.fringe_period:.2f} periods on screen")

# Alice behind the lens focus: two outcomes, each flat
for setting in ("offfocal_l", "offfocal_m", "offfocal_sum"):
    pat = sweep_pattern(state, geo, setting)
    print(f"{setting:13s} min {pat.values.min():.6f}  max {pat.values.max():.6f}")

# Alice at the focus: fringes
focal = sweep_pattern(state, geo, "focal")
print(f"{'focal':13s} min {focal.values.min():.6f}  max {focal.values.max():.6f}")

# The field-correlation algebra puts a dark fringe at the screen centre.
centre = np.argmin(np.abs(focal.positions))
print("rate at z = 0:", focal.values[centre])

# Both settings deliver the same total flux to Bob.
off = sweep_pattern(state, geo, "offfocal_sum")
print("focal / off-focal flux:", focal.integral() / off.integral())

# Crude text plot of the focal fringe
for z, v in zip(focal.positions[::8], focal.values[::8]):
    print(f"{z * 1e3:+6.2f} mm |" + "#" * int(round(60 * v / focal.values.max())))
