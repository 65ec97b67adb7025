#!/usr/bin/env python3
"""Interval realisations, box counting and local mass exponents.

Box counts at triadic scales are exact for the Cantor set.  The local
exponents log mu(B(x, r)) / log r of the natural measure equal log2/log3 at
r = 3**-k but dip well below it between those radii, which is why the mass
distribution principle only controls the limit r -> 0.
"""

import math

import numpy as np

from moranspec import (box_count, empirical_box_dim, local_exponent_scan, mass_distribution,
                       moran_limits, preset, realize_attractor)

LIMIT = math.log(2) / math.log(3)

cantor = realize_attractor(preset("middle-third"), 12)
print(f"middle-third depth 12: {len(cantor)} intervals")
for s, n in box_count(cantor, 3.0 ** -np.arange(1, 9)):
    print(f"  N(3^{math.log(s, 3):.0f}) = {n}")
est = empirical_box_dim(cantor)
print(f"  fitted box dimension {est.slope:.4f} +- {est.stderr:.4f} (exact {LIMIT:.4f})\n")

spec = preset("block-alternating")
lo, hi = moran_limits(spec, 2000, 1000)
est = empirical_box_dim(realize_attractor(spec, 14))
print(f"block-alternating depth 14: slope {est.slope:.4f}; Moran range [{lo:.3f}, {hi:.3f}]\n")

measure = mass_distribution(preset("middle-third"), 12, LIMIT)
print("minimum local exponent over 512 scan centres")
for r, e in local_exponent_scan(measure, cantor, 3.0 ** -np.arange(2, 10.5, 0.5)):
    print(f"  r = 3^{math.log(r, 3):5.1f}   {e:.4f}")
