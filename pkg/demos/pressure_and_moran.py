#!/usr/bin/env python3
"""Pressure, Moran exponents and standing conditions for three Moran sets.

E1 keeps k maps of ratio 3**-(k+1) at level k; its dimension is log 2 / log 3
even though no level is self-similar.  E2 and E3 shrink so fast that the
pressure drops to -inf for every t > 0, and the dimension is 0.
"""

import math

import numpy as np

from moranspec import condition_diagnostics, jump_points, moran_exponents, preset

LIMIT = math.log(2) / math.log(3)

print("E1: Moran exponents s_k against the closed form (k+1)/(k+3) log2/log3")
ks = np.array([1, 10, 100, 1000, 2000])
for k, s in zip(ks, moran_exponents(preset("E1"), ks)):
    print(f"  k={k:5d}  s_k={s:.8f}  closed form={(k + 1) / (k + 3) * LIMIT:.8f}")

r = jump_points(preset("E1"))
print(f"  pressure jump points: s_upper={r.s_upper:.6f}  s_lower={r.s_lower:.6f}"
      f"  (limit {LIMIT:.6f})\n")

# E3 ratios leave floating point range at level 1026
for name, kw in [("E2", {}), ("E3", {"k_max": 1000, "window": 250})]:
    r = jump_points(preset(name), **kw)
    print(f"{name}: raw lower root {r.raw_lower:.2e} at k_max={r.k_max}, "
          f"degenerate={r.degenerate_lower} -> s_lower={r.s_lower}")

print("\nStanding conditions (trailing-window verdicts)")
for name, (k_max, window) in [("E1", (2000, 500)), ("E2", (2000, 500)), ("E3", (1000, 250))]:
    rep = condition_diagnostics(preset(name), k_max, window)
    print(f"  {name}")
    for cond, verdict in rep.verdicts.items():
        print(f"    {cond:24s} {verdict.value}")
