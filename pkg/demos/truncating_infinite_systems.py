#!/usr/bin/env python3
"""Finite subsystems of systems with countably many maps per level.

Each level of the geometric families has ratios c_{n,k} = a_n q**k for
k = 1, 2, ...  A staircase of slacks delta_i decides how many maps to keep so
that the full level sum is at most (1 + delta) times the kept one.
"""

import math

import numpy as np

from moranspec import build_subsystem, jump_points, preset
from moranspec.infinite import infinite_condition_check, m_phi_estimate, verify_coverage

t_grid = np.round(np.arange(1, 11) / 10, 12)

spec = preset("geometric-infinite")
report = infinite_condition_check(spec, t_grid, [0.5, 1.0], 256)
print(f"geometric-infinite hypothesis check: {report.verdict().value}")
sub, plan = build_subsystem(spec, t_grid, [0.1, 0.01, 0.001])
print("  cut index per level:", [plan.cut_index(spec.level(k), k) for k in (1, 64, 65, 129, 500)])
rows = verify_coverage(spec, plan, 500)
print(f"  coverage holds on {sum(r[-1] for r in rows)}/{len(rows)} (level, t) pairs")
r = jump_points(sub)
print(f"  truncated jump points: s_upper={r.s_upper}, s_lower={r.s_lower} (level scale 2**-n "
      "drives the pressure to -inf)\n")

spec = preset("geometric-stationary")
sub, plan = build_subsystem(spec, np.linspace(0.5, 1.0, 6), [0.01, 1e-4, 1e-6])
r = jump_points(sub, 400, 100, tol=1e-7)
print("geometric-stationary: level sum 3**-t / (1 - 3**-t) = 1 at t = log2/log3")
print(f"  truncated root {r.s_lower:.7f}  closed form {math.log(2) / math.log(3):.7f}")
print(f"  guaranteed pressure defect at level 200: {plan.defect_bound(200):.1e}\n")

for name in ("middle-third", "E1", "E3"):
    est = m_phi_estimate(preset(name), np.linspace(0.05, 1.0, 20), 200, 50)
    print(f"m_Phi for {name}: {est.value} ({est.status.value})")
