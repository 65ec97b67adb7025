"""Dimension estimates for Moran-type non-autonomous iterated function systems.

The package works in the product model: level ``k`` carries a finite (or
analytic countable) family of contraction ratios, and every quantity is
computed from sums of ratio powers, in log space.
"""

__version__ = "0.1.0"

from .system import (InvalidSystemError, LevelSpec, Periodic, Rule, Separation, SystemSpec,
                     Truncated, condition_diagnostics, level_table, materialize_level)
from .presets import PRESETS, preset
from .pressure import (jump_points, moran_exponent, moran_exponents, moran_limits,
                       partition_sum, pressure)
from .cutset import (CutSetProblem, DeltaSchedule, brute_force_min_cut, cover_cost, k_delta,
                     min_cut_cost, spectrum, theta_jump_points, theta_pressure)
from .geometry import (box_count, empirical_box_dim, local_exponent_scan, mass_distribution,
                       realize_attractor)
from .infinite import (TruncationPlan, build_subsystem, infinite_condition_check,
                       m_phi_estimate, ratio_prune, truncate_level)
from .serialize import dumps_spec, loads_spec, spec_hash
