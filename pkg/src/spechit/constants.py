"""Derived absolute constants used by the verification suites.

Each constant is stated in closed form next to the derivation that
produces it, so a unit test can recompute the numeric value from
scratch.  The floors actually asserted in the suites are rounded
*down* slightly, so they remain valid lower bounds.
"""

from __future__ import annotations

import math

# Martingale survival argument for the exit time of the distinguished
# super-level set: with the shrink factor chosen so exp(c) <= 20/19, a
# trajectory started from the conditioned stationary law stays inside
# for ceil(c / (4*lambda)) steps with probability at least
# (1 - sqrt(15/17))^2.  The expected exit time therefore exceeds
# SURVIVAL_PROB * SHRINK_LOG / (4 * lambda).
SHRINK_LOG = math.log(20.0 / 19.0)
SURVIVAL_PROB = (1.0 - math.sqrt(15.0 / 17.0)) ** 2

#: max over nested subsets D of E_{pi_D}[exit] is at least NESTED_EXIT_FLOOR / lambda(B)
NESTED_EXIT_FLOOR_EXACT = SURVIVAL_PROB * SHRINK_LOG / 4.0
NESTED_EXIT_FLOOR = 4.7e-5  # asserted floor, just below the exact ~4.71907e-5

#: the same constant lower-bounds t_H_pi / t_rel for reversible chains
HITTING_VS_RELAXATION_FLOOR = NESTED_EXIT_FLOOR

# Upper constant for the geometric-kernel characterization of t_H_pi:
# with s the 1/e time-averaged relaxation time, regeneration at
# geometric epochs gives t_H_pi <= (s - 1) / (1 - sqrt(B_HALF)).
B_HALF = (1.0 + math.exp(-2.0)) / 2.0
GEOM_UPPER_FACTOR = 1.0 / (1.0 - math.sqrt(B_HALF))

# Lower constant for the same characterization.  Chain of steps:
#   1. at t equal to the (1 - 1/sqrt(20)) time-averaged relaxation time,
#      some set D with pi(D) <= 1/2 satisfies
#      P_{pi_D}[exit > eta_t] >= SURVIVAL_PROB, eta_t the geometric lag;
#   2. with m = ceil(SURVIVAL_PROB * t / 2), Bernoulli's inequality gives
#      P[eta_t < m] <= SURVIVAL_PROB / 2, hence
#      E_{pi_D}[exit] >= m * SURVIVAL_PROB / 2 >= SURVIVAL_PROB^2 * t / 4;
#   3. the consistency chain for the time-averaged relaxation time at
#      levels 1/e, 1/2 and 1 - 1/sqrt(20) relates t back to the 1/e level:
#      t >= rel_geom(1/e) / ((e - 1) * (sqrt(20) - 1)).
GEOM_CHAIN_FACTOR = (math.e - 1.0) * (math.sqrt(20.0) - 1.0)
GEOM_LOWER_EXACT = SURVIVAL_PROB ** 2 / (4.0 * GEOM_CHAIN_FACTOR)
GEOM_LOWER = 5.6e-7  # asserted floor, just below the exact ~5.675e-7
