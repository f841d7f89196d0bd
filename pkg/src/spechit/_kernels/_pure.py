"""Pure-Python kernels; reference implementation for the compiled core.

Both backends must produce bit-identical output: the subset enumerator
visits masks in ascending numeric order, and the trajectory walker
consumes exactly one uniform per start draw and one per step, trial by
trial, via ``Generator.random()`` / ``next_double`` on the same bit
generator.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np

IMPL = "pure"


def connected_masks(neighbor_masks, pi, max_mass, include_full):
    """Enumerate subsets connected in the undirected support graph.

    neighbor_masks[i] is the bitmask of neighbors of state i (self bit not
    required).  Returns (masks, masses) for every nonempty subset with
    0 < mass <= max_mass + 1e-12, proper unless include_full, in ascending
    mask order.
    """
    n = len(neighbor_masks)
    nbr = [int(m) for m in neighbor_masks]
    pvals = [float(x) for x in pi]
    tol = 1e-12
    full = (1 << n) - 1
    top = full + 1 if include_full else full
    out_masks = []
    out_mass = []
    for mask in range(1, top):
        mass = 0.0
        for i in range(n):
            if mask >> i & 1:
                mass += pvals[i]
        if mass > max_mass + tol:
            continue
        # BFS from the lowest set bit, restricted to the subset
        start = mask & -mask
        seen = start
        frontier = start
        while frontier:
            nxt = 0
            f = frontier
            while f:
                b = f & -f
                f ^= b
                nxt |= nbr[b.bit_length() - 1]
            frontier = nxt & mask & ~seen
            seen |= frontier
        if seen == mask:
            out_masks.append(mask)
            out_mass.append(mass)
    return (np.array(out_masks, dtype=np.int64),
            np.array(out_mass, dtype=np.float64))


def walk_hitting_times(cum_rows, cum_start, in_target, trials, cap, rng):
    """Walk `trials` trajectories until they enter the target set.

    cum_rows: (n, n) cumulative transition rows; cum_start: (n,) cumulative
    start distribution; in_target: (n,) uint8.  Returns (steps, n_capped);
    capped trajectories report `cap` steps.
    """
    n = cum_rows.shape[0]
    rows = [list(cum_rows[i]) for i in range(n)]
    cstart = list(cum_start)
    tgt = [bool(x) for x in in_target]
    steps = np.empty(trials, dtype=np.int64)
    n_capped = 0
    rand = rng.random
    for t in range(trials):
        u = rand()
        state = min(bisect_right(cstart, u), n - 1)
        k = 0
        while not tgt[state]:
            if k >= cap:
                n_capped += 1
                break
            u = rand()
            row = rows[state]
            state = min(bisect_right(row, u), n - 1)
            k += 1
        steps[t] = k
    return steps, n_capped
