# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: connected-subset enumeration and trajectory walking.

Mirrors _pure.py exactly; see the note there on bit-for-bit parity.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

IMPL = "cython"


def connected_masks(neighbor_masks, pi, double max_mass, bint include_full):
    cdef const cnp.uint64_t[::1] nbr = np.ascontiguousarray(neighbor_masks, dtype=np.uint64)
    cdef const double[::1] pvals = np.ascontiguousarray(pi, dtype=np.float64)
    cdef int n = nbr.shape[0]
    cdef double tol = 1e-12
    cdef cnp.uint64_t full = (<cnp.uint64_t> 1 << n) - 1
    cdef cnp.uint64_t top = full if include_full else full - 1
    cdef cnp.uint64_t mask, seen, frontier, nxt, f, b
    cdef double mass
    cdef int i
    out_masks = []
    out_mass = []
    mask = 0
    while mask < top:
        mask += 1
        mass = 0.0
        for i in range(n):
            if mask >> i & 1:
                mass += pvals[i]
        if mass > max_mass + tol:
            continue
        seen = mask & (~mask + 1)
        frontier = seen
        while frontier:
            nxt = 0
            f = frontier
            while f:
                b = f & (~f + 1)
                f ^= b
                i = 0
                while not (b >> i & 1):
                    i += 1
                nxt |= nbr[i]
            frontier = nxt & mask & ~seen
            seen |= frontier
        if seen == mask:
            out_masks.append(mask)
            out_mass.append(mass)
    return (np.array(out_masks, dtype=np.int64),
            np.array(out_mass, dtype=np.float64))


def walk_hitting_times(cum_rows, cum_start, in_target, int trials, long cap, rng):
    cdef const double[:, ::1] rows = np.ascontiguousarray(cum_rows, dtype=np.float64)
    cdef const double[::1] cstart = np.ascontiguousarray(cum_start, dtype=np.float64)
    cdef const cnp.uint8_t[::1] tgt = np.ascontiguousarray(in_target, dtype=np.uint8)
    cdef int n = rows.shape[0]
    cdef cnp.int64_t[::1] steps = np.empty(trials, dtype=np.int64)
    cdef bitgen_t *bitgen
    capsule = rng.bit_generator.capsule
    bitgen = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    cdef long n_capped = 0
    cdef long k
    cdef int t, state
    cdef double u
    for t in range(trials):
        u = bitgen.next_double(bitgen.state)
        state = _bisect(&cstart[0], n, u)
        k = 0
        while not tgt[state]:
            if k >= cap:
                n_capped += 1
                break
            u = bitgen.next_double(bitgen.state)
            state = _bisect(&rows[state, 0], n, u)
            k += 1
        steps[t] = k
    return np.asarray(steps), n_capped


cdef inline int _bisect(const double *cum, int n, double u) nogil:
    # first index with cum[idx] > u, clamped to n - 1
    cdef int lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if u < cum[mid]:
            hi = mid
        else:
            lo = mid + 1
    if lo > n - 1:
        lo = n - 1
    return lo
