"""Super-level sets of the quasi-stationary density and the distinguished level.

With f = alpha/pi_B on a connected B, the functional
U(l) = E_{alpha | f >= l}[f] / l is piecewise K_i / l between atoms of f,
strictly decreasing within each piece and jumping upward across atoms.
The distinguished level L is the rightmost solution of U(L) = 2; the set
{f >= L} then carries the moment identities that drive the nested-exit
lower bound, and its exit time is at least a universal multiple of
1/lambda(B).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import Chain, SubsetMask, make_subset
from .config import DEFAULT, Config
from .errors import EmptyLevelSet, NoRoot
from .spectral import quasi_stationary

__all__ = ["LevelInterval", "LevelScan", "qs_density", "u_functional", "find_L"]


def qs_density(c: Chain, B: SubsetMask) -> np.ndarray:
    """f = alpha / pi_B on B (aligned with B.members); E_{pi_B}[f] = 1."""
    qs = quasi_stationary(c, B)
    w = c.pi[B.indices] / B.pi_mass
    return qs.alpha / w


def u_functional(f: np.ndarray, pi_B: np.ndarray, alpha: np.ndarray,
                 level: float) -> float:
    """U at `level`: mean of f under alpha conditioned on {f >= level},
    divided by the level.

    Computed both as E_{alpha_l}[f] / l and as
    E_{pi_l}[f^2] / (l * E_{pi_l}[f]); the two routes must agree.
    """
    sel = f >= level
    if not np.any(sel):
        raise EmptyLevelSet(f"no states with density >= {level}")
    a = alpha[sel]
    w = pi_B[sel]
    u_alpha = float(np.dot(a / a.sum(), f[sel])) / level
    m1 = float(np.dot(w / w.sum(), f[sel]))
    m2 = float(np.dot(w / w.sum(), f[sel] ** 2))
    u_pi = m2 / (level * m1)
    if abs(u_alpha - u_pi) > 1e-10 * max(1.0, abs(u_alpha)):
        raise AssertionError(
            f"U routes disagree: {u_alpha} vs {u_pi} at level {level}")
    return u_alpha


@dataclass(frozen=True)
class LevelInterval:
    lo: float            # open lower end (previous atom, 0 for the first)
    hi: float            # closed upper end (atom a_i)
    K: float             # constant E_{alpha_l}[f] on the interval
    root: float          # K / 2, the solution of U = 2 ignoring the window
    accepted: bool


@dataclass(frozen=True)
class LevelScan:
    mask: SubsetMask
    levels: np.ndarray                     # distinct density values, ascending
    intervals: tuple[LevelInterval, ...]   # scanned right-to-left
    L: float
    level_set: SubsetMask                  # {f >= L}
    U_at_L: float
    m1: float                              # E_{pi_L}[f]
    m2: float                              # E_{pi_L}[f^2]
    atom_exact: bool                       # root landed exactly on an atom


def find_L(c: Chain, B: SubsetMask, config: Config = DEFAULT) -> LevelScan:
    """Locate the rightmost level with U = 2 by scanning atom intervals.

    On (a_{i-1}, a_i] the functional is K_i / l with K_i the alpha-mean
    of f over {f >= a_i}, so the candidate root is K_i / 2; the first
    candidate (scanning right-to-left) that lands inside its own window
    is the distinguished level.
    """
    qs = quasi_stationary(c, B)
    w = c.pi[B.indices] / B.pi_mass
    f = qs.alpha / w
    levels = np.unique(f)
    mem = np.asarray(B.members)
    intervals = []
    L = None
    atom_exact = False
    for i in range(len(levels) - 1, -1, -1):
        hi = levels[i]
        lo = levels[i - 1] if i > 0 else 0.0
        sel = f >= hi - 1e-15 * max(1.0, hi)
        a = qs.alpha[sel]
        K = float(np.dot(a / a.sum(), f[sel]))
        root = K / 2.0
        accepted = bool(lo < root <= hi
                        or np.isclose(root, hi, rtol=1e-12, atol=0))
        intervals.append(LevelInterval(lo=float(lo), hi=float(hi), K=K,
                                       root=root,
                                       accepted=bool(accepted and L is None)))
        if accepted and L is None:
            L = min(root, hi)
            atom_exact = bool(np.isclose(root, hi, rtol=1e-12, atol=0))
    if L is None:
        dump = ", ".join(f"({iv.lo:.3g},{iv.hi:.3g}]:K={iv.K:.6g}"
                         for iv in intervals)
        raise NoRoot(f"no interval contains its root; scan: {dump}")
    sel = f >= L
    members = tuple(int(mem[j]) for j in range(len(mem)) if sel[j])
    level_set = make_subset(c, members)
    m1 = float(np.dot(w[sel] / w[sel].sum(), f[sel]))
    m2 = float(np.dot(w[sel] / w[sel].sum(), f[sel] ** 2))
    u_at_l = m2 / (L * m1)
    return LevelScan(mask=B, levels=levels, intervals=tuple(intervals),
                     L=float(L), level_set=level_set, U_at_L=float(u_at_l),
                     m1=m1, m2=m2, atom_exact=atom_exact)
