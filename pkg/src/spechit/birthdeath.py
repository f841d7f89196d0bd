"""Quantile indices and the prefix/suffix exit-time statistic for
tridiagonal chains.

States carry 1-based labels inside this module (the natural indexing
for prefix sets [i] = {1..i}); conversion to the 0-based chain indexing
happens at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import Chain
from .config import DEFAULT, Config
from .errors import NotBirthDeath
from .hitting import _exit_value
from .records import VerificationRecord
from .spectral import relaxation_time

__all__ = ["BDStatistics", "bd_statistics", "bd_theorem_check", "is_birth_death"]


def is_birth_death(c: Chain) -> bool:
    mask = np.abs(np.arange(c.n)[:, None] - np.arange(c.n)[None, :]) > 1
    return bool(np.all(c.P[mask] == 0))


@dataclass(frozen=True)
class BDStatistics:
    """Quantile indices and the maximal prefix/suffix exit times (1-based)."""

    x_delta: int                 # max i with pi([i]) <= delta (0 if none)
    y_delta: int                 # min i with pi({i..n}) <= delta (n+1 if none)
    t_star: float
    prefix_max: float            # max over i <= x_delta of E_{pi_[i]}[T_{i+1}]
    prefix_argmax: int
    suffix_max: float            # max over i >= y_delta of E_{pi_{i..n}}[T_{i-1}]
    suffix_argmax: int
    delta: float = 0.75


def _prefix_exit(c: Chain, i: int) -> float:
    """E_{pi_[i]}[T_{i+1}] with [i] = {1..i} (1-based); targets state i+1."""
    return _exit_value(c.P, c.pi, list(range(i)), tridiag=True)


def _suffix_exit(c: Chain, i: int) -> float:
    """E_{pi_{i..n}}[T_{i-1}] (1-based)."""
    return _exit_value(c.P, c.pi, list(range(i - 1, c.n)), tridiag=True)


def bd_statistics(c: Chain, delta: float = 0.75) -> BDStatistics:
    """The exit-time statistic t_*: the larger of the worst prefix and the
    worst suffix stationary-start exit time, over the delta-quantile range."""
    if not is_birth_death(c):
        raise NotBirthDeath("transition matrix is not tridiagonal")
    n = c.n
    cumsum = np.cumsum(c.pi)
    x_delta = 0
    for i in range(1, n + 1):
        if cumsum[i - 1] <= delta:
            x_delta = i
    y_delta = n + 1
    for i in range(n, 0, -1):
        if c.pi[i - 1:].sum() <= delta:
            y_delta = i
    pre_max, pre_arg = -np.inf, 0
    for i in range(1, min(x_delta, n - 1) + 1):
        v = _prefix_exit(c, i)
        if v > pre_max:
            pre_max, pre_arg = v, i
    suf_max, suf_arg = -np.inf, 0
    for i in range(max(y_delta, 2), n + 1):
        v = _suffix_exit(c, i)
        if v > suf_max:
            suf_max, suf_arg = v, i
    t_star = max(pre_max, suf_max)
    return BDStatistics(x_delta=x_delta, y_delta=y_delta, t_star=float(t_star),
                        prefix_max=float(pre_max), prefix_argmax=pre_arg,
                        suffix_max=float(suf_max), suffix_argmax=suf_arg,
                        delta=delta)


def bd_theorem_check(c: Chain, config: Config = DEFAULT,
                     check_intervals: bool = True) -> list[VerificationRecord]:
    """t_*/4 <= t_rel, plus the per-interval domination steps of the proof.

    For every interval [[i, j]] the stationary-start exit time is at most
    both the prefix exit past j and the suffix exit past i; and starting
    further from the target can only increase the expected hitting time.
    """
    stats = bd_statistics(c)
    trel = relaxation_time(c)
    lab = f"bd(n={c.n})"
    recs = [VerificationRecord(
        id="bd.lower", chain=lab, lhs=stats.t_star / 4.0, rhs=trel,
        tolerance=config.verify_tol,
        extra={"t_star": stats.t_star, "ratio": trel / stats.t_star})]
    if not check_intervals or c.n > 30:
        return recs
    n = c.n
    from .hitting import _solve_exit
    prefix = {j: _prefix_exit(c, j) for j in range(1, n)}
    suffix = {i: _suffix_exit(c, i) for i in range(2, n + 1)}
    # h_to[j][x] = E_x[T_{j+1}] in 1-based terms (0-based target j)
    h_to = {}
    for j in range(1, n):
        h = np.zeros(n)
        others = [s for s in range(n) if s != j]
        h[others] = _solve_exit(c.P, others)
        h_to[j] = h
    worst_dom = np.inf
    worst_mono = np.inf
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            if i == 1 and j == n:
                continue
            interval = list(range(i - 1, j))
            val = _exit_value(c.P, c.pi, interval, tridiag=True)
            bound = np.inf
            if j < n:
                bound = min(bound, prefix[j])
            if i > 1:
                bound = min(bound, suffix[i])
            worst_dom = min(worst_dom, bound - val)
            if j < n and i > 1:
                # hitting j+1 takes longer from below the interval
                h = h_to[j]
                gaps = h[0:i - 1] - h[i - 1]
                if len(gaps):
                    worst_mono = min(worst_mono, float(gaps.min()))
    recs.append(VerificationRecord(
        id="bd.interval_domination", chain=lab, lhs=0.0, rhs=worst_dom,
        tolerance=config.verify_tol))
    recs.append(VerificationRecord(
        id="bd.start_monotonicity", chain=lab, lhs=0.0, rhs=worst_mono,
        tolerance=config.verify_tol))
    return recs
