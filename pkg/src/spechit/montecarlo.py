"""Seeded trajectory simulation: the independent oracle for hitting
expectations, geometric time-averaging, and quasi-stationary decay.

Randomness comes from a counter-based Philox generator keyed by
(seed, stream), so every operation is reproducible bit-for-bit and
distinct operations never share a stream.  The trajectory walker lives
in the kernels backend; both backends consume the bitstream in the same
order (one uniform for the start draw, one per step, trial by trial).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .chain import Chain, SubsetMask
from .config import DEFAULT, Config
from .errors import BadParameter, CapSaturated, InsufficientSurvival
from .spectral import quasi_stationary

__all__ = [
    "SimEstimate", "simulate_hitting", "simulate_geometric_step",
    "simulate_qs_decay", "QsDecayEstimate",
]

_STREAM_HITTING = 1
_STREAM_GEOMSTEP = 2
_STREAM_QSDECAY = 3


def _rng(seed: int, stream: int) -> np.random.Generator:
    key = np.array([np.uint64(seed), np.uint64(stream)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    stderr: float
    trials: int
    seed: int
    capped: int = 0

    @property
    def halfwidth4(self) -> float:
        return 4.0 * self.stderr


def simulate_hitting(c: Chain, start: np.ndarray, A: SubsetMask, trials: int,
                     seed: int, cap: int | None = None,
                     config: Config = DEFAULT) -> SimEstimate:
    """Empirical mean of the hitting time of A from the start distribution.

    Trajectories that reach the step cap are counted at the cap (a
    biased-low marker); more than 1% of them raises CapSaturated.
    """
    if trials < 1:
        raise BadParameter("need at least one trial")
    start = np.asarray(start, dtype=float)
    if start.shape != (c.n,) or np.any(start < 0) or abs(start.sum() - 1) > 1e-9:
        raise BadParameter("start must be a distribution over the states")
    if cap is None:
        cap = config.mc_cap_factor * c.n * c.n
    if cap < 1:
        raise BadParameter("cap must be >= 1")
    in_target = np.zeros(c.n, dtype=np.uint8)
    in_target[A.indices] = 1
    cum_rows = np.cumsum(c.P, axis=1)
    cum_start = np.cumsum(start)
    rng = _rng(seed, _STREAM_HITTING)
    steps, n_capped = _kernels.walk_hitting_times(
        cum_rows, cum_start, in_target, int(trials), int(cap), rng)
    if n_capped > 0.01 * trials:
        raise CapSaturated(f"{n_capped}/{trials} trajectories hit cap={cap}")
    mean = float(steps.mean())
    std = float(steps.std(ddof=1)) if trials > 1 else 0.0
    return SimEstimate(mean=mean, stderr=std / np.sqrt(trials),
                       trials=trials, seed=seed, capped=int(n_capped))


def simulate_geometric_step(c: Chain, t: float, start: int, trials: int,
                            seed: int) -> np.ndarray:
    """Empirical law of the chain at an independent Geometric(1/t) lag.

    Returns the frequency vector over states; at t = 1 the lag is zero
    and the law is the point mass at the start state.
    """
    if t < 1:
        raise BadParameter("averaging parameter must be >= 1")
    rng = _rng(seed, _STREAM_GEOMSTEP)
    if t == 1:
        etas = np.zeros(trials, dtype=np.int64)
    else:
        etas = rng.geometric(1.0 / t, size=trials) - 1
    states = np.full(trials, int(start), dtype=np.int64)
    cum_rows = np.cumsum(c.P, axis=1)
    max_eta = int(etas.max()) if trials else 0
    for step in range(max_eta):
        active = np.nonzero(etas > step)[0]
        if len(active) == 0:
            break
        u = rng.random(len(active))
        rows = cum_rows[states[active]]
        nxt = (rows < u[:, None]).sum(axis=1)
        states[active] = np.minimum(nxt, c.n - 1)
    freq = np.bincount(states, minlength=c.n).astype(float) / trials
    return freq


@dataclass(frozen=True)
class QsDecayEstimate:
    rate: float                  # fitted decay exponent of the survival tail
    survival: np.ndarray         # empirical P[T > k] for k = 0..kmax
    ks_used: np.ndarray
    trials: int
    seed: int


def simulate_qs_decay(c: Chain, B: SubsetMask, trials: int, seed: int,
                      kmax: int = 40, start: str = "alpha",
                      min_survivors: int = 100) -> QsDecayEstimate:
    """Decay-rate estimate of P[T_{B^c} > k] from sampled trajectories.

    Starting from the quasi-stationary law the exit time is geometric,
    so the fitted slope of the log-survival curve estimates
    log(1 - lambda(B)).  `start` may be "alpha" or "pi_B".
    """
    qs = quasi_stationary(c, B)
    if start == "alpha":
        dist = qs.alpha_full(c.n)
    elif start == "pi_B":
        dist = np.zeros(c.n)
        dist[B.indices] = c.pi[B.indices] / B.pi_mass
    else:
        raise BadParameter(f"unknown start {start!r}")
    rng = _rng(seed, _STREAM_QSDECAY)
    outside = np.ones(c.n, dtype=np.uint8)
    outside[B.indices] = 0
    cum_rows = np.cumsum(c.P, axis=1)
    cum_start = np.cumsum(dist)
    steps, _ = _kernels.walk_hitting_times(
        cum_rows, cum_start, outside, int(trials), int(kmax + 1), rng)
    ks = np.arange(kmax + 1)
    survival = np.array([(steps > k).mean() for k in ks])
    counts = survival * trials
    usable = ks[(counts >= min_survivors) & (survival > 0)]
    if len(usable) < 2:
        raise InsufficientSurvival(
            f"fewer than {min_survivors} survivors beyond k=1")
    slope = np.polyfit(usable, np.log(survival[usable]), 1)[0]
    return QsDecayEstimate(rate=float(-slope), survival=survival,
                           ks_used=usable, trials=trials, seed=seed)
