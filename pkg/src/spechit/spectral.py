"""Eigenstructure of reversible chains and killed kernels.

Provides the relaxation time, quasi-stationary distributions of
restrictions, the escape-rate / variational / isoperimetric profiles,
the sign-witness set realizing the spectral gap, mixing times, and a
local upper estimate of the log-Sobolev constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components as _cc

from .chain import Chain, SubsetMask, continuize, make_subset, restrict
from .config import DEFAULT, Config
from .errors import (BadParameter, DegenerateEigenfunction,
                     EnumerationTooLarge, NotReversible, ReducibleRestriction)

__all__ = [
    "ReversibleSpectrum", "QuasiStationary", "Profile", "LogSobolevEstimate",
    "reversible_spectrum", "relaxation_time", "absolute_relaxation_time",
    "quasi_stationary", "set_escape_rate", "spectral_profile",
    "spectral_profile_hat", "isoperimetric_profile", "gap_witness_set",
    "mixing_times", "log_sobolev_upper_estimate", "lambda_hat_of_set",
    "additive_symmetrization_gap",
]


# --- basic spectra -----------------------------------------------------------

@dataclass(frozen=True)
class ReversibleSpectrum:
    """Descending eigenvalues with a pi-orthonormal eigenbasis; f_1 = 1."""

    eigenvalues: np.ndarray          # beta_1 = 1 > beta_2 >= ... >= beta_n
    eigenfunctions: np.ndarray       # column i is f_{i+1}

    @property
    def beta2(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def beta_min(self) -> float:
        return float(self.eigenvalues[-1])


def _symmetrize(P: np.ndarray, pi: np.ndarray) -> np.ndarray:
    d = np.sqrt(pi)
    A = (P * d[:, None]) / d[None, :]
    return (A + A.T) / 2


def det_start_vector(n: int) -> np.ndarray:
    """Fixed generic starting vector for iterative eigensolves.

    ARPACK seeds itself randomly when no v0 is given, which would break
    byte-identical reports; any fixed vector with components along every
    eigenspace restores determinism.
    """
    v = 1.0 + (np.arange(n) % 7)
    return v / np.linalg.norm(v)


def reversible_spectrum(c: Chain) -> ReversibleSpectrum:
    """Full spectrum of a reversible chain via the symmetric similarity."""
    if not c.reversible:
        raise NotReversible("chain fails detailed balance")
    d = np.sqrt(c.pi)
    A = _symmetrize(c.P, c.pi)
    w, U = np.linalg.eigh(A)
    order = np.argsort(w)[::-1]
    w = w[order]
    F = U[:, order] / d[:, None]
    # fix signs so the largest-magnitude entry of each eigenfunction is positive
    for i in range(F.shape[1]):
        k = int(np.argmax(np.abs(F[:, i])))
        if F[k, i] < 0:
            F[:, i] = -F[:, i]
    # the top eigenfunction is the constant 1
    F[:, 0] = 1.0
    w[0] = 1.0
    return ReversibleSpectrum(eigenvalues=w, eigenfunctions=F)


def relaxation_time(c: Chain) -> float:
    """Inverse spectral gap 1 / (1 - beta_2)."""
    spec = reversible_spectrum(c)
    return 1.0 / (1.0 - spec.beta2)


def absolute_relaxation_time(c: Chain) -> float:
    """max(t_rel, 1 / (1 + beta_min)): accounts for the negative edge."""
    spec = reversible_spectrum(c)
    return max(1.0 / (1.0 - spec.beta2), 1.0 / (1.0 + spec.beta_min))


def additive_symmetrization_gap(c: Chain) -> float:
    """Spectral gap of (P + P*) / 2 (equals the gap of P when reversible)."""
    A = _symmetrize(c.P, c.pi)   # similar to (P + P*) / 2 for any P
    w = np.linalg.eigvalsh(A)
    return 1.0 - float(np.sort(w)[-2])


# --- quasi-stationary distributions -----------------------------------------

@dataclass(frozen=True)
class QuasiStationary:
    """Perron data of a killed kernel: (alpha, beta(B), lambda(B))."""

    mask: SubsetMask
    alpha: np.ndarray            # aligned with mask.members, sums to 1
    beta: float
    lam: float

    def alpha_full(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[list(self.mask.members)] = self.alpha
        return out


def _perron_reversible(entries: np.ndarray, pi_local: np.ndarray):
    """(beta, alpha) for a reversible substochastic block."""
    k = entries.shape[0]
    if k == 1:
        return float(entries[0, 0]), np.array([1.0])
    d = np.sqrt(pi_local)
    M = (entries * d[:, None]) / d[None, :]
    M = (M + M.T) / 2
    if k <= 512:
        w, U = np.linalg.eigh(M)
        beta = float(w[-1])
        v = U[:, -1]
    else:
        w, U = spla.eigsh(sp.csr_matrix(M), k=1, which="LA",
                          v0=det_start_vector(k))
        beta = float(w[0])
        v = U[:, 0]
    alpha = d * v
    if alpha.sum() < 0:
        alpha = -alpha
    alpha = np.clip(alpha, 0.0, None)
    return beta, alpha / alpha.sum()


def _perron_general(entries: np.ndarray):
    """(beta, alpha) by shifted power iteration on the transpose."""
    k = entries.shape[0]
    if k == 1:
        return float(entries[0, 0]), np.array([1.0])
    M = entries.T + np.eye(k)      # shift kills periodicity in the support
    x = np.full(k, 1.0 / k)
    rho = 0.0
    for _ in range(100_000):
        y = M @ x
        rho_new = float(y.sum())
        y /= rho_new
        if np.max(np.abs(y - x)) < 1e-14 and abs(rho_new - rho) < 1e-14:
            x = y
            rho = rho_new
            break
        x, rho = y, rho_new
    else:
        # dense fallback for pathological cases
        w, V = np.linalg.eig(entries.T)
        i = int(np.argmax(w.real))
        x = np.abs(V[:, i].real)
        x /= x.sum()
        return float(w[i].real), x
    return rho - 1.0, x


def quasi_stationary(c: Chain, B: SubsetMask) -> QuasiStationary:
    """Quasi-stationary distribution and escape rate of the killed kernel.

    Requires B connected in the support graph (the restriction is then
    irreducible for the chains handled here); callers with a
    disconnected B should decompose it, see :func:`set_escape_rate`.
    """
    if not B.connected:
        raise ReducibleRestriction(f"subset {B.members} is not connected")
    ker = restrict(c, B)
    idx = B.indices
    if c.reversible:
        beta, alpha = _perron_reversible(ker.entries, c.pi[idx])
    else:
        beta, alpha = _perron_general(ker.entries)
    return QuasiStationary(mask=B, alpha=alpha, beta=beta, lam=1.0 - beta)


def set_escape_rate(c: Chain, members) -> float:
    """lambda(B) for arbitrary B: min escape rate over connected components.

    Matches the convention that the Perron value of a reducible
    restriction is realized on its best component.
    """
    mem = list(members)
    sub = c.P[np.ix_(mem, mem)]
    sym = (sub > 0) | (sub.T > 0)
    ncomp, labels = _cc(sp.csr_matrix(sym), directed=False)
    lam = np.inf
    for comp in range(ncomp):
        part = [mem[i] for i in range(len(mem)) if labels[i] == comp]
        qs = quasi_stationary(c, make_subset(c, part))
        lam = min(lam, qs.lam)
    return float(lam)


# --- profiles ----------------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Monotone step function over achievable masses with argmin witnesses."""

    kind: str
    breakpoints: np.ndarray        # ascending achievable masses
    values: np.ndarray
    witnesses: tuple[int, ...]     # bitmask per breakpoint
    upper_bound_only: bool = False
    value_at_one: float | None = None

    def value_at(self, delta: float) -> float:
        if self.value_at_one is not None and delta >= 1.0:
            return self.value_at_one
        i = self._index(delta)
        return float(self.values[i])

    def witness_at(self, delta: float) -> int:
        i = self._index(delta)
        return self.witnesses[i]

    def _index(self, delta: float) -> int:
        i = int(np.searchsorted(self.breakpoints, delta + 1e-12, side="right")) - 1
        if i < 0:
            raise BadParameter(
                f"delta={delta} below the smallest achievable mass "
                f"{self.breakpoints[0]}")
        return min(i, len(self.values) - 1)

    def evaluate(self, deltas) -> np.ndarray:
        return np.array([self.value_at(d) for d in np.atleast_1d(deltas)])


def _prefix_min_profile(kind: str, entries, upper_bound_only=False,
                        value_at_one=None) -> Profile:
    """entries: iterable of (mass, value, bitmask) -> step profile."""
    entries = sorted(entries, key=lambda e: (e[0], e[2]))
    bps, vals, wits = [], [], []
    best = np.inf
    best_w = 0
    for mass, value, bm in entries:
        if value < best:
            best, best_w = value, bm
        if bps and abs(mass - bps[-1]) <= 1e-14:
            vals[-1] = best
            wits[-1] = best_w
        else:
            bps.append(mass)
            vals.append(best)
            wits.append(best_w)
    return Profile(kind=kind, breakpoints=np.array(bps),
                   values=np.array(vals), witnesses=tuple(wits),
                   upper_bound_only=upper_bound_only,
                   value_at_one=value_at_one)


def _bitmask(members) -> int:
    m = 0
    for i in members:
        m |= 1 << int(i)
    return m


def _connected_family(c: Chain, config: Config):
    from .chain import connected_subsets
    yield from connected_subsets(c, max_mass=1.0, config=config)


def spectral_profile(c: Chain, deltas=None, *, witness_mode: bool = False,
                     config: Config = DEFAULT) -> Profile:
    """Escape-rate profile: min over connected B with pi(B) <= delta of lambda(B).

    Exact by exhaustive enumeration up to the cap; above the cap,
    witness_mode=True evaluates candidate sets only and the resulting
    values are certified upper bounds.
    """
    if c.n > config.enum_cap:
        if not witness_mode:
            raise EnumerationTooLarge(
                f"n={c.n}; pass witness_mode=True for upper bounds")
        fam = _witness_candidates(c, config)
        entries = [(m.pi_mass, quasi_stationary(c, m).lam, _bitmask(m.members))
                   for m in fam]
        return _prefix_min_profile("lambda", entries, upper_bound_only=True)
    entries = [(B.pi_mass, quasi_stationary(c, B).lam, _bitmask(B.members))
               for B in _connected_family(c, config)]
    prof = _prefix_min_profile("lambda", entries)
    if deltas is not None:
        return _sample_profile(prof, deltas)
    return prof


def _sample_profile(prof: Profile, deltas) -> Profile:
    deltas = np.sort(np.atleast_1d(np.asarray(deltas, dtype=float)))
    vals = [prof.value_at(d) for d in deltas]
    wits = [prof.witness_at(min(d, prof.breakpoints[-1])) for d in deltas]
    return Profile(kind=prof.kind, breakpoints=deltas, values=np.array(vals),
                   witnesses=tuple(wits),
                   upper_bound_only=prof.upper_bound_only,
                   value_at_one=prof.value_at_one)


def lambda_hat_of_set(c: Chain, members) -> float:
    """Variational escape rate: min of Dirichlet(f) / Var(f) over supp f in B."""
    idx = np.asarray(sorted(members), dtype=np.intp)
    Dpi = np.diag(c.pi)
    K = Dpi @ (np.eye(c.n) - c.P)
    K = (K + K.T) / 2
    A = K[np.ix_(idx, idx)]
    M = (Dpi - np.outer(c.pi, c.pi))[np.ix_(idx, idx)]
    w = scipy.linalg.eigh(A, M, eigvals_only=True, subset_by_index=[0, 0])
    return float(w[0])


def spectral_profile_hat(c: Chain, deltas=None, *,
                         config: Config = DEFAULT) -> Profile:
    """Variational profile over ALL subsets with pi(B) <= delta.

    Disconnected sets can strictly lower this profile (sign patterns
    across components cancel the mean), so the enumeration here is not
    restricted to connected sets.  At delta >= 1 the value is the
    spectral gap of (P + P*) / 2.
    """
    if c.n > config.enum_cap:
        raise EnumerationTooLarge(f"n={c.n} exceeds cap {config.enum_cap}")
    n = c.n
    entries = []
    for mask in range(1, (1 << n) - 1):
        members = [i for i in range(n) if mask >> i & 1]
        mass = float(c.pi[members].sum())
        entries.append((mass, lambda_hat_of_set(c, members), mask))
    prof = _prefix_min_profile("lambda_hat", entries,
                               value_at_one=additive_symmetrization_gap(c))
    if deltas is not None:
        return _sample_profile(prof, deltas)
    return prof


def isoperimetric_profile(c: Chain, deltas=None, *,
                          config: Config = DEFAULT) -> Profile:
    """One-step boundary flow profile: min of P_{pi_B}[X1 outside B]."""
    if c.n > config.enum_cap:
        raise EnumerationTooLarge(f"n={c.n} exceeds cap {config.enum_cap}")
    entries = []
    for B in _connected_family(c, config):
        idx = B.indices
        outside = np.ones(c.n, dtype=bool)
        outside[idx] = False
        exit_prob = c.P[np.ix_(idx, np.nonzero(outside)[0])].sum(axis=1)
        val = float(np.dot(c.pi[idx] / B.pi_mass, exit_prob))
        entries.append((B.pi_mass, val, _bitmask(B.members)))
    prof = _prefix_min_profile("phi", entries)
    if deltas is not None:
        return _sample_profile(prof, deltas)
    return prof


def _witness_candidates(c: Chain, config: Config):
    """Candidate small sets for profiles beyond the enumeration cap:
    super-level and quantile sets of the leading eigenfunctions, plus
    graph-distance balls for sparse chains."""
    spec = reversible_spectrum(c) if c.reversible else None
    masks: set[tuple[int, ...]] = set()
    if spec is not None:
        for i in range(1, min(5, c.n)):
            f = spec.eigenfunctions[:, i]
            order = np.argsort(-f)
            cuts = np.unique(f)
            if len(cuts) > 32:
                cuts = cuts[np.linspace(0, len(cuts) - 1, 32).astype(int)]
            for cut in cuts:
                for side in (f >= cut, f <= cut):
                    mem = tuple(np.nonzero(side)[0].tolist())
                    if 0 < len(mem) < c.n:
                        masks.add(mem)
            # pi-quantile prefixes along the sorted eigenfunction
            acc = 0.0
            mem_list: list[int] = []
            stride = max(1, c.n // 64)
            for j, s in enumerate(order):
                mem_list.append(int(s))
                acc += c.pi[s]
                if acc > 0.5:
                    break
                if j % stride == 0:
                    masks.add(tuple(sorted(mem_list)))
    # distance balls (cheap on sparse support)
    A = sp.csr_matrix((c.P > 0) | (c.P.T > 0))
    for v in range(min(c.n, 64)):
        seen = {v}
        frontier = {v}
        for _ in range(3):
            nxt = set()
            for u in frontier:
                nxt.update(A.indices[A.indptr[u]:A.indptr[u + 1]].tolist())
            frontier = nxt - seen
            seen |= frontier
            if 0 < len(seen) < c.n:
                masks.add(tuple(sorted(seen)))
    out = []
    for mem in masks:
        m = make_subset(c, mem)
        if m.connected and m.pi_mass < 1.0:
            out.append(m)
    return out


# --- gap witness -------------------------------------------------------------

def gap_witness_set(c: Chain, config: Config = DEFAULT) -> SubsetMask:
    """Positivity set of the second eigenfunction, on the light side.

    Returns W = {x : f_2(x) > 0} (sign chosen so pi(W) <= 1/2); its
    escape rate is at most the spectral gap up to eigensolver noise.
    """
    spec = reversible_spectrum(c)
    gap = 1.0 - spec.beta2
    tied = [1]
    if c.n > 2 and spec.eigenvalues[2] > spec.beta2 - 1e-12:
        tied.append(2)
    for col in tied:
        f = spec.eigenfunctions[:, col]
        for g in (f, -f):
            members = tuple(np.nonzero(g > 0)[0].tolist())
            if not members or len(members) == c.n:
                continue
            W = make_subset(c, members)
            if W.pi_mass > 0.5 + 1e-12:
                continue
            if set_escape_rate(c, members) <= gap + config.eigen_tol:
                return W
    raise DegenerateEigenfunction(
        "no sign choice yields a valid light positivity set")


# --- mixing times ------------------------------------------------------------

def _dist_from_worst(M: np.ndarray, pi: np.ndarray, mode: str) -> float:
    if mode == "tv":
        return float(0.5 * np.abs(M - pi[None, :]).sum(axis=1).max())
    if mode == "linf":
        return float(np.abs((M - pi[None, :]) / pi[None, :]).max())
    raise BadParameter(f"unknown mode {mode!r}")


def mixing_times(c: Chain, eps: float, mode: str = "tv",
                 time: str = "discrete", config: Config = DEFAULT) -> float:
    """Smallest time at which the worst-start distance drops to eps.

    Discrete time scans integer powers (exact); continuous time runs a
    bisection on the heat kernel at unit rate.
    """
    if not (0 < eps < 1):
        raise BadParameter("eps must lie in (0, 1)")
    if time == "discrete":
        M = np.eye(c.n)
        for t in range(100_000):
            if _dist_from_worst(M, c.pi, mode) <= eps:
                return float(t)
            M = M @ c.P
        raise BadParameter("discrete mixing time exceeds 1e5 steps")
    if time != "continuous":
        raise BadParameter(f"unknown time {time!r}")
    hi = 1.0
    for _ in range(200):
        if _dist_from_worst(continuize(c, 1.0, hi), c.pi, mode) <= eps:
            break
        hi *= 2
    else:
        raise BadParameter("could not bracket the continuous mixing time")
    lo = 0.0
    while hi - lo > 1e-6:
        mid = (lo + hi) / 2
        if _dist_from_worst(continuize(c, 1.0, mid), c.pi, mode) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


# --- log-Sobolev upper estimate ----------------------------------------------

@dataclass(frozen=True)
class LogSobolevEstimate:
    upper: float          # local-minimization upper estimate of the constant
    m_lambda: float       # min over delta in [pi_*, 1/2] of Lambda / log(1/delta)
    m_kappa: float        # same with the exit-time profile kappa
    converged: bool


def _ls_ratio(f, pi, K):
    # factor-2 convention: the largest c with c * Ent(f^2) <= 2 * E(f, f),
    # the normalization under which the profile proxy is a lower bound
    nrm2 = float(np.dot(pi, f * f))
    ent = float(np.dot(pi, f * f * np.log(f * f / nrm2 + 1e-300)))
    if ent <= 1e-14:
        return np.inf, ent
    return 2.0 * float(f @ K @ f) / ent, ent


def log_sobolev_upper_estimate(c: Chain, restarts: int = 8, seed: int = 0,
                               config: Config = DEFAULT) -> LogSobolevEstimate:
    """Upper-estimate the log-Sobolev constant by local minimization.

    The constant here is the largest c with c * Ent(f^2) <= 2 * E(f, f)
    (the normalization under which the profile proxy m_lambda is a lower
    bound).  Any feasible function upper-bounds the defining minimum, so
    the best ratio found over seeded projected-gradient descents is a
    certified upper estimate.  Also returns the two profile proxies.
    """
    if not c.reversible:
        raise NotReversible("log-Sobolev estimate requires reversibility")
    if c.n > 16:
        raise BadParameter("local optimization supported only for n <= 16")
    rng = np.random.default_rng(seed)
    K = np.diag(c.pi) @ (np.eye(c.n) - c.P)
    K = (K + K.T) / 2
    best = np.inf
    converged = False
    for _ in range(restarts):
        f = rng.standard_normal(c.n)
        f /= np.sqrt(np.dot(c.pi, f * f))
        ratio, ent = _ls_ratio(f, c.pi, K)
        step = 0.5
        for _ in range(500):
            g = np.sign(f) * np.maximum(np.abs(f), 1e-9)
            nrm2 = float(np.dot(c.pi, g * g))
            grad_e = 2 * K @ g
            grad_n = 2 * c.pi * g * np.log(g * g / nrm2 + 1e-300)
            _, ent = _ls_ratio(g, c.pi, K)
            if not np.isfinite(ratio) or ent <= 1e-14:
                break
            grad = (grad_e - ratio * grad_n) / ent
            moved = False
            while step > 1e-12:
                f_new = f - step * grad
                f_new /= np.sqrt(np.dot(c.pi, f_new * f_new))
                r_new, ent_new = _ls_ratio(f_new, c.pi, K)
                if r_new < ratio - 1e-14 and ent_new > 1e-12:
                    f, ratio = f_new, r_new
                    step *= 1.5
                    moved = True
                    break
                step /= 2
            if not moved:
                converged = True
                break
        best = min(best, ratio)
    prof = spectral_profile(c, config=config)
    m_lambda = _profile_proxy(prof)
    from .hitting import kappa_profile
    m_kappa = _profile_proxy(kappa_profile(c, config=config))
    return LogSobolevEstimate(upper=best, m_lambda=m_lambda, m_kappa=m_kappa,
                              converged=converged)


def _profile_proxy(prof: Profile) -> float:
    """min over breakpoints <= 1/2 of value / log(1 / delta)."""
    vals = []
    for bp, v in zip(prof.breakpoints, prof.values):
        if bp <= 0.5 + 1e-12 and bp < 1.0:
            vals.append(v / np.log(1.0 / bp))
    return float(min(vals))
