"""Exact hitting-time expectations, tails, and the headline quantities.

The central objects: the worst stationary-start expected hitting time
of a large set (t_H_pi), the exit-time profile kappa, nested-exit
maxima, the spectral-mixture tail of exit times, and the classical
two-sided geometric-tail bound for reversible chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from . import _kernels
from .chain import Chain, SubsetMask, make_subset, support_neighbor_masks
from .config import DEFAULT, Config
from .errors import (EmptySubset, EnumerationTooLarge, NotReversible,
                     ReducibleRestriction, SingularSystem)
from .generators import PendantPathExample
from .records import VerificationRecord
from .spectral import Profile, _prefix_min_profile, quasi_stationary, \
    relaxation_time, set_escape_rate

__all__ = [
    "HittingSolve", "MixtureTail", "HittingMax", "NestedExit",
    "expected_hitting", "stationary_exit", "t_H_pi", "kappa_profile",
    "best_nested_exit", "tail_mixture", "tail_ratio_check",
    "survival_by_powers", "pendant_path_audit", "PendantPathAudit", "is_cycle",
]


# --- linear solves -----------------------------------------------------------

@dataclass(frozen=True)
class HittingSolve:
    """Solution of (I - P_{A^c}) h = 1: expectations E_x[T_A], zero on A."""

    target: SubsetMask
    expectations: np.ndarray       # length n, zero on the target
    residual: float


def _solve_exit(P: np.ndarray, members) -> np.ndarray:
    """h on `members` solving (I - P_B) h = 1, with one refinement pass."""
    idx = np.asarray(members, dtype=np.intp)
    A = np.eye(len(idx)) - P[np.ix_(idx, idx)]
    b = np.ones(len(idx))
    try:
        lu, piv = scipy.linalg.lu_factor(A)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise SingularSystem(str(exc)) from exc
    h = scipy.linalg.lu_solve((lu, piv), b)
    h = h + scipy.linalg.lu_solve((lu, piv), b - A @ h)
    return h


def _solve_exit_tridiag(P: np.ndarray, members) -> np.ndarray:
    """Banded solve of (I - P_B) h = 1 when members are path-ordered."""
    idx = np.asarray(members, dtype=np.intp)
    k = len(idx)
    A = np.eye(k) - P[np.ix_(idx, idx)]
    ab = np.zeros((3, k))
    ab[1] = np.diag(A)
    if k > 1:
        ab[0, 1:] = np.diag(A, 1)
        ab[2, :-1] = np.diag(A, -1)
    return scipy.linalg.solve_banded((1, 1), ab, np.ones(k))


def expected_hitting(c: Chain, A: SubsetMask) -> HittingSolve:
    """First-step-analysis solve for E_x[T_A] over all starting states."""
    if len(A.members) == 0:
        raise EmptySubset("target set is empty")
    if len(A.members) == c.n:
        h = np.zeros(c.n)
        return HittingSolve(target=A, expectations=h, residual=0.0)
    comp = A.complement(c.n)
    h_b = _solve_exit(c.P, comp)
    h = np.zeros(c.n)
    h[list(comp)] = h_b
    idx = np.asarray(comp, dtype=np.intp)
    res = np.max(np.abs((np.eye(len(idx)) - c.P[np.ix_(idx, idx)]) @ h_b - 1.0))
    return HittingSolve(target=A, expectations=h, residual=float(res))


def stationary_exit(c: Chain, B: SubsetMask) -> float:
    """E_{pi_B}[T_{B^c}]: expected exit time from stationarity conditioned on B."""
    if len(B.members) >= c.n:
        raise EmptySubset("B must be a proper subset")
    h = _solve_exit(c.P, B.members)
    w = c.pi[B.indices]
    return float(np.dot(w / w.sum(), h))


def _exit_value(P, pi, members, tridiag=False) -> float:
    h = (_solve_exit_tridiag if tridiag else _solve_exit)(P, members)
    w = pi[np.asarray(members, dtype=np.intp)]
    return float(np.dot(w / w.sum(), h))


# --- t_H_pi ------------------------------------------------------------------

@dataclass(frozen=True)
class HittingMax:
    """max over A with pi(A) >= 1/2 of E_{pi_{A^c}}[T_A], reported via B = A^c."""

    value: float
    argmax: SubsetMask       # the complement B of the maximizing target
    exact: bool


def is_cycle(c: Chain) -> bool:
    """True when the undirected support is exactly the n-cycle i ~ i+1 mod n."""
    if c.n < 3:
        return False
    sym = (c.P > 0) | (c.P.T > 0)
    np.fill_diagonal(sym, False)
    for i in range(c.n):
        expect = {(i + 1) % c.n, (i - 1) % c.n}
        if set(np.nonzero(sym[i])[0].tolist()) != expect:
            return False
    return True


def _arc_members(start: int, length: int, n: int) -> tuple[int, ...]:
    return tuple((start + k) % n for k in range(length))


def _thpi_arcs(c: Chain) -> HittingMax:
    """Arc enumeration on cycles: O(n^2) banded solves."""
    best, best_mem = -np.inf, None
    for length in range(1, c.n):
        for start in range(c.n):
            mem = _arc_members(start, length, c.n)
            mass = float(c.pi[list(mem)].sum())
            if mass > 0.5 + 1e-12:
                continue
            val = _exit_value(c.P, c.pi, mem, tridiag=True)
            if val > best:
                best, best_mem = val, mem
    return HittingMax(value=best, argmax=make_subset(c, best_mem), exact=True)


def _thpi_enumerate(c: Chain, connected_only: bool,
                    config: Config) -> HittingMax:
    if c.n > config.enum_cap:
        raise EnumerationTooLarge(f"n={c.n} exceeds cap {config.enum_cap}")
    best, best_mem = -np.inf, None
    if connected_only:
        nbr = support_neighbor_masks(c)
        masks, masses = _kernels.connected_masks(nbr, c.pi, 0.5, False)
        pool = zip(masks.tolist(), masses.tolist())
    else:
        pool = []
        for mask in range(1, (1 << c.n) - 1):
            mem = [i for i in range(c.n) if mask >> i & 1]
            mass = float(c.pi[mem].sum())
            if mass <= 0.5 + 1e-12:
                pool.append((mask, mass))
    for mask, _mass in pool:
        mem = tuple(i for i in range(c.n) if mask >> i & 1)
        val = _exit_value(c.P, c.pi, mem)
        if val > best:
            best, best_mem = val, mem
    return HittingMax(value=best, argmax=make_subset(c, best_mem), exact=True)


def _thpi_witness(c: Chain, config: Config) -> HittingMax:
    from .spectral import _witness_candidates
    best, best_mem = -np.inf, None
    for m in _witness_candidates(c, config):
        if m.pi_mass > 0.5 + 1e-12:
            continue
        val = _exit_value(c.P, c.pi, m.members)
        if val > best:
            best, best_mem = val, m.members
    return HittingMax(value=best, argmax=make_subset(c, best_mem), exact=False)


def t_H_pi(c: Chain, method: str = "auto", config: Config = DEFAULT) -> HittingMax:
    """Worst stationary-start expected hitting time of a set of mass >= 1/2.

    Reversible chains enumerate connected complements only (exact: the
    exit time of a disconnected set is a convex combination of its
    components' exit times, so the maximum is attained on a connected
    set).  Non-reversible chains enumerate all subsets up to the cap;
    cycle chains reduce to arcs; `witness` gives a lower bound.
    """
    if method == "auto":
        if c.n <= config.enum_cap:
            method = "connected" if c.reversible else "full"
        elif is_cycle(c):
            method = "arcs"
        else:
            method = "witness"
    if method == "arcs":
        return _thpi_arcs(c)
    if method == "connected":
        return _thpi_enumerate(c, connected_only=True, config=config)
    if method == "full":
        return _thpi_enumerate(c, connected_only=False, config=config)
    if method == "witness":
        return _thpi_witness(c, config)
    raise ValueError(f"unknown method {method!r}")


# --- kappa profile -----------------------------------------------------------

def kappa_profile(c: Chain, deltas=None, *, config: Config = DEFAULT) -> Profile:
    """Profile of inverse stationary-start exit times over connected sets."""
    from .chain import connected_subsets
    entries = []
    for B in connected_subsets(c, max_mass=1.0, config=config):
        val = 1.0 / _exit_value(c.P, c.pi, B.members)
        bm = 0
        for i in B.members:
            bm |= 1 << i
        entries.append((B.pi_mass, val, bm))
    prof = _prefix_min_profile("kappa", entries)
    if deltas is not None:
        from .spectral import _sample_profile
        return _sample_profile(prof, deltas)
    return prof


# --- nested exit maxima ------------------------------------------------------

@dataclass(frozen=True)
class NestedExit:
    """max over connected D inside B of E_{pi_D}[T_{D^c}], plus the
    super-level witness from the constructive proof."""

    value: float
    argmax: SubsetMask
    level_value: float          # exit time of the distinguished level set
    level_set: SubsetMask


def best_nested_exit(c: Chain, B: SubsetMask,
                     config: Config = DEFAULT) -> NestedExit:
    from .levelset import find_L
    mem = list(B.members)
    k = len(mem)
    best, best_sub = -np.inf, None
    if k <= 20:
        sub_nbr = np.zeros(k, dtype=np.uint64)
        subP = c.P[np.ix_(mem, mem)]
        sym = (subP > 0) | (subP.T > 0)
        for a in range(k):
            m = 0
            for b in range(k):
                if a != b and sym[a, b]:
                    m |= 1 << b
            sub_nbr[a] = m
        masks, _ = _kernels.connected_masks(sub_nbr, c.pi[mem], 1.0, True)
        for mask in masks.tolist():
            sub = [mem[i] for i in range(k) if mask >> i & 1]
            val = _exit_value(c.P, c.pi, sub)
            if val > best:
                best, best_sub = val, sub
    else:
        # beyond exact sub-enumeration, scan the super-level family of
        # the quasi-stationary density (the constructive proof's witnesses)
        qs = quasi_stationary(c, B)
        f = qs.alpha / (c.pi[B.indices] / B.pi_mass)
        for level in np.unique(f):
            sub = [mem[i] for i in range(k) if f[i] >= level]
            val = _exit_value(c.P, c.pi, sub)
            if val > best:
                best, best_sub = val, sub
    if c.reversible and B.connected:
        scan = find_L(c, B, config=config)
        lvl_members = scan.level_set.members
        lvl_val = _exit_value(c.P, c.pi, lvl_members)
        lvl_mask = scan.level_set
    else:
        lvl_val, lvl_mask = float("nan"), B
    return NestedExit(value=best, argmax=make_subset(c, best_sub),
                      level_value=lvl_val, level_set=lvl_mask)


# --- spectral mixture of the exit tail ----------------------------------------

@dataclass(frozen=True)
class MixtureTail:
    """Exit-time tail from pi_B as a mixture of geometric rates."""

    mask: SubsetMask
    coefficients: np.ndarray      # c_i^2, sum to 1
    rates: np.ndarray             # eigenvalues of P_B, descending
    lead_weight: float            # 1 / ||alpha / pi_B||^2 in the pi_B norm

    def tail(self, m: int) -> float:
        return float(np.dot(self.coefficients, self.rates ** m))


def tail_mixture(c: Chain, B: SubsetMask) -> MixtureTail:
    if not c.reversible:
        raise NotReversible("mixture decomposition requires reversibility")
    if not B.connected:
        raise ReducibleRestriction("B must be connected")
    idx = B.indices
    w = c.pi[idx] / B.pi_mass
    d = np.sqrt(w)
    sub = c.P[np.ix_(idx, idx)]
    M = (sub * d[:, None]) / d[None, :]
    M = (M + M.T) / 2
    vals, U = np.linalg.eigh(M)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    U = U[:, order]
    F = U / d[:, None]                        # pi_B-orthonormal eigenbasis
    coeffs = (w @ F) ** 2                     # c_i^2 = E_{pi_B}[f_i]^2
    qs = quasi_stationary(c, B)
    dens = qs.alpha / w
    lead = 1.0 / float(np.dot(w, dens * dens))
    return MixtureTail(mask=B, coefficients=coeffs, rates=vals,
                       lead_weight=lead)


def survival_by_powers(c: Chain, B: SubsetMask, ms) -> np.ndarray:
    """Oracle tail P_{pi_B}[T_{B^c} > m] via repeated kernel application."""
    idx = B.indices
    sub = c.P[np.ix_(idx, idx)]
    w = c.pi[idx] / B.pi_mass
    out = []
    v = np.ones(len(idx))
    last = 0
    for m in sorted(int(m) for m in ms):
        for _ in range(m - last):
            v = sub @ v
        last = m
        out.append(float(np.dot(w, v)))
    return np.array(out)


# --- two-sided geometric-tail bound (reversible) -------------------------------

def tail_ratio_check(c: Chain, B: SubsetMask, ts,
                       config: Config = DEFAULT) -> list[VerificationRecord]:
    """Sandwich P_pi[T_{B^c} > t] / beta(B)^t between 1 - t_rel*lambda and 1,
    plus the expectation corollary, one record per side."""
    if not c.reversible:
        raise NotReversible("the two-sided tail bound requires reversibility")
    qs = quasi_stationary(c, B)
    trel = relaxation_time(c)
    lower = 1.0 - trel * qs.lam
    tol = config.verify_tol
    ts = sorted(int(t) for t in ts)
    tails = survival_by_powers(c, B, ts)
    # P_pi[T > t] = pi(B) * P_{pi_B}[T > t]
    records = []
    lab = f"B={B.members}"
    for t, tail in zip(ts, tails):
        ratio = B.pi_mass * tail / qs.beta ** t
        records.append(VerificationRecord(
            id=f"tail_ratio.lower@t={t}", chain=lab, lhs=lower, rhs=ratio,
            tolerance=tol))
        records.append(VerificationRecord(
            id=f"tail_ratio.upper@t={t}", chain=lab, lhs=ratio, rhs=1.0,
            tolerance=tol))
    e_pi = B.pi_mass * stationary_exit(c, B)     # E_pi[T], zero outside B
    e_alpha = 1.0 / qs.lam
    records.append(VerificationRecord(
        id="expected.lower", chain=lab, lhs=e_alpha - trel, rhs=e_pi,
        tolerance=tol))
    records.append(VerificationRecord(
        id="expected.upper", chain=lab, lhs=e_pi, rhs=e_alpha, tolerance=tol))
    return records


# --- pendant-path example audit ------------------------------------------------

@dataclass
class PendantPathAudit:
    lam_path: float
    lam_path_formula: float
    relaxation: float
    rel_over_n23: float
    lam_path_times_r2: float
    max_exit: float
    sample_exits: list[float] = field(default_factory=list)
    lam_B_values: list[float] = field(default_factory=list)
    monotone_ok: bool = True
    decomposition_residual: float = 0.0


def pendant_path_audit(ex: PendantPathExample, delta: float = 0.1,
                         samples: int = 20, seed: int = 0,
                         config: Config = DEFAULT) -> PendantPathAudit:
    """Numerical audit of the pendant-path example.

    Samples sets A in the base graph with delta*n <= |A| <= (1-delta)*n,
    computes stationary-start hitting expectations from the complement,
    the escape rates of the path and of each complement, and the
    relaxation-time scaling.
    """
    c = ex.chain
    n = ex.base_n
    rng = np.random.default_rng(seed)
    qs_path = quasi_stationary(c, ex.path)
    r = ex.path_len
    lam_formula = 1.0 - np.cos(np.pi / (2 * r))
    if c.n <= 512:
        trel = relaxation_time(c)
    else:
        d = np.sqrt(c.pi)
        A = sp.csr_matrix(c.P * d[:, None] / d[None, :])
        A = (A + A.T) / 2
        import scipy.sparse.linalg as spla
        from .spectral import det_start_vector
        w = spla.eigsh(A, k=2, which="LA", return_eigenvectors=False,
                       v0=det_start_vector(c.n))
        trel = 1.0 / (1.0 - float(np.sort(w)[0]))
    # hub hitting expectations are shared across samples
    hub_solve = expected_hitting(c, make_subset(c, [ex.hub]))
    pi_F = c.pi[ex.path.indices] / ex.path.pi_mass
    e_piF_hub = float(np.dot(pi_F, hub_solve.expectations[ex.path.indices]))
    audit = PendantPathAudit(
        lam_path=qs_path.lam, lam_path_formula=float(lam_formula),
        relaxation=trel, rel_over_n23=trel / n ** (2.0 / 3.0),
        lam_path_times_r2=qs_path.lam * r * r, max_exit=0.0)
    lo = int(np.ceil(delta * n))
    hi = int(np.floor((1 - delta) * n))
    worst_decomp = 0.0
    for _ in range(samples):
        size = int(rng.integers(lo, hi + 1))
        A_states = rng.choice(n, size=size, replace=False)
        A_mask = make_subset(c, A_states)
        B_members = A_mask.complement(c.n)
        solve = expected_hitting(c, A_mask)
        wB = c.pi[list(B_members)]
        exit_B = float(np.dot(wB / wB.sum(),
                              solve.expectations[list(B_members)]))
        audit.sample_exits.append(exit_B)
        lamB = set_escape_rate(c, B_members)
        audit.lam_B_values.append(lamB)
        if lamB > qs_path.lam + config.eigen_tol:
            audit.monotone_ok = False
        # hitting from the path decomposes through the hub
        e_piF_A = float(np.dot(pi_F, solve.expectations[ex.path.indices]))
        e_hub_A = float(solve.expectations[ex.hub])
        worst_decomp = max(worst_decomp,
                           abs(e_piF_A - (e_piF_hub + e_hub_A)))
    audit.max_exit = max(audit.sample_exits)
    audit.decomposition_residual = worst_decomp
    return audit
