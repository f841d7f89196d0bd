"""Finite Markov chains and the primitive kernel algebra.

A :class:`Chain` is an immutable row-stochastic matrix with its
stationary distribution and a detailed-balance flag.  The operations
here are the building blocks everything else uses: time reversal,
restriction to a subset (killed kernel), conditioning, connectivity
enumeration, and continuous-time transition matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from . import _kernels
from .config import DEFAULT, Config
from .errors import (DimensionTooSmall, EmptySubset, EnumerationTooLarge,
                     FullSubset, InvalidChainFile, NegativeTime,
                     NotIrreducible, NotStochastic)

__all__ = [
    "Chain", "SubsetMask", "SubstochasticKernel",
    "build_chain", "time_reversal", "restrict", "conditioned_distribution",
    "connected_subsets", "continuize", "make_subset", "load_chain",
    "save_chain", "support_neighbor_masks", "is_connected_members",
]


@dataclass(frozen=True)
class Chain:
    """Irreducible row-stochastic matrix with cached stationary law."""

    P: np.ndarray
    pi: np.ndarray
    reversible: bool
    labels: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def __post_init__(self):
        self.P.setflags(write=False)
        self.pi.setflags(write=False)


@dataclass(frozen=True)
class SubsetMask:
    """Index set B with its stationary mass and support-graph connectivity."""

    members: tuple[int, ...]
    pi_mass: float
    connected: bool

    @property
    def bitmask(self) -> int:
        m = 0
        for i in self.members:
            m |= 1 << i
        return m

    @property
    def indices(self) -> np.ndarray:
        return np.array(self.members, dtype=np.intp)

    def complement(self, n: int) -> tuple[int, ...]:
        inside = set(self.members)
        return tuple(i for i in range(n) if i not in inside)


@dataclass(frozen=True)
class SubstochasticKernel:
    """Restriction P_B: rows/columns of P outside B deleted."""

    base: Chain = field(repr=False)
    mask: SubsetMask
    entries: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)


def _stationary(P: np.ndarray) -> np.ndarray:
    """Solve pi P = pi, sum(pi) = 1 by dense LU with a normalization row."""
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = scipy.linalg.solve(A, b)
    # one step of iterative refinement keeps the residual near eps
    r = b - (P.T - np.eye(n)) @ pi
    r[-1] = 1.0 - pi.sum()
    A2 = P.T - np.eye(n)
    A2[-1, :] = 1.0
    pi = pi + scipy.linalg.solve(A2, r)
    return pi


def _is_reversible(P: np.ndarray, pi: np.ndarray, tol: float) -> bool:
    F = pi[:, None] * P
    return bool(np.max(np.abs(F - F.T)) <= tol)


def build_chain(P, tolerance: float | None = None, labels=None,
                config: Config = DEFAULT) -> Chain:
    """Validate P, solve for the stationary law, and tag reversibility.

    Raises NotStochastic on row-sum or sign violations, NotIrreducible if
    the directed support graph is not strongly connected, and
    DimensionTooSmall for n < 2.
    """
    tol = config.row_sum_tol if tolerance is None else tolerance
    P = np.array(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise NotStochastic(f"expected a square matrix, got shape {P.shape}")
    n = P.shape[0]
    if n < 2:
        raise DimensionTooSmall(f"need at least 2 states, got {n}")
    if np.any(P < -tol) or np.any(P > 1 + tol):
        raise NotStochastic("entries outside [0, 1]")
    rows = P.sum(axis=1)
    bad = np.abs(rows - 1.0).max()
    if bad > tol:
        raise NotStochastic(f"row sums deviate from 1 by {bad:.3e}")
    P = np.clip(P, 0.0, None)
    P /= P.sum(axis=1, keepdims=True)
    ncomp, _ = _cc(csr_matrix(P > 0), directed=True, connection="strong")
    if ncomp != 1:
        raise NotIrreducible(f"{ncomp} communicating classes")
    pi = _stationary(P)
    if np.any(pi <= 0):
        raise NotIrreducible("stationary vector not strictly positive")
    rev = _is_reversible(P, pi, config.verify_tol)
    lab = tuple(labels) if labels is not None else None
    return Chain(P=P, pi=pi, reversible=rev, labels=lab)


def time_reversal(c: Chain) -> Chain:
    """Adjoint kernel P*(x, y) = pi(y) P(y, x) / pi(x); same stationary law."""
    Pstar = (c.P.T * c.pi[None, :]) / c.pi[:, None]
    Pstar = Pstar / Pstar.sum(axis=1, keepdims=True)
    return Chain(P=Pstar, pi=c.pi.copy(), reversible=c.reversible,
                 labels=c.labels)


def make_subset(c: Chain, members) -> SubsetMask:
    """Build a SubsetMask for the given state indices (order irrelevant)."""
    mem = tuple(sorted(set(int(i) for i in members)))
    if not mem:
        raise EmptySubset("subset has no members")
    if mem[0] < 0 or mem[-1] >= c.n:
        raise EmptySubset(f"indices out of range for n={c.n}")
    mass = float(c.pi[list(mem)].sum())
    return SubsetMask(members=mem, pi_mass=mass,
                      connected=is_connected_members(c, mem))


def subset_from_bitmask(c: Chain, bitmask: int) -> SubsetMask:
    return make_subset(c, [i for i in range(c.n) if bitmask >> i & 1])


def restrict(c: Chain, B: SubsetMask) -> SubstochasticKernel:
    """Killed kernel on B: entries copied from P, rows may sum below 1."""
    if len(B.members) == 0:
        raise EmptySubset("cannot restrict to the empty set")
    if len(B.members) == c.n:
        raise FullSubset("restriction to all of V is the chain itself")
    idx = B.indices
    entries = c.P[np.ix_(idx, idx)].copy()
    return SubstochasticKernel(base=c, mask=B, entries=entries)


def conditioned_distribution(c: Chain, B: SubsetMask) -> np.ndarray:
    """pi conditioned on B, as a length-n vector supported on B."""
    if len(B.members) == 0:
        raise EmptySubset("cannot condition on the empty set")
    out = np.zeros(c.n)
    idx = B.indices
    out[idx] = c.pi[idx] / B.pi_mass
    return out


def support_neighbor_masks(c: Chain) -> np.ndarray:
    """Undirected support graph as per-state neighbor bitmasks (n <= 64)."""
    sym = (c.P > 0) | (c.P.T > 0)
    np.fill_diagonal(sym, False)
    masks = np.zeros(c.n, dtype=np.uint64)
    for i in range(c.n):
        m = 0
        for j in np.nonzero(sym[i])[0]:
            m |= 1 << int(j)
        masks[i] = m
    return masks


def is_connected_members(c: Chain, members) -> bool:
    """Connectivity of the undirected support graph restricted to members."""
    mem = list(members)
    if len(mem) <= 1:
        return True
    sub = c.P[np.ix_(mem, mem)]
    sym = (sub > 0) | (sub.T > 0)
    ncomp, _ = _cc(csr_matrix(sym), directed=False)
    return bool(ncomp == 1)


def connected_subsets(c: Chain, max_mass: float = 1.0, *,
                      include_full: bool = False,
                      config: Config = DEFAULT):
    """Yield every support-connected subset with 0 < pi(B) <= max_mass.

    Deterministic ascending-bitmask order.  Proper subsets only unless
    include_full.  Refuses n above the enumeration cap.
    """
    if c.n > config.enum_cap:
        raise EnumerationTooLarge(
            f"n={c.n} exceeds enumeration cap {config.enum_cap}")
    nbr = support_neighbor_masks(c)
    masks, masses = _kernels.connected_masks(nbr, c.pi, float(max_mass),
                                             bool(include_full))
    for mask, mass in zip(masks.tolist(), masses.tolist()):
        members = tuple(i for i in range(c.n) if mask >> i & 1)
        yield SubsetMask(members=members, pi_mass=mass, connected=True)


def continuize(c: Chain, rate: float, t: float) -> np.ndarray:
    """Heat kernel exp(t * rate * (P - I)), row-stochastic.

    Spectral form for reversible chains; scaling-and-squaring otherwise.
    """
    if rate <= 0:
        raise NegativeTime(f"rate must be positive, got {rate}")
    if t < 0:
        raise NegativeTime(f"time must be nonnegative, got {t}")
    if t == 0:
        return np.eye(c.n)
    s = t * rate
    if c.reversible:
        d = np.sqrt(c.pi)
        A = (c.P * d[:, None]) / d[None, :]
        A = (A + A.T) / 2
        w, U = np.linalg.eigh(A)
        M = (U * np.exp(s * (w - 1.0))[None, :]) @ U.T
        out = (M / d[:, None]) * d[None, :]
    else:
        out = scipy.linalg.expm(s * (c.P - np.eye(c.n)))
    out = np.clip(out, 0.0, None)
    return out / out.sum(axis=1, keepdims=True)


# --- chain JSON files -------------------------------------------------------

def save_chain(c: Chain, path) -> None:
    doc = {"n": c.n, "P": c.P.tolist()}
    if c.labels is not None:
        doc["labels"] = list(c.labels)
    doc["pi"] = c.pi.tolist()
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_chain(path, config: Config = DEFAULT) -> Chain:
    """Load and re-validate a chain file; a supplied pi is cross-checked."""
    with open(path) as fh:
        doc = json.load(fh)
    if "P" not in doc:
        raise InvalidChainFile("missing transition matrix field 'P'")
    P = np.array(doc["P"], dtype=np.float64)
    if "n" in doc and int(doc["n"]) != P.shape[0]:
        raise InvalidChainFile(
            f"declared n={doc['n']} but P is {P.shape[0]}x{P.shape[1]}")
    chain = build_chain(P, labels=doc.get("labels"), config=config)
    if "pi" in doc:
        supplied = np.asarray(doc["pi"], dtype=np.float64)
        if supplied.shape != chain.pi.shape or \
                np.max(np.abs(supplied - chain.pi)) > 1e-8:
            raise InvalidChainFile("supplied pi disagrees with the solved "
                                   "stationary distribution")
    return chain
