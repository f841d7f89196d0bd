"""Deterministic, seedable constructors for the chain families under test.

Every generator returns a fully validated :class:`~spechit.chain.Chain`;
identical (family, params, seed) always yields an entrywise-identical
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components as _cc

from .chain import Chain, SubsetMask, build_chain, make_subset
from .errors import (BadParameter, ConstructionFailed, Disconnected,
                     NotAPartition, TooSmall, ZeroRate)

__all__ = [
    "FamilySpec", "two_state", "birth_death", "random_birth_death",
    "lazy_path", "biased_cycle", "complete", "lazy_rw_graph",
    "random_connected_graph", "pendant_path_example", "PendantPathExample", "from_spec",
    "FAMILIES",
]


@dataclass(frozen=True)
class FamilySpec:
    """A reproducible chain recipe: family name, numeric params, seed."""

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def describe(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.family}({inner};seed={self.seed})"


def two_state(p: float, q: float) -> Chain:
    """States {0,1} with P(0,1)=p and P(1,0)=q; pi = (q, p)/(p+q)."""
    if not (0 < p <= 1 and 0 < q <= 1):
        raise BadParameter(f"need p, q in (0, 1], got p={p}, q={q}")
    P = np.array([[1 - p, p], [q, 1 - q]])
    return build_chain(P)


def birth_death(up, down, hold) -> Chain:
    """Tridiagonal chain from per-state up/down/hold probabilities."""
    up = np.asarray(up, dtype=float)
    down = np.asarray(down, dtype=float)
    hold = np.asarray(hold, dtype=float)
    n = len(up)
    if len(down) != n or len(hold) != n:
        raise NotAPartition("up/down/hold must have equal lengths")
    if np.max(np.abs(up + down + hold - 1.0)) > 1e-12:
        raise NotAPartition("up + down + hold must equal 1 per state")
    if down[0] != 0 or up[-1] != 0:
        raise NotAPartition("down[0] and up[-1] must be 0")
    if np.any(up[:-1] <= 0) or np.any(down[1:] <= 0):
        raise ZeroRate("interior up/down rates must be positive")
    P = np.diag(hold)
    for i in range(n - 1):
        P[i, i + 1] = up[i]
        P[i + 1, i] = down[i + 1]
    return build_chain(P)


def random_birth_death(n: int, seed: int, min_hold: float = 0.05) -> Chain:
    """Seeded random birth-death chain with rates bounded away from zero."""
    if n < 2:
        raise TooSmall("need n >= 2")
    rng = np.random.default_rng(seed)
    up = np.zeros(n)
    down = np.zeros(n)
    up[:-1] = rng.uniform(0.05, 0.9, size=n - 1)
    down[1:] = rng.uniform(0.05, 0.9, size=n - 1)
    scale = np.maximum(up + down, 1e-9) / (1.0 - min_hold)
    scale = np.maximum(scale, 1.0)
    up /= scale
    down /= scale
    hold = 1.0 - up - down
    return birth_death(up, down, hold)


def lazy_path(n: int) -> Chain:
    """Half-lazy nearest-neighbor walk on a path of n vertices."""
    adj = np.zeros((n, n))
    for i in range(n - 1):
        adj[i, i + 1] = adj[i + 1, i] = 1
    return lazy_rw_graph(adj, 0.5)


def biased_cycle(n: int) -> Chain:
    """Non-reversible walk on the n-cycle: clockwise 1/3, counter 1/6, hold 1/2."""
    if n < 3:
        raise TooSmall(f"cycle needs n >= 3, got {n}")
    P = np.zeros((n, n))
    for i in range(n):
        P[i, i] = 0.5
        P[i, (i + 1) % n] = 1.0 / 3.0
        P[i, (i - 1) % n] = 1.0 / 6.0
    return build_chain(P)


def complete(n: int) -> Chain:
    """Uniform jump chain on n states (rows all equal 1/n)."""
    if n < 2:
        raise TooSmall("need n >= 2")
    P = np.full((n, n), 1.0 / n)
    return build_chain(P)


def lazy_rw_graph(adjacency, laziness: float) -> Chain:
    """Random walk on a weighted graph with an added holding probability.

    P(x, y) = (1 - laziness) * w(x, y) / deg(x) off the diagonal, plus
    laziness on it (so every diagonal entry is at least `laziness`).
    """
    A = np.asarray(adjacency, dtype=float)
    if np.any(A < 0) or np.max(np.abs(A - A.T)) > 0:
        raise BadParameter("adjacency must be symmetric and nonnegative")
    if not (0 <= laziness < 1):
        raise BadParameter(f"laziness must lie in [0, 1), got {laziness}")
    ncomp, _ = _cc(sp.csr_matrix(A > 0), directed=False)
    if ncomp != 1:
        raise Disconnected(f"{ncomp} graph components")
    deg = A.sum(axis=1)
    if np.any(deg == 0):
        raise Disconnected("isolated vertex")
    P = (1 - laziness) * A / deg[:, None]
    P[np.diag_indices_from(P)] += laziness
    return build_chain(P)


def random_connected_graph(n: int, seed: int, extra_edges: int | None = None) -> np.ndarray:
    """Seeded random connected graph: a random tree plus extra edges."""
    if n < 2:
        raise TooSmall("need n >= 2")
    rng = np.random.default_rng(seed)
    A = np.zeros((n, n))
    order = rng.permutation(n)
    for k in range(1, n):
        j = order[k]
        i = order[rng.integers(0, k)]
        A[i, j] = A[j, i] = 1
    if extra_edges is None:
        extra_edges = max(1, n // 3)
    for _ in range(extra_edges):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            A[i, j] = A[j, i] = 1
    return A


# --- pendant-path construction --------------------------------------------

@dataclass(frozen=True)
class PendantPathExample:
    """Cubic-like base graph with a pendant path glued at a hub vertex."""

    chain: Chain
    hub: int
    path: SubsetMask       # the pendant path F, hub excluded
    base_n: int            # vertices of the base graph
    path_len: int          # r = ceil(base_n ** (1/3))
    base_relaxation: float


def _random_regular_adjacency(n: int, d: int, rng) -> np.ndarray | None:
    """One pairing-model draw of a simple d-regular graph, or None."""
    stubs = np.repeat(np.arange(n), d)
    rng.shuffle(stubs)
    A = np.zeros((n, n))
    ok = True
    for k in range(0, len(stubs), 2):
        i, j = int(stubs[k]), int(stubs[k + 1])
        if i == j or A[i, j]:
            ok = False
            break
        A[i, j] = A[j, i] = 1
    return A if ok else None


def _srw_relaxation(A: np.ndarray, loops: np.ndarray) -> float:
    """Relaxation time of the walk on weights A plus per-vertex loop weights."""
    deg = A.sum(axis=1) + loops
    d = np.sqrt(deg)
    W = A + np.diag(loops)
    n = A.shape[0]
    M = sp.csr_matrix(W / np.outer(d, d))
    if n <= 400:
        w = np.linalg.eigvalsh(M.toarray())
        beta2 = w[-2]
    else:
        from .spectral import det_start_vector
        w = spla.eigsh(M, k=2, which="LA", return_eigenvectors=False,
                       v0=det_start_vector(n))
        beta2 = np.sort(w)[0]
    return 1.0 / (1.0 - float(beta2))


def pendant_path_example(n: int, seed: int, trel_cap: float = 25.0,
                   max_rounds: int = 100) -> PendantPathExample:
    """Walk on a near-3-regular graph with a slow pendant path of length
    ceil(n**(1/3)) attached at a hub.

    The base graph is a seeded simple 3-regular graph (pairing model,
    resampled until simple and connected and until its walk relaxes
    within trel_cap) with a loop at the hub; the returned chain deletes
    that loop and glues the path in its place, so every base vertex
    keeps its degree.
    """
    if n < 8:
        raise TooSmall("need n >= 8 so the pendant path has length >= 2")
    if n % 2 != 0:
        raise BadParameter("3-regular base graph needs even n")
    rng = np.random.default_rng(seed)
    r = int(np.ceil(n ** (1.0 / 3.0)))
    # ceil can land below the true cube root by a hair; fix up
    while r ** 3 < n:
        r += 1
    while (r - 1) ** 3 >= n:
        r -= 1
    hub = 0
    for _ in range(max_rounds):
        A = _random_regular_adjacency(n, 3, rng)
        if A is None:
            continue
        ncomp, _ = _cc(sp.csr_matrix(A > 0), directed=False)
        if ncomp != 1:
            continue
        loops = np.zeros(n)
        loops[hub] = 1.0
        trel = _srw_relaxation(A, loops)
        if trel <= trel_cap:
            break
    else:
        raise ConstructionFailed(
            f"no acceptable base graph in {max_rounds} rounds")
    N = n + r
    full = np.zeros((N, N))
    full[:n, :n] = A
    # pendant path: hub - n - n+1 - ... - n+r-1
    full[hub, n] = full[n, hub] = 1
    for k in range(r - 1):
        full[n + k, n + k + 1] = full[n + k + 1, n + k] = 1
    chain = lazy_rw_graph(full, 0.0)
    path = make_subset(chain, range(n, N))
    return PendantPathExample(chain=chain, hub=hub, path=path, base_n=n,
                         path_len=r, base_relaxation=trel)


# --- family registry --------------------------------------------------------

def from_spec(spec: FamilySpec) -> Chain:
    """Instantiate a chain from a FamilySpec (used by the CLI and harness)."""
    fam = spec.family
    p = spec.params
    if fam == "two_state":
        return two_state(p["p"], p["q"])
    if fam == "birth_death":
        if "n" in p:
            return random_birth_death(int(p["n"]), spec.seed)
        return birth_death(p["up"], p["down"], p["hold"])
    if fam == "lazy_path":
        return lazy_path(int(p["n"]))
    if fam == "biased_cycle":
        return biased_cycle(int(p["n"]))
    if fam == "complete":
        return complete(int(p["n"]))
    if fam == "lazy_rw_graph":
        adj = p.get("adjacency")
        if adj is None:
            adj = random_connected_graph(int(p["n"]), spec.seed)
        return lazy_rw_graph(adj, float(p.get("laziness", 0.5)))
    if fam == "pendant_path":
        return pendant_path_example(int(p["n"]), spec.seed).chain
    raise BadParameter(f"unknown family {fam!r}")


FAMILIES = ("two_state", "birth_death", "lazy_path", "biased_cycle",
            "complete", "lazy_rw_graph", "pendant_path")
