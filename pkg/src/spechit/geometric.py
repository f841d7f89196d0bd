"""Geometric time-averaged kernels and the non-reversible machinery.

The geometric average of P at parameter t is the law of the chain at an
independent Geometric(1/t) number of steps; it equals a resolvent of P
and is the identity at t = 1.  Everything here is built on the operator
norm of Q - Pi in the stationary L2 space, which equals the square root
of the second eigenvalue of the multiplicative reversibilization Q*Q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .chain import Chain, SubsetMask
from .config import DEFAULT, Config
from .constants import B_HALF, GEOM_LOWER
from .errors import BadParameter, NoUpperBracket, StationarityMismatch
from .records import VerificationRecord

__all__ = [
    "GeometricKernel", "OperatorNormResult", "PseudoGap",
    "geometric_average", "multiplicative_reversibilization",
    "operator_norm_minus_pi", "rel_geom", "pseudo_gap",
    "geom_identity_check", "restricted_norm_checks", "theorem3_check",
]


@dataclass(frozen=True)
class GeometricKernel:
    t: float
    matrix: np.ndarray
    method: str                    # "resolvent" or "series"

    def __post_init__(self):
        self.matrix.setflags(write=False)


def geometric_average(c: Chain, t: float, method: str = "resolvent") -> GeometricKernel:
    """Resolvent form (1/t)(I - (1 - 1/t)P)^{-1}; the identity at t = 1.

    The series form truncates the geometric mixture at relative tail
    1e-14 and exists as a cross-checking oracle only.
    """
    if t < 1:
        raise BadParameter(f"averaging parameter must be >= 1, got {t}")
    n = c.n
    if method == "resolvent":
        gamma = 1.0 - 1.0 / t
        M = scipy.linalg.solve(np.eye(n) - gamma * c.P, np.eye(n) / t)
    elif method == "series":
        gamma = 1.0 - 1.0 / t
        M = np.eye(n) / t
        term = np.eye(n) / t
        weight_left = gamma
        while weight_left > 1e-14:
            term = gamma * (term @ c.P)
            M = M + term
            weight_left *= gamma
            if gamma == 0.0:
                break
        M = M / M.sum(axis=1, keepdims=True)
    else:
        raise BadParameter(f"unknown method {method!r}")
    M = np.clip(M, 0.0, None)
    M = M / M.sum(axis=1, keepdims=True)
    return GeometricKernel(t=float(t), matrix=M, method=method)


def _check_stationary(c: Chain, Q: np.ndarray, tol: float) -> None:
    if np.max(np.abs(c.pi @ Q - c.pi)) > tol:
        raise StationarityMismatch("pi is not stationary for the kernel")


def adjoint_kernel(c: Chain, Q: np.ndarray) -> np.ndarray:
    """pi-adjoint Q*(x, y) = pi(y) Q(y, x) / pi(x)."""
    return (Q.T * c.pi[None, :]) / c.pi[:, None]


def multiplicative_reversibilization(c: Chain, Q: np.ndarray,
                                     config: Config = DEFAULT) -> np.ndarray:
    """S_Q = Q* Q: reversible w.r.t. pi, PSD in the stationary L2 space."""
    _check_stationary(c, Q, 1e-8)
    return adjoint_kernel(c, Q) @ Q


@dataclass(frozen=True)
class OperatorNormResult:
    value: float                   # ||Q - Pi|| in L2(pi)
    beta2_of_SQ: float             # second eigenvalue of Q*Q
    witness: np.ndarray | None     # maximizing f in the mean-zero space


def operator_norm_minus_pi(c: Chain, Q: np.ndarray,
                           config: Config = DEFAULT) -> OperatorNormResult:
    """||Q - Pi|| = sqrt(beta_2(Q*Q)) via a symmetric eigensolve."""
    _check_stationary(c, Q, 1e-8)
    S = multiplicative_reversibilization(c, Q, config)
    d = np.sqrt(c.pi)
    M = (S * d[:, None]) / d[None, :]
    M = (M + M.T) / 2
    w, U = np.linalg.eigh(M)
    beta2 = float(w[-2])
    beta2 = min(max(beta2, 0.0), 1.0)
    f = U[:, -2] / d
    return OperatorNormResult(value=float(np.sqrt(beta2)), beta2_of_SQ=beta2,
                              witness=f)


def rel_geom(c: Chain, delta: float, config: Config = DEFAULT) -> float:
    """Smallest t >= 1 with ||P^{G(t)} - Pi|| <= delta.

    Bisection on t; valid because the norm is continuous and
    non-increasing in t (checked on the evaluated points).
    """
    if not (0 < delta < 1):
        raise BadParameter("delta must lie in (0, 1)")

    evals: list[tuple[float, float]] = []

    def norm_at(t: float) -> float:
        v = operator_norm_minus_pi(c, geometric_average(c, t).matrix).value
        evals.append((t, v))
        return v

    if norm_at(1.0) <= delta:
        return 1.0
    lo, hi = 1.0, 2.0
    while norm_at(hi) > delta:
        lo = hi
        hi *= 2
        if hi > 1e9:
            raise NoUpperBracket("norm did not drop below delta by t = 1e9")
    while hi - lo > config.bisect_rtol * hi:
        mid = (lo + hi) / 2
        if norm_at(mid) <= delta:
            hi = mid
        else:
            lo = mid
    evals.sort()
    for (t1, v1), (t2, v2) in zip(evals, evals[1:]):
        if v2 > v1 + 1e-9:
            raise AssertionError(
                f"norm increased along t: ({t1},{v1}) -> ({t2},{v2})")
    return hi


@dataclass(frozen=True)
class PseudoGap:
    gamma: float                   # max over k of (1 - beta2(S_{P^k})) / k
    argmax_k: int
    t_rel_ps: int                  # first k with beta2(S_{P^k}) <= 1/e^2; -1 if unreached
    truncated: bool                # argmax hit the scan limit
    beta2_by_k: np.ndarray


def pseudo_gap(c: Chain, kmax: int | None = None,
               config: Config = DEFAULT) -> PseudoGap:
    """Exact maximum of (1 - beta2(S_{P^k})) / k over the scanned range.

    The scan runs to 4x the first k whose reversibilization drops below
    1/e^2 (capped at 1e5) unless kmax is given explicitly.
    """
    if kmax is not None and kmax < 1:
        raise BadParameter("kmax must be >= 1")
    d = np.sqrt(c.pi)
    A = (c.P * d[:, None]) / d[None, :]
    q = d
    target = np.exp(-2.0)
    betas = []
    first_hit = None
    limit = kmax if kmax is not None else 100_000
    # normal matrices (all reversible chains and all circulant kernels)
    # admit a closed form: the singular values of A^k - qq^T are the
    # k-th powers of the eigenvalue moduli below the stochastic one
    comm = A @ A.T - A.T @ A
    if float(np.abs(comm).max()) <= 1e-12:
        mods = np.sort(np.abs(np.linalg.eigvals(A)))[::-1]
        r = float(mods[1])
        k = 0
        while True:
            k += 1
            beta2 = min(max(r ** (2 * k), 0.0), 1.0)
            betas.append(beta2)
            if first_hit is None and beta2 <= target:
                first_hit = k
                if kmax is None:
                    limit = min(4 * first_hit, 100_000)
            if k >= limit:
                break
    else:
        Mk = np.eye(c.n)
        k = 0
        while True:
            k += 1
            Mk = Mk @ A
            sv = scipy.linalg.svdvals(Mk - np.outer(q, q))
            beta2 = min(max(float(sv[0]) ** 2, 0.0), 1.0)
            betas.append(beta2)
            if first_hit is None and beta2 <= target:
                first_hit = k
                if kmax is None:
                    limit = min(4 * first_hit, 100_000)
            if k >= limit:
                break
    betas = np.array(betas)
    ratios = (1.0 - betas) / np.arange(1, len(betas) + 1)
    argmax = int(np.argmax(ratios)) + 1
    return PseudoGap(gamma=float(ratios.max()), argmax_k=argmax,
                     t_rel_ps=-1 if first_hit is None else int(first_hit),
                     truncated=bool(argmax == len(betas)),
                     beta2_by_k=betas)


def geom_identity_check(c: Chain, m: float, k: float,
                        config: Config = DEFAULT) -> list[VerificationRecord]:
    """Renewal identity of geometric averages and the induced norm bound.

    Splitting the geometric lag at an independent Bernoulli(1/k) renewal
    gives eta_{mk} = eta_m + Z(1 + eta'_{mk}) in distribution, hence
    P^{G(mk)} = (1/k) Q + ((k-1)/k) P^{G(mk)} Q P with Q = P^{G(m)}
    (the unit step rides along with each renewal), and in consequence
    ||P^{G(mk)} - Pi|| <= ||Q - Pi|| / (k - (k-1)||Q - Pi||).
    """
    if m < 1 or k < 1:
        raise BadParameter("need m >= 1 and k >= 1")
    Q = geometric_average(c, m).matrix
    G = geometric_average(c, m * k).matrix
    resid = G - (Q / k + (k - 1) / k * (G @ Q @ c.P))
    fro = float(np.sqrt((resid * resid).sum()))
    lab = f"m={m},k={k}"
    recs = [VerificationRecord(id="geom_identity.residual", chain=lab,
                               lhs=fro, rhs=0.0, tolerance=1e-10)]
    nq = operator_norm_minus_pi(c, Q).value
    ng = operator_norm_minus_pi(c, G).value
    bound = nq / (k - (k - 1) * nq)
    recs.append(VerificationRecord(id="geom_identity.norm_bound", chain=lab,
                                   lhs=ng, rhs=bound, tolerance=1e-9))
    return recs


def _restricted_norm(c: Chain, Q: np.ndarray, members) -> float:
    """||Q_B|| in L2(pi): largest singular value of the killed kernel."""
    idx = np.asarray(sorted(members), dtype=np.intp)
    d = np.sqrt(c.pi[idx])
    M = (Q[np.ix_(idx, idx)] * d[:, None]) / d[None, :]
    sv = scipy.linalg.svdvals(M)
    return float(sv[0])


def restricted_norm_checks(c: Chain, B: SubsetMask, t: float,
                           config: Config = DEFAULT) -> list[VerificationRecord]:
    """Norm comparisons for the killed geometric kernel Q = P^{G(t)}:
    ||Q_B||^2 <= ||(Q*Q)_B||, and the escape-rate chain
    1 - ||(Q*Q)_B|| >= Lambda_{Q*Q}(pi(B)) >= pi(B^c)(1 - ||Q*Q - Pi||)."""
    from .chain import build_chain
    from .spectral import spectral_profile
    Q = geometric_average(c, t).matrix
    S = multiplicative_reversibilization(c, Q)
    lab = f"B={B.members},t={t}"
    nQB = _restricted_norm(c, Q, B.members)
    nSB = _restricted_norm(c, S, B.members)
    recs = [VerificationRecord(id="restricted.submult", chain=lab,
                               lhs=nQB ** 2, rhs=nSB, tolerance=1e-9)]
    s_chain = build_chain(S, config=config)
    prof = spectral_profile(s_chain, config=config)
    lam_prof = prof.value_at(B.pi_mass)
    recs.append(VerificationRecord(id="restricted.profile_upper", chain=lab,
                                   lhs=lam_prof, rhs=1.0 - nSB,
                                   tolerance=1e-9))
    norm_S = operator_norm_minus_pi(c, S).value
    recs.append(VerificationRecord(id="restricted.profile_lower", chain=lab,
                                   lhs=(1.0 - B.pi_mass) * (1.0 - norm_S),
                                   rhs=lam_prof, tolerance=1e-9))
    return recs


def theorem3_check(c: Chain, config: Config = DEFAULT) -> list[VerificationRecord]:
    """Two-sided comparison of t_H_pi with the 1/e time-averaged relaxation.

    Upper bound in the sharp form (s-1)/(1 - sqrt(b)); lower bound with
    the derived constant from constants.py, plus the observed ratio.
    """
    from .hitting import t_H_pi
    s = rel_geom(c, 1.0 / np.e, config=config)
    hit = t_H_pi(c, config=config)
    lab = f"n={c.n}"
    upper = (s - 1.0) / (1.0 - np.sqrt(B_HALF))
    tol = 10 * config.bisect_rtol * s + 1e-9
    return [
        VerificationRecord(id="geom_hitting.upper", chain=lab, lhs=hit.value,
                           rhs=upper, tolerance=tol,
                           extra={"rel_geom": s, "ratio": hit.value / s}),
        VerificationRecord(id="geom_hitting.lower", chain=lab,
                           lhs=GEOM_LOWER * s, rhs=hit.value, tolerance=tol,
                           extra={"rel_geom": s, "ratio": hit.value / s}),
    ]
