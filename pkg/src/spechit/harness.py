"""Verification harness: runs the inequality suites over chain families.

Each suite evaluates a deterministic roster of chains and emits one
record per inequality instance (aggregated over subsets where the count
would explode, with the worst offender as witness).  Failures never
abort a suite; the full report is always produced.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import birthdeath, geometric, hitting, levelset, montecarlo, spectral
from .chain import Chain, connected_subsets, make_subset
from .config import DEFAULT, Config, load_calibrated_bands, with_enum_cap
from .constants import NESTED_EXIT_FLOOR
from .errors import ConfigInvalid, IOFailure
from .generators import (biased_cycle, pendant_path_example, lazy_path,
                         lazy_rw_graph, random_birth_death,
                         random_connected_graph, two_state)
from .records import SuiteReport, VerificationRecord

__all__ = ["run_suite", "report_emit", "parse_report", "SUITES", "SuiteReport"]

SCHEMA_VERSION = 1


# --- rosters -----------------------------------------------------------------

def _roster_reversible(n_two_state=20, n_bd=50, n_graph=20, nmax=12):
    """The reversible families: seeded two-state, birth-death, lazy graph walks."""
    chains = []
    for s in range(n_two_state):
        rng = np.random.default_rng(1000 + s)
        p, q = rng.uniform(0.05, 1.0, size=2)
        chains.append((f"two_state[{s}]", two_state(float(p), float(q))))
    for s in range(n_bd):
        n = 3 + s % min(10, nmax - 2)
        chains.append((f"birth_death[{s},n={n}]", random_birth_death(n, 2000 + s)))
    for s in range(n_graph):
        n = 4 + s % (nmax - 3)
        adj = random_connected_graph(n, 3000 + s)
        chains.append((f"lazy_rw_graph[{s},n={n}]", lazy_rw_graph(adj, 0.5)))
    return chains


def _roster_small(nmax=10):
    """Compact reversible roster for the subset-exhaustive suites."""
    chains = [
        ("lazy_path(3)", lazy_path(3)),
        ("lazy_path(5)", lazy_path(5)),
        ("two_state(0.3,0.6)", two_state(0.3, 0.6)),
    ]
    for s, n in ((0, 6), (1, 8)):
        chains.append((f"birth_death[{s},n={n}]", random_birth_death(n, 4000 + s)))
    for s, n in ((0, 6), (1, 8), (2, min(nmax, 10))):
        adj = random_connected_graph(n, 5000 + s)
        chains.append((f"lazy_rw_graph[{s},n={n}]", lazy_rw_graph(adj, 0.5)))
    return chains


def _roster_profiles():
    # reversible chains: the kappa and isoperimetric sandwiches compare
    # Dirichlet-form quantities with Perron escape rates and hold under
    # detailed balance only
    chains = [
        ("lazy_path(3)", lazy_path(3)),
        ("lazy_path(6)", lazy_path(6)),
        ("two_state(0.2,0.5)", two_state(0.2, 0.5)),
        ("birth_death[n=7]", random_birth_death(7, 6000)),
        ("birth_death[n=10]", random_birth_death(10, 6001)),
        ("lazy_rw_graph[n=8]", lazy_rw_graph(random_connected_graph(8, 6100), 0.5)),
        ("lazy_rw_graph[n=12]", lazy_rw_graph(random_connected_graph(12, 6101), 0.5)),
    ]
    return chains


# --- per-chain caches --------------------------------------------------------

def _connected_stats(c: Chain, config: Config):
    """(members, mass, lambda, exit) for every proper connected subset."""
    out = []
    for B in connected_subsets(c, max_mass=1.0, config=config):
        qs = spectral.quasi_stationary(c, B)
        ex = hitting.stationary_exit(c, B)
        out.append((B.members, B.pi_mass, qs.lam, ex))
    return out


def _bitmask_hex(members) -> str:
    m = 0
    for i in members:
        m |= 1 << int(i)
    return hex(m)


# --- suite: reversible_core ---------------------------------------------------

def _suite_reversible_core(config: Config, options: dict):
    records = []
    ratios = []
    roster = _roster_reversible(**options.get("roster", {}))
    for label, c in roster:
        trel = spectral.relaxation_time(c)
        hit = hitting.t_H_pi(c, config=config)
        records.append(VerificationRecord(
            id="hitting_vs_relaxation.upper", chain=label, lhs=hit.value,
            rhs=2.0 * trel, tolerance=1e-9,
            witness=_bitmask_hex(hit.argmax.members)))
        records.append(VerificationRecord(
            id="hitting_vs_relaxation.lower", chain=label,
            lhs=NESTED_EXIT_FLOOR * trel, rhs=hit.value, tolerance=1e-9))
        ratios.append(hit.value / trel)
        stats = _connected_stats(c, config)
        # near-optimal half set: best inverse escape rate over mass <= 1/2
        lam_half = min(s[2] for s in stats if s[1] <= 0.5 + 1e-12)
        inv = 1.0 / lam_half
        records.append(VerificationRecord(
            id="half_set_window.lower", chain=label, lhs=trel, rhs=inv,
            tolerance=1e-8))
        records.append(VerificationRecord(
            id="half_set_window.upper", chain=label, lhs=inv, rhs=2.0 * trel,
            tolerance=1e-8))
        # exit times never exceed the quasi-stationary expectation
        worst = max(s[3] - 1.0 / s[2] for s in stats)
        worst_B = max(stats, key=lambda s: s[3] - 1.0 / s[2])
        records.append(VerificationRecord(
            id="exit_below_qs.all_sets", chain=label, lhs=worst, rhs=0.0,
            tolerance=1e-9, witness=_bitmask_hex(worst_B[0])))
    # nested-exit theorem and the level-set lemma on the compact roster
    for label, c in _roster_small(options.get("nested_nmax", 10)):
        exit_memo: dict = {}

        def exit_of(members):
            if members not in exit_memo:
                exit_memo[members] = hitting._exit_value(c.P, c.pi, list(members))
            return exit_memo[members]

        worst = {k: math.inf for k in
                 ("nested.upper", "nested.lower", "level.u_is_2",
                  "level.mean_floor", "level.second_moment", "level.moment_cap",
                  "level.exit_floor")}
        arg = {k: None for k in worst}

        def tighten(key, margin, members):
            if margin < worst[key]:
                worst[key] = margin
                arg[key] = members

        for B in connected_subsets(c, max_mass=1.0, config=config):
            qs = spectral.quasi_stationary(c, B)
            nested = hitting.best_nested_exit(c, B, config=config)
            tighten("nested.upper", 1.0 / qs.lam + 1e-9 - nested.value, B.members)
            tighten("nested.lower", nested.value - NESTED_EXIT_FLOOR / qs.lam,
                    B.members)
            scan = levelset.find_L(c, B, config=config)
            tol_scale = 1e-9 if qs.lam >= 1e-12 else 1e-7
            tighten("level.u_is_2", tol_scale - abs(scan.U_at_L - 2.0), B.members)
            tighten("level.mean_floor",
                    scan.m1 - (20.0 / 17.0) * scan.L + 1e-9, B.members)
            tighten("level.second_moment",
                    tol_scale - abs(scan.m2 - 2.0 * scan.L * scan.m1), B.members)
            tighten("level.moment_cap",
                    4.0 * scan.L ** 2 + 1e-9 - scan.m2, B.members)
            tighten("level.exit_floor",
                    exit_of(scan.level_set.members) - NESTED_EXIT_FLOOR / qs.lam,
                    B.members)
        for key, margin in worst.items():
            records.append(VerificationRecord(
                id=key, chain=label, lhs=0.0, rhs=margin, tolerance=0.0,
                witness=_bitmask_hex(arg[key]) if arg[key] else None))
        # spectral mixture tail and the two-sided geometric-tail bound
        worst_mix = 0.0
        worst_ab = math.inf
        for B in connected_subsets(c, max_mass=1.0, config=config):
            mix = hitting.tail_mixture(c, B)
            ms = range(0, 51, 5)
            powers = hitting.survival_by_powers(c, B, ms)
            analytic = np.array([mix.tail(m) for m in ms])
            worst_mix = max(worst_mix, float(np.abs(powers - analytic).max()))
            for rec in hitting.tail_ratio_check(c, B, range(0, 31, 5),
                                                  config=config):
                worst_ab = min(worst_ab, rec.margin + rec.tolerance)
        records.append(VerificationRecord(
            id="mixture_tail.match", chain=label, lhs=worst_mix, rhs=0.0,
            tolerance=1e-10))
        records.append(VerificationRecord(
            id="tail_ratio.two_sided", chain=label, lhs=0.0, rhs=worst_ab,
            tolerance=0.0))
    summary = {"min_hitting_over_relaxation": min(ratios),
               "max_hitting_over_relaxation": max(ratios)}
    return records, summary


# --- suite: profiles -----------------------------------------------------------

def _profile_mixing_integral(prof_hat, pi_star: float) -> float:
    """Stieltjes integral of 1/(delta * profile) over [pi_star, 1/2]."""
    bps = list(prof_hat.breakpoints) + [math.inf]
    total = 0.0
    for i, bp in enumerate(prof_hat.breakpoints):
        lo = max(bp, pi_star)
        hi = min(bps[i + 1], 0.5)
        if hi > lo:
            total += math.log(hi / lo) / prof_hat.values[i]
    return total


def _suite_profiles(config: Config, options: dict):
    records = []
    for label, c in options.get("roster") or _roster_profiles():
        pi_star = float(c.pi.min())
        lam = spectral.spectral_profile(c, config=config)
        hat = spectral.spectral_profile_hat(c, config=config)
        phi = spectral.isoperimetric_profile(c, config=config)
        kap = hitting.kappa_profile(c, config=config)
        grid = sorted(set(lam.breakpoints) | set(hat.breakpoints)
                      | set(phi.breakpoints))
        grid = [d for d in grid if d <= 1.0 - pi_star + 1e-12 and d < 1.0]
        worst = {k: math.inf for k in
                 ("sandwich.lower", "sandwich.upper", "kappa.lower",
                  "kappa.upper", "cheeger.lower", "cheeger.upper")}
        for d in grid:
            lv, hv = lam.value_at(d), hat.value_at(d)
            pv, kv = phi.value_at(d), kap.value_at(d)
            worst["sandwich.lower"] = min(worst["sandwich.lower"], hv - lv)
            worst["sandwich.upper"] = min(worst["sandwich.upper"],
                                          lv / (1.0 - d) - hv)
            worst["kappa.lower"] = min(worst["kappa.lower"], kv - lv)
            worst["kappa.upper"] = min(worst["kappa.upper"],
                                       lv / NESTED_EXIT_FLOOR - kv)
            worst["cheeger.lower"] = min(worst["cheeger.lower"],
                                         lv - 0.5 * pv * pv)
            worst["cheeger.upper"] = min(worst["cheeger.upper"], pv - lv)
        for key, margin in worst.items():
            records.append(VerificationRecord(
                id=f"profile.{key}", chain=label, lhs=0.0, rhs=margin,
                tolerance=config.eigen_tol))
    # continuous-time sup-norm mixing bound through the profile integral
    # (valid without reversibility; exercised on the cycles too)
    mix_roster = (options.get("roster") or _roster_profiles()) + \
        [(f"biased_cycle({n})", biased_cycle(n))
         for n in options.get("laziness_cycles", (5, 6, 8))]
    for label, c in mix_roster:
        pi_star = float(c.pi.min())
        hat = spectral.spectral_profile_hat(c, config=config)
        eps = 0.25
        tmix = spectral.mixing_times(c, eps, mode="linf", time="continuous",
                                     config=config)
        sym_gap = spectral.additive_symmetrization_gap(c)
        bound = (8.0 * math.log(math.e / eps) / sym_gap
                 + 8.0 * _profile_mixing_integral(hat, pi_star))
        records.append(VerificationRecord(
            id="profile.mixing_bound", chain=label, lhs=tmix, rhs=bound,
            tolerance=1e-6))
    for n in options.get("laziness_cycles", (5, 6, 8)):
        c = biased_cycle(n)
        from .chain import build_chain
        from .geometric import adjoint_kernel
        S = build_chain(c.P @ adjoint_kernel(c, c.P), config=config)
        hat_p = spectral.spectral_profile_hat(c, config=config)
        hat_s = spectral.spectral_profile_hat(S, config=config)
        floor = float(c.P.diagonal().min())
        grid = [d for d in sorted(set(hat_p.breakpoints) | set(hat_s.breakpoints))
                if d < 1.0]
        margin = min(hat_s.value_at(d) - floor * hat_p.value_at(d) for d in grid)
        records.append(VerificationRecord(
            id="profile.laziness_floor", chain=f"biased_cycle({n})", lhs=0.0,
            rhs=margin, tolerance=config.eigen_tol))
    return records, {}


# --- suite: geometric -----------------------------------------------------------

def _geom_roster():
    return [
        ("lazy_path(3)", lazy_path(3)),
        ("two_state(0.3,0.7)", two_state(0.3, 0.7)),
        ("biased_cycle(5)", biased_cycle(5)),
        ("birth_death[n=6]", random_birth_death(6, 7000)),
        ("lazy_rw_graph[n=6]", lazy_rw_graph(random_connected_graph(6, 7100), 0.5)),
    ]


def _suite_geometric(config: Config, options: dict):
    records = []
    for label, c in options.get("roster") or _geom_roster():
        for m in (1, 2, 4):
            for k in (1, 2, 4):
                for rec in geometric.geom_identity_check(c, m, k, config=config):
                    rec.chain = f"{label};{rec.chain}"
                    records.append(rec)
        base = geometric.operator_norm_minus_pi(c, c.P).value
        Qk = c.P.copy()
        for k in (2, 3, 4):
            Qk = Qk @ c.P
            nk = geometric.operator_norm_minus_pi(c, Qk).value
            records.append(VerificationRecord(
                id=f"norm.submultiplicative@k={k}", chain=label, lhs=nk,
                rhs=base ** k, tolerance=1e-10))
        half = geometric.rel_geom(c, 0.5, config=config)
        tol = 20 * config.bisect_rtol
        for eps in (0.1, 1.0 / math.e, 0.3):
            lo = geometric.rel_geom(c, eps, config=config)
            hi = geometric.rel_geom(c, 1.0 - eps, config=config)
            records.append(VerificationRecord(
                id=f"relgeom.chain_lower@eps={eps:.4g}", chain=label,
                lhs=eps / (1 - eps) * lo, rhs=half, tolerance=tol * half))
            records.append(VerificationRecord(
                id=f"relgeom.chain_upper@eps={eps:.4g}", chain=label,
                lhs=half, rhs=(1 - eps) / eps * hi, tolerance=tol * hi))
        # restricted norms on a couple of subsets
        for B in list(connected_subsets(c, max_mass=0.7, config=config))[:3]:
            if len(B.members) < 2:
                continue
            for rec in geometric.restricted_norm_checks(c, B, 2.0, config=config):
                rec.chain = f"{label};{rec.chain}"
                records.append(rec)
        for rec in geometric.theorem3_check(c, config=config):
            rec.chain = f"{label};{rec.chain}"
            records.append(rec)
    for n in options.get("cycle_sizes", range(8, 65)):
        c = biased_cycle(int(n))
        for rec in geometric.theorem3_check(c, config=config):
            rec.chain = f"biased_cycle({n})"
            records.append(rec)
    return records, {}


# --- suite: pseudo-gap separation ----------------------------------------------

def _suite_pseudo_gap(config: Config, options: dict):
    bands = load_calibrated_bands()
    sizes = options.get("sizes", (16, 32, 64, 128))
    prod, ratio, avg_vs_ps = {}, {}, {}
    records = []
    for n in sizes:
        c = biased_cycle(int(n))
        ps = geometric.pseudo_gap(c, config=config)
        hit = hitting.t_H_pi(c, method="arcs", config=config)
        s = geometric.rel_geom(c, 1.0 / math.e, config=config)
        prod[n] = ps.gamma * hit.value ** 2
        ratio[n] = hit.value / s
        # recorded, not asserted: the time-averaged relaxation against the
        # power-based one (comparable up to a constant)
        avg_vs_ps[n] = s / ps.t_rel_ps
    for name, vals in (("gamma_times_thpi_sq", prod),
                       ("thpi_over_relgeom", ratio)):
        lo, hi = bands[f"cycle_{name}"]
        spread = max(vals.values()) / min(vals.values())
        records.append(VerificationRecord(
            id=f"pseudogap.{name}.band_width", chain=f"sizes={list(sizes)}",
            lhs=spread, rhs=10.0, tolerance=0.0,
            extra={str(k): v for k, v in vals.items()}))
        for n, v in vals.items():
            records.append(VerificationRecord(
                id=f"pseudogap.{name}.in_band", chain=f"biased_cycle({n})",
                lhs=lo, rhs=v, tolerance=0.0, extra={"hi": hi}))
            records.append(VerificationRecord(
                id=f"pseudogap.{name}.below_band_top", chain=f"biased_cycle({n})",
                lhs=v, rhs=hi, tolerance=0.0))
    summary = {"gamma_times_thpi_sq": {str(k): v for k, v in prod.items()},
               "thpi_over_relgeom": {str(k): v for k, v in ratio.items()},
               "relgeom_over_trelps": {str(k): v for k, v in avg_vs_ps.items()}}
    return records, summary


# --- suite: birth_death ----------------------------------------------------------

def _suite_birth_death(config: Config, options: dict):
    records = []
    max_ratio = 0.0
    n_chains = options.get("n_chains", 100)
    for s in range(n_chains):
        n = 3 + s % 48
        c = random_birth_death(n, 8000 + s)
        recs = birthdeath.bd_theorem_check(c, config=config,
                                           check_intervals=(n <= 30 and s % 5 == 0))
        for rec in recs:
            rec.chain = f"birth_death[{s},n={n}]"
            records.append(rec)
            if rec.id == "bd.lower":
                max_ratio = max(max_ratio, rec.extra.get("ratio", 0.0))
    for rec in birthdeath.bd_theorem_check(lazy_path(3), config=config):
        rec.chain = "lazy_path(3)"
        records.append(rec)
    # interval enumeration agrees with the generic connected enumeration
    for s, n in ((0, 8), (1, 11), (2, 14)):
        c = random_birth_death(n, 8500 + s)
        hit = hitting.t_H_pi(c, config=config)
        best = -math.inf
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                members = list(range(i - 1, j))
                if float(c.pi[members].sum()) > 0.5 + 1e-12:
                    continue
                best = max(best, hitting._exit_value(c.P, c.pi, members,
                                                     tridiag=True))
        records.append(VerificationRecord(
            id="bd.interval_equals_connected", chain=f"birth_death[n={n}]",
            lhs=abs(hit.value - best), rhs=0.0, tolerance=1e-10))
    return records, {"max_relaxation_over_t_star": max_ratio}


# --- suite: pendant_path ------------------------------------------------------

def _suite_pendant_path(config: Config, options: dict):
    bands = load_calibrated_bands()
    sizes = options.get("sizes", (512, 2048))
    seed = options.get("seed", 11)
    records = []
    rel_scaled = {}
    for n in sizes:
        ex = pendant_path_example(int(n), seed)
        audit = hitting.pendant_path_audit(ex, delta=0.1, samples=20,
                                             seed=seed + 1, config=config)
        lab = f"pendant_path(n={n})"
        records.append(VerificationRecord(
            id="example.path_rate_formula", chain=lab,
            lhs=abs(audit.lam_path - audit.lam_path_formula), rhs=0.0,
            tolerance=1e-8))
        records.append(VerificationRecord(
            id="example.monotone_rates", chain=lab,
            lhs=max(audit.lam_B_values), rhs=audit.lam_path,
            tolerance=config.eigen_tol))
        records.append(VerificationRecord(
            id="example.exit_cap", chain=lab, lhs=audit.max_exit,
            rhs=bands["pendant_exit_cap"], tolerance=0.0))
        records.append(VerificationRecord(
            id="example.hub_decomposition", chain=lab,
            lhs=audit.decomposition_residual, rhs=0.0,
            tolerance=1e-9 * max(1.0, audit.max_exit)))
        rel_scaled[n] = audit.rel_over_n23
    spread = max(rel_scaled.values()) / min(rel_scaled.values())
    records.append(VerificationRecord(
        id="example.relaxation_scaling_band", chain=f"sizes={list(sizes)}",
        lhs=spread, rhs=4.0, tolerance=0.0,
        extra={str(k): v for k, v in rel_scaled.items()}))
    lo, hi = bands["pendant_rel_over_n23"]
    for n, v in rel_scaled.items():
        records.append(VerificationRecord(
            id="example.relaxation_in_band", chain=f"pendant_path(n={n})", lhs=lo,
            rhs=v, tolerance=0.0, extra={"hi": hi}))
        records.append(VerificationRecord(
            id="example.relaxation_below_band_top", chain=f"pendant_path(n={n})",
            lhs=v, rhs=hi, tolerance=0.0))
    return records, {"rel_over_n23": {str(k): v for k, v in rel_scaled.items()}}


# --- suite: montecarlo_cross -------------------------------------------------------

def _suite_montecarlo_cross(config: Config, options: dict):
    trials = options.get("trials", 10_000)
    seed = options.get("seed", 42)
    records = []
    c = lazy_path(3)
    A = make_subset(c, [2])
    start = np.array([1.0, 0.0, 0.0])
    analytic = float(hitting.expected_hitting(c, A).expectations[0])
    est = montecarlo.simulate_hitting(c, start, A, trials, seed, cap=5000,
                                      config=config)
    records.append(VerificationRecord(
        id="mc.hitting_mean", chain="lazy_path(3)",
        lhs=abs(est.mean - analytic), rhs=est.halfwidth4, tolerance=0.0,
        extra={"analytic": analytic, "mean": est.mean}))
    est2 = montecarlo.simulate_hitting(c, start, A, trials, seed, cap=5000,
                                       config=config)
    records.append(VerificationRecord(
        id="mc.seed_determinism", chain="lazy_path(3)",
        lhs=0.0 if (est == est2) else 1.0, rhs=0.0, tolerance=0.0))
    B = make_subset(c, [0, 1])
    piB = np.zeros(3)
    piB[[0, 1]] = c.pi[[0, 1]] / B.pi_mass
    est3 = montecarlo.simulate_hitting(c, piB, make_subset(c, [2]), trials,
                                       seed + 1, cap=5000, config=config)
    analytic3 = hitting.stationary_exit(c, B)
    records.append(VerificationRecord(
        id="mc.stationary_exit", chain="lazy_path(3)",
        lhs=abs(est3.mean - analytic3), rhs=est3.halfwidth4, tolerance=0.0,
        extra={"analytic": analytic3}))
    # geometric-step law vs the resolvent row
    c5 = biased_cycle(5)
    t_avg = 4.0
    freq = montecarlo.simulate_geometric_step(c5, t_avg, 0, trials, seed + 2)
    row = geometric.geometric_average(c5, t_avg).matrix[0]
    tv = 0.5 * float(np.abs(freq - row).sum())
    records.append(VerificationRecord(
        id="mc.geometric_step_tv", chain="biased_cycle(5)", lhs=tv,
        rhs=5.0 * math.sqrt(c5.n / trials), tolerance=0.0))
    # quasi-stationary decay rate
    qs = spectral.quasi_stationary(c, B)
    dec = montecarlo.simulate_qs_decay(c, B, trials, seed + 3, kmax=25)
    records.append(VerificationRecord(
        id="mc.qs_decay_rate", chain="lazy_path(3)",
        lhs=abs(dec.rate - (-math.log(qs.beta))),
        rhs=0.05 * abs(math.log(qs.beta)), tolerance=0.0,
        extra={"rate": dec.rate, "expected": -math.log(qs.beta)}))
    # geometric law: survival at k=1 estimates beta within binomial noise
    surv1 = float(dec.survival[1])
    se = math.sqrt(qs.beta * (1 - qs.beta) / trials)
    records.append(VerificationRecord(
        id="mc.qs_survival_one_step", chain="lazy_path(3)",
        lhs=abs(surv1 - qs.beta), rhs=4.0 * se, tolerance=0.0))
    return records, {}


# --- runner --------------------------------------------------------------------

SUITES = {
    "reversible_core": _suite_reversible_core,
    "profiles": _suite_profiles,
    "geometric": _suite_geometric,
    "pseudo_gap": _suite_pseudo_gap,
    "birth_death": _suite_birth_death,
    "pendant_path": _suite_pendant_path,
    "example3": _suite_pendant_path,  # legacy alias
    "montecarlo_cross": _suite_montecarlo_cross,
}


def run_suite(name: str, options: dict | None = None,
              config: Config = DEFAULT, threads: int = 1) -> SuiteReport:
    """Execute one suite; deterministic for a fixed options dict."""
    if name not in SUITES:
        raise ConfigInvalid(f"unknown suite {name!r}; have {sorted(SUITES)}")
    options = dict(options or {})
    if "enum_cap" in options:
        config = with_enum_cap(int(options.pop("enum_cap")))
    if "roster" in options and options["roster"] is not None \
            and len(options["roster"]) == 0:
        raise ConfigInvalid("empty chain roster")
    if threads > 1 and name == "geometric":
        records, summary = _run_geometric_parallel(options, config, threads)
    else:
        records, summary = SUITES[name](config, options)
    summary = dict(summary)
    summary["n_records"] = len(records)
    summary["n_failed"] = sum(0 if r.passed else 1 for r in records)
    return SuiteReport(suite=name, records=records, summary=summary)


def _run_geometric_parallel(options, config, threads):
    """Chain-level thread pool for the geometric suite, order-stable.

    Other suites carry cross-chain summaries and run sequentially; every
    record computation here is pure, so threading only changes wall time.
    """
    roster = options.get("roster") or _geom_roster()
    cycle_sizes = list(options.get("cycle_sizes", range(8, 65)))

    def one_chain(item):
        return _suite_geometric(config, {"roster": [item], "cycle_sizes": ()})[0]

    def one_cycle(n):
        out = []
        for rec in geometric.theorem3_check(biased_cycle(int(n)), config=config):
            rec.chain = f"biased_cycle({n})"
            out.append(rec)
        return out

    records = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for recs in pool.map(one_chain, roster):
            records.extend(recs)
        for recs in pool.map(one_cycle, cycle_sizes):
            records.extend(recs)
    return records, {}


# --- report emission -------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return json.dumps(x)


def _record_doc(r: VerificationRecord) -> str:
    extra = ",".join(f"{json.dumps(k)}:{_fmt(v)}"
                     for k, v in sorted(r.extra.items()))
    parts = [
        f'"id":{json.dumps(r.id)}',
        f'"chain":{json.dumps(r.chain)}',
        f'"lhs":{_fmt(r.lhs)}',
        f'"rhs":{_fmt(r.rhs)}',
        f'"margin":{_fmt(r.margin)}',
        f'"tolerance":{_fmt(r.tolerance)}',
        f'"pass":{json.dumps(r.passed)}',
        f'"witness":{json.dumps(r.witness)}',
        '"extra":{%s}' % extra,
    ]
    return "{" + ",".join(parts) + "}"


def report_emit(report: SuiteReport, fmt: str = "json", path=None) -> str:
    """Serialize a report with stable field order and 17-digit floats."""
    if fmt == "json":
        summary = ",".join(f"{json.dumps(k)}:{_fmt(v)}" if not isinstance(v, dict)
                           else f"{json.dumps(k)}:" + "{" + ",".join(
                               f"{json.dumps(k2)}:{_fmt(v2)}"
                               for k2, v2 in sorted(v.items())) + "}"
                           for k, v in sorted(report.summary.items()))
        body = ",\n  ".join(_record_doc(r) for r in report.records)
        text = ('{"schema_version":%d,"suite":%s,"summary":{%s},\n'
                ' "records":[\n  %s\n]}\n'
                % (SCHEMA_VERSION, json.dumps(report.suite), summary, body))
    elif fmt == "csv":
        lines = ["id,chain,lhs,rhs,margin,tolerance,pass,witness"]
        for r in report.records:
            lines.append(",".join([
                json.dumps(r.id), json.dumps(r.chain), _fmt(r.lhs),
                _fmt(r.rhs), _fmt(r.margin), _fmt(r.tolerance),
                str(r.passed).lower(),
                json.dumps(r.witness) if r.witness else '""']))
        text = "\n".join(lines) + "\n"
    else:
        raise ConfigInvalid(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise IOFailure(str(exc)) from exc
    return text


def parse_report(path) -> SuiteReport:
    with open(path) as fh:
        doc = json.load(fh)
    records = []
    for rd in doc["records"]:
        records.append(VerificationRecord(
            id=rd["id"], chain=rd["chain"], lhs=rd["lhs"], rhs=rd["rhs"],
            tolerance=rd["tolerance"], witness=rd["witness"],
            extra=rd.get("extra", {})))
    return SuiteReport(suite=doc["suite"], records=records,
                       summary=doc.get("summary", {}))
