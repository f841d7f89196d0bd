"""Acceptance suite: every criterion runs at its stated tolerance and
prints one pass/fail line.

The verification suites are executed once each (module-scoped) and the
criteria assert on their records:

  1  two-sided comparison of t_H_pi with the relaxation time
  2  half-mass escape-rate window and the exit-time upper bound
  3  nested-exit window and the distinguished-level invariants
  4  profile sandwiches, mixing bound, laziness floor
  5  spectral-mixture tail match and the two-sided tail ratio
  6  geometric renewal identity, norm chains, and the t_H_pi bounds
  7  pseudo-gap separation bands on biased cycles
  8  birth-death statistic bounds and interval reductions
  9  pendant-path example: rates, scaling band, exit cap
 10  Monte-Carlo cross-validation and seed determinism
"""

import time

from spechit import harness

RUNTIME_CAPS = {
    "reversible_core": 180.0,
    "profiles": 120.0,
    "geometric": 180.0,
    "pseudo_gap": 120.0,
    "birth_death": 120.0,
    "pendant_path": 240.0,
    "montecarlo_cross": 120.0,
}

_cache: dict = {}


def suite(name):
    if name not in _cache:
        t0 = time.time()
        report = harness.run_suite(name)
        _cache[name] = (report, time.time() - t0)
    return _cache[name]


def check(criterion, name, report, ids, runtime, cap):
    recs = [r for r in report.records
            if any(r.id.startswith(prefix) for prefix in ids)]
    assert recs, f"criterion {criterion}: no records matched {ids}"
    failed = [r for r in recs if not r.passed]
    worst = min(r.margin + r.tolerance for r in recs)
    status = "PASS" if not failed and runtime < cap else "FAIL"
    print(f"[criterion {criterion:>2}] {status} {name}: "
          f"{len(recs)} records, {len(failed)} failed, "
          f"worst slack {worst:.3e}, runtime {runtime:.1f}s (cap {cap:.0f}s)",
          flush=True)
    for r in failed[:5]:
        print(f"    FAIL {r.id} [{r.chain}] lhs={r.lhs:.9g} rhs={r.rhs:.9g}",
              flush=True)
    assert not failed, f"criterion {criterion}: {len(failed)} records failed"
    assert runtime < cap, f"criterion {criterion}: runtime {runtime:.1f}s"


def test_criterion_01_hitting_vs_relaxation():
    report, dt = suite("reversible_core")
    check(1, "t_H_pi within [4.7e-5, 2] x t_rel", report,
          ["hitting_vs_relaxation."], dt, RUNTIME_CAPS["reversible_core"])
    ratio = report.summary["min_hitting_over_relaxation"]
    print(f"    min observed t_H_pi / t_rel = {ratio:.4f}", flush=True)
    assert ratio > 0.1


def test_criterion_02_half_set_window_and_exit_bound():
    report, dt = suite("reversible_core")
    check(2, "half-mass window and exit <= 1/lambda", report,
          ["half_set_window.", "exit_below_qs."], dt,
          RUNTIME_CAPS["reversible_core"])


def test_criterion_03_nested_exit_and_level_sets():
    report, dt = suite("reversible_core")
    check(3, "nested-exit window and level-set invariants", report,
          ["nested.", "level."], dt, RUNTIME_CAPS["reversible_core"])


def test_criterion_04_profiles():
    report, dt = suite("profiles")
    check(4, "profile sandwiches, mixing bound, laziness floor", report,
          ["profile."], dt, RUNTIME_CAPS["profiles"])


def test_criterion_05_mixture_and_tail_ratio():
    report, dt = suite("reversible_core")
    check(5, "mixture tail match and two-sided tail ratio", report,
          ["mixture_tail.", "tail_ratio."], dt,
          RUNTIME_CAPS["reversible_core"])


def test_criterion_06_geometric():
    report, dt = suite("geometric")
    check(6, "renewal identity, norm chains, t_H_pi vs rel_geom", report,
          ["geom_identity.", "norm.", "relgeom.", "restricted.",
           "geom_hitting."], dt, RUNTIME_CAPS["geometric"])


def test_criterion_07_pseudo_gap_separation():
    report, dt = suite("pseudo_gap")
    check(7, "pseudo-gap separation bands", report, ["pseudogap."], dt,
          RUNTIME_CAPS["pseudo_gap"])
    print(f"    gamma*thpi^2 by n: "
          f"{report.summary['gamma_times_thpi_sq']}", flush=True)


def test_criterion_08_birth_death():
    report, dt = suite("birth_death")
    check(8, "birth-death statistic and interval reductions", report,
          ["bd."], dt, RUNTIME_CAPS["birth_death"])
    print(f"    max observed t_rel / t_star = "
          f"{report.summary['max_relaxation_over_t_star']:.4f}", flush=True)


def test_criterion_09_pendant_path_example():
    report, dt = suite("pendant_path")
    check(9, "pendant-path rates, scaling band, exit cap", report,
          ["example."], dt, RUNTIME_CAPS["pendant_path"])


def test_criterion_10_montecarlo_cross():
    report, dt = suite("montecarlo_cross")
    check(10, "Monte-Carlo agreement and determinism", report, ["mc."], dt,
          RUNTIME_CAPS["montecarlo_cross"])
