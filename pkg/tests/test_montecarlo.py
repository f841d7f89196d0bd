import math

import numpy as np
import pytest

from spechit import (biased_cycle, expected_hitting, lazy_path, make_subset,
                     quasi_stationary, stationary_exit, two_state)
from spechit.errors import BadParameter, CapSaturated, InsufficientSurvival
from spechit.geometric import geometric_average
from spechit.montecarlo import (simulate_geometric_step, simulate_hitting,
                                simulate_qs_decay)

TRIALS = 10_000


class TestSimulateHitting:
    def test_agrees_with_solve(self):
        c = lazy_path(3)
        A = make_subset(c, [2])
        analytic = expected_hitting(c, A).expectations[0]
        est = simulate_hitting(c, np.array([1.0, 0, 0]), A, TRIALS, seed=7,
                               cap=5000)
        assert abs(est.mean - analytic) <= 4 * est.stderr

    def test_start_inside_target(self):
        c = lazy_path(3)
        est = simulate_hitting(c, np.array([0, 0, 1.0]), make_subset(c, [2]),
                               100, seed=1, cap=10)
        assert est.mean == 0.0

    def test_stationary_exit_agreement(self):
        c = lazy_path(3)
        B = make_subset(c, [0, 1])
        start = np.zeros(3)
        start[[0, 1]] = c.pi[[0, 1]] / B.pi_mass
        est = simulate_hitting(c, start, make_subset(c, [2]), TRIALS, seed=3,
                               cap=5000)
        assert abs(est.mean - stationary_exit(c, B)) <= 4 * est.stderr

    def test_seed_determinism(self):
        c = lazy_path(3)
        A = make_subset(c, [2])
        start = np.array([1.0, 0, 0])
        a = simulate_hitting(c, start, A, 2000, seed=11, cap=5000)
        b = simulate_hitting(c, start, A, 2000, seed=11, cap=5000)
        assert a == b

    def test_cap_saturation_raises(self):
        c = two_state(0.01, 0.01)
        with pytest.raises(CapSaturated):
            simulate_hitting(c, np.array([1.0, 0.0]), make_subset(c, [1]),
                             500, seed=5, cap=3)

    def test_invalid_start(self):
        c = lazy_path(3)
        with pytest.raises(BadParameter):
            simulate_hitting(c, np.array([0.5, 0.2, 0.2]), make_subset(c, [2]),
                             10, seed=0)


class TestGeometricStep:
    def test_t_one_point_mass(self):
        c = biased_cycle(5)
        freq = simulate_geometric_step(c, 1.0, 2, 500, seed=4)
        assert freq.tolist() == [0, 0, 1.0, 0, 0]

    def test_matches_resolvent_row(self):
        c = biased_cycle(5)
        trials = 100_000
        freq = simulate_geometric_step(c, 4.0, 0, trials, seed=9)
        row = geometric_average(c, 4.0).matrix[0]
        tv = 0.5 * float(np.abs(freq - row).sum())
        assert tv <= 5.0 * math.sqrt(c.n / trials)
        assert tv <= 0.02

    def test_lag_mean(self):
        # mean of the geometric lag is t - 1
        t = 3.5
        key = np.array([np.uint64(13), np.uint64(2)], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        etas = rng.geometric(1.0 / t, size=TRIALS) - 1
        se = etas.std(ddof=1) / math.sqrt(TRIALS)
        assert abs(etas.mean() - (t - 1)) <= 4 * se

    def test_deterministic(self):
        c = biased_cycle(4)
        a = simulate_geometric_step(c, 2.5, 1, 3000, seed=2)
        b = simulate_geometric_step(c, 2.5, 1, 3000, seed=2)
        assert np.array_equal(a, b)


class TestQsDecay:
    def test_rate_matches_escape(self):
        c = lazy_path(3)
        B = make_subset(c, [0, 1])
        qs = quasi_stationary(c, B)
        dec = simulate_qs_decay(c, B, 20_000, seed=5, kmax=25)
        expected = -math.log(qs.beta)
        assert abs(dec.rate - expected) <= 0.05 * expected

    def test_survival_one_step(self):
        c = lazy_path(3)
        B = make_subset(c, [0, 1])
        qs = quasi_stationary(c, B)
        dec = simulate_qs_decay(c, B, 20_000, seed=6, kmax=10)
        se = math.sqrt(qs.beta * (1 - qs.beta) / 20_000)
        assert abs(dec.survival[1] - qs.beta) <= 4 * se

    def test_memorylessness(self):
        # P[T > j + k] / P[T > j] stays near beta^k from the killed law
        c = lazy_path(3)
        B = make_subset(c, [0, 1])
        qs = quasi_stationary(c, B)
        dec = simulate_qs_decay(c, B, 50_000, seed=8, kmax=12)
        for j, k in ((2, 3), (4, 4)):
            ratio = dec.survival[j + k] / dec.survival[j]
            assert ratio == pytest.approx(qs.beta ** k, rel=0.1)

    def test_pi_start_slope_from_mixture(self):
        # from the conditioned stationary start the tail is a mixture whose
        # late slope is still the leading rate
        c = lazy_path(3)
        B = make_subset(c, [0, 1])
        qs = quasi_stationary(c, B)
        dec = simulate_qs_decay(c, B, 50_000, seed=9, kmax=25, start="pi_B")
        assert abs(dec.rate - (-math.log(qs.beta))) <= \
            0.08 * abs(math.log(qs.beta))

    def test_insufficient_survival(self):
        c = two_state(0.9, 0.9)
        B = make_subset(c, [0])
        with pytest.raises(InsufficientSurvival):
            simulate_qs_decay(c, B, 200, seed=1, kmax=39)
